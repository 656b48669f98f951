"""SqueezeTools - pulsed squeezed-light simulator for dual-pumped microresonators."""
