"""SqueezeTools - pulsed squeezed-light simulator.

Run: python main.py simulate --config configs/reference_ring.json --out out/
"""

import sys
from pathlib import Path

# Ensure package is importable when running from project root
sys.path.insert(0, str(Path(__file__).parent))

from squeezetools.cli import main

if __name__ == "__main__":
    sys.exit(main())
