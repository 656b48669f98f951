"""Quick look at one run: derived parameters, squeezing and the leading modes."""
import sys
sys.path.insert(0, ".")

from squeezetools.runner.pipeline import run_simulation
from squeezetools.utils.config import load_config

config_path = sys.argv[1] if len(sys.argv) > 1 else "configs/reference_ring.json"
energy = float(sys.argv[2]) if len(sys.argv) > 2 else None
config = load_config(config_path)
r = run_simulation(config, energy)

print(f"=== RUN: {config_path} @ {r.energy * 1e12:.4g} pJ ===")
print(f"Grid: {r.grid.n_points} points, dt = {r.grid.dt * 1e12:.3f} ps")
print(f"Lambda = {r.coupling:.4f} rad/s | beta_D = {r.drive.beta_d:.4e} | P_D = {r.drive.power * 1e3:.1f} mW")
for name, rates in (("drive", r.drive_rates), ("signal", r.signal_rates), ("pump", r.pump_rates)):
    print(f"  {name:7s} Q_L = {rates.q_loaded:.3e}  Gamma = {rates.gamma_total:.4e} 1/s  dwell = {rates.dwell_time * 1e9:.4f} ns")
print()

s = r.squeezing
print(f"V- = {s.v_squeezed_db:+.3f} dB | V+ = {s.v_antisqueezed_db:+.3f} dB | pure V+ = {s.v_anti_pure_db:+.3f} dB")
print(f"Pulse FWHM = {s.pulse_fwhm * 1e9:.3f} ns{'  [multi-peak]' if s.multi_peak else ''}")
k = r.decomposition.schmidt_number
print(f"K = {k:.5f}" if k is not None else "K undefined (vacuum)")
print()

for i, m in enumerate(r.decomposition.modes):
    t = r.thermal[i]
    print(f"  mode {i}: n = {m.n_lambda:.4e}  |m| = {abs(m.m_lambda):.4e}  r_pure = {m.r_pure:.4f}"
          f"  n_bar_W = {t.n_bar_williamson:.3e}  r'_W = {t.r_prime_williamson:.4f}")
print()

for key, value in sorted(r.diagnostics.items()):
    print(f"  {key:28s} {value:.6g}")
