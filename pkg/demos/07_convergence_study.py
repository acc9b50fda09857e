"""Truncation-schedule study: how fast does everything converge?

For each (delta, n) the harness picks the schedule (epsilon, N), builds
approximate norming coefficients, measures their gap and the kernel gap
against exact data, and reconstructs the potential.  The kernel-gap constant
is calibrated once on the free case; the primitive (H^-1 style) error of the
reconstruction should fall as n grows.
"""

import tempfile
from pathlib import Path

from qrecon.pipeline import convergence_experiment, load_config

outdir = Path(tempfile.mkdtemp(prefix="qrecon_conv_"))

free_cfg = load_config(None, [
    "converge.deltas=0.2 0.05",
    "converge.ns=5 10 20",
    "converge.forward_m=2048",
    "converge.kernel_m=128",
])
print("== free case (calibrates the kernel-gap constant) ==")
rows = convergence_experiment(free_cfg, outdir / "free")
C = rows[0]["kernel_bound_C"]
print("delta   n   epsilon      N        alpha gap   kernel gap  h1 proxy")
for r in rows:
    print(f"{r['delta']:5.2f} {r['n']:4d}  {r['epsilon']:.3e}  {r['N']:<8d} "
          f"{r['alpha_gap_max']:.3e}  {r['kernel_gap']:.3e}  {r['h1_proxy']:.4f}")
print(f"calibrated kernel-bound constant C = {C:.3f}")

q5_cfg = load_config(None, [
    "simulate.q_kind=constant", "simulate.q_value=5",
    "converge.deltas=0.05",
    "converge.ns=10 20 40",
    "converge.forward_m=2048",
    "converge.kernel_m=256",
])
print("\n== q = 5 under the same schedules ==")
rows = convergence_experiment(q5_cfg, outdir / "q5", kernel_C=C)
print("delta   n   epsilon      N          alpha gap   kernel gap  h1 proxy  bound ok")
for r in rows:
    print(f"{r['delta']:5.2f} {r['n']:4d}  {r['epsilon']:.3e}  {r['N']:<10d} "
          f"{r['alpha_gap_max']:.3e}  {r['kernel_gap']:.3e}  {r['h1_proxy']:.4f}   "
          f"{r['kernel_bound_ok']}")
print(f"\nreports written under {outdir}")
