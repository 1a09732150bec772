"""Time-step convergence with dt = h.

The L1 formula is accurate to order 3 - alpha in time.  The ADI splitting
adds a term of order dt^(1+alpha), and Crank-Nicolson centering adds order
dt^2; on practical meshes these can dominate, so the observed rate depends
on alpha and on the range of dt.  The unfactored Crank-Nicolson reference
shows how much of the error comes from the splitting.
"""

import math

from fracwave import SchemeConfig, hnorm_error, paper_example, run
from fracwave.oracle import unfactored_cn_solve
from fracwave.study import StudySpec, run_study

for alpha in (1.8, 1.45):
    rows = run_study(StudySpec("paper-example", alpha, (10, 20, 40, 80), "h", ("l2",)))
    rates = [f"{r.rates['l2']:.3f}" for r in rows[1:]]
    print(f"alpha={alpha}: L2 errors {[f'{r.report.l2:.3e}' for r in rows]}, rates {rates}, 3-alpha={3 - alpha:.2f}")

print("\nADI against unfactored Crank-Nicolson, N=4, alpha=1.5")
problem = paper_example(1.5)
exact = problem.exact.at(1.0)
prev = None
for steps in (8, 16, 32, 64):
    cfg = SchemeConfig(problem, dt=1 / steps, nx=4)
    e_adi = hnorm_error(run(cfg).coeffs, exact, 0)
    e_cn = hnorm_error(unfactored_cn_solve(cfg).coeffs, exact, 0)
    print(f"dt=1/{steps:<3d} ADI {e_adi:.3e}  CN {e_cn:.3e}"
          + ("" if prev is None else f"  ADI rate {math.log2(prev / e_adi):.3f}"))
    prev = e_adi
