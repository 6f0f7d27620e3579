"""Pick measurement strengths that keep the per-shot estimator bounded.

A projective first measurement makes the generalized eigenvalues blow up
for some correlators, so the informative circuit needs a weak first A.
This script searches the strength box for each quasiprobability entry and
reports the optimum in units of pi/2, along with the worst-case per-shot
magnitude it achieves.
"""
from otocqpd.optimize import QpdTarget, StrengthConfig, minimize, objective_max_abs

HALF_PI = 3.141592653589793 / 2

target = QpdTarget((0, 0, 0, 0), "re")
res = minimize(target)
print(f"{target}: argmin {[round(float(x), 4) for x in res.argmin.in_units_of_half_pi()]}, max|value| {res.objective:.4f}")
print(f"  {len(res.trace)} accepted steps; grid start {res.trace[0][1]:.4f}")

# how the objective grows as the first measurement approaches projective
for u in (0.5, 0.67, 0.8, 0.9, 0.99):
    cfg = StrengthConfig(u * HALF_PI, HALF_PI, HALF_PI, HALF_PI)
    print(f"  phi_a = {u:.2f} pi/2 -> {objective_max_abs(target, cfg):8.3f}")

for bits in ((0, 1, 1, 0), (1, 1, 1, 1)):
    for part in ("re", "im"):
        t = QpdTarget(bits, part)
        r = minimize(t)
        print(f"{t}: {[round(float(x), 4) for x in r.argmin.in_units_of_half_pi()]}  {r.objective:.4f}")
