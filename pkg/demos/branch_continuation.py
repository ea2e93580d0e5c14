"""Continue the logistic seed in the delay and compare both ends."""

from delayorbits import fields as vf
from delayorbits.continuation import BranchPoint, continue_both
from delayorbits.orbit import find_seed_orbit
from delayorbits.section import SectionProblem

field = vf.logistic()
x0, rep = find_seed_orbit(field, [1.5], K=24)
print("seed verdict:", rep.verdict.value)

p = SectionProblem(field, 24)
branch = continue_both(p, BranchPoint(0.0, x0), -0.2, 0.2)
print(f"{len(branch)} points, tau in {branch.tau_range}, {branch.termination_reason}")
for pt in branch.points[:: max(1, len(branch) // 8)]:
    k = pt.certificate["kernel"]
    print(f"  tau={pt.tau:+.4f}  |x|_1={pt.x.sobolev_norm(1):.6f}  "
          f"kernel dim {k['kernel_dim_full']}  tau component {k['kernel_tau_component']:.3f}")
