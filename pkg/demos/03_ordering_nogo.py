"""Why no stored-randomness simulation can be order-invariant AND quantum.

Requiring identical outcomes under both measurement orders, for every
setting pair and every lambda, forces each second responder to ignore the
remote setting. What's left is a local model: a point in the convex hull of
16 deterministic strategies, where CHSH never exceeds 2. The singlet's
optimal behavior sits at 2*sqrt(2), outside the polytope - checked here by
an exhaustive search over consistent quadruples, by a simplex membership
test, and by the facet inequalities, all agreeing.
"""

import numpy as np

import chronobell as cb

rng = np.random.default_rng(7)

print("=== an ordering-consistent quadruple collapses to a local model ===")
quadruple = cb.StrategyQuadruple.from_local(cb.LocalModel.random(rng, 3))
print("consistency holds:", cb.check_covariance_constraints(quadruple).holds)
local = cb.reduce_to_local(quadruple)
p_ab = cb.behavior_of(quadruple, "AB")
p_ba = cb.behavior_of(quadruple, "BA")
p_loc = cb.behavior_of(local)
print("behavior AB == behavior BA:", np.array_equal(p_ab.probs, p_ba.probs))
print("behavior AB == reduced local model:", np.array_equal(p_ab.probs, p_loc.probs))

print()
print("=== a second responder that peeks at the remote setting breaks it ===")
tampered = np.array(quadruple.second_ab)
tampered[0, 0, 0] = -tampered[1, 0, 0]
broken = cb.StrategyQuadruple(
    quadruple.first_ab, tampered, quadruple.first_ba, quadruple.second_ba,
    quadruple.weights,
)
report = cb.check_covariance_constraints(broken)
print(f"holds: {report.holds}; first witness: {report.violations[0]}")

print()
print("=== exhaustive search against the singlet's optimal behavior ===")
target = cb.quantum_behavior(
    cb.make_singlet(),
    cb.BlochSetting.from_angle(0, "A"), cb.BlochSetting.from_angle(90, "A"),
    cb.BlochSetting.from_angle(45, "B"), cb.BlochSetting.from_angle(-45, "B"),
)
print("alphabet  candidates  best distance  max CHSH in search")
for size in (1, 2, 3, 4):
    result = cb.exhaustive_nogo_search(size, target, tol=1e-6)
    print(f"{size:8d}  {result.n_candidates:10d}  {result.best_distance:13.6f}"
          f"  {result.max_chsh:18.1f}")

print()
print("=== two independent membership verdicts on the target ===")
membership = cb.local_membership_lp(target)
facet = cb.chsh_facet_check(target)
print(f"simplex membership: local={membership.local}")
print(f"facet check:        local={facet.local}, max facet value "
      f"{facet.max_facet_value:.6f} > 2")

print()
print("=== the same machinery certifies genuinely local behaviors ===")
mixture = cb.behavior_of(cb.LocalModel.random(rng, 4))
membership = cb.local_membership_lp(mixture)
print(f"random local mixture: local={membership.local}, "
      f"reconstruction error {membership.reconstruction_error:.2e}")
