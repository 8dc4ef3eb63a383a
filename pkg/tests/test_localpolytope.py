"""Strategy-quadruple, local-polytope, and no-go search tests.

Independent oracles: explicit brute-force loops for the consistency
equations and for behaviors, Monte Carlo sampling for mixture behaviors, and
the CHSH facet values recomputed from raw correlator arithmetic. The frozen
best-distance values for the uniform-alphabet search were computed with a
standalone enumerator before this module was written.
"""

import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import chronobell as cb

SQRT2 = math.sqrt(2.0)

# distance of the closest uniform-weight consistent quadruple to the singlet
# CHSH-optimal behavior, per alphabet size (standalone enumeration)
FROZEN_BEST_DISTANCE = {
    1: 0.9267766952966369,
    2: 0.4267766952966369,
    3: 0.2601100286299702,
    4: 0.1767766952966369,
}


def A(deg):
    return cb.BlochSetting.from_angle(deg, "A")


def B(deg):
    return cb.BlochSetting.from_angle(deg, "B")


def singlet_target():
    return cb.quantum_behavior(cb.make_singlet(), A(0), A(90), B(45), B(-45))


def oracle_behavior_of_quadruple(q, chronology):
    """Brute-force loop over (a, b, lambda), no shared code with the library."""
    probs = np.zeros((2, 2, 2, 2))
    for a, b in itertools.product(range(2), range(2)):
        for lam in range(q.alphabet_size):
            if chronology == "AB":
                alpha = int(q.first_ab[a, lam])
                beta = int(q.second_ab[a, b, lam])
            else:
                beta = int(q.first_ba[b, lam])
                alpha = int(q.second_ba[b, a, lam])
            probs[a, b, (1 - alpha) // 2, (1 - beta) // 2] += q.weights[lam]
    return probs


class TestLocalModel:
    def test_validation(self):
        with pytest.raises(ValueError):
            cb.LocalModel(np.zeros((2, 2)), np.ones((2, 2)), np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            cb.LocalModel.uniform([[1, 2]], [[1, 1]])

    def test_weights_must_be_distribution(self):
        ones = np.ones((2, 2), dtype=np.int8)
        with pytest.raises(ValueError):
            cb.LocalModel(ones, ones, np.array([0.7, 0.7]))
        with pytest.raises(ValueError):
            cb.LocalModel(ones, ones, np.array([-0.5, 1.5]))


class TestCovarianceConstraints:
    def test_local_construction_holds(self, rng):
        for size in (1, 2, 4):
            q = cb.StrategyQuadruple.from_local(cb.LocalModel.random(rng, size))
            assert cb.check_covariance_constraints(q).holds

    def test_remote_setting_dependence_is_witnessed(self, rng):
        base = cb.StrategyQuadruple.from_local(cb.LocalModel.random(rng, 2))
        second_ab = np.array(base.second_ab, dtype=np.int8)
        second_ab[0, 0, 0] = -second_ab[1, 0, 0]  # B's answer now depends on a
        tampered = cb.StrategyQuadruple(
            base.first_ab, second_ab, base.first_ba, base.second_ba, base.weights
        )
        report = cb.check_covariance_constraints(tampered)
        assert not report.holds
        assert any(v.equation == "beta_consistency" for v in report.violations)

    def test_matches_bruteforce_on_random_quadruples(self, rng):
        for _ in range(25):
            q = cb.StrategyQuadruple.random(rng, 2)
            expected = []
            for a, b, lam in itertools.product(range(2), range(2), range(2)):
                if q.first_ab[a, lam] != q.second_ba[b, a, lam]:
                    expected.append(("alpha_consistency", a, b, lam))
                if q.second_ab[a, b, lam] != q.first_ba[b, lam]:
                    expected.append(("beta_consistency", a, b, lam))
            report = cb.check_covariance_constraints(q)
            got = [(v.equation, v.a, v.b, v.lam) for v in report.violations]
            assert got == expected
            assert report.holds == (not expected)


class TestReduction:
    def test_behavior_equal_under_both_chronologies(self, rng):
        for size in (1, 2, 3, 4):
            q = cb.StrategyQuadruple.from_local(cb.LocalModel.random(rng, size))
            local = cb.reduce_to_local(q)
            p_ab = cb.behavior_of(q, "AB").probs
            p_ba = cb.behavior_of(q, "BA").probs
            p_local = cb.behavior_of(local).probs
            assert np.array_equal(p_ab, p_ba)
            assert np.array_equal(p_ab, p_local)

    def test_matches_bruteforce_enumeration(self, rng):
        q = cb.StrategyQuadruple.from_local(cb.LocalModel.random(rng, 4))
        for chronology in ("AB", "BA"):
            expected = oracle_behavior_of_quadruple(q, chronology)
            assert_allclose(cb.behavior_of(q, chronology).probs, expected, atol=1e-15)

    def test_unconstrained_rejected(self, rng):
        while True:
            q = cb.StrategyQuadruple.random(rng, 2)
            if not cb.check_covariance_constraints(q).holds:
                break
        with pytest.raises(cb.NotReducibleError):
            cb.reduce_to_local(q)


class TestBehaviorOf:
    def test_constant_responders(self):
        model = cb.LocalModel.uniform([[1], [1]], [[-1], [-1]])
        behavior = cb.behavior_of(model)
        for a, b in itertools.product(range(2), range(2)):
            assert behavior.probs[a, b, 0, 1] == 1.0

    def test_flipped_twin_mixture_has_uniform_marginals(self, rng):
        f = rng.choice([1, -1], size=(2, 1))
        g = rng.choice([1, -1], size=(2, 1))
        model = cb.LocalModel.uniform(np.hstack([f, -f]), np.hstack([g, -g]))
        behavior = cb.behavior_of(model)
        marg_a = behavior.probs.sum(axis=3)
        marg_b = behavior.probs.sum(axis=2)
        assert_allclose(marg_a, 0.5, atol=1e-15)
        assert_allclose(marg_b, 0.5, atol=1e-15)

    def test_matches_monte_carlo(self, rng):
        model = cb.LocalModel(
            rng.choice([1, -1], size=(2, 3)),
            rng.choice([1, -1], size=(2, 3)),
            np.array([0.5, 0.3, 0.2]),
        )
        behavior = cb.behavior_of(model)
        samples = 100_000
        lam = rng.choice(3, size=samples, p=model.weights)
        for a, b in itertools.product(range(2), range(2)):
            alpha = model.responses_a[a, lam]
            beta = model.responses_b[b, lam]
            for i, ao in enumerate((1, -1)):
                for j, bo in enumerate((1, -1)):
                    freq = np.mean((alpha == ao) & (beta == bo))
                    assert abs(freq - behavior.probs[a, b, i, j]) < 0.01

    def test_quadruple_requires_chronology(self, rng):
        q = cb.StrategyQuadruple.random(rng, 2)
        with pytest.raises(ValueError):
            cb.behavior_of(q)

    def test_rejects_other_types(self):
        with pytest.raises(TypeError):
            cb.behavior_of("not a model")


class TestBehaviorVector:
    def test_validation_shape(self):
        with pytest.raises(ValueError):
            cb.BehaviorVector(np.zeros((2, 2, 2)))

    def test_validation_normalization(self):
        with pytest.raises(ValueError):
            cb.BehaviorVector(np.full((2, 2, 2, 2), 0.3))

    def test_validation_negative(self):
        probs = np.full((2, 2, 2, 2), 0.25)
        probs[0, 0] = [[0.5, -0.1], [0.3, 0.3]]
        with pytest.raises(ValueError):
            cb.BehaviorVector(probs)

    def test_validation_signaling(self):
        # A's marginal depends on b: blocked
        probs = np.full((2, 2, 2, 2), 0.25)
        probs[0, 0] = [[0.5, 0.5], [0.0, 0.0]]  # P(alpha=+|a0,b0) = 1
        with pytest.raises(ValueError):
            cb.BehaviorVector(probs)

    def test_flat_roundtrip(self):
        behavior = singlet_target()
        again = cb.BehaviorVector.from_flat(behavior.flat)
        assert np.array_equal(again.probs, behavior.probs)


class TestQuantumBehavior:
    def test_singlet_reaches_tsirelson(self):
        facet = cb.chsh_facet_check(singlet_target())
        assert facet.max_facet_value == pytest.approx(2 * SQRT2, abs=1e-12)

    def test_product_state_equals_vertex(self):
        behavior = cb.quantum_behavior(
            cb.make_product_state(), A(0), A(0), B(0), B(0)
        )
        vertex = cb.behavior_of(cb.LocalModel.uniform([[1], [1]], [[1], [1]]))
        assert behavior.max_abs_diff(vertex) <= 1e-12

    def test_anticorrelated_block(self):
        behavior = cb.quantum_behavior(cb.make_singlet(), A(0), A(90), B(0), B(90))
        assert_allclose(behavior.probs[0, 0], [[0, 0.5], [0.5, 0]], atol=1e-12)

    def test_no_signaling_tight(self):
        assert singlet_target().no_signaling_defect() <= 1e-12


class TestDeterministicStrategies:
    def test_sixteen_vertices(self):
        assert len(cb.enumerate_deterministic_strategies()) == 16

    def test_zero_one_valued_and_no_signaling(self):
        for vertex in cb.enumerate_deterministic_strategies():
            assert np.all((vertex.probs == 0.0) | (vertex.probs == 1.0))
            assert vertex.no_signaling_defect() == 0.0

    def test_distinct(self):
        seen = {tuple(v.flat) for v in cb.enumerate_deterministic_strategies()}
        assert len(seen) == 16

    def test_local_bound_saturated(self):
        """Every vertex respects |CHSH| <= 2 and at least 8 achieve equality."""
        values = [
            cb.chsh_facet_check(v).max_facet_value
            for v in cb.enumerate_deterministic_strategies()
        ]
        assert max(values) == 2.0
        assert sum(1 for v in values if v == 2.0) >= 8


class TestFacetCheck:
    def test_vertices_exactly_two(self):
        for vertex in cb.enumerate_deterministic_strategies():
            assert cb.chsh_facet_check(vertex).max_facet_value == 2.0

    def test_singlet_two_sqrt_two(self):
        facet = cb.chsh_facet_check(singlet_target())
        assert not facet.local
        assert facet.max_facet_value == pytest.approx(2 * SQRT2, abs=1e-12)

    def test_uniform_behavior_zero(self):
        uniform = cb.BehaviorVector(np.full((2, 2, 2, 2), 0.25))
        facet = cb.chsh_facet_check(uniform)
        assert facet.local
        assert facet.max_facet_value == 0.0

    def test_eight_patterns(self):
        from chronobell.localpolytope import chsh_sign_patterns

        patterns = chsh_sign_patterns()
        assert len(patterns) == 8
        for signs in patterns:
            assert int(np.prod(signs)) == -1


class TestMembershipLp:
    def test_local_models_feasible_with_reconstruction(self, rng):
        for _ in range(20):
            model = cb.LocalModel(
                rng.choice([1, -1], size=(2, 3)),
                rng.choice([1, -1], size=(2, 3)),
                rng.dirichlet(np.ones(3)),
            )
            behavior = cb.behavior_of(model)
            result = cb.local_membership_lp(behavior)
            assert result.local
            assert result.reconstruction_error <= 1e-9
            vertex_flats = np.column_stack(
                [v.flat for v in cb.enumerate_deterministic_strategies()]
            )
            assert_allclose(vertex_flats @ result.weights, behavior.flat, atol=1e-9)

    def test_singlet_infeasible_with_certificate(self):
        result = cb.local_membership_lp(singlet_target())
        assert not result.local
        assert result.certificate is not None
        assert result.certificate.max_facet_value == pytest.approx(2 * SQRT2, abs=1e-12)

    def test_uniform_behavior_feasible(self):
        result = cb.local_membership_lp(cb.BehaviorVector(np.full((2, 2, 2, 2), 0.25)))
        assert result.local

    def test_boundary_vertex_feasible(self):
        for vertex in cb.enumerate_deterministic_strategies():
            assert cb.local_membership_lp(vertex).local


class TestOracleAgreement:
    def test_lp_and_facets_agree_on_random_behaviors(self, rng):
        """Quick version of the acceptance criterion (200 draws here)."""
        singlet = cb.make_singlet()
        vertices = cb.enumerate_deterministic_strategies()
        disagreements = 0
        for k in range(200):
            if k % 2 == 0:
                weights = rng.dirichlet(np.full(16, 0.3))
                flat = np.column_stack([v.flat for v in vertices]) @ weights
                behavior = cb.BehaviorVector.from_flat(flat)
            else:
                quantum = cb.quantum_behavior(
                    cb.random_pure_state(rng),
                    cb.random_setting(rng, "A"),
                    cb.random_setting(rng, "A"),
                    cb.random_setting(rng, "B"),
                    cb.random_setting(rng, "B"),
                )
                visibility = rng.random()
                flat = visibility * quantum.flat + (1 - visibility) * 0.25
                behavior = cb.BehaviorVector.from_flat(flat)
            lp_verdict = cb.local_membership_lp(behavior).local
            facet_verdict = cb.chsh_facet_check(behavior).local
            disagreements += lp_verdict != facet_verdict
        assert disagreements == 0


class TestExhaustiveSearch:
    def test_vertex_target_found_exactly(self):
        vertex = cb.enumerate_deterministic_strategies()[5]
        result = cb.exhaustive_nogo_search(1, vertex, tol=0.0)
        assert result.found
        assert result.best_distance == 0.0
        assert cb.behavior_of(result.best, "AB").max_abs_diff(vertex) == 0.0

    def test_singlet_not_reachable(self):
        result = cb.exhaustive_nogo_search(2, singlet_target(), tol=1e-6)
        assert not result.found
        assert result.max_chsh == 2.0
        assert result.n_candidates == 16 * 16

    def test_frozen_best_distances(self):
        target = singlet_target()
        for size, expected in FROZEN_BEST_DISTANCE.items():
            result = cb.exhaustive_nogo_search(size, target, tol=1e-6)
            assert result.best_distance == pytest.approx(expected, abs=1e-12)

    def test_best_distance_monotone_in_alphabet(self):
        target = singlet_target()
        distances = [
            cb.exhaustive_nogo_search(size, target, tol=1e-6).best_distance
            for size in (1, 2, 3, 4)
        ]
        assert all(d1 >= d2 for d1, d2 in zip(distances, distances[1:]))

    def test_best_candidate_is_consistent_quadruple(self):
        result = cb.exhaustive_nogo_search(2, singlet_target(), tol=1e-6)
        assert cb.check_covariance_constraints(result.best).holds

    def test_oversized_alphabet_rejected(self):
        with pytest.raises(cb.SearchSpaceError):
            cb.exhaustive_nogo_search(6, singlet_target(), tol=1e-6)
        with pytest.raises(cb.SearchSpaceError):
            cb.exhaustive_nogo_search(0, singlet_target(), tol=1e-6)
