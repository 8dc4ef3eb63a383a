"""Two-qubit state, measurement, and CHSH tests.

The oracle used throughout is independent of the library's sequential
machinery: joint probabilities are computed as <psi| Pa (x) Pb |psi> with
explicitly constructed projector matrices (the operators act on distinct
factors, so no ordering enters the oracle at all).
"""

import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import chronobell as cb
from chronobell.quantum import measurement_operator, spin_projector

SQRT2 = math.sqrt(2.0)

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def oracle_projector(direction, outcome):
    nx, ny, nz = direction
    return 0.5 * (np.eye(2) + outcome * (nx * _SX + ny * _SY + nz * _SZ))


def oracle_joint(amps, dir_a, dir_b):
    """P(alpha, beta) from commuting projector products, index 0 <-> +1."""
    probs = np.zeros((2, 2))
    for i, a_out in enumerate((1, -1)):
        for j, b_out in enumerate((1, -1)):
            op = np.kron(oracle_projector(dir_a, a_out), oracle_projector(dir_b, b_out))
            probs[i, j] = np.real(np.conj(amps) @ (op @ amps))
    return probs


def A(deg):
    return cb.BlochSetting.from_angle(deg, "A")


def B(deg):
    return cb.BlochSetting.from_angle(deg, "B")


class TestStates:
    def test_singlet_amplitudes(self):
        expected = np.array([0.0, 1.0 / SQRT2, -1.0 / SQRT2, 0.0])
        assert_allclose(cb.make_singlet().amplitudes, expected, atol=1e-15)

    def test_singlet_norm(self):
        assert abs(cb.make_singlet().norm() - 1.0) <= 1e-12

    def test_unnormalized_rejected(self):
        with pytest.raises(cb.InvalidStateError):
            cb.TwoQubitState(np.array([1.0, 1.0, 0.0, 0.0]))

    def test_wrong_length_rejected(self):
        with pytest.raises(cb.InvalidStateError):
            cb.TwoQubitState(np.array([1.0, 0.0]))

    def test_product_state(self):
        state = cb.make_product_state((1, 0), (0, 1))
        assert_allclose(state.amplitudes, [0, 1, 0, 0])

    def test_amplitudes_immutable(self):
        state = cb.make_singlet()
        with pytest.raises(ValueError):
            state.amplitudes[0] = 1.0


class TestSettings:
    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            cb.BlochSetting(np.zeros(3), "A")

    def test_non_unit_rejected(self):
        with pytest.raises(ValueError):
            cb.BlochSetting(np.array([0.0, 0.0, 1.0 + 1e-6]), "A")

    @pytest.mark.parametrize(
        "deg,expected",
        [(0.0, [0, 0, 1]), (90.0, [1, 0, 0]), (45.0, [1 / SQRT2, 0, 1 / SQRT2])],
    )
    def test_from_angle(self, deg, expected):
        assert_allclose(A(deg).vector, expected, atol=1e-15)

    def test_party_coercion(self):
        assert cb.BlochSetting.from_angle(0, "B").party is cb.Party.B


class TestProjectorConvention:
    def test_against_eigendecomposition(self, rng):
        """P(n, s) must project onto the s-eigenspace of n.sigma."""
        for _ in range(20):
            setting = cb.random_setting(rng, "A")
            observable = setting.axis_operator()
            eigvals, eigvecs = np.linalg.eigh(observable)
            for outcome in (1, -1):
                column = eigvecs[:, np.argmin(np.abs(eigvals - outcome))]
                expected = np.outer(column, column.conj())
                assert_allclose(spin_projector(setting.vector, outcome), expected, atol=1e-12)

    def test_completeness(self, rng):
        setting = cb.random_setting(rng, "A")
        total = spin_projector(setting.vector, 1) + spin_projector(setting.vector, -1)
        assert_allclose(total, np.eye(2), atol=1e-15)

    def test_measurement_operator_party_placement(self):
        op_a = measurement_operator(A(0), 1)
        op_b = measurement_operator(B(0), 1)
        assert_allclose(op_a, np.diag([1, 1, 0, 0]), atol=1e-15)
        assert_allclose(op_b, np.diag([1, 0, 1, 0]), atol=1e-15)


class TestBornMarginal:
    @pytest.mark.parametrize("deg", [0.0, 37.0, 90.0, 123.4])
    def test_singlet_marginals_half(self, singlet, deg):
        assert abs(cb.born_marginal(singlet, A(deg), 1) - 0.5) <= 1e-12

    def test_product_eigenstate(self):
        state = cb.make_product_state()
        assert cb.born_marginal(state, A(0), 1) == pytest.approx(1.0, abs=1e-12)

    def test_product_transverse(self):
        state = cb.make_product_state()
        assert cb.born_marginal(state, A(90), 1) == pytest.approx(0.5, abs=1e-12)

    def test_total_probability(self, rng):
        for _ in range(50):
            state = cb.random_pure_state(rng)
            setting = cb.random_setting(rng, "B")
            total = cb.born_marginal(state, setting, 1) + cb.born_marginal(state, setting, -1)
            assert abs(total - 1.0) <= 1e-12


class TestCollapse:
    def test_singlet_golden(self, singlet):
        post = cb.collapse(singlet, A(0), 1)
        assert_allclose(post.amplitudes, [0, 1, 0, 0], atol=1e-12)

    def test_fixed_point(self):
        state = cb.make_product_state()
        post = cb.collapse(state, A(0), 1)
        assert_allclose(post.amplitudes, state.amplitudes, atol=1e-15)

    def test_perfect_anticorrelation(self, singlet):
        post = cb.collapse(singlet, A(0), 1)
        assert cb.born_marginal(post, B(0), 1) == pytest.approx(0.0, abs=1e-12)

    def test_zero_branch_rejected(self):
        state = cb.make_product_state()
        with pytest.raises(cb.ImpossibleOutcomeError):
            cb.collapse(state, A(0), -1)

    def test_norm_preserved(self, rng):
        for _ in range(50):
            state = cb.random_pure_state(rng)
            setting = cb.random_setting(rng, "A")
            outcome = 1 if rng.random() < 0.5 else -1
            if cb.born_marginal(state, setting, outcome) < 1e-6:
                continue
            post = cb.collapse(state, setting, outcome)
            assert abs(post.norm() - 1.0) <= 1e-12

    def test_phase_convention(self, rng):
        for _ in range(20):
            state = cb.random_pure_state(rng)
            setting = cb.random_setting(rng, "B")
            post = cb.collapse(state, setting, 1)
            lead = post.amplitudes[np.argmax(np.abs(post.amplitudes) > 1e-12)]
            assert lead.imag == pytest.approx(0.0, abs=1e-12)
            assert lead.real > 0


class TestJointDistribution:
    def test_singlet_zz_golden(self, singlet):
        jd = cb.joint_distribution(singlet, A(0), B(0))
        assert_allclose(jd.probs, [[0.0, 0.5], [0.5, 0.0]], atol=1e-12)

    def test_matches_commuting_oracle(self, rng):
        for _ in range(30):
            state = cb.random_pure_state(rng)
            a = cb.random_setting(rng, "A")
            b = cb.random_setting(rng, "B")
            expected = oracle_joint(state.amplitudes, a.vector, b.vector)
            for ordering in ("AB", "BA"):
                jd = cb.joint_distribution(state, a, b, ordering)
                assert_allclose(jd.probs, expected, atol=1e-12)

    def test_ordering_invariance_100_draws(self, rng):
        worst = 0.0
        for _ in range(100):
            state = cb.random_pure_state(rng)
            a = cb.random_setting(rng, "A")
            b = cb.random_setting(rng, "B")
            ab = cb.joint_distribution(state, a, b, "AB").probs
            ba = cb.joint_distribution(state, a, b, "BA").probs
            worst = max(worst, float(np.max(np.abs(ab - ba))))
        assert worst <= 1e-12

    def test_product_deterministic(self):
        jd = cb.joint_distribution(cb.make_product_state(), A(0), B(0))
        assert jd.prob(1, 1) == pytest.approx(1.0, abs=1e-12)

    def test_party_tags_enforced(self, singlet):
        with pytest.raises(ValueError):
            cb.joint_distribution(singlet, B(0), B(0))

    def test_numerically_impossible_branch_skipped(self):
        """Amplitude dirt of ~1e-13 must not crash the sequential enumeration."""
        amps = np.array([1.0, 1e-13, 0.0, 0.0], dtype=complex)
        state = cb.TwoQubitState(amps / np.linalg.norm(amps))
        for ordering in ("AB", "BA"):
            jd = cb.joint_distribution(state, A(0), B(0), ordering)
            assert jd.prob(1, 1) == pytest.approx(1.0, abs=1e-12)

    def test_bad_ordering_rejected(self, singlet):
        with pytest.raises(ValueError):
            cb.joint_distribution(singlet, A(0), B(0), "XY")

    def test_no_signaling_exact_tables(self, rng):
        for _ in range(10):
            state = cb.random_pure_state(rng)
            settings_a = [cb.random_setting(rng, "A") for _ in range(2)]
            settings_b = [cb.random_setting(rng, "B") for _ in range(2)]
            table = cb.exact_table(state, settings_a, settings_b)
            assert table.no_signaling_defect() <= 1e-12

    def test_marginals(self, singlet):
        jd = cb.joint_distribution(singlet, A(0), B(45))
        assert_allclose(jd.marginal("A"), [0.5, 0.5], atol=1e-12)
        assert_allclose(jd.marginal("B"), [0.5, 0.5], atol=1e-12)


class TestChsh:
    def test_singlet_golden(self, singlet, chsh_settings):
        # frozen from the commuting-projector oracle: the fixed-form value is
        # negative at these settings, magnitude 2*sqrt(2)
        value = cb.chsh_value(singlet, *chsh_settings)
        assert value == pytest.approx(-2.0 * SQRT2, abs=1e-12)

    def test_matches_oracle_correlators(self, singlet, chsh_settings):
        a, a2, b, b2 = chsh_settings

        def e(x, y):
            p = oracle_joint(singlet.amplitudes, x.vector, y.vector)
            return p[0, 0] - p[0, 1] - p[1, 0] + p[1, 1]

        expected = e(a, b) + e(a, b2) + e(a2, b) - e(a2, b2)
        assert cb.chsh_value(singlet, *chsh_settings) == pytest.approx(expected, abs=1e-12)

    def test_tsirelson_bound_random(self, singlet, rng):
        for _ in range(1000):
            a, a2 = (cb.random_setting(rng, "A") for _ in range(2))
            b, b2 = (cb.random_setting(rng, "B") for _ in range(2))
            assert abs(cb.chsh_value(singlet, a, a2, b, b2)) <= 2.0 * SQRT2 + 1e-9

    def test_product_state_local(self, rng):
        state = cb.make_product_state()
        for _ in range(50):
            a, a2 = (cb.random_setting(rng, "A") for _ in range(2))
            b, b2 = (cb.random_setting(rng, "B") for _ in range(2))
            assert abs(cb.chsh_value(state, a, a2, b, b2)) <= 2.0 + 1e-9

    def test_repeated_settings_identity(self, singlet):
        a, b = A(17.0), B(62.0)
        value = cb.chsh_value(singlet, a, a, b, b)
        expected = 2.0 * cb.joint_distribution(singlet, a, b).correlator()
        assert value == pytest.approx(expected, abs=1e-12)
        assert abs(value) <= 2.0 + 1e-12

    def test_party_tags_enforced(self, singlet):
        with pytest.raises(ValueError):
            cb.chsh_value(singlet, A(0), B(90), B(45), B(135))


class TestCorrelationTable:
    def test_exact_table_matches_oracle(self, singlet):
        settings_a = [A(0), A(90)]
        settings_b = [B(45), B(135)]
        table = cb.exact_table(singlet, settings_a, settings_b)
        for i, j in itertools.product(range(2), range(2)):
            expected = oracle_joint(
                singlet.amplitudes, settings_a[i].vector, settings_b[j].vector
            )
            assert_allclose(table.cells[i, j], expected, atol=1e-12)

    def test_diff_metrics(self, singlet):
        table = cb.exact_table(singlet, [A(0)], [B(0)])
        assert table.max_abs_diff(table) == 0.0
        assert table.total_variation(table)[0, 0] == 0.0

    def test_shape_mismatch_rejected(self, singlet):
        one = cb.exact_table(singlet, [A(0)], [B(0)])
        two = cb.exact_table(singlet, [A(0), A(90)], [B(0)])
        with pytest.raises(ValueError):
            one.max_abs_diff(two)
