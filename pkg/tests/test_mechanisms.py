"""Mechanism examples and invariants, cross-checked against direct matrix evaluation."""

import numpy as np
import pytest

from softmech.mechanisms import (
    MechanismSpec,
    active_count,
    additive_gap,
    exp_mechanism,
    log_plsoftmax,
    multiplicative_gap,
    multiplicative_guarantee,
    plsoftmax,
    power_mechanism,
    sorting_permutation,
    sparsemax,
    worst_case_support_ok,
)
from softmech.simplex import check_distribution
from softmech.smmatrix import build_softmax_matrix, uniform_prefix


def plsoftmax_reference(x, delta, order=None):
    """Direct evaluation through the exact matrix and permutation matrices."""
    x = np.asarray(x, dtype=float)
    d = x.size
    if order is None:
        order = np.argsort(-x, kind="stable")
    P = np.zeros((d, d))
    P[np.arange(d), order] = 1.0
    xs = P @ x
    k = int(np.count_nonzero(xs[0] - xs <= delta))
    smf = build_softmax_matrix(k, d).to_float()
    return P.T @ (smf @ xs / delta + uniform_prefix(k, d))


class TestExamples:
    def test_exp(self):
        assert np.allclose(exp_mechanism([np.log(2), 0.0], 1.0), [2 / 3, 1 / 3])
        assert np.allclose(exp_mechanism([5.0] * 4, 3.0), 0.25)
        assert np.array_equal(exp_mechanism([1.0, 0.0], 2.0), exp_mechanism([6.0, 5.0], 2.0))

    def test_power(self):
        assert np.allclose(power_mechanism([2.0, 1.0], 1.0), [2 / 3, 1 / 3])
        assert np.allclose(power_mechanism([4.0, 1.0], 0.5), [2 / 3, 1 / 3])
        assert np.allclose(power_mechanism([3.0, 3.0, 3.0], 2.0), 1 / 3)
        assert np.allclose(power_mechanism([1.0, 0.0], 2.0), [1.0, 0.0])

    def test_sorting_permutation(self):
        sp = sorting_permutation([3.0, 1.0, 2.0])
        assert sp.order.tolist() == [0, 2, 1]
        assert sp.inverse.tolist() == [0, 2, 1]
        assert sorting_permutation([5.0, 5.0, 5.0]).order.tolist() == [0, 1, 2]
        assert sorting_permutation([9.0, 4.0, 1.0]).order.tolist() == [0, 1, 2]
        x = np.array([1.0, 7.0, 3.0, 7.0])
        sp = sorting_permutation(x)
        assert np.all(np.diff(x[sp.order]) <= 0)
        assert np.array_equal(sp.order[sp.inverse], np.arange(4))

    def test_active_count(self):
        assert active_count([3.0, 2.0, 1.0], 1.5) == 2
        assert active_count([4.0] * 5, 0.1) == 5
        assert active_count([2.0, 0.0], 1.0) == 1
        assert active_count([1.0, 0.0], 1.0) == 2  # boundary uses exact <=
        with pytest.raises(ValueError):
            active_count([1.0, 2.0], 1.0)
        with pytest.raises(ValueError):
            active_count([2.0, 1.0], 0.0)

    def test_plsoftmax(self):
        assert np.allclose(plsoftmax([0.5, 0.0], 1.0), [0.75, 0.25])
        assert np.allclose(plsoftmax([2.0, 0.0, 0.0], 1.0), [1.0, 0.0, 0.0])
        assert np.allclose(plsoftmax([3.0] * 6, 0.7), 1 / 6)

    def test_log_plsoftmax(self):
        assert np.allclose(log_plsoftmax([np.exp(0.5), 1.0], 1.0), [0.75, 0.25])
        assert np.allclose(log_plsoftmax([2.0, 2.0, 2.0], 1.0), 1 / 3)
        x = np.array([3.0, 1.0, 0.5])
        assert np.allclose(log_plsoftmax(7.3 * x, 0.8), log_plsoftmax(x, 0.8), atol=1e-12)
        with pytest.raises(ValueError):
            log_plsoftmax([1.0, 0.0], 1.0)

    def test_sparsemax(self):
        assert np.allclose(sparsemax(np.zeros(5)), 0.2)
        d = 8
        y = np.zeros(d)
        y[: d // 2] = 2.0 / d
        assert np.allclose(sparsemax(y), y)
        p = np.array([0.1, 0.2, 0.7])
        assert np.allclose(sparsemax(p), p, atol=1e-12)

    def test_gaps(self):
        assert additive_gap([1.0, 0.0], [1.0, 0.0]) == 0.0
        assert np.isclose(additive_gap([0.5, 0.0], [0.75, 0.25]), 0.125)
        assert additive_gap([3.0, 3.0], [0.4, 0.6]) == 0.0
        assert np.isclose(multiplicative_gap([2.0, 1.0], [2 / 3, 1 / 3]), 1 / 6)
        assert multiplicative_gap([2.0, 1.0], [1.0, 0.0]) == 0.0
        assert multiplicative_gap([5.0, 5.0], [0.3, 0.7]) == 0.0
        with pytest.raises(ValueError):
            multiplicative_gap([-1.0, -2.0], [0.5, 0.5])

    def test_worst_case_support(self):
        x = np.random.default_rng(3).normal(size=12)
        assert worst_case_support_ok(x, plsoftmax(x, 0.6), 0.6)
        delta = 0.01
        assert not worst_case_support_ok([2 * delta, 0.0], exp_mechanism([2 * delta, 0.0], 1.0), delta)
        assert worst_case_support_ok([3.0, 1.0], [1.0, 0.0], 0.5)

    def test_multiplicative_guarantee(self):
        assert np.isclose(multiplicative_guarantee(1.0), 1 - np.exp(-1))
        assert multiplicative_guarantee(0.3) < 0.3


class TestValidation:
    def test_domain_errors(self):
        with pytest.raises(ValueError):
            exp_mechanism([np.inf, 0.0], 1.0)
        with pytest.raises(ValueError):
            exp_mechanism([1.0, 0.0], 0.0)
        with pytest.raises(ValueError):
            power_mechanism([1.0, -0.5], 1.0)
        with pytest.raises(ValueError):
            power_mechanism([0.0, 0.0], 1.0)
        with pytest.raises(ValueError):
            plsoftmax([1.0, 0.0], -1.0)


class TestAgainstMatrixEvaluation:
    def test_random_inputs_match_reference(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            d = int(rng.integers(2, 20))
            delta = float(rng.choice([0.1, 1.0, 10.0]))
            x = rng.normal(0.0, 2.0 * delta, size=d)
            ref = plsoftmax_reference(x, delta)
            assert np.allclose(plsoftmax(x, delta), ref, atol=1e-12)

    def test_tie_order_does_not_matter(self):
        # equal coordinates may be sorted in any order without changing the output
        rng = np.random.default_rng(5)
        for _ in range(50):
            d = int(rng.integers(3, 10))
            x = rng.normal(size=d).round(1)  # rounding forces ties
            base = np.argsort(-x, kind="stable")
            swapped = base.copy()
            ties = np.flatnonzero(x[base][:-1] == x[base][1:])
            if ties.size == 0:
                continue
            t = ties[0]
            swapped[[t, t + 1]] = swapped[[t + 1, t]]
            out_a = plsoftmax_reference(x, 1.0, order=base)
            out_b = plsoftmax_reference(x, 1.0, order=swapped)
            assert np.allclose(out_a, out_b, atol=1e-12)
            assert np.allclose(plsoftmax(x, 1.0), out_b, atol=1e-12)

    def test_equal_coordinates_equal_outputs(self):
        # a tied block in the input yields a tied block in the image,
        # exactly in rational arithmetic and to rounding noise in float
        from fractions import Fraction

        xf = [Fraction(4), Fraction(5, 2), Fraction(5, 2), Fraction(5, 2), Fraction(1)]
        rows = build_softmax_matrix(5, 5).as_fractions()
        yf = [sum(r[j] * xf[j] for j in range(5)) for r in rows]
        assert yf[1] == yf[2] == yf[3]
        p = plsoftmax(np.array([4.0, 2.5, 2.5, 2.5, 1.0]), 5.0)
        assert np.allclose(p[1:4], p[1], atol=1e-15)


class TestInvariants:
    def test_simplex_validity_random(self):
        rng = np.random.default_rng(0)
        specs = [
            MechanismSpec("exp", 2.0),
            MechanismSpec("pow", 1.5),
            MechanismSpec("plsoftmax", 1.0),
            MechanismSpec("logplsoftmax", 0.5),
            MechanismSpec("sparsemax"),
        ]
        for _ in range(400):
            d = int(rng.integers(2, 65))
            z = rng.normal(0.0, 2.0, size=d)
            for mech in specs:
                x = np.exp(z) if mech.positive_domain else z
                check_distribution(mech(x))

    def test_plsoftmax_worst_case_approximation(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            d = int(rng.integers(2, 65))
            delta = float(rng.choice([0.1, 1.0, 10.0]))
            x = rng.normal(0.0, 2.0 * delta, size=d)
            assert worst_case_support_ok(x, plsoftmax(x, delta), delta)

    def test_log_plsoftmax_multiplicative_worst_case(self):
        # supported coordinates stay above exp(-delta) * max, i.e. within the
        # 1 - exp(-delta) multiplicative slack
        rng = np.random.default_rng(10)
        for _ in range(200):
            d = int(rng.integers(2, 33))
            delta = float(rng.choice([0.25, 1.0, 3.0]))
            x = np.exp(rng.normal(0.0, 2.0, size=d))
            p = log_plsoftmax(x, delta)
            support = p > 1e-12
            floor = (1.0 - multiplicative_guarantee(delta)) * x.max()
            assert np.all(x[support] >= floor * (1 - 1e-12))
            assert multiplicative_gap(x, p) <= multiplicative_guarantee(delta) + 1e-12

    def test_exp_expected_approximation(self):
        # with lam = log(d)/delta the expected value is within delta of the max
        rng = np.random.default_rng(2)
        for _ in range(300):
            d = int(rng.integers(2, 65))
            delta = float(rng.choice([0.1, 1.0, 10.0]))
            x = rng.normal(0.0, 5.0 * delta, size=d)
            gap = additive_gap(x, exp_mechanism(x, np.log(max(d, 2)) / delta))
            assert gap <= delta + 1e-12

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            d = int(rng.integers(2, 30))
            x = rng.normal(size=d)
            sigma = rng.permutation(d)
            assert np.allclose(plsoftmax(x[sigma], 0.8), plsoftmax(x, 0.8)[sigma], atol=1e-14)

    def test_translation_invariance(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            d = int(rng.integers(2, 20))
            x = rng.normal(size=d)
            c = float(rng.normal(0.0, 3.0))
            assert np.allclose(plsoftmax(x + c, 1.0), plsoftmax(x, 1.0), atol=1e-12)
            assert np.allclose(exp_mechanism(x + c, 2.0), exp_mechanism(x, 2.0), atol=1e-12)

    def test_scale_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            d = int(rng.integers(2, 20))
            x = np.exp(rng.normal(size=d))
            c = float(np.exp(rng.normal()))
            assert np.allclose(power_mechanism(c * x, 2.0), power_mechanism(x, 2.0), atol=1e-12)
            assert np.allclose(log_plsoftmax(c * x, 1.0), log_plsoftmax(x, 1.0), atol=1e-12)

    def test_continuity_at_seams(self):
        # straddling pairs 1e-6 apart move the output by at most
        # (2/delta) * H_d * 1e-6; the log-d form of the same constant is
        # only valid from d=4 up (at d=2 the worst seam direction moves the
        # output by 2h/delta > 2 log(2) h/delta)
        from softmech.smmatrix import harmonic

        rng = np.random.default_rng(8)
        h = 1e-6
        for _ in range(200):
            d = int(rng.integers(2, 33))
            delta = float(rng.choice([0.5, 1.0, 2.0]))
            x = rng.normal(0.0, delta, size=d)
            order = np.argsort(-x, kind="stable")
            a, b = x.copy(), x.copy()
            if rng.random() < 0.5 and d >= 2:
                j = int(rng.integers(1, d))
                edge = x[order[0]] - delta
                a[order[j]] = edge + h / 2
                b[order[j]] = edge - h / 2
            else:
                i, j = rng.choice(d, size=2, replace=False)
                mid = (x[i] + x[j]) / 2
                a[i], a[j] = mid + h / 2, mid - h / 2
                b[i], b[j] = mid - h / 2, mid + h / 2
            l1 = np.abs(plsoftmax(a, delta) - plsoftmax(b, delta)).sum()
            assert l1 <= (2.0 / delta) * harmonic(d) * h + 1e-9
            if d >= 4:
                assert l1 <= (2.0 / delta) * np.log(d) * h + 1e-9

    def test_sparsemax_idempotent_and_prefix_support(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            d = int(rng.integers(2, 20))
            x = rng.normal(size=d)
            p = sparsemax(x)
            assert np.allclose(sparsemax(p), p, atol=1e-12)
            support = p > 1e-12
            if support.any() and (~support).any():
                assert x[support].min() >= x[~support].max()


class TestSpecParsing:
    def test_parse_roundtrip(self):
        for text in ["exp:lambda=1.5", "pow:lambda=2", "plsoftmax:delta=0.25", "logplsoftmax:delta=3", "sparsemax"]:
            spec = MechanismSpec.parse(text)
            assert MechanismSpec.parse(spec.label()) == spec

    def test_parse_errors(self):
        for bad in ["nope", "exp", "exp:delta=1", "plsoftmax:delta=-1", "sparsemax:delta=1", "exp:lambda"]:
            with pytest.raises(ValueError):
                MechanismSpec.parse(bad)

    def test_dispatch(self):
        x = np.array([2.0, 1.0])
        assert np.allclose(MechanismSpec.parse("pow:lambda=1")(x), [2 / 3, 1 / 3])
        assert np.allclose(MechanismSpec.parse("sparsemax")(np.zeros(4)), 0.25)
