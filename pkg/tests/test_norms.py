import math

import numpy as np
import pytest

import holderlab as hl
from holderlab.errors import ParameterError
from holderlab.norms import (
    KyFan,
    PowerOf,
    Schatten,
    WeakLp,
    format_norm_spec,
    least_domination_constant,
    modulus_of_concavity,
    mu_integral,
    norm_of_profile,
    parse_norm_spec,
)


def random_matrix(n, rng):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_singular_values_examples():
    assert np.allclose(hl.singular_values(np.diag([3.0, -4.0])), [4.0, 3.0])
    assert np.allclose(hl.singular_values(np.zeros((3, 3))), np.zeros(3))


def test_singular_values_gram_oracle():
    rng = np.random.default_rng(0)
    x = random_matrix(5, rng)
    want = np.sqrt(np.sort(np.linalg.eigvalsh(x.conj().T @ x))[::-1])
    assert np.abs(hl.singular_values(x) - want).max() <= 1e-10


def test_distribution_function():
    prof = np.array([4.0, 3.0, 0.0])
    assert hl.distribution_function(prof, 3.0) == 1
    assert hl.distribution_function(prof, 10.0) == 0
    with pytest.raises(ParameterError):
        hl.distribution_function(prof, -1.0)


def test_mu_is_generalized_inverse_of_distribution():
    rng = np.random.default_rng(1)
    prof = np.sort(rng.uniform(0, 5, 8))[::-1]
    for k in range(len(prof)):
        # inf{s >= 0 : d(s) <= k} recovered by scanning a fine grid
        grid = np.linspace(0, prof[0] + 1, 20001)
        ds = np.array([hl.distribution_function(prof, s) for s in grid])
        inv = grid[np.argmax(ds <= k)]
        assert abs(inv - prof[k]) <= 1e-3


def test_mu_integral_interpolates():
    prof = np.array([3.0, 1.0])
    assert mu_integral(prof, 0.5) == pytest.approx(1.5)
    assert mu_integral(prof, 1.0) == pytest.approx(3.0)
    assert mu_integral(prof, 1.5) == pytest.approx(3.5)
    assert mu_integral(prof, 5.0) == pytest.approx(4.0)


def test_norm_values():
    x = np.diag([3.0, 4.0])
    assert hl.norm(x, Schatten(1)) == pytest.approx(7.0)
    assert hl.norm(x, Schatten(np.inf)) == pytest.approx(4.0)
    want_half = (math.sqrt(3.0) + 2.0) ** 2
    assert hl.norm(x, Schatten(0.5)) == pytest.approx(want_half, rel=1e-12)
    assert hl.norm(x, PowerOf(KyFan(2), 0.5)) == pytest.approx(want_half, rel=1e-12)


def test_kyfan_index_above_dim_is_trace_norm():
    x = np.diag([3.0, 4.0])
    assert hl.norm(x, KyFan(5)) == pytest.approx(hl.norm(x, Schatten(1)))


def test_power_of_schatten_is_schatten():
    rng = np.random.default_rng(2)
    x = random_matrix(4, rng)
    for q, p in [(1.0, 0.5), (2.0, 0.25), (1.0, 2.0)]:
        assert hl.norm(x, PowerOf(Schatten(q), p)) == pytest.approx(
            hl.norm(x, Schatten(p * q)), rel=1e-12
        )


def test_weak_norm_convention():
    prof = np.array([4.0, 2.0, 1.0])
    p = 2.0
    want = max((k + 1) ** (1 / p) * v for k, v in enumerate(prof))
    assert norm_of_profile(prof, WeakLp(p)) == pytest.approx(want)


def test_unitary_invariance():
    rng = np.random.default_rng(3)
    x = random_matrix(5, rng)
    u, v = hl.haar_unitary(5, rng), hl.haar_unitary(5, rng)
    specs = [Schatten(0.5), Schatten(1), Schatten(2), Schatten(np.inf),
             WeakLp(1.5), KyFan(3), PowerOf(KyFan(2), 0.5)]
    for spec in specs:
        a, b = hl.norm(u @ x @ v, spec), hl.norm(x, spec)
        assert abs(a - b) <= 1e-10 * (1.0 + abs(b))


def test_p_triangle_for_small_p():
    rng = np.random.default_rng(4)
    for p in (0.3, 0.5, 1.0):
        for _ in range(50):
            x, y = random_matrix(4, rng), random_matrix(4, rng)
            lhs = hl.norm(x + y, Schatten(p)) ** p
            rhs = hl.norm(x, Schatten(p)) ** p + hl.norm(y, Schatten(p)) ** p
            assert lhs <= rhs * (1.0 + 1e-12)


def test_quasi_triangle_with_modulus():
    rng = np.random.default_rng(5)
    specs = [Schatten(0.5), Schatten(1), Schatten(3), WeakLp(0.5), WeakLp(2),
             KyFan(2), PowerOf(KyFan(3), 0.5), PowerOf(Schatten(1), 0.4)]
    for spec in specs:
        k = modulus_of_concavity(spec)
        for _ in range(30):
            x, y = random_matrix(4, rng), random_matrix(4, rng)
            assert hl.norm(x + y, spec) <= k * (hl.norm(x, spec) + hl.norm(y, spec)) * (
                1.0 + 1e-12
            )


def test_hardy_littlewood_polya_monotonicity():
    rng = np.random.default_rng(6)
    fully_symmetric = [Schatten(1), Schatten(2), Schatten(np.inf), KyFan(1), KyFan(3)]
    for _ in range(30):
        y = random_matrix(5, rng)
        # profile dominated after a random crossing-preserving shrink
        mu_y = hl.singular_values(y)
        mu_x = mu_y * rng.uniform(0.2, 1.0, mu_y.size)
        mu_x = np.sort(mu_x)[::-1]
        assert hl.submajorizes(mu_y, mu_x).holds
        u, v = hl.haar_unitary(5, rng), hl.haar_unitary(5, rng)
        x = u @ np.diag(mu_x) @ v
        for spec in fully_symmetric:
            assert hl.norm(x, spec) <= hl.norm(y, spec) * (1.0 + 1e-10)


def test_mu_of_adjoint_and_modulus():
    rng = np.random.default_rng(7)
    x = random_matrix(5, rng)
    mu = hl.singular_values(x)
    assert np.allclose(mu, hl.singular_values(x.conj().T), atol=1e-12)
    assert np.allclose(mu, hl.singular_values(hl.abs_matrix(x)), atol=1e-10)


def test_submajorizes_examples():
    rep = hl.submajorizes(np.array([1.0, 1.0]), np.array([2.0, 0.0]))
    assert not rep.holds and rep.worst_index == 0
    rep2 = hl.submajorizes(np.array([2.0, 1.0]), np.array([2.0, 1.0]))
    assert rep2.holds and rep2.margin == 0.0


def test_triangle_submajorization_oracle():
    # classical triangle fact: mu(X+Y) << mu(X) + mu(Y) (entrywise sum of the
    # descending profiles)
    rng = np.random.default_rng(8)
    for _ in range(1000):
        g1, g2 = random_matrix(4, rng), random_matrix(4, rng)
        x, y = g1 @ g1.conj().T, g2 @ g2.conj().T  # positive pair
        lhs = hl.singular_values(x + y)
        rhs = hl.singular_values(x) + hl.singular_values(y)
        assert hl.submajorizes(rhs, lhs).holds


def test_power_submajorizes():
    up, lo = np.array([2.0, 1.0]), np.array([1.0, 1.0])
    rep1 = hl.power_submajorizes(up, lo, 1.0)
    assert rep1.holds == hl.submajorizes(up, lo).holds
    rep2 = hl.power_submajorizes(lo, lo, 3.7)
    assert rep2.holds and rep2.margin == 0.0
    # p = 2: partial sums of (4, 1) dominate (1, 1) -> compare by hand
    rep3 = hl.power_submajorizes(up, lo, 2.0)
    assert rep3.holds
    cu, cl = np.cumsum(up**2), np.cumsum(lo**2)
    assert rep3.margin == pytest.approx(((cu - cl) / cu[-1]).min())
    with pytest.raises(ParameterError):
        hl.power_submajorizes(up, lo, 0.0)


def test_least_domination_constant():
    assert least_domination_constant([2.0, 2.0], [1.0, 1.0]) == pytest.approx(0.5)
    assert least_domination_constant([1.0, 0.0], [2.0, 0.0]) == pytest.approx(2.0)
    assert least_domination_constant([0.0, 1.0], [1.0, 0.0]) == np.inf


def test_parse_and_format_norm_specs():
    cases = ["schatten:1", "schatten:inf", "weak:2.0", "kyfan:3", "power:kyfan:2:0.5",
             "power:schatten:1.0:2.0"]
    for text in cases:
        spec = parse_norm_spec(text)
        assert parse_norm_spec(format_norm_spec(spec)) == spec


def test_parse_norm_spec_errors():
    for bad in ["", "schatten", "frobenius:2", "power:weak:1:0.5", "power:power:kyfan:1:1:1"]:
        with pytest.raises(ParameterError):
            parse_norm_spec(bad)


def test_spec_validation():
    with pytest.raises(ParameterError):
        Schatten(0.0)
    with pytest.raises(ParameterError):
        WeakLp(np.inf)
    with pytest.raises(ParameterError):
        KyFan(0)
    with pytest.raises(ParameterError):
        PowerOf(Schatten(0.5), 1.0)  # base not fully symmetric
    with pytest.raises(ParameterError):
        PowerOf(KyFan(1), 0.0)
