import numpy as np
import pytest

import holderlab as hl
from holderlab import functions as F
from holderlab import verify as V
from holderlab.ensembles import SeedState, fixed_spectrum, gaussian_hermitian, ginibre, rank_r_steps
from holderlab.errors import CapabilityError, DomainError, ParameterError, PreconditionError
from holderlab.norms import KyFan, Schatten


def test_record_conventions():
    rec = V.make_record("x", 0.0, 0.0, abs_tol=1e-12)
    assert rec.ratio == 0.0 and not rec.flagged
    rec2 = V.make_record("x", 1.0, 0.0, abs_tol=1e-12)
    assert rec2.ratio == 0.0 and rec2.flagged


def test_verify_main_trivial_and_powers_stormer_instance():
    f = F.power(0.5)
    cache = {}
    a = gaussian_hermitian(4, np.random.default_rng(0))
    same = hl.verify_main(f, 0.5, 1.0, a, a, cache)
    assert same.ratio == 0.0
    ps = hl.verify_main(f, 0.5, 2.0, np.diag([1.0, 0.0]), np.zeros((2, 2)), cache)
    sem = cache[("power:0.5", 4, 0.5)]
    assert ps.lhs == pytest.approx(1.0, abs=1e-14)
    assert ps.rhs == pytest.approx(sem, rel=1e-14)
    assert ps.ratio * sem == pytest.approx(1.0, rel=1e-12)


def test_verify_main_scale_invariance():
    f = F.power(0.5)
    cache = {}
    rng = np.random.default_rng(1)
    a, b = gaussian_hermitian(5, rng), gaussian_hermitian(5, rng)
    r0 = hl.verify_main(f, 0.5, 1.0, a, b, cache).ratio
    for r in (0.125, 8.0, 31.7):
        rr = hl.verify_main(f, 0.5, 1.0, r * a, r * b, cache).ratio
        assert abs(rr - r0) <= 1e-10


def test_verify_main_capability_errors():
    with pytest.raises(CapabilityError):
        hl.verify_main(F.signed_expm1(), 0.5, 1.0, np.eye(2), np.zeros((2, 2)), {})


def test_verify_bks_examples():
    rec = hl.verify_bks(0.5, Schatten(2), np.diag([1.0, 0.0]), np.zeros((2, 2)))
    assert rec.ratio == pytest.approx(1.0, abs=1e-14)
    x = np.diag([0.5, 1.5])
    assert hl.verify_bks(0.5, Schatten(1), x, x).ratio == 0.0
    with pytest.raises(DomainError):
        hl.verify_bks(0.5, Schatten(1), np.diag([1.0, -1.0]), np.eye(2))
    with pytest.raises(ParameterError):
        hl.verify_bks(0.5, hl.WeakLp(1.0), x, x)


def test_verify_bks_small_campaign():
    for i in range(200):
        rng = SeedState(2, (i,)).rng()
        x, _, _ = fixed_spectrum(rng.uniform(0, 1, 6), rng)
        y, _, _ = fixed_spectrum(rng.uniform(0, 1, 6), rng)
        for spec in (Schatten(1), Schatten(2), KyFan(3)):
            assert hl.verify_bks(0.75, spec, x, y).ratio <= 1.0 + 1e-10


def test_verify_submajorization():
    f = F.power(0.5)
    cache = {}
    x = np.diag([1.0, 2.0, 0.3])
    rep, rec = hl.verify_submajorization(f, 0.5, 1.0, x, x, cache)
    assert rec.holds_with_constant == 0.0
    # commuting positive diagonals: scalar Holder gives constant <= 1 once the
    # seminorm (exactly 1 for the matched power) is factored in
    y = np.diag([0.5, 1.1, 0.8])
    rep2, rec2 = hl.verify_submajorization(f, 0.5, 1.0, x, y, cache)
    assert rep2.holds
    assert rec2.holds_with_constant <= 1.0 + 1e-10
    assert rec2.ratio == pytest.approx(rec2.holds_with_constant)


def test_verify_submajorization_stable_across_dims():
    f = F.power(0.5)
    cache = {}
    consts = []
    for dim in (4, 8, 12):
        worst = 0.0
        for i in range(50):
            rng = SeedState(3, (dim, i)).rng()
            x, y = gaussian_hermitian(dim, rng), gaussian_hermitian(dim, rng)
            _, rec = hl.verify_submajorization(f, 0.5, 1.0, x, y, cache)
            worst = max(worst, rec.holds_with_constant)
        consts.append(worst)
    assert all(np.isfinite(consts))
    assert max(consts) / min(consts) <= 3.0


def test_verify_symmetric_reductions():
    f = F.log1p_abs()
    cache = {}
    rng = np.random.default_rng(4)
    x, y = gaussian_hermitian(5, rng), gaussian_hermitian(5, rng)
    for q in (0.5, 1.0, 2.0):
        a = hl.verify_symmetric(f, 0.5, q, KyFan(5), x, y, cache)
        b = hl.verify_main(f, 0.5, q, x, y, cache)
        assert a.lhs == pytest.approx(b.lhs, rel=1e-12)
        assert a.rhs == pytest.approx(b.rhs, rel=1e-12)
    op_case = hl.verify_symmetric(f, 0.5, 1.0, KyFan(1), x, y, cache)
    want = hl.op_norm(hl.apply_function(f, x) - hl.apply_function(f, y))
    assert op_case.lhs == pytest.approx(want, rel=1e-10)


def test_verify_inverse_matches_reverse_power():
    theta = 2.0
    f = F.signed_power(1.0 / theta)  # seminorm exactly 1 at its own exponent
    cache = {}
    rng = np.random.default_rng(5)
    x, y = gaussian_hermitian(4, rng), gaussian_hermitian(4, rng)
    inv = hl.verify_inverse(f, theta, 1.0, KyFan(4), x, y, cache)
    rev = hl.verify_reverse_power(theta, 1.0, KyFan(4), x, y, "power")
    sem = cache[("spower:0.5", 4, 0.5)]
    assert inv.ratio == pytest.approx(sem**theta * rev.ratio, rel=1e-7)


def test_verify_inverse_trivial_and_monotonicity_guard():
    f = F.signed_power(0.5)
    x = np.diag([1.0, -2.0])
    rec = hl.verify_inverse(f, 2.0, 1.0, KyFan(2), x, x, {})
    assert rec.ratio == 0.0
    with pytest.raises(DomainError):
        hl.verify_inverse(F.gauss_bump(), 2.0, 1.0, KyFan(2), 3.0 * x, 2.0 * x, {})


def test_reverse_power_scalar_cases():
    # 1x1: X = -Y = (1) gives ratio 2^{1-theta}
    for theta in (1.5, 2.0, 3.0):
        rec = hl.verify_reverse_power(theta, 1.0, KyFan(1), np.eye(1), -np.eye(1))
        assert rec.ratio == pytest.approx(2.0 ** (1.0 - theta), rel=1e-12)
    same = hl.verify_reverse_power(2.0, 1.0, KyFan(2), np.eye(2), np.eye(2))
    assert same.ratio == 0.0 and not same.flagged
    # positive commuting scalars: |x^2 - y^2| >= |x - y|^2
    rng = np.random.default_rng(6)
    for _ in range(100):
        vals = rng.uniform(0, 3, 4)
        x, y = np.diag(vals[:2]), np.diag(vals[2:])
        rec = hl.verify_reverse_power(2.0, 1.0, KyFan(2), x, y)
        assert rec.ratio >= 1.0 - 1e-12


def test_verify_inverse_commuting_diagonal_scalar_oracle():
    # diagonal matrices in a shared basis reduce every side to scalar vectors
    theta = 2.0
    f = F.signed_power(1.0 / theta)
    cache = {}
    rng = np.random.default_rng(50)
    xs = rng.uniform(-2, 2, 4)
    ys = rng.uniform(-2, 2, 4)
    rec = hl.verify_inverse(f, theta, 1.0, KyFan(4), np.diag(xs), np.diag(ys), cache)
    sem = cache[("spower:0.5", 4, 0.5)]
    finv = lambda v: np.sign(v) * np.abs(v) ** theta
    want_lhs = sem**theta * np.sum(np.abs(finv(xs) - finv(ys)))
    want_rhs = np.sum(np.abs(xs - ys) ** theta)
    assert rec.lhs == pytest.approx(want_lhs, rel=1e-9)
    assert rec.rhs == pytest.approx(want_rhs, rel=1e-12)


def test_reverse_power_expm1_variant():
    rng = np.random.default_rng(7)
    x, y = gaussian_hermitian(4, rng), gaussian_hermitian(4, rng)
    rec = hl.verify_reverse_power(1.5, 1.0, KyFan(4), x, y, "expm1")
    assert rec.ratio > 0.0 and np.isfinite(rec.ratio)


def test_verify_commutator():
    f = F.power(0.5)
    cache = {}
    rng = np.random.default_rng(8)
    # commuting pair: lhs vanishes
    u = hl.haar_unitary(4, rng)
    x = (u * np.array([0.1, 0.7, 1.3, 2.0])) @ u.conj().T
    b = (u * np.array([1.0, 2.0, 3.0, 4.0])) @ u.conj().T
    rec = hl.verify_commutator(f, 0.5, 1.0, KyFan(4), x, b, cache)
    assert rec.lhs <= 1e-10
    # scale covariance in B
    x2, b2 = gaussian_hermitian(4, rng), ginibre(4, rng)
    r1 = hl.verify_commutator(f, 0.5, 1.0, KyFan(4), x2, b2, cache).ratio
    r2 = hl.verify_commutator(f, 0.5, 1.0, KyFan(4), x2, 5.5 * b2, cache).ratio
    assert abs(r1 - r2) <= 1e-10


def test_cayley_identity_residual():
    f = F.power(0.5)
    for i in range(50):
        rng = SeedState(9, (i,)).rng()
        x = gaussian_hermitian(5, rng)
        b = gaussian_hermitian(5, rng)
        assert hl.cayley_identity_residual(f, x, b) <= 1e-10


def test_quasi_commutator_reductions():
    f = F.log1p_abs()
    cache = {}
    rng = np.random.default_rng(10)
    a, b = gaussian_hermitian(4, rng), gaussian_hermitian(4, rng)
    ident = np.eye(4)
    quasi = hl.verify_quasi_commutator(f, 0.5, 1.0, KyFan(4), a, b, ident, cache)
    sym = hl.verify_symmetric(f, 0.5, 1.0, KyFan(4), a, b, cache)
    assert quasi.lhs == pytest.approx(sym.lhs, rel=1e-12)
    assert quasi.rhs == pytest.approx(sym.rhs, rel=1e-12)
    r = ginibre(4, rng)
    quasi2 = hl.verify_quasi_commutator(f, 0.5, 1.0, KyFan(4), a, a, r, cache)
    comm = hl.verify_commutator(f, 0.5, 1.0, KyFan(4), a, r, cache)
    assert quasi2.lhs == pytest.approx(comm.lhs, rel=1e-12)
    assert quasi2.rhs == pytest.approx(comm.rhs, rel=1e-12)


def test_dilation_residual():
    rng = np.random.default_rng(11)
    a, b = gaussian_hermitian(3, rng), gaussian_hermitian(3, rng)
    r = ginibre(3, rng)
    assert hl.dilation_singular_value_residual(a, b, r) <= 1e-12


def test_verify_abs_map():
    rng = np.random.default_rng(12)
    a = ginibre(4, rng)
    same = hl.verify_abs_map(Schatten(1), 2.0, a, a)
    assert same.lhs <= 1e-12
    opp = hl.verify_abs_map(Schatten(1), 2.0, a, -a)
    assert opp.ratio == 0.0 and not opp.flagged
    for i in range(100):
        rng_i = SeedState(13, (i,)).rng()
        x, y = ginibre(5, rng_i), ginibre(5, rng_i)
        rec = hl.verify_abs_map(Schatten(1), 2.0, x, y)
        assert rec.ratio <= 1.0 + 1e-8


def test_telescope():
    f = F.power(0.5)
    rng = np.random.default_rng(14)
    b, xs, es = rank_r_steps(5, 1, (0.1, 1.0), rng)
    single = hl.telescope_finite_rank(f, 0.5, 1.0, b, list(zip(xs, es)))
    assert single.record.ratio == pytest.approx(1.0, rel=1e-10)  # one step: equality
    assert single.rhs_exact_residual <= 1e-12

    b2, xs2, es2 = rank_r_steps(6, 2, (0.1, 1.0), rng)
    two = hl.telescope_finite_rank(f, 0.5, 1.0, b2, list(zip(xs2, es2)))
    assert two.rhs_exact_residual <= 1e-12

    for i in range(100):
        rng_i = SeedState(15, (i,)).rng()
        b_i, xs_i, es_i = rank_r_steps(6, 4, (1e-2, 1.0), rng_i)
        res = hl.telescope_finite_rank(f, 0.5, 1.0, b_i, list(zip(xs_i, es_i)))
        assert res.record.ratio <= 1.0 + 1e-10
        assert res.rhs_exact_residual <= 1e-10


def test_telescope_rejects_bad_steps():
    f = F.power(0.5)
    e = np.diag([1.0, 0.0])
    with pytest.raises(PreconditionError):
        hl.telescope_finite_rank(f, 0.5, 1.0, np.zeros((2, 2)), [(1.0, e), (1.0, e)])
    with pytest.raises(ParameterError):
        hl.telescope_finite_rank(f, 0.5, 2.0, np.zeros((2, 2)), [(1.0, e)])
