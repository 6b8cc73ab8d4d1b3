"""Tests for the hypergeometric regulator toolkit."""

import json
import random
from fractions import Fraction

import mpmath
import pytest
from sympy import primerange

import config
from cli import main
from db.tables import find_entry, get_all_entries, load_golden_tables, save_report
from engine.ellcurve import (
    WeierstrassModel,
    ap,
    ap_naive,
    conductor,
    family_model,
    family2_model,
    family3_model,
    integrality_check,
    invariants,
    legendre_model,
    minimal_local_data,
    minimal_model,
    valuation,
)
from engine.errors import (
    BranchBoundaryError,
    ConfigError,
    ConjectureRegionError,
    ConstraintError,
    CutError,
    DataFileError,
    DegenerateParameterError,
    DivergenceError,
    DomainError,
    PoleError,
    SingularFiberError,
)
from engine.hyper import (
    HGSpec,
    agm_oracle,
    connection_beta_period,
    connection_one_minus_t,
    euler_integral_oracle,
    f_ab,
    g_primitive,
    gauss_2f1,
    pfq,
)
from engine.lfunc import (
    LSeries,
    _sign_residual,
    incomplete_gamma_upper,
    l_value,
    l_value_2,
    required_terms,
    root_number,
)
from engine.precision import Precision, const_eulergamma, const_pi, parse_rational, pow_principal
from engine.regulators import (
    FermatFibration,
    GaussFibration,
    cubic_dilog_identity,
    family2_reg,
    family3_reg,
    fermat_c0_c1,
    fermat_c0_c1_digamma,
    fermat_index_set,
    fermat_periods,
    fermat_gamma_period_oracle,
    fermat_reg_delta,
    fermat_reg_delta_alt,
    fermat_reg_gamma,
    gauss_gamma1_forms,
    gauss_index_set,
    gauss_reg,
    lambda_constraint_check,
    legendre_dilog_identity,
    legendre_reg,
    nome_cubic,
    nome_legendre,
)
from engine.special import beta, bloch_wigner, cap_B, cap_C, digamma, elliptic_dilog, gamma, li2
from engine.verify import (
    IDENTITY_CHECKS,
    compute_Rt,
    finite_difference,
    rational_reconstruct,
    reproduce_tables,
    run_identity_suite,
)

P = Precision(30)


def close(x, y, digits=25):
    return abs(x - y) <= mpmath.mpf(10) ** (-digits) * max(1, abs(y))


def test_parse_rational():
    """Test exact rational parsing and rejection of decimals."""
    assert parse_rational("7/8") == Fraction(7, 8)
    assert parse_rational("-3") == Fraction(-3)
    with pytest.raises(DomainError):
        parse_rational("0.5")
    with pytest.raises(DomainError):
        parse_rational("1/0")


def test_settings_validation():
    """Test that run-time settings reject bad values."""
    with pytest.raises(ConfigError):
        config.Settings(precision=5)
    with pytest.raises(ConfigError):
        config.Settings(output="xml")
    assert config.Settings().precision == config.DEFAULT_PRECISION


def test_precision_constants():
    """Test pi, Euler's constant and principal powers."""
    assert P.ctx.nstr(const_pi(P), 15) == "3.14159265358979"
    assert P.ctx.nstr(const_eulergamma(P), 10) == "0.5772156649"
    assert close(pow_principal(-1, Fraction(1, 2), P), P.ctx.mpc(0, 1))
    assert close(pow_principal(Fraction(1, 4), Fraction(1, 2), P), P.ctx.mpf(0.5))
    assert P.tolerance(10) == P.ctx.mpf(10) ** -20


def test_gamma_family():
    """Test gamma, digamma, beta and the B/C combinations."""
    ctx = P.ctx
    assert close(gamma(5, P), 24)
    assert close(gamma(Fraction(1, 2), P), ctx.sqrt(ctx.pi))
    assert close(digamma(1, P), -ctx.euler)
    assert close(digamma(Fraction(1, 2), P), -ctx.euler - 2 * ctx.log(2))
    assert close(beta(1, 1, P), 1)
    a, b = Fraction(1, 2), Fraction(5, 6)
    assert close(cap_B(a, b, P), ctx.gamma(0.5) * ctx.gamma(ctx.mpf(1) / 3) / ctx.gamma(ctx.mpf(5) / 6))
    assert close(cap_C(a, b, P), ctx.sinpi(0.5) / ctx.pi * cap_B(a, b, P))
    with pytest.raises(PoleError):
        gamma(-2, P)
    with pytest.raises(PoleError):
        cap_B(Fraction(1, 3), Fraction(1, 3), P)


def test_gamma_recurrence_and_reflection():
    """Test Gamma(z+1) = z Gamma(z) and Gamma(z)Gamma(1-z) = pi/sin(pi z) at random points."""
    ctx = P.ctx
    rng = random.Random(2)
    for _ in range(10):
        z = ctx.mpc(rng.uniform(-3, 3), rng.uniform(-2, 2))
        assert close(gamma(z + 1, P), z * gamma(z, P))
        assert close(gamma(z, P) * gamma(1 - z, P), ctx.pi / ctx.sin(ctx.pi * z), 24)


def test_dilogarithms():
    """Test Li2, the Bloch-Wigner function and its symmetries."""
    ctx = P.ctx
    assert li2(0, P) == 0
    assert close(li2(1, P), ctx.pi ** 2 / 6)
    assert abs(bloch_wigner(Fraction(1, 3), P)) < ctx.mpf(10) ** -25
    x = ctx.mpc(0.2, 0.7)
    assert close(bloch_wigner(ctx.conj(x), P), -bloch_wigner(x, P))
    assert close(bloch_wigner(ctx.mpc(0, 1), P), ctx.catalan)
    assert close(bloch_wigner(1 / x, P), -bloch_wigner(x, P))
    with pytest.raises(DomainError):
        bloch_wigner(1, P)


def test_elliptic_dilog_brute_force():
    """Test the truncated two-sided sum against a wide brute-force sum."""
    ctx = P.ctx
    q, x = ctx.mpf(0.05), ctx.mpc(0, 1)
    brute = ctx.fsum(bloch_wigner(x * q ** n, P) for n in range(-40, 41))
    assert close(elliptic_dilog(q, x, P), brute)
    with pytest.raises(DivergenceError):
        elliptic_dilog(1, x, P)


def test_elliptic_dilog_symmetries():
    """Test D_q(qx) = D_q(x), D_q(1/x) = -D_q(x) and D_q(conj x) = -D_q(x) for random (q, x)."""
    ctx = P.ctx
    rng = random.Random(4)
    for _ in range(5):
        q = ctx.mpf(rng.uniform(-0.5, 0.5))
        x = ctx.mpc(rng.uniform(0.3, 1.5), rng.uniform(0.2, 1.0))
        value = elliptic_dilog(q, x, P)
        assert close(elliptic_dilog(q, q * x, P), value, 20)
        assert close(elliptic_dilog(q, 1 / x, P), -value, 20)
        assert close(elliptic_dilog(q, ctx.conj(x), P), -value, 20)


def test_pfq_series():
    """Test pFq on trivial, terminating and divergent inputs."""
    half = Fraction(1, 2)
    assert pfq(HGSpec((half, half), (1,), 0), P) == 1
    assert close(pfq(HGSpec((-2, 1), (1,), 3), P), 4)
    assert close(pfq(HGSpec((), (), 1), P), P.ctx.e)
    with pytest.raises(DivergenceError):
        pfq(HGSpec((half, half), (1,), 2), P)
    with pytest.raises(DivergenceError):
        pfq(HGSpec((half, half, half), (1,), Fraction(1, 10)), P)
    with pytest.raises(PoleError):
        pfq(HGSpec((half,), (-1,), Fraction(1, 10)), P)


def test_pfq_unit_circle():
    """Test the boundary series when the convergence margin is positive."""
    ctx = P.ctx
    # 2F1(1/2,1/2;2;1) = Gamma(2)Gamma(1)/Gamma(3/2)^2
    value = pfq(HGSpec((Fraction(1, 2), Fraction(1, 2)), (2,), 1), P)
    assert close(value, 1 / ctx.gamma(1.5) ** 2, 20)
    with pytest.raises(DivergenceError):
        pfq(HGSpec((Fraction(1, 2), Fraction(1, 2)), (1,), 1), P)


def test_gauss_2f1_against_agm():
    """Test 2F1(1/2,1/2,1;z) against the AGM in each continuation region."""
    half = Fraction(1, 2)
    for z in (Fraction(1, 4), Fraction(3, 4), Fraction(-9, 10), Fraction(-3), Fraction(-40), P.ctx.mpc(0.3, 0.8)):
        assert close(gauss_2f1(half, half, 1, z, P), agm_oracle(z, P), 22)
    assert close(agm_oracle(Fraction(3, 4), P), 1 / P.ctx.agm(1, 0.5))


def test_gauss_2f1_against_mpmath():
    """Test generic parameters against mpmath's own continuation."""
    ctx = P.ctx
    a, b, c = Fraction(1, 3), Fraction(2, 7), Fraction(5, 4)
    for z in (Fraction(9, 10), Fraction(-5), Fraction(-1, 2), ctx.mpc(2, 1)):
        reference = ctx.hyp2f1(ctx.mpf(1) / 3, ctx.mpf(2) / 7, ctx.mpf(5) / 4, P.scalar(z))
        assert close(gauss_2f1(a, b, c, z, P), reference, 22)


def test_gauss_2f1_cut():
    """Test that the cut needs a side and that the sides are conjugate."""
    a, b = Fraction(1, 3), Fraction(2, 3)
    with pytest.raises(CutError):
        gauss_2f1(a, b, 1, 3, P)
    with pytest.raises(PoleError):
        gauss_2f1(a, b, 0, Fraction(1, 4), P)
    above = gauss_2f1(a, b, 1, 3, P, side=1)
    below = gauss_2f1(a, b, 1, 3, P, side=-1)
    assert close(above, P.ctx.conj(below), 20)


def test_connection_formula():
    """Test F(a,b,1;1-t) through the z = 1/(1-t) connection."""
    a, b = Fraction(1, 2), Fraction(1, 3)
    assert close(connection_one_minus_t(a, b, 3, P), gauss_2f1(a, b, 1, -2, P), 20)
    a, b = Fraction(1, 3), Fraction(2, 3)
    assert close(connection_one_minus_t(a, b, -4, P), gauss_2f1(a, b, 1, 5, P, side=1), 20)
    with pytest.raises(DegenerateParameterError):
        connection_one_minus_t(a, a, 3, P)


def test_gauss_2f1_binomial_case():
    """Test F(a,b;b;z) = (1-z)^(-a) in every continuation region."""
    ctx = P.ctx
    a, b = Fraction(1, 3), Fraction(3, 4)
    for z in (Fraction(3, 10), Fraction(4, 5), Fraction(-2), Fraction(-7), ctx.mpc(0.6, 0.5)):
        w = P.scalar(z)
        assert close(gauss_2f1(a, b, b, z, P), ctx.power(1 - w, -ctx.mpf(1) / 3), 22)


def test_connection_beta_period():
    """Test B(a,b)F(a,b,a+b;t) through the z = 1/(1-t) connection, including a = b."""
    a, b = Fraction(1, 3), Fraction(3, 5)
    t = Fraction(-1, 2)
    assert close(connection_beta_period(a, b, t, P), beta(a, b, P) * gauss_2f1(a, b, a + b, t, P), 22)
    half = Fraction(1, 2)
    degenerate = connection_beta_period(half, half, -3, P)
    assert close(degenerate, beta(half, half, P) * gauss_2f1(half, half, 1, -3, P), 20)
    assert close(degenerate, euler_integral_oracle(half, half, -3, P), 14)
    with pytest.raises(DomainError):
        connection_beta_period(a, b, Fraction(1, 2), P)


def test_f_ab_mapping():
    """Test the 3F2 parameter mapping of F_{a,b}."""
    a, b, z = Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)
    expected = pfq(HGSpec((a, a, a), (Fraction(7, 6), Fraction(3, 2)), z), P)
    assert close(f_ab(a, b, z, P), expected)
    with pytest.raises(DegenerateParameterError):
        f_ab(a, a + 1, z, P)


def test_g_primitive_paths():
    """Test the series and quadrature paths of G against each other."""
    a, b = Fraction(1, 6), Fraction(5, 6)
    for x in (Fraction(-3, 10), Fraction(-9, 10)):
        series = g_primitive(a, b, x, P, method="series")
        quadrature = g_primitive(a, b, x, P, method="quadrature")
        assert close(series, quadrature, 14)
    assert g_primitive(a, b, 0, P) == 0
    with pytest.raises(DomainError):
        g_primitive(a, b, 1, P)


def test_g_primitive_derivative():
    """Test x G'(x) = F(a,b,1;x) - 1 by central differences."""
    a, b = Fraction(1, 2), Fraction(1, 2)
    x = P.real(Fraction(-3, 10))
    slope = finite_difference(lambda u: g_primitive(a, b, u, P), x, P, step=1e-6)
    assert abs(x * slope - (gauss_2f1(a, b, 1, x, P) - 1)) < 1e-8


def test_euler_integral_oracle():
    """Test the Euler integral against Beta and 2F1 values."""
    a, b = Fraction(1, 3), Fraction(2, 3)
    assert close(euler_integral_oracle(a, b, 0, P), beta(a, b, P), 14)
    expected = beta(a, b, P) * gauss_2f1(a, b, 1, Fraction(1, 2), P)
    assert close(euler_integral_oracle(a, b, Fraction(1, 2), P), expected, 14)
    with pytest.raises(DomainError):
        euler_integral_oracle(a, b, 1, P)


def test_euler_integral_on_the_continuation():
    """Test F(1/2,1/2,1;-5) against the Euler integral."""
    half = Fraction(1, 2)
    expected = beta(half, half, P) * gauss_2f1(half, half, 1, -5, P)
    assert close(euler_integral_oracle(half, half, -5, P), expected, 14)


def test_fermat_index_set():
    """Test I_e orbits and the degenerate generator."""
    assert list(fermat_index_set(2, 3, 1, 1)) == [(1, 1), (1, 2)]
    orbit = fermat_index_set(3, 3, 1, 1)
    assert set(orbit) == {(1, 1), (2, 2)}
    with pytest.raises(DegenerateParameterError):
        fermat_index_set(2, 3, 0, 1)


def test_fermat_constants():
    """Test the C0/C1 case table and its digamma packaging."""
    ctx = P.ctx
    fib = FermatFibration(2, 3, 1, 1, 0, 0)
    nu2 = ctx.expjpi(ctx.mpf(2) / 3)
    base = ctx.log(6 * 2 * (1 - nu2))
    c0, c1 = fermat_c0_c1(fib, P)
    assert c1 == 1 and close(c0, -base)
    c0, c1 = fermat_c0_c1(FermatFibration(2, 3, 1, 1, 0, 1), P)
    assert c1 == -1 and close(c0, base)
    c0, c1 = fermat_c0_c1(FermatFibration(3, 4, 1, 1, 2, 3), P)
    assert c0 == 0 and c1 == 0

    d0, d1 = fermat_c0_c1_digamma(fib, P)
    assert close(d1, 1)
    # The two packagings agree modulo 2 pi i Q
    gap = (fermat_c0_c1(fib, P)[0] - d0) / (2j * ctx.pi)
    assert abs(ctx.im(gap)) < ctx.mpf(10) ** -20
    assert rational_reconstruct(ctx.re(gap), 1000, 1e-15, P) is not None


def test_fermat_periods():
    """Test period values at t = 1 and t = 0 and the Euler-integral oracle."""
    ctx = P.ctx
    fib = FermatFibration(2, 3, 1, 1, 1, 2)
    i, j = 1, 2
    prefactor = ctx.expjpi(ctx.mpf(2) * i * 1 / 2) * ctx.expjpi(ctx.mpf(2) * j * 2 / 3) / 6
    assert close(fermat_periods(fib, i, j, 1, "delta", P), -prefactor * 2j * ctx.pi)
    assert close(fermat_periods(fib, i, j, 0, "gamma", P), prefactor * beta(fib.a(i), fib.b(j), P))
    t = Fraction(-1, 2)
    assert close(fermat_periods(fib, i, j, t, "gamma", P), fermat_gamma_period_oracle(fib, i, j, t, P), 14)


def test_fermat_delta_forms_agree():
    """Test that the constants-table and 3F2 delta regulators differ by 2 pi i Q."""
    ctx = P.ctx
    fib = FermatFibration(2, 3, 1, 1, 1, 1)
    gap = (fermat_reg_delta(fib, 3, P).value - fermat_reg_delta_alt(fib, 3, P).value) / (2j * ctx.pi)
    assert abs(ctx.im(gap)) < ctx.mpf(10) ** -15
    assert rational_reconstruct(ctx.re(gap), config.RATIONALITY_QMAX, 1e-15, P) is not None
    # At t = -1 the 3F2 form exists but G(1-t) = G(2) lies beyond its continuation
    assert abs(fermat_reg_delta_alt(fib, -1, P).value) > 0
    with pytest.raises(DomainError):
        fermat_reg_delta(fib, -1, P)


def test_fermat_degenerate_and_stable():
    """Test degeneracy errors and precision stability of the gamma regulator."""
    with pytest.raises(DegenerateParameterError):
        fermat_reg_delta_alt(FermatFibration(2, 2, 1, 1), 3, P)
    fib = FermatFibration(2, 3, 1, 1)
    low = fermat_reg_gamma(fib, (1, 1), Fraction(-1, 2), Precision(40)).value
    high = fermat_reg_gamma(fib, (1, 1), Fraction(-1, 2), Precision(60)).value
    assert abs(low - high) < mpmath.mpf(10) ** -35


def test_gauss_index_and_constraint():
    """Test I_e for Gauss type and the lambda rationality constraint."""
    assert list(gauss_index_set(3, 1)) == [1, 2]
    assert list(gauss_index_set(6, 2)) == [2, 4]
    index_set = gauss_index_set(3, 1)
    assert lambda_constraint_check(3, index_set, {1: Fraction(1), 2: Fraction(1)}, P)
    assert not lambda_constraint_check(3, index_set, {1: Fraction(1), 2: Fraction(0)}, P)


def test_gauss_regulator_errors():
    """Test the conjecture region and constraint failures."""
    with pytest.raises(ConjectureRegionError):
        gauss_reg(GaussFibration(3, 1, 1, 1, {1: 1, 2: 1}), Fraction(1, 2), prec=P)
    with pytest.raises(ConstraintError):
        gauss_reg(GaussFibration(3, 1, 2, 1, {1: 1, 2: 0}), Fraction(1, 2), prec=P)
    with pytest.raises(DomainError):
        GaussFibration(3, 1, 2, 1, {1: 1})


def test_gauss_gamma1_forms_agree():
    """Test that the two gamma1 expressions differ by the pi i offset."""
    fib = GaussFibration(3, 1, 2, 1, {1: 1, 2: 1})
    form1, form2, offset = gauss_gamma1_forms(fib, 3, P)
    assert close(form1 + offset, form2, 12)


def test_legendre_regulator_e24():
    """Test the t = -3 regulator against its 3F2 closed form."""
    half = Fraction(1, 2)
    series = pfq(HGSpec((half, half, half), (Fraction(3, 2), 1), Fraction(1, 4)), P)
    assert close(legendre_reg(-3, P), series / 2)
    with pytest.raises(SingularFiberError):
        legendre_reg(0, P)


def test_legendre_regulator_monotone():
    """Test that the Legendre regulator increases along t < 0."""
    values = [legendre_reg(t, P) for t in (-50, -20, -7, -3, -1, Fraction(-1, 2), Fraction(-1, 10))]
    assert values == sorted(values)
    assert len(set(values)) == len(values)


def test_family2_regulator_across_boundary():
    """Test that the two family-2 formulas join continuously at t = 2."""
    def jump(h):
        return family2_reg(2 + h, P) - family2_reg(2 - h, P)

    near, far = jump(Fraction(1, 1000)), jump(Fraction(1, 100))
    assert abs(near) < abs(far) / 5
    with pytest.raises(BranchBoundaryError):
        family2_reg(2, P)


def test_family3_growth():
    """Test that the family-3 regulator grows like -log t near 0."""
    near = family3_reg(Fraction(1, 10**6), P)
    far = family3_reg(Fraction(1, 10**3), P)
    assert near > far
    assert abs((near - far) - P.ctx.log(1000)) < 0.01


def test_nomes():
    """Test the Legendre nome at its symmetry point and the sign of each nome branch."""
    ctx = P.ctx
    assert close(nome_legendre(Fraction(1, 2), P), ctx.exp(-2 * ctx.pi), 20)
    values = [nome_legendre(Fraction(k, 10), P) for k in range(1, 10)]
    assert all(0 < q < 1 for q in values)
    assert values == sorted(values)
    assert all(-1 < nome_legendre(Fraction(-k, 10), P) < 0 for k in (1, 5, 9))
    assert -1 < nome_cubic(Fraction(3, 2), P) < 0
    assert close(nome_cubic(Fraction(3, 2), P), -0.0146643, 6)
    with pytest.raises(DomainError):
        nome_legendre(2, P)
    with pytest.raises(DomainError):
        nome_cubic(Fraction(1, 2), P)


@pytest.mark.parametrize("t", [Fraction(-9, 10), Fraction(-1, 2), Fraction(-1, 10), Fraction(1, 3), Fraction(4, 5)])
def test_legendre_dilog_identity(t):
    """Test the Legendre regulator against elliptic dilogarithm values on both branches."""
    lhs, rhs = legendre_dilog_identity(t, P)
    assert close(lhs, rhs, 15)


@pytest.mark.parametrize("t", [Fraction(11, 10), Fraction(3, 2), Fraction(9, 5)])
def test_cubic_dilog_identity(t):
    """Test the cubic 3F2 combination against 6 sqrt(3) D_q(e^(2 pi i/3))."""
    lhs, rhs = cubic_dilog_identity(t, P)
    assert close(lhs, rhs, 15)
    if t == Fraction(3, 2):
        assert close(lhs, P.real("5.679897772254756"), 12)


def test_curve_invariants():
    """Test discriminant, j-invariants and the syzygy on family models."""
    assert invariants(WeierstrassModel.from_ainvs([0, 0, 0, 0, 1])).discriminant == -432
    assert legendre_model(-1).j_invariant() == 1728
    for n in (2, 5, 13):
        assert family2_model(1 - Fraction(1, n)).j_invariant() == Fraction(432 * n * n, n - 1)
    for n in (1, 4, 17):
        assert family3_model(Fraction(1, 6 * n)).j_invariant() == Fraction(1296 * n * (27 * n - 4) ** 3, 6 * n - 1)
    with pytest.raises(SingularFiberError):
        family_model("legendre", 1)


SAMPLE_CURVES = [
    legendre_model(-3),
    legendre_model(-1),
    legendre_model(Fraction(15, 16)),
    family2_model(Fraction(1, 2)),
    family3_model(Fraction(1, 6)),
]


@pytest.mark.parametrize("model", SAMPLE_CURVES)
def test_hasse_bound(model):
    """Test |a_p| <= 2 sqrt(p) at every good prime below 1000."""
    minimal, local = minimal_local_data(model)
    for p in primerange(2, 1000):
        if p in local:
            continue
        value = ap(minimal, p)
        assert value * value <= 4 * p


@pytest.mark.parametrize("model", SAMPLE_CURVES)
def test_minimal_model_idempotent(model):
    """Test that re-minimalizing a minimal model changes nothing."""
    once = minimal_model(model)
    assert minimal_model(once).int_ainvs() == once.int_ainvs()
    assert abs(int(once.discriminant())) <= abs(int(model.integral_model().discriminant()))


def test_valuation():
    """Test p-adic valuations including the zero sentinel."""
    assert valuation(Fraction(3, 4), 2) == -2
    assert valuation(48, 2) == 4
    assert valuation(0, 5) > 10**6


def test_conductors():
    """Test conductors from Tate's algorithm."""
    assert conductor(legendre_model(-3)) == 24
    assert conductor(legendre_model(-1)) == 32
    _, local = minimal_local_data(legendre_model(-1))
    assert set(local) == {2}
    assert local[2].reduction == "additive"


def test_frobenius_traces():
    """Test a_p against naive counting, the Hasse bound and known E24 values."""
    minimal, local = minimal_local_data(legendre_model(-3))
    for p in (5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        value = ap(minimal, p)
        assert value == ap_naive(minimal, p)
        assert value * value <= 4 * p
    assert ap(minimal, 5) == -2
    assert ap(minimal, 7) == 0

    minimal, local = minimal_local_data(legendre_model(-1))
    assert ap(minimal, 2, local[2]) == 0


def test_integrality():
    """Test the integrality criterion on every golden-table entry."""
    for entry in get_all_entries():
        assert integrality_check(entry.family, entry.t)
    assert integrality_check("family2", 1 - Fraction(1, 7))


def test_incomplete_gamma():
    """Test Gamma(1, x) and Gamma(2, x) closed forms."""
    ctx = P.ctx
    x = ctx.mpf(1.7)
    assert close(incomplete_gamma_upper(1, x, P), ctx.exp(-x))
    assert close(incomplete_gamma_upper(2, x, P), (1 + x) * ctx.exp(-x))
    with pytest.raises(DomainError):
        incomplete_gamma_upper(1, 0, P)


def test_lseries_coefficients():
    """Test multiplicativity of the Dirichlet coefficients."""
    series = LSeries.from_model(legendre_model(-3), 200)
    a = series.coefficients
    assert series.conductor == 24
    assert a[1] == 1
    assert a[35] == a[5] * a[7]
    assert a[25] == a[5] * a[5] - 5


def test_root_number_and_l_value():
    """Test L(E24, 2) against the 3F2 closed form and the flipped-sign control."""
    ctx = P.ctx
    value, level, eps = l_value(legendre_model(-3), P)
    assert level == 24
    half = Fraction(1, 2)
    series = pfq(HGSpec((half, half, half), (Fraction(3, 2), 1), Fraction(1, 4)), P)
    assert close(value, ctx.pi ** 2 / 12 * series, 25)

    lseries = LSeries.from_model(legendre_model(-3), required_terms(24, P))
    assert root_number(lseries, P) == eps
    working = P.with_digits(P.digits // 2 + 10)
    residual, size = _sign_residual(lseries, -eps, working)
    assert residual > mpmath.mpf(10) ** -(P.digits // 2) * max(1, size)


@pytest.mark.parametrize("digits", [config.DEFAULT_PRECISION, 60])
def test_l_value_default_precision(digits):
    """Test the root number and L(E32, 2) at and above the default precision."""
    prec = Precision(digits)
    value, level, eps = l_value(legendre_model(-1), prec)
    assert (level, eps) == (32, 1)
    assert close(value, prec.real("0.917050635318654988643805524295713318398"), 35)
    lseries = LSeries.from_model(legendre_model(-1), required_terms(32, prec))
    assert root_number(lseries, prec) == 1


def test_l_value_stability():
    """Test L(E24, 2) under doubled coefficient count and 20 extra digits."""
    prec = Precision(30)
    needed = required_terms(24, prec)
    short = l_value_2(LSeries.from_model(legendre_model(-3), needed), prec)
    long = l_value_2(LSeries.from_model(legendre_model(-3), 2 * needed), prec)
    assert close(short, long, 28)
    wide, _, _ = l_value(legendre_model(-3), Precision(50))
    assert close(short, wide, 28)


def test_rational_reconstruct():
    """Test continued-fraction reconstruction."""
    assert rational_reconstruct(0.875, 100, 1e-9, P) == Fraction(7, 8)
    assert rational_reconstruct(P.ctx.pi, 10, 1e-9, P) is None
    assert rational_reconstruct(-P.ctx.mpf(165) / 2, 10**5, 1e-8, P) == Fraction(-165, 2)


def test_rational_reconstruct_soundness():
    """Test that noisy random p/q with q <= 10^4 are recovered exactly."""
    rng = random.Random(11)
    for _ in range(50):
        q = rng.randrange(1, 10**4 + 1)
        p = rng.randrange(-10**6, 10**6)
        noise = P.real(Fraction(rng.randrange(-10**5, 10**5), 10**16))
        x = P.real(Fraction(p, q)) + noise
        assert rational_reconstruct(x, 10**5, 1e-8, P) == Fraction(p, q)


def test_compute_rt_legendre():
    """Test R_t for small Legendre fibres."""
    assert compute_Rt("legendre", -3, P).R_rational == 6
    assert compute_Rt("legendre", -7, P).R_rational == Fraction(7, 2)


def test_compute_rt_default_precision():
    """Test R_t at the default precision."""
    result = compute_Rt("legendre", -1, Precision(config.DEFAULT_PRECISION))
    assert result.R_rational == 8
    assert (result.conductor, result.root_number) == (32, 1)


@pytest.mark.slow
def test_compute_rt_families():
    """Test R_t on the second and third families."""
    prec = Precision(40)
    assert compute_Rt("family2", 1 - Fraction(1, 13), prec).R_rational == Fraction(13689, 176)
    assert compute_Rt("family3", Fraction(1, 102), prec).R_rational == Fraction(788103, 10172)
    assert compute_Rt("legendre", Fraction(15, 16), prec).R_rational == Fraction(-165, 2)


def test_identity_suite_empty_and_perturbed():
    """Test the empty suite and the perturbation self-test."""
    report = run_identity_suite(seed=1, count=0, prec=P)
    assert report.passed and report.checks == []
    perturbed = run_identity_suite(seed=1, count=1, prec=P, c_perturbation=1e-6, kinds=["digamma_vs_3f2"])
    assert not perturbed.passed
    with pytest.raises(DomainError):
        run_identity_suite(seed=1, count=1, prec=P, kinds=["no_such_check"])


def test_identity_suite_counts_per_kind():
    """Test that count is the number of instances of every requested kind."""
    report = run_identity_suite(seed=3, count=2, prec=Precision(40), kinds=["connection_beta", "gamma1_forms"])
    assert [c.name for c in report.checks] == ["connection_beta"] * 2 + ["gamma1_forms"] * 2
    assert report.passed, [c for c in report.checks if not c.passed]
    assert all(set(c.params) == {"N", "a", "b", "lambda", "t"} for c in report.checks[2:])


def test_connection_beta_suite():
    """Test the Beta-weighted z = 1/(1-t) connection on 20 random instances."""
    report = run_identity_suite(seed=5, count=20, prec=P, kinds=["connection_beta"])
    assert len(report.checks) == 20
    assert report.passed, [c for c in report.checks if not c.passed]


@pytest.mark.slow
def test_identity_suite_default():
    """Test the default seeded suite at P = 40."""
    prec = Precision(config.DEFAULT_PRECISION)
    report = run_identity_suite(seed=1, count=config.DEFAULT_IDENTITY_COUNT, prec=prec)
    assert len(report.checks) == config.DEFAULT_IDENTITY_COUNT * len(IDENTITY_CHECKS)
    assert report.passed, [c for c in report.checks if not c.passed]
    once = run_identity_suite(seed=1, count=1, prec=prec)
    again = run_identity_suite(seed=1, count=1, prec=prec)
    assert once.to_dict() == again.to_dict()


def test_golden_tables(tmp_path):
    """Test golden table loading, lookup and report writing."""
    tables = load_golden_tables()
    assert [len(tables[f]) for f in config.FAMILIES] == [17, 20, 20]
    assert find_entry("family2", 1 - Fraction(1, 16)).expected_R == Fraction(405, 8)
    assert find_entry("legendre", 100) is None

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(DataFileError):
        load_golden_tables(bad)
    with pytest.raises(DataFileError):
        load_golden_tables(tmp_path / "missing.json")

    path = save_report([{"family": "legendre", "t": "-1"}], tmp_path / "report.json")
    assert json.loads(path.read_text()) == [{"family": "legendre", "t": "-1"}]


def test_cli_exit_codes(capsys):
    """Test exit codes for success, computation errors and usage errors."""
    assert main(["reg", "legendre", "--t", "0"]) == 1
    assert main(["reg", "legendre", "--t", "0.5"]) == 2
    assert main(["reg", "legendre", "--t", "-3", "--prec", "5"]) == 2
    assert main(["hyper", "eval", "--pfq", "1/2;1"]) == 2
    assert main(["verify", "identities", "--count", "0"]) == 0


def test_cli_verify_beilinson(capsys):
    """Test R_t output, JSON by default, for the conductor-24 fibre at the default precision."""
    capsys.readouterr()
    code = main(["verify", "beilinson", "--family", "legendre", "--t", "-3", "--prec", str(config.DEFAULT_PRECISION)])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["R_rational"] == "6"
    assert record["conductor"] == 24
    assert record["root_number"] == 1


def test_table_reconstruction_options():
    """Test that qmax and tol reach the table worker."""
    entries = [find_entry("legendre", -3)]
    assert reproduce_tables(P, entries=entries, progress=False)[0]["status"] == "match"
    row = reproduce_tables(P, entries=entries, progress=False, tol=1e-60)[0]
    assert row["status"] == "mismatch" and row["R_rational"] is None


@pytest.mark.slow
def test_cli_table_legendre(capsys):
    """Test full Legendre table reproduction through the CLI."""
    capsys.readouterr()
    assert main(["table", "legendre", "--jobs", "1"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 17
    assert all(row["status"] == "match" for row in rows)


if __name__ == "__main__":
    pytest.main([__file__])
