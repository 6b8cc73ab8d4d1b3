"""
Regulator formulas for Fermat-type and Gauss-type hypergeometric fibrations
and for three families of elliptic curves, plus the period integrals and the
elliptic dilogarithm identities they are checked against.

Roots of unity are carried as integer exponents and only turned into numbers
at evaluation time, so the case analysis below is exact.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple

import config
from engine.errors import (
    BranchBoundaryError,
    ConjectureRegionError,
    ConstraintError,
    DegenerateParameterError,
    DomainError,
    SingularFiberError,
)
from engine.hyper import HGSpec, euler_integral_oracle, f_ab, g_primitive, gauss_2f1, pfq
from engine.precision import Number, Precision, XComplex, XReal, pow_principal, resolve
from engine.special import beta, cap_B, cap_C, digamma, elliptic_dilog

logger = logging.getLogger(__name__)


class Ambiguity(Enum):
    """Indeterminacy of a regulator value."""

    EXACT = "exact"
    MOD_Q1 = "mod 2*pi*i*Q"
    MOD_Q2 = "mod (2*pi*i)^2*Q"


@dataclass(frozen=True)
class RegResult:
    value: XComplex
    ambiguity: Ambiguity
    branch_note: str = ""


@dataclass(frozen=True)
class EPartIndexSet:
    """Index set I_e: (i, j) pairs for Fermat type, integers n for Gauss type."""

    pairs: Tuple

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True)
class FermatFibration:
    """Fermat-type fibration with symbol {(x-1)/(x-nu1), (y-1)/(y-nu2)}.

    nu1 = exp(2 pi i nu1_exp/n), nu2 = exp(2 pi i nu2_exp/m); the delta cycle is
    labelled by (eps1, eps2) = (exp(2 pi i eps1_exp/n), exp(2 pi i eps2_exp/m)).
    """

    n: int
    m: int
    nu1_exp: int
    nu2_exp: int
    eps1_exp: int = 0
    eps2_exp: int = 0

    def __post_init__(self):
        if self.n < 2 or self.m < 2:
            raise DomainError(f"n and m must be at least 2, got ({self.n}, {self.m})")
        if not 1 <= self.nu1_exp < self.n or not 1 <= self.nu2_exp < self.m:
            raise DomainError(
                f"nu exponents must lie in 1..n-1 and 1..m-1, got ({self.nu1_exp}, {self.nu2_exp})"
            )
        object.__setattr__(self, "eps1_exp", self.eps1_exp % self.n)
        object.__setattr__(self, "eps2_exp", self.eps2_exp % self.m)

    def a(self, i: int) -> Fraction:
        return 1 - Fraction(i, self.n)

    def b(self, j: int) -> Fraction:
        return 1 - Fraction(j, self.m)


@dataclass(frozen=True)
class GaussFibration:
    """Gauss-type fibration y^N = x^a (1-x)^b (1-tx)^(N-b) with coefficients lambda on I_e."""

    N: int
    a: int
    b: int
    d: int
    lambdas: Dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        N, a, b, d = self.N, self.a, self.b, self.d
        if not (1 <= a < N and 1 <= b < N):
            raise DomainError(f"a and b must lie in 1..N-1, got a={a}, b={b}, N={N}")
        if gcd(gcd(N, a), b) != 1:
            raise DomainError(f"gcd(N, a, b) must be 1, got N={N}, a={a}, b={b}")
        if d < 1 or N % d:
            raise DomainError(f"d must divide N, got d={d}, N={N}")
        if (a * d) % N == 0 or (b * d) % N == 0:
            raise DegenerateParameterError(f"a*d/N and b*d/N must not be integers (a={a}, b={b}, d={d})")
        lambdas = {int(k): Fraction(v) for k, v in self.lambdas.items()}
        expected = set(gauss_index_set(N, d))
        if set(lambdas) != expected:
            raise DomainError(f"lambda must be given on I_e = {sorted(expected)}, got {sorted(lambdas)}")
        object.__setattr__(self, "lambdas", lambdas)

    def a_n(self, n: int) -> Fraction:
        return Fraction(self.a * n % self.N, self.N)

    def b_n(self, n: int) -> Fraction:
        return Fraction(self.b * n % self.N, self.N)


def _root(ctx, k: int, n: int):
    """exp(2 pi i k/n) from exact cospi/sinpi."""
    x = ctx.mpf(2 * (k % n)) / n
    return ctx.mpc(ctx.cospi(x), ctx.sinpi(x))


# --- Fermat type -----------------------------------------------------------

def fermat_index_set(n: int, m: int, i0: int, j0: int) -> EPartIndexSet:
    """Orbit {([s i0]_n, [s j0]_m) : s in (Z/nmZ)^x} in ascending order of s.

    Raises:
        DegenerateParameterError: If i0 = 0 mod n or j0 = 0 mod m, i.e. e
            factors through a projection.
    """
    if i0 % n == 0 or j0 % m == 0:
        raise DegenerateParameterError(
            f"(i0, j0) = ({i0}, {j0}) factors through a projection for (n, m) = ({n}, {m})"
        )
    seen = []
    for s in range(1, n * m):
        if gcd(s, n * m) != 1:
            continue
        pair = ((s * i0) % n, (s * j0) % m)
        if pair not in seen:
            seen.append(pair)
    return EPartIndexSet(tuple(seen))


def _fermat_coefficients(fib: FermatFibration, prec: Precision, pairs=None) -> List[Tuple[Fraction, Fraction, XComplex]]:
    """(a_i, b_j, c_ij) with c_ij = (1-nu1^-i)(1-nu2^-j) eps1^i eps2^j / nm."""
    ctx = prec.ctx
    n, m = fib.n, fib.m
    if pairs is None:
        pairs = [(i, j) for i in range(1, n) for j in range(1, m)]
    rows = []
    for i, j in pairs:
        c = (
            (1 - _root(ctx, -i * fib.nu1_exp, n))
            * (1 - _root(ctx, -j * fib.nu2_exp, m))
            * _root(ctx, i * fib.eps1_exp, n)
            * _root(ctx, j * fib.eps2_exp, m)
            / (n * m)
        )
        rows.append((fib.a(i), fib.b(j), c))
    return rows


def fermat_c0_c1(fib: FermatFibration, prec: Optional[Precision] = None) -> Tuple[XComplex, Fraction]:
    """Constants (C0, C1) of the delta regulator, C0 taken modulo 2 pi i Q."""
    prec = resolve(prec)
    ctx = prec.ctx
    n, m = fib.n, fib.m
    e1, e2 = fib.eps1_exp, fib.eps2_exp
    v1, v2 = fib.nu1_exp, fib.nu2_exp
    nu1, nu2 = _root(ctx, v1, n), _root(ctx, v2, m)
    eps1, eps2 = _root(ctx, e1, n), _root(ctx, e2, m)
    base = ctx.log(n * m * (1 - nu1) * (1 - nu2))

    one1, one2 = e1 == 0, e2 == 0
    at_nu1, at_nu2 = e1 == v1, e2 == v2
    generic1, generic2 = not (one1 or at_nu1), not (one2 or at_nu2)

    if (one1 and one2) or (at_nu1 and at_nu2):
        return -base, Fraction(1)
    if (one1 and at_nu2) or (at_nu1 and one2):
        return base, Fraction(-1)
    if one1 and generic2:
        return ctx.log((eps2 - 1) / (eps2 - nu2)), Fraction(0)
    if generic1 and one2:
        return ctx.log((eps1 - 1) / (eps1 - nu1)), Fraction(0)
    if at_nu1 and generic2:
        return -ctx.log((eps2 - 1) / (eps2 - nu2)), Fraction(0)
    if generic1 and at_nu2:
        return -ctx.log((eps1 - 1) / (eps1 - nu1)), Fraction(0)
    return ctx.mpc(0), Fraction(0)


def fermat_c0_c1_digamma(fib: FermatFibration, prec: Optional[Precision] = None) -> Tuple[XComplex, XComplex]:
    """Digamma packaging: C0 = sum c_ij(-2 psi(1) + psi(a_i) + psi(b_j)), C1 = sum c_ij."""
    prec = resolve(prec)
    ctx = prec.ctx
    psi1 = ctx.digamma(1)
    c0, c1 = ctx.mpc(0), ctx.mpc(0)
    for a, b, c in _fermat_coefficients(fib, prec):
        c0 += c * (-2 * psi1 + digamma(a, prec) + digamma(b, prec))
        c1 += c
    return c0, c1


def _check_fermat_t(prec: Precision, t: Number):
    t = prec.scalar(t)
    if t == 1:
        raise SingularFiberError("t = 1 is a singular fibre")
    return t


def _fermat_g_sum(fib: FermatFibration, t, prec: Precision):
    total = prec.ctx.mpc(0)
    for a, b, c in _fermat_coefficients(fib, prec):
        total += c * g_primitive(a, b, 1 - t, prec)
    return total


def fermat_reg_delta(fib: FermatFibration, t: Number, prec: Optional[Precision] = None) -> RegResult:
    """(1/2 pi i) <reg | delta(eps1, eps2)> = C0 + C1 log(1-t) + sum c_ij G_{a_i,b_j}(1-t).

    Args:
        fib: The fibration and cycle label.
        t: Real t > 0, or complex t with |1-t| < 1.
        prec: Precision context.

    Returns:
        RegResult with ambiguity MOD_Q1.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    t = _check_fermat_t(prec, t)
    c0, c1 = fermat_c0_c1(fib, prec)
    value = c0 + int(c1) * ctx.log(ctx.mpc(1 - t)) + _fermat_g_sum(fib, t, prec)
    return RegResult(value, Ambiguity.MOD_Q1, "constants table")


def fermat_reg_delta_digamma(fib: FermatFibration, t: Number, prec: Optional[Precision] = None) -> RegResult:
    """Delta regulator with the constants in digamma form."""
    prec = resolve(prec)
    ctx = prec.ctx
    t = _check_fermat_t(prec, t)
    c0, c1 = fermat_c0_c1_digamma(fib, prec)
    value = c0 + c1 * ctx.log(ctx.mpc(1 - t)) + _fermat_g_sum(fib, t, prec)
    return RegResult(value, Ambiguity.MOD_Q1, "digamma constants")


def _inverse_3f2_term(a: Fraction, b: Fraction, minus_z, prec: Precision):
    """a^-1 C_{a,b} (-z)^a F_{a,b}(z) + b^-1 C_{b,a} (-z)^b F_{b,a}(z)."""
    z = -minus_z
    return (
        cap_C(a, b, prec) * pow_principal(minus_z, a, prec) * f_ab(a, b, z, prec) / prec.real(a)
        + cap_C(b, a, prec) * pow_principal(minus_z, b, prec) * f_ab(b, a, z, prec) / prec.real(b)
    )


def _beta_term(a: Fraction, b: Fraction, z, prec: Precision):
    """a^-1 B_{a,b} z^a F_{a,b}(z) + b^-1 B_{b,a} z^b F_{b,a}(z)."""
    return (
        cap_B(a, b, prec) * pow_principal(z, a, prec) * f_ab(a, b, z, prec) / prec.real(a)
        + cap_B(b, a, prec) * pow_principal(z, b, prec) * f_ab(b, a, z, prec) / prec.real(b)
    )


def _z_of_t(prec: Precision, t):
    t = prec.scalar(t)
    if t == 1:
        raise SingularFiberError("t = 1 is a singular fibre")
    return 1 / (1 - t)


def fermat_reg_delta_alt(fib: FermatFibration, t: Number, prec: Optional[Precision] = None) -> RegResult:
    """Delta regulator as -sum c_ij (a^-1 C (-z)^a F_{a,b} + b^-1 C (-z)^b F_{b,a}), z = 1/(1-t).

    Raises:
        DegenerateParameterError: If a_i = b_j for some pair.
        DivergenceError: If |z| > 1.
    """
    prec = resolve(prec)
    z = _z_of_t(prec, t)
    total = prec.ctx.mpc(0)
    for a, b, c in _fermat_coefficients(fib, prec):
        if a == b:
            raise DegenerateParameterError(f"a_i = b_j = {a} puts C_(a,b) on a Gamma pole")
        total += c * _inverse_3f2_term(a, b, -z, prec)
    return RegResult(-total, Ambiguity.MOD_Q1, "3F2 at z = 1/(1-t)")


def fermat_reg_gamma(
    fib: FermatFibration,
    e_spec: Tuple[int, int],
    t: Number,
    prec: Optional[Precision] = None,
) -> RegResult:
    """Regulator paired with gamma: sum over I_e of c_ij (a^-1 B z^a F_{a,b} + b^-1 B z^b F_{b,a}).

    Args:
        fib: The fibration and cycle label.
        e_spec: (i0, j0) generating I_e.
        t: Point with |1/(1-t)| <= 1; the unit circle is summed by acceleration.
        prec: Precision context.

    Returns:
        RegResult with ambiguity MOD_Q2.
    """
    prec = resolve(prec)
    index_set = fermat_index_set(fib.n, fib.m, *e_spec)
    for i, j in index_set:
        if fib.a(i) == fib.b(j):
            raise DegenerateParameterError(f"a_{i} = b_{j} = {fib.a(i)} for (i, j) in I_e")
    z = _z_of_t(prec, t)
    total = prec.ctx.mpc(0)
    for a, b, c in _fermat_coefficients(fib, prec, pairs=index_set.pairs):
        total += c * _beta_term(a, b, z, prec)
    return RegResult(total, Ambiguity.MOD_Q2, "3F2 at z = 1/(1-t)")


def fermat_periods(
    fib: FermatFibration,
    i: int,
    j: int,
    t: Number,
    cycle: str = "delta",
    prec: Optional[Precision] = None,
) -> XComplex:
    """Period of the (i, j) eigenform over delta(eps) or gamma(eps).

    Raises:
        DomainError: Outside |1-t| < 1 (delta) or |t| < 1 (gamma).
    """
    prec = resolve(prec)
    ctx = prec.ctx
    t = prec.scalar(t)
    a, b = fib.a(i), fib.b(j)
    prefactor = _root(ctx, i * fib.eps1_exp, fib.n) * _root(ctx, j * fib.eps2_exp, fib.m) / (fib.n * fib.m)
    if cycle == "delta":
        if abs(1 - t) >= 1:
            raise DomainError(f"delta period needs |1-t| < 1, got t = {t}")
        return -prefactor * 2j * ctx.pi * gauss_2f1(a, b, 1, 1 - t, prec)
    if cycle == "gamma":
        if abs(t) >= 1:
            raise DomainError(f"gamma period needs |t| < 1, got t = {t}")
        return prefactor * beta(a, b, prec) * gauss_2f1(a, b, a + b, t, prec)
    raise ValueError(f"unknown cycle {cycle!r}")


def fermat_gamma_period_oracle(fib: FermatFibration, i: int, j: int, t: Number, prec: Optional[Precision] = None):
    """Gamma period from the Euler integral, independent of the 2F1 code."""
    prec = resolve(prec)
    ctx = prec.ctx
    prefactor = _root(ctx, i * fib.eps1_exp, fib.n) * _root(ctx, j * fib.eps2_exp, fib.m) / (fib.n * fib.m)
    return prefactor * euler_integral_oracle(fib.a(i), fib.b(j), t, prec)


# --- Gauss type ------------------------------------------------------------

def gauss_index_set(N: int, d: int) -> EPartIndexSet:
    """I_e = {n : 1 <= n <= N-1, d | n, gcd(n/d, N/d) = 1}."""
    if d < 1 or N % d:
        raise DomainError(f"d must divide N, got d={d}, N={N}")
    return EPartIndexSet(tuple(n for n in range(1, N) if n % d == 0 and gcd(n // d, N // d) == 1))


def lambda_example(N: int, d: int) -> Dict[int, Fraction]:
    """lambda_n = 1 on I_e; sum_n zeta^n is a Ramanujan sum, hence rational."""
    return {n: Fraction(1) for n in gauss_index_set(N, d)}


def lambda_constraint_check(
    N: int,
    index_set: EPartIndexSet,
    lambdas: Dict[int, Fraction],
    prec: Optional[Precision] = None,
) -> bool:
    """True when sum_n lambda_n zeta^n is rational for every zeta in mu_N."""
    from engine.verify import rational_reconstruct

    prec = resolve(prec)
    ctx = prec.ctx
    tol = ctx.mpf(10) ** (-(prec.digits // 2))
    for k in range(N):
        s = ctx.mpc(0)
        for n in index_set:
            s += prec.real(Fraction(lambdas.get(n, 0))) * _root(ctx, k * n, N)
        if abs(ctx.im(s)) >= tol:
            return False
        if rational_reconstruct(ctx.re(s), config.CONSTRAINT_QMAX, tol, prec) is None:
            return False
    return True


def _gauss_weights(fib: GaussFibration, prec: Precision):
    """(n, a_n, b_n, (1 - zeta_N^n) lambda_n) over I_e."""
    ctx = prec.ctx
    rows = []
    for n in gauss_index_set(fib.N, fib.d):
        w = (1 - _root(ctx, n, fib.N)) * prec.real(fib.lambdas[n])
        rows.append((n, fib.a_n(n), fib.b_n(n), w))
    return rows


def _check_gauss(fib: GaussFibration, prec: Precision) -> None:
    if fib.a == fib.b:
        raise ConjectureRegionError(
            "a = b is only covered conjecturally; no independent check exists, refusing to evaluate"
        )
    if not lambda_constraint_check(fib.N, gauss_index_set(fib.N, fib.d), fib.lambdas, prec):
        raise ConstraintError(f"lambda = {fib.lambdas} fails the rationality constraint over mu_{fib.N}")


def gauss_gamma1_forms(fib: GaussFibration, t: Number, prec: Optional[Precision] = None) -> Tuple[XComplex, XComplex, XComplex]:
    """Both expressions for the gamma1 regulator (without the 2 pi i factor).

    Returns:
        (form1, form2, offset) where form1 uses digamma values and G, form2
        uses the 3F2 at z = 1/(1-t), and offset = pi i sum (1-zeta^n) lambda_n,
        so that form1 + offset = form2 for real t > 2.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    _check_gauss(fib, prec)
    t = _check_fermat_t(prec, t)
    z = 1 / (1 - t)
    psi1 = ctx.digamma(1)
    log_term = ctx.log(ctx.mpc(1 - t))
    form1, form2, weight_sum = ctx.mpc(0), ctx.mpc(0), ctx.mpc(0)
    for n, a, b, w in _gauss_weights(fib, prec):
        form1 += w * (2 * psi1 - digamma(a, prec) - digamma(b, prec) - log_term - g_primitive(a, b, 1 - t, prec))
        form2 += w * _inverse_3f2_term(a, b, -z, prec)
        weight_sum += w
    return form1, form2, 1j * ctx.pi * weight_sum


def gauss_reg(
    fib: GaussFibration,
    t: Number,
    cycle: str = "gamma1",
    prec: Optional[Precision] = None,
) -> RegResult:
    """Regulator of a Gauss-type fibration paired with gamma0 or gamma1.

    gamma1 uses the digamma/G expression (t real > 0 or |1-t| < 1); when
    t > 2 it is cross-checked against the 3F2 expression. gamma0 sums
    (1-zeta^n) lambda_n (a^-1 B z^a F_{a,b} + b^-1 B z^b F_{b,a}).

    Raises:
        ConjectureRegionError: If a = b.
        ConstraintError: If lambda fails the rationality constraint.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    _check_gauss(fib, prec)
    t = _check_fermat_t(prec, t)

    if cycle == "gamma1":
        if ctx.im(t) == 0 and ctx.re(t) > 2:
            form1, form2, offset = gauss_gamma1_forms(fib, t, prec)
            gap = abs(form1 + offset - form2)
            if gap > prec.tolerance(10) * max(1, abs(form2)):
                logger.warning("gauss_reg: gamma1 forms disagree by %s at t = %s", ctx.nstr(gap, 5), ctx.nstr(t, 10))
            return RegResult(2j * ctx.pi * form1, Ambiguity.MOD_Q1, "digamma form, 3F2 form cross-checked")
        psi1 = ctx.digamma(1)
        log_term = ctx.log(ctx.mpc(1 - t))
        form1 = ctx.mpc(0)
        for n, a, b, w in _gauss_weights(fib, prec):
            form1 += w * (2 * psi1 - digamma(a, prec) - digamma(b, prec) - log_term - g_primitive(a, b, 1 - t, prec))
        return RegResult(2j * ctx.pi * form1, Ambiguity.MOD_Q1, "digamma form")

    if cycle == "gamma0":
        z = 1 / (1 - t)
        total = ctx.mpc(0)
        for n, a, b, w in _gauss_weights(fib, prec):
            if a == b:
                raise DegenerateParameterError(f"a_{n} = b_{n} = {a} puts B_(a,b) on a Gamma pole")
            total += w * _beta_term(a, b, z, prec)
        return RegResult(total, Ambiguity.MOD_Q2, "3F2 at z = 1/(1-t)")

    raise ValueError(f"unknown cycle {cycle!r}")


def gauss_gamma_derivative_rhs(fib: GaussFibration, t: Number, prec: Optional[Precision] = None) -> XComplex:
    """-sum (1-zeta^n) lambda_n B(a_n, b_n) F(a_n, b_n, a_n+b_n; t), the target of (t-1) d/dt gamma0."""
    prec = resolve(prec)
    total = prec.ctx.mpc(0)
    for n, a, b, w in _gauss_weights(fib, prec):
        total += w * beta(a, b, prec) * gauss_2f1(a, b, a + b, t, prec)
    return -total


def fermat_gamma_derivative_rhs(
    fib: FermatFibration, e_spec: Tuple[int, int], t: Number, prec: Optional[Precision] = None
) -> XComplex:
    """-sum over I_e of c_ij B(a_i, b_j) F(a_i, b_j, a_i+b_j; t)."""
    prec = resolve(prec)
    pairs = fermat_index_set(fib.n, fib.m, *e_spec).pairs
    total = prec.ctx.mpc(0)
    for a, b, c in _fermat_coefficients(fib, prec, pairs=pairs):
        total += c * beta(a, b, prec) * gauss_2f1(a, b, a + b, t, prec)
    return -total


# --- Elliptic families -----------------------------------------------------

def _real_t(prec: Precision, t: Number):
    t = prec.real(t)
    if t == 0 or t == 1:
        raise SingularFiberError(f"t = {prec.ctx.nstr(t, 10)} is a singular fibre")
    return t


def legendre_reg(t: Number, prec: Optional[Precision] = None) -> XReal:
    """Real regulator of the symbol on y^2 = x(x-1)(x-t).

    t < 0 uses z^(1/2) 3F2(1/2,1/2,1/2; 1,3/2; z) with z = 1/(1-t); t > 0
    uses Re[-log 16 + log(1-t) + G_{1/2,1/2}(1-t)].
    """
    prec = resolve(prec)
    ctx = prec.ctx
    t = _real_t(prec, t)
    half = ctx.mpf(1) / 2
    if t < 0:
        z = 1 / (1 - t)
        return ctx.sqrt(z) * pfq(HGSpec((half, half, half), (1, 3 * half), z), prec)
    return -ctx.log(16) + ctx.log(abs(1 - t)) + ctx.re(g_primitive(half, half, 1 - t, prec))


def family2_reg(t: Number, prec: Optional[Precision] = None) -> XReal:
    """Real regulator on y^2 = x^3 - 9x^2 + 108t (parameters 1/6, 5/6).

    Raises:
        BranchBoundaryError: At |t - 1| = 1.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    t = _real_t(prec, t)
    a, b = Fraction(1, 6), Fraction(5, 6)
    distance = abs(t - 1)
    if distance == 1:
        raise BranchBoundaryError("|t - 1| = 1 separates the two regulator formulas")
    if distance < 1:
        return ctx.log(432) - ctx.log(1 - t) - ctx.re(g_primitive(a, b, 1 - t, prec))
    z = 1 / (1 - t)
    if t < 0:
        return (
            ctx.mpf(3) / 2 * beta(a, a, prec) * ctx.power(z, prec.real(a)) * f_ab(a, b, z, prec)
            + ctx.mpf(3) / 10 * beta(b, b, prec) * ctx.power(z, prec.real(b)) * f_ab(b, a, z, prec)
        ) / ctx.pi
    logger.debug("family2_reg: t = %s continues through the 3F2 form at -z > 0", ctx.nstr(t, 10))
    return ctx.re(_inverse_3f2_term(a, b, -z, prec))


def family3_reg(t: Number, prec: Optional[Precision] = None) -> XReal:
    """Real regulator on y^2 = x^3 + (3x + 4t)^2 (parameters 1/3, 2/3).

    Raises:
        BranchBoundaryError: At |t| = 1.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    t = _real_t(prec, t)
    a, b = Fraction(1, 3), Fraction(2, 3)
    if abs(t) == 1:
        raise BranchBoundaryError("|t| = 1 separates the two regulator formulas")
    if abs(t) < 1:
        return ctx.log(27) - ctx.log(abs(t)) - ctx.re(g_primitive(a, b, t, prec))
    return ctx.sqrt(3) / ctx.pi * _family3_outer(t, prec)


def _family3_outer(t, prec: Precision):
    """B(1/3,1/3) t^(-1/3) F_{1/3,2/3}(1/t) + (1/2) B(2/3,2/3) t^(-2/3) F_{2/3,1/3}(1/t), real roots."""
    ctx = prec.ctx
    a, b = Fraction(1, 3), Fraction(2, 3)
    w = 1 / t
    cube = ctx.cbrt(abs(w)) * (1 if w > 0 else -1)
    return (
        beta(a, a, prec) * cube * f_ab(a, b, w, prec)
        + beta(b, b, prec) / 2 * cube ** 2 * f_ab(b, a, w, prec)
    )


# --- Nomes and elliptic dilogarithm identities -----------------------------

def nome_legendre(t: Number, prec: Optional[Precision] = None) -> XReal:
    """Nome of the Legendre family for t in (-1, 0) or (0, 1).

    On (0, 1) this is q = exp(-2 pi F(1/2,1/2,1;1-t)/F(1/2,1/2,1;t)), in (0, 1).
    On (-1, 0) it is q = -exp(-pi Re F(1/2,1/2,1;1-t)/F(1/2,1/2,1;t)), in (-1, 0),
    with Re F(1/2,1/2,1;1-t) = (1-t)^(-1/2) F(1/2,1/2,1; 1/(1-t)).
    """
    prec = resolve(prec)
    ctx = prec.ctx
    t = prec.real(t)
    half = ctx.mpf(1) / 2
    denominator = gauss_2f1(half, half, 1, t, prec)
    if 0 < t < 1:
        numerator = gauss_2f1(half, half, 1, 1 - t, prec)
        return ctx.exp(-2 * ctx.pi * numerator / denominator)
    if -1 < t < 0:
        numerator = gauss_2f1(half, half, 1, 1 / (1 - t), prec) / ctx.sqrt(1 - t)
        return -ctx.exp(-ctx.pi * numerator / denominator)
    raise DomainError(f"Legendre nome needs t in (-1, 0) or (0, 1), got {ctx.nstr(t, 10)}")


def nome_cubic(t: Number, prec: Optional[Precision] = None) -> XReal:
    """q = -exp(-2 pi/sqrt 3 * Re F(1/3,2/3,1;t)/F(1/3,2/3,1;1-t)) for t in (1, 2).

    The principal boundary value of F(1/3,2/3,1;t) puts tau on the line Re tau = 1/2,
    so the nome is real and negative.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    t = prec.real(t)
    if not 1 < t < 2:
        raise DomainError(f"cubic nome needs t in (1, 2), got {ctx.nstr(t, 10)}")
    a, b = Fraction(1, 3), Fraction(2, 3)
    upper = ctx.re(gauss_2f1(a, b, 1, t, prec, side=1))
    q = -ctx.exp(-2 * ctx.pi / ctx.sqrt(3) * upper / gauss_2f1(a, b, 1, 1 - t, prec))
    if not abs(q) < 1:
        raise DomainError(f"cubic nome {ctx.nstr(q, 10)} has |q| >= 1 at t = {ctx.nstr(t, 10)}")
    return q


def legendre_dilog_identity(t: Number, prec: Optional[Precision] = None) -> Tuple[XReal, XReal]:
    """Legendre regulator against D_q(i) + D_q(i q^(1/2)).

    Returns:
        (lhs, rhs): (pi/4) legendre_reg(t) for t in (-1, 0), or
        -(pi/8) legendre_reg(t) for t in (0, 1), and the elliptic dilogarithm side.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    t_real = prec.real(t)
    if -1 < t_real < 0:
        lhs = ctx.pi / 4 * legendre_reg(t, prec)
    elif 0 < t_real < 1:
        lhs = -ctx.pi / 8 * legendre_reg(t, prec)
    else:
        raise DomainError(f"identity holds for t in (-1, 0) or (0, 1), got {ctx.nstr(t_real, 10)}")
    q = nome_legendre(t, prec)
    i = ctx.mpc(0, 1)
    rhs = elliptic_dilog(q, i, prec) + elliptic_dilog(q, i * ctx.sqrt(q), prec)
    return lhs, rhs


def cubic_dilog_identity(t: Number, prec: Optional[Precision] = None) -> Tuple[XReal, XReal]:
    """Cubic 3F2 combination at 1/t against 6 sqrt(3) D_q(e^(2 pi i/3)) for t in (1, 2)."""
    prec = resolve(prec)
    ctx = prec.ctx
    t = prec.real(t)
    if not 1 < t < 2:
        raise DomainError(f"identity holds for t in (1, 2), got {ctx.nstr(t, 10)}")
    lhs = _family3_outer(t, prec)
    q = nome_cubic(t, prec)
    rhs = 6 * ctx.sqrt(3) * elliptic_dilog(q, _root(ctx, 1, 3), prec)
    return lhs, rhs
