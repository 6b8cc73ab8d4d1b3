"""Generalized hypergeometric evaluation, 2F1 continuation and independent oracles."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import config
from engine.errors import (
    CutError,
    DegenerateParameterError,
    DivergenceError,
    DomainError,
    MaxTermsExceeded,
    PoleError,
    QuadratureError,
)
from engine.precision import Number, Precision, XComplex, XReal, resolve

logger = logging.getLogger(__name__)

# A transformed 2F1 series is only used when its argument is at most this far out
_MAX_RATIO = 0.97
_MAX_DEPTH = 4


@dataclass(frozen=True)
class HGSpec:
    """A pFq instance: upper and lower parameter lists plus the argument."""

    upper: Tuple[Number, ...]
    lower: Tuple[Number, ...]
    z: Number

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(self.upper))
        object.__setattr__(self, "lower", tuple(self.lower))


def pfq(spec: HGSpec, prec: Optional[Precision] = None) -> XComplex:
    """Evaluate a pFq series.

    Partial sums use incremental Pochhammer ratios and stop once a geometric
    majorant of the tail drops below 10^(-P-5) times the partial sum. On
    |z| = 1 with Re(sum lower - sum upper) > 0 the boundary series is summed
    with mpmath's convergence acceleration.

    Args:
        spec: Parameters and argument.
        prec: Precision context.

    Returns:
        The series value (real when every input is real).

    Raises:
        PoleError: If a lower parameter is a nonpositive integer.
        DivergenceError: Outside the region of convergence.
        MaxTermsExceeded: If the term cap is reached first.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    upper = [prec.scalar(a) for a in spec.upper]
    lower = [prec.scalar(b) for b in spec.lower]
    z = prec.scalar(spec.z)

    for b in lower:
        if ctx.isnpint(b):
            raise PoleError(f"lower parameter {b} is a nonpositive integer")
    if z == 0:
        return ctx.mpf(1)

    terminating = any(ctx.isnpint(a) for a in upper)
    p, q = len(upper), len(lower)
    if not terminating:
        if p > q + 1:
            raise DivergenceError(f"{p}F{q} series diverges for z != 0")
        if p == q + 1:
            radius = abs(z)
            if radius > 1:
                raise DivergenceError(f"{p}F{q} series diverges at |z| = {ctx.nstr(radius, 10)} > 1")
            if radius == 1:
                margin = ctx.re(ctx.fsum(lower) - ctx.fsum(upper))
                if margin <= 0:
                    raise DivergenceError(
                        f"{p}F{q} on |z| = 1 needs Re(sum lower - sum upper) > 0, got {ctx.nstr(margin, 10)}"
                    )
                logger.debug("pfq: boundary series with margin %s", ctx.nstr(margin, 8))
                return ctx.hyper(upper, lower, z)
    return _series(upper, lower, z, terminating, prec)


def _series(upper, lower, z, terminating: bool, prec: Precision):
    ctx = prec.ctx
    eps = ctx.mpf(10) ** (-prec.digits - config.SERIES_TAIL_EXTRA_DIGITS)
    radius = abs(z)
    entire = len(upper) <= len(lower)
    # Beyond this index the term ratio is monotone in n
    settled = int(max([abs(x) for x in upper + lower] + [0])) + 2

    term = ctx.mpf(1)
    total = ctx.mpf(1)
    n = 0
    while True:
        num = ctx.mpf(1)
        for a in upper:
            num *= a + n
        den = ctx.mpf(n + 1)
        for b in lower:
            den *= b + n
        ratio = num / den * z
        term *= ratio
        total += term
        n += 1

        if term == 0:
            if terminating:
                break
            continue
        if n > prec.max_terms:
            raise MaxTermsExceeded(f"series did not converge within {prec.max_terms} terms")
        if n <= settled:
            continue
        rho = abs(ratio) if entire else max(abs(ratio), radius)
        if rho >= 1:
            continue
        tail = abs(term) * rho / (1 - rho)
        if tail <= eps * max(abs(total), eps):
            break
    logger.debug("pfq: %d terms", n)
    return total


def gauss_2f1(
    a: Number,
    b: Number,
    c: Number,
    z: Number,
    prec: Optional[Precision] = None,
    side: Optional[int] = None,
) -> XComplex:
    """Gauss hypergeometric function F(a,b,c;z) on the cut plane.

    The direct series serves |z| <= 1/2. Elsewhere the Pfaff map z/(z-1) and
    the 1/z and 1-z connection formulas are tried, and the one whose series
    argument is smallest wins. A connection formula whose Gamma factors
    degenerate (a-b or c-a-b an integer) is only used through a symmetric
    parameter perturbation of size 10^(-P/2).

    Args:
        a, b, c: Real parameters.
        z: Argument off the cut [1, inf).
        prec: Precision context.
        side: +1 or -1 to ask for the boundary value from above or below the cut.

    Raises:
        PoleError: If c is a nonpositive integer.
        CutError: If z lies on [1, inf) and no side is given.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    a, b, c = prec.real(a), prec.real(b), prec.real(c)
    z = prec.scalar(z)
    if ctx.isnpint(c):
        raise PoleError(f"F(a,b,c;z) has a pole at c = {c}")
    if z == 0:
        return ctx.mpf(1)

    on_real_axis = ctx.im(z) == 0
    if on_real_axis and ctx.re(z) >= 1:
        if side not in (1, -1) or ctx.re(z) == 1:
            raise CutError(f"z = {ctx.nstr(z, 10)} lies on the branch cut [1, inf)")
        return _boundary_value(a, b, c, ctx.re(z), side, prec)

    value = _evaluate(a, b, c, z, prec, 0)
    return ctx.re(value) if on_real_axis else value


def _is_integer(ctx, x, prec: Precision) -> bool:
    # Tighter than the 10^(-P/2) perturbation so perturbed parameters read as generic
    return abs(x - ctx.nint(x)) < ctx.mpf(10) ** (-(3 * prec.digits // 4))


def _evaluate(a, b, c, z, prec: Precision, depth: int):
    ctx = prec.ctx
    radius = abs(z)
    if radius <= 0.5:
        return _direct(a, b, c, z, prec)
    if depth > _MAX_DEPTH:
        logger.debug("gauss_2f1: recursion cap at z = %s, using mpmath continuation", ctx.nstr(z, 8))
        return ctx.hyp2f1(a, b, c, z)

    candidates = [(radius, "direct", False)]
    if ctx.re(z) < 0.5:
        candidates.append((abs(z / (z - 1)), "pfaff", False))
    candidates.append((1 / radius, "inverse", _is_integer(ctx, a - b, prec)))
    candidates.append((abs(1 - z), "reflect", _is_integer(ctx, c - a - b, prec)))
    candidates.sort(key=lambda item: item[0])

    for ratio, kind, degenerate in candidates:
        if not degenerate and ratio <= _MAX_RATIO:
            return _apply(kind, a, b, c, z, prec, depth)
    for ratio, kind, degenerate in candidates:
        if degenerate and ratio <= _MAX_RATIO:
            logger.debug("gauss_2f1: degenerate %s connection, perturbing a", kind)
            return _perturbed(kind, a, b, c, z, prec, depth)
    logger.debug("gauss_2f1: no fast transformation at z = %s, using mpmath continuation", ctx.nstr(z, 8))
    return ctx.hyp2f1(a, b, c, z)


def _apply(kind: str, a, b, c, z, prec: Precision, depth: int, log_minus_z=None):
    ctx = prec.ctx
    if kind == "direct":
        return _direct(a, b, c, z, prec)
    if kind == "pfaff":
        w = z / (z - 1)
        return ctx.exp(-a * ctx.log(1 - z)) * _evaluate(a, c - b, c, w, prec, depth + 1)
    if kind == "inverse":
        if log_minus_z is None:
            log_minus_z = ctx.log(-z)
        w = 1 / z
        first = (
            ctx.gamma(b - a) * ctx.rgamma(b) * ctx.rgamma(c - a)
            * ctx.exp(-a * log_minus_z) * _evaluate(a, a - c + 1, a - b + 1, w, prec, depth + 1)
        )
        second = (
            ctx.gamma(a - b) * ctx.rgamma(a) * ctx.rgamma(c - b)
            * ctx.exp(-b * log_minus_z) * _evaluate(b, b - c + 1, b - a + 1, w, prec, depth + 1)
        )
        return ctx.gamma(c) * (first + second)
    if kind == "reflect":
        w = 1 - z
        first = (
            ctx.gamma(c - a - b) * ctx.rgamma(c - a) * ctx.rgamma(c - b)
            * _evaluate(a, b, a + b - c + 1, w, prec, depth + 1)
        )
        second = (
            ctx.exp((c - a - b) * ctx.log(w)) * ctx.gamma(a + b - c) * ctx.rgamma(a) * ctx.rgamma(b)
            * _evaluate(c - a, c - b, c - a - b + 1, w, prec, depth + 1)
        )
        return ctx.gamma(c) * (first + second)
    raise ValueError(f"unknown transformation {kind!r}")


def _perturbed(kind: str, a, b, c, z, prec: Precision, depth: int, log_minus_z=None):
    # The connection terms blow up like 1/h, so the two evaluations carry P/2 extra digits
    h_digits = prec.digits // 2
    wide = prec.extended(h_digits)
    ctx = wide.ctx
    h = ctx.mpf(10) ** (-h_digits)
    a, b, c, z = ctx.mpf(a), ctx.mpf(b), ctx.mpf(c), ctx.convert(z)
    if log_minus_z is not None:
        log_minus_z = ctx.convert(log_minus_z)
    plus = _apply(kind, a + h, b, c, z, wide, depth, log_minus_z)
    minus = _apply(kind, a - h, b, c, z, wide, depth, log_minus_z)
    return prec.ctx.convert((plus + minus) / 2)


def _direct(a, b, c, z, prec: Precision):
    return pfq(HGSpec((a, b), (c,), z), prec)


def _boundary_value(a, b, c, x, side: int, prec: Precision):
    # z = x + i0*side, so arg(-z) = -pi*side
    ctx = prec.ctx
    log_minus_z = ctx.mpc(ctx.log(x), -ctx.pi * side)
    if _is_integer(ctx, a - b, prec):
        return _perturbed("inverse", a, b, c, ctx.mpc(x), prec, 0, log_minus_z)
    return _apply("inverse", a, b, c, ctx.mpc(x), prec, 0, log_minus_z)


def connection_one_minus_t(a: Number, b: Number, t: Number, prec: Optional[Precision] = None) -> XComplex:
    """Right-hand side of F(a,b,1;1-t) = C_{a,b}(-z)^a F(a,a,1+a-b;z) + C_{b,a}(-z)^b F(b,b,1-a+b;z).

    Here z = 1/(1-t) and powers are principal.

    Raises:
        DegenerateParameterError: If a - b is an integer.
        DivergenceError: If |z| >= 1.
    """
    from engine.special import cap_C

    prec = resolve(prec)
    ctx = prec.ctx
    a, b = prec.real(a), prec.real(b)
    t = prec.scalar(t)
    if _is_integer(ctx, a - b, prec):
        raise DegenerateParameterError(f"connection coefficients have a Gamma pole at a - b = {a - b}")
    if t == 1:
        raise DomainError("t = 1 gives z = 1/(1-t) = infinity")
    z = 1 / (1 - t)
    if abs(z) >= 1:
        raise DivergenceError(f"connection formula needs |z| < 1, got |z| = {ctx.nstr(abs(z), 10)}")
    minus_z = ctx.mpc(-z)
    first = cap_C(a, b, prec) * ctx.exp(a * ctx.log(minus_z)) * gauss_2f1(a, a, 1 + a - b, z, prec)
    second = cap_C(b, a, prec) * ctx.exp(b * ctx.log(minus_z)) * gauss_2f1(b, b, 1 - a + b, z, prec)
    return first + second


def _beta_connection_terms(a, b, t, prec: Precision) -> XReal:
    from engine.special import cap_B

    ctx = prec.ctx
    z = 1 / (1 - t)
    first = cap_B(a, b, prec) * ctx.power(z, a) * gauss_2f1(a, a, 1 + a - b, z, prec)
    second = cap_B(b, a, prec) * ctx.power(z, b) * gauss_2f1(b, b, 1 - a + b, z, prec)
    return ctx.re(first + second)


def connection_beta_period(a: Number, b: Number, t: Number, prec: Optional[Precision] = None) -> XReal:
    """Right-hand side of B(a,b)F(a,b,a+b;t) = B_{a,b} z^a F(a,a,1+a-b;z) + B_{b,a} z^b F(b,b,1-a+b;z).

    Here z = 1/(1-t) lies in (0, 1) because t < 0. When a - b is an integer the
    Gamma poles of the two terms cancel, and the sum is taken as the mean of the
    values at a + h and a - h, h = 10^(-P/2), with P/2 extra digits.

    Raises:
        DomainError: If t >= 0.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    a_real, b_real, t_real = prec.real(a), prec.real(b), prec.real(t)
    if t_real >= 0:
        raise DomainError(f"connection to z = 1/(1-t) needs t < 0, got {ctx.nstr(t_real, 10)}")
    if not _is_integer(ctx, a_real - b_real, prec):
        return _beta_connection_terms(a_real, b_real, t_real, prec)

    logger.debug("connection_beta_period: a - b = %s is an integer, perturbing a", ctx.nstr(a_real - b_real, 5))
    h_digits = prec.digits // 2
    wide = prec.extended(h_digits)
    h = wide.ctx.mpf(10) ** (-h_digits)
    a_wide, b_wide, t_wide = wide.real(a), wide.real(b), wide.real(t)
    plus = _beta_connection_terms(a_wide + h, b_wide, t_wide, wide)
    minus = _beta_connection_terms(a_wide - h, b_wide, t_wide, wide)
    return ctx.convert((plus + minus) / 2)


def f_ab(a: Number, b: Number, z: Number, prec: Optional[Precision] = None) -> XComplex:
    """F_{a,b}(z) := 3F2(a,a,a; 1+a-b, a+1; z)."""
    prec = resolve(prec)
    ctx = prec.ctx
    a, b = prec.real(a), prec.real(b)
    if _is_integer(ctx, a - b, prec):
        raise DegenerateParameterError(f"F_(a,b) needs a - b outside Z, got {a - b}")
    return pfq(HGSpec((a, a, a), (1 + a - b, a + 1), z), prec)


def g_primitive(
    a: Number,
    b: Number,
    x: Number,
    prec: Optional[Precision] = None,
    method: str = "auto",
) -> XReal:
    """G(x) = sum_{n>=1} (a)_n (b)_n x^n / (n!^2 n) = a b x 4F3(a+1,b+1,1,1; 2,2,2; x).

    The series serves |x| < 1. Real x <= -1/2 goes through Gauss-Legendre
    quadrature of G(x) = int_0^x (F(a,b,1;u) - 1)/u du, with the integrand
    supplied by gauss_2f1.

    Args:
        a, b: Real parameters.
        x: Argument; real x < 1, or complex x with |x| < 1 on the series path.
        prec: Precision context.
        method: "auto", "series" or "quadrature".

    Raises:
        DomainError: If x >= 1, or the requested method cannot reach x.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    a, b = prec.real(a), prec.real(b)
    x = prec.scalar(x)
    real = ctx.im(x) == 0
    if real:
        x = ctx.re(x)
        if x >= 1:
            raise DomainError(f"G(x) is only continued to x < 1, got x = {ctx.nstr(x, 10)}")
    if x == 0:
        return ctx.mpf(0)

    if method == "auto":
        method = "quadrature" if real and x <= -0.5 else "series"
    if method == "series":
        if abs(x) >= 1:
            raise DomainError(f"series path needs |x| < 1, got |x| = {ctx.nstr(abs(x), 10)}")
        return a * b * x * pfq(HGSpec((a + 1, b + 1, 1, 1), (2, 2, 2), x), prec)
    if method == "quadrature":
        if not real:
            raise DomainError("quadrature path runs along the real axis only")
        return _g_quadrature(a, b, x, prec)
    raise ValueError(f"unknown method {method!r}")


def _g_quadrature(a, b, x, prec: Precision) -> XReal:
    ctx = prec.ctx
    half = ctx.mpf(1) / 2

    def integrand(u):
        if abs(u) <= half:
            return a * b * pfq(HGSpec((a + 1, b + 1, 1), (2, 2), u), prec)
        return (gauss_2f1(a, b, 1, u, prec) - 1) / u

    if x > 0:
        points = [ctx.mpf(0), min(x, half), x] if x > half else [ctx.mpf(0), x]
    else:
        points = [ctx.mpf(0)]
        edge = -half
        while edge > x:
            points.append(edge)
            edge *= 2
        points.append(x)

    value, error = ctx.quad(integrand, points, method="gauss-legendre", error=True)
    if error > ctx.mpf(10) ** (-(prec.digits // 2)) * max(1, abs(value)):
        raise QuadratureError(f"G quadrature error estimate {ctx.nstr(error, 5)} is above 10^(-P/2)")
    logger.debug("g_primitive: quadrature on %d pieces, error %s", len(points) - 1, ctx.nstr(error, 3))
    return value


def euler_integral_oracle(a: Number, b: Number, t: Number, prec: Optional[Precision] = None) -> XReal:
    """Integral of x^(a-1)(1-x)^(b-1)(1-tx)^(-b) over [0, 1] by tanh-sinh quadrature.

    The interval is split at 1/2 and the upper half is reflected, so both
    endpoint singularities sit at 0 where the nodes are exact.

    Raises:
        DomainError: If t >= 1.
        QuadratureError: If the error estimate stays above 10^(-P/2).
    """
    prec = resolve(prec)
    ctx = prec.ctx
    a, b, t = prec.real(a), prec.real(b), prec.real(t)
    if t >= 1:
        raise DomainError(f"Euler integral has a singularity inside [0, 1] for t = {ctx.nstr(t, 10)}")
    half = ctx.mpf(1) / 2

    def lower_half(x):
        return x ** (a - 1) * (1 - x) ** (b - 1) * (1 - t * x) ** (-b)

    def upper_half(y):
        return y ** (b - 1) * (1 - y) ** (a - 1) * (1 - t + t * y) ** (-b)

    total = ctx.mpf(0)
    for f in (lower_half, upper_half):
        value, error = ctx.quad(
            f, [0, half], method="tanh-sinh", error=True, maxdegree=config.QUAD_MAX_DEGREE
        )
        if error > ctx.mpf(10) ** (-(prec.digits // 2)) * max(1, abs(value)):
            raise QuadratureError(f"tanh-sinh error estimate {ctx.nstr(error, 5)} is above 10^(-P/2)")
        total += value
    return total


def agm_oracle(z: Number, prec: Optional[Precision] = None) -> XComplex:
    """1/AGM(1, sqrt(1-z)), equal to F(1/2,1/2,1;z) off the cut."""
    prec = resolve(prec)
    ctx = prec.ctx
    z = prec.scalar(z)
    if ctx.im(z) == 0 and ctx.re(z) >= 1:
        raise CutError(f"z = {ctx.nstr(z, 10)} lies on the branch cut [1, inf)")
    value = 1 / ctx.agm(1, ctx.sqrt(1 - z))
    return ctx.re(value) if ctx.im(z) == 0 else value
