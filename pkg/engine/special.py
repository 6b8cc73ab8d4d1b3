"""Gamma-family and dilogarithm-family special functions."""

import logging
from typing import Optional

from engine.errors import DivergenceError, DomainError, PoleError
from engine.precision import Number, Precision, XComplex, XReal, resolve

logger = logging.getLogger(__name__)


def _check_pole(ctx, x, name: str) -> None:
    if ctx.isnpint(x):
        raise PoleError(f"{name} has a pole at {x}")


def gamma(z: Number, prec: Optional[Precision] = None) -> XComplex:
    """Gamma function.

    Args:
        z: Real or complex argument.
        prec: Precision context.

    Returns:
        Gamma(z) in the working context.

    Raises:
        PoleError: If z is a nonpositive integer.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    z = prec.scalar(z)
    _check_pole(ctx, z, "gamma")
    return ctx.gamma(z)


def digamma(x: Number, prec: Optional[Precision] = None) -> XReal:
    """Digamma psi(x) = Gamma'(x)/Gamma(x)."""
    prec = resolve(prec)
    ctx = prec.ctx
    x = prec.scalar(x)
    _check_pole(ctx, x, "digamma")
    return ctx.digamma(x)


def beta(a: Number, b: Number, prec: Optional[Precision] = None) -> XReal:
    """Euler Beta function Gamma(a)Gamma(b)/Gamma(a+b)."""
    prec = resolve(prec)
    ctx = prec.ctx
    a, b = prec.scalar(a), prec.scalar(b)
    _check_pole(ctx, a, "beta")
    _check_pole(ctx, b, "beta")
    return ctx.gamma(a) * ctx.gamma(b) * ctx.rgamma(a + b)


def cap_B(a: Number, b: Number, prec: Optional[Precision] = None) -> XReal:
    """B_{a,b} := B(a, b-a) = Gamma(a)Gamma(b-a)/Gamma(b).

    Raises:
        PoleError: If a or b-a is a nonpositive integer; in particular at a = b.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    a, b = prec.scalar(a), prec.scalar(b)
    _check_pole(ctx, a, "cap_B")
    _check_pole(ctx, b - a, "cap_B")
    return ctx.gamma(a) * ctx.gamma(b - a) * ctx.rgamma(b)


def cap_C(a: Number, b: Number, prec: Optional[Precision] = None) -> XReal:
    """C_{a,b} := sin(pi a)/pi * B_{a,b} = Gamma(b-a)/(Gamma(1-a)Gamma(b))."""
    prec = resolve(prec)
    ctx = prec.ctx
    a, b = prec.scalar(a), prec.scalar(b)
    _check_pole(ctx, b - a, "cap_C")
    return ctx.gamma(b - a) * ctx.rgamma(1 - a) * ctx.rgamma(b)


def li2(z: Number, prec: Optional[Precision] = None) -> XComplex:
    """Dilogarithm on the principal sheet, cut [1, inf), continuous from below.

    For |z| > 1 the inversion formula
    Li2(z) = -pi^2/6 - log(-z)^2/2 - Li2(1/z) is applied with principal logs,
    which puts real z > 1 on the lower side of the cut.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    z = prec.complex(z)
    if z == 0:
        return ctx.mpc(0)
    if abs(z) <= 1:
        return ctx.mpc(ctx.polylog(2, z))
    w = 1 / z
    return -ctx.pi ** 2 / 6 - ctx.log(-z) ** 2 / 2 - ctx.mpc(ctx.polylog(2, w))


def bloch_wigner(x: Number, prec: Optional[Precision] = None) -> XReal:
    """Bloch-Wigner function D(x) = Im Li2(x) + log|x| arg(1-x).

    Raises:
        DomainError: At x = 0 or x = 1.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    x = prec.complex(x)
    if x == 0 or x == 1:
        raise DomainError(f"Bloch-Wigner function is undefined at {x}")
    if abs(x) > 1:
        # D(1/x) = -D(x) keeps Li2 inside the unit disc
        return -_bloch_wigner_inner(ctx, 1 / x, prec)
    return _bloch_wigner_inner(ctx, x, prec)


def _bloch_wigner_inner(ctx, x, prec: Precision) -> XReal:
    return ctx.im(li2(x, prec)) + ctx.log(abs(x)) * ctx.arg(1 - x)


def elliptic_dilog(q: Number, x: Number, prec: Optional[Precision] = None) -> XReal:
    """Elliptic dilogarithm D_q(x) = sum over n in Z of D(x q^n).

    The two-sided sum keeps every n with |q|^|n| >= 10^(-P-5)/max(|x|, 1/|x|).

    Raises:
        DivergenceError: If |q| >= 1.
        DomainError: If q = 0, x = 0 or some x q^n equals 1.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    q = prec.complex(q)
    x = prec.complex(x)
    if q == 0 or x == 0:
        raise DomainError("elliptic dilogarithm needs q != 0 and x != 0")
    if abs(q) >= 1:
        raise DivergenceError(f"elliptic dilogarithm diverges for |q| = {ctx.nstr(abs(q), 10)} >= 1")

    spread = max(abs(x), 1 / abs(x))
    threshold = ctx.mpf(10) ** (-prec.digits - 5) / spread
    n_max = int(ctx.ceil(ctx.log(threshold) / ctx.log(abs(q)))) + 1
    logger.debug("elliptic_dilog: summing n in [-%d, %d]", n_max, n_max)

    terms = []
    for n in range(-n_max, n_max + 1):
        y = x * q ** n
        if y == 1:
            raise DomainError(f"x q^{n} = 1 for x = {x}, q = {q}")
        terms.append(bloch_wigner(y, prec))
    return ctx.fsum(terms)
