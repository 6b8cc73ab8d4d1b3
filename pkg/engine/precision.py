"""Extended-precision scalars and the per-call precision context.

Every numerical routine in the engine takes a ``Precision`` and works in its
private ``mpmath.MPContext``; nothing reads or writes the global ``mpmath.mp``.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Optional, Union

import mpmath

import config
from engine.errors import DomainError

# Scalar aliases. XReal/XComplex values belong to the context that made them.
XReal = Any
XComplex = Any
Rational = Fraction
Number = Union[int, float, str, Fraction, XReal, XComplex]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*([+-]?\d+))?\s*$")


@lru_cache(maxsize=None)
def _make_context(dps: int) -> mpmath.MPContext:
    ctx = mpmath.MPContext()
    ctx.dps = dps
    return ctx


@dataclass(frozen=True)
class Precision:
    """Decimal precision P plus guard digits, and the matching mpmath context.

    Args:
        digits: Reported precision P.
        guard: Extra working digits carried internally.
        max_terms: Cap on series terms before ``MaxTermsExceeded``.
    """

    digits: int = field(default_factory=config.default_precision)
    guard: int = config.GUARD_DIGITS
    max_terms: int = config.MAX_SERIES_TERMS

    def __post_init__(self):
        if self.digits < 1:
            raise DomainError(f"precision must be positive, got {self.digits}")

    @property
    def dps(self) -> int:
        return self.digits + self.guard

    @property
    def ctx(self) -> mpmath.MPContext:
        return _make_context(self.dps)

    @property
    def eps(self) -> XReal:
        """10^(-P)."""
        return self.ctx.mpf(10) ** (-self.digits)

    def tolerance(self, k: int) -> XReal:
        """Return 10^(k - P), the tolerance scale used by the identity checks."""
        return self.ctx.mpf(10) ** (k - self.digits)

    def extended(self, extra: int) -> "Precision":
        """Same reported precision with ``extra`` more guard digits."""
        return Precision(self.digits, self.guard + extra, self.max_terms)

    def with_digits(self, digits: int) -> "Precision":
        return Precision(digits, self.guard, self.max_terms)

    def real(self, x: Number) -> XReal:
        """Convert ``x`` into a real of this context (exact for Fraction input)."""
        ctx = self.ctx
        if isinstance(x, Fraction):
            return ctx.mpf(x.numerator) / x.denominator
        if isinstance(x, str) and "/" in x:
            return self.real(parse_rational(x))
        value = ctx.convert(x)
        if isinstance(value, ctx.mpc):
            if value.imag != 0:
                raise DomainError(f"expected a real number, got {x}")
            return ctx.mpf(value.real)
        return ctx.mpf(value)

    def complex(self, z: Number) -> XComplex:
        """Convert ``z`` into a complex of this context."""
        ctx = self.ctx
        if isinstance(z, Fraction):
            return ctx.mpc(self.real(z))
        if isinstance(z, str) and "/" in z:
            return ctx.mpc(self.real(z))
        return ctx.mpc(ctx.convert(z))

    def scalar(self, z: Number) -> Union[XReal, XComplex]:
        """Convert keeping real input real and complex input complex."""
        if isinstance(z, (Fraction, int)) or (isinstance(z, str) and "/" in z):
            return self.real(z)
        value = self.ctx.convert(z)
        if isinstance(value, self.ctx.mpc) and value.imag == 0:
            return self.ctx.mpf(value.real)
        return value

    def report(self, x: Number) -> str:
        """Decimal string of ``x`` at the reported precision P."""
        return self.ctx.nstr(x, self.digits)


def resolve(prec: Optional[Precision]) -> Precision:
    """Return ``prec`` or a default context built from the configuration."""
    return prec if prec is not None else Precision()


def parse_rational(text: str) -> Fraction:
    """Parse an exact rational written as ``p/q`` or as an integer.

    Args:
        text: The string to parse.

    Returns:
        Fraction: The reduced rational.

    Raises:
        DomainError: On decimals, floats or a zero denominator.
    """
    match = _RATIONAL_RE.match(str(text))
    if not match:
        raise DomainError(f"expected an exact rational 'p/q' or integer, got {text!r}")
    num, den = match.group(1), match.group(2) or "1"
    if int(den) == 0:
        raise DomainError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den))


def pow_principal(z: Number, a: Number, prec: Optional[Precision] = None) -> XComplex:
    """Principal power exp(a log z) with arg z in (-pi, pi].

    Raises:
        DomainError: At z = 0 with Re(a) <= 0.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    z = prec.complex(z)
    a = prec.scalar(a)
    if z == 0:
        if ctx.re(a) <= 0:
            raise DomainError(f"0 ** {a} is undefined")
        return ctx.mpc(0)
    return ctx.exp(a * ctx.log(z))


def const_pi(prec: Optional[Precision] = None) -> XReal:
    return +resolve(prec).ctx.pi


def const_eulergamma(prec: Optional[Precision] = None) -> XReal:
    return +resolve(prec).ctx.euler
