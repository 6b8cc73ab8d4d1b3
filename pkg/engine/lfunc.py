"""L(E, 2) for elliptic curves over Q through the smoothed functional equation."""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from sympy import primerange

import config
from engine.ellcurve import WeierstrassModel, ap, minimal_local_data
from engine.errors import AmbiguousSignError, DomainError, InsufficientCoefficientsError
from engine.precision import Number, Precision, XReal, resolve

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LSeries:
    """Dirichlet coefficients a_1..a_nmax of a weight-2 newform of level N.

    ``coefficients[n]`` holds a_n; index 0 is unused.
    """

    conductor: int
    coefficients: np.ndarray
    root_number: Optional[int] = None

    @property
    def n_max(self) -> int:
        return len(self.coefficients) - 1

    @property
    def scale(self) -> float:
        """A = sqrt(N)/(2 pi) as a float, for sizing only."""
        return math.sqrt(self.conductor) / (2 * math.pi)

    def with_root_number(self, eps: int) -> "LSeries":
        return replace(self, root_number=eps)

    @classmethod
    def from_model(cls, model: WeierstrassModel, n_max: int) -> "LSeries":
        """Build a_n for n <= n_max from a_p on the minimal model.

        Prime powers follow a_{p^(k+1)} = a_p a_{p^k} - [p does not divide N] p a_{p^(k-1)};
        everything else is multiplicative, read off a smallest-prime-factor sieve.
        """
        minimal, local = minimal_local_data(model)
        level = 1
        for p, data in local.items():
            level *= p ** data.f_p
        return cls(level, _coefficients(minimal, local, level, n_max))


def _smallest_prime_factors(n_max: int) -> np.ndarray:
    spf = np.zeros(n_max + 1, dtype=np.int64)
    for p in primerange(2, int(math.isqrt(n_max)) + 1):
        block = spf[p * p :: p]
        block[block == 0] = p
    spf[spf == 0] = np.arange(n_max + 1)[spf == 0]
    return spf


def _coefficients(model: WeierstrassModel, local: dict, level: int, n_max: int) -> np.ndarray:
    coeffs = np.zeros(n_max + 1, dtype=np.int64)
    if n_max >= 1:
        coeffs[1] = 1
    for p in primerange(2, n_max + 1):
        coeffs[p] = ap(model, p, local.get(p))
    spf = _smallest_prime_factors(n_max)
    for n in range(4, n_max + 1):
        p = int(spf[n])
        if p == n:
            continue
        m, pk = n, 1
        while m % p == 0:
            m //= p
            pk *= p
        if m > 1:
            coeffs[n] = coeffs[pk] * coeffs[m]
        else:
            bad = level % p == 0
            coeffs[n] = coeffs[p] * coeffs[n // p] - (0 if bad else p * coeffs[n // (p * p)])
    return coeffs


def required_terms(conductor: int, prec: Precision, cutoff: float = config.ROOT_NUMBER_CUTOFF) -> int:
    """n_max with exp(-x_n/cutoff) below 10^(-P-3) past the last term."""
    scale = math.sqrt(conductor) / (2 * math.pi)
    digits = prec.digits + config.LSERIES_EXTRA_DIGITS
    return int(math.ceil(scale * (digits * math.log(10) + 5) * max(cutoff, 1.0))) + 1


def incomplete_gamma_upper(s: Number, x: Number, prec: Optional[Precision] = None) -> XReal:
    """Gamma(s, x) for x > 0."""
    prec = resolve(prec)
    ctx = prec.ctx
    x = prec.real(x)
    if x <= 0:
        raise DomainError(f"upper incomplete gamma needs x > 0, got {ctx.nstr(x, 10)}")
    return ctx.gammainc(prec.scalar(s), x)


def _check_length(series: LSeries, prec: Precision, cutoff: float) -> int:
    needed = required_terms(series.conductor, prec, cutoff)
    if series.n_max < needed:
        raise InsufficientCoefficientsError(
            f"need {needed} coefficients for conductor {series.conductor} at P = {prec.digits}, have {series.n_max}"
        )
    return needed


def lambda_completed(
    series: LSeries,
    s: Number,
    eps: int,
    cutoff: Number = config.ROOT_NUMBER_CUTOFF,
    prec: Optional[Precision] = None,
) -> XReal:
    """Lambda(s) = sum a_n [(A/n)^s Gamma(s, c x_n) + eps (A/n)^(2-s) Gamma(2-s, x_n/c)].

    With the true eps the value does not depend on c; with the wrong one it does,
    which is what the root number test relies on.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    n_max = _check_length(series, prec, float(cutoff))
    s = prec.real(s)
    c = prec.real(cutoff)
    scale = ctx.sqrt(series.conductor) / (2 * ctx.pi)
    terms = []
    for n in range(1, n_max + 1):
        a_n = int(series.coefficients[n])
        if a_n == 0:
            continue
        ratio = scale / n
        x_n = n / scale
        terms.append(
            a_n * (
                ctx.power(ratio, s) * ctx.gammainc(s, c * x_n)
                + eps * ctx.power(ratio, 2 - s) * ctx.gammainc(2 - s, x_n / c)
            )
        )
    return ctx.fsum(terms)


def _sign_residual(series: LSeries, eps: int, prec: Precision) -> Tuple[XReal, XReal]:
    # s and 2 - s must reflect exactly at the working precision
    s = 1 + prec.real(str(config.ROOT_NUMBER_DELTA))
    right = lambda_completed(series, s, eps, prec=prec)
    left = lambda_completed(series, 2 - s, eps, prec=prec)
    return abs(right - eps * left), abs(right)


def root_number(series: LSeries, prec: Optional[Precision] = None) -> int:
    """Sign eps of Lambda(s) = eps Lambda(2-s), from the cutoff-dependence residual.

    Raises:
        AmbiguousSignError: If both signs or neither pass, even after one
            precision escalation.
    """
    prec = resolve(prec)
    for attempt in range(2):
        working = prec.with_digits(prec.digits // 2 + 10 + 10 * attempt)
        threshold = working.ctx.mpf(10) ** (-(prec.digits // 2))
        passing = []
        for eps in (1, -1):
            residual, size = _sign_residual(series, eps, working)
            logger.debug("root_number: eps = %+d residual %s", eps, working.ctx.nstr(residual, 5))
            if residual <= threshold * max(1, size):
                passing.append(eps)
        if len(passing) == 1:
            return passing[0]
        logger.warning("root_number: %d signs pass at %d digits, escalating", len(passing), working.digits)
    raise AmbiguousSignError(f"root number undecided for conductor {series.conductor}")


def l_value_2(series: LSeries, prec: Optional[Precision] = None) -> XReal:
    """L(E, 2) = sum a_n [(1 + x_n) e^(-x_n)/n^2 + eps E1(x_n)/A^2], x_n = n/A."""
    prec = resolve(prec)
    ctx = prec.ctx
    eps = series.root_number
    if eps is None:
        eps = root_number(series, prec)
    n_max = _check_length(series, prec, 1.0)
    scale = ctx.sqrt(series.conductor) / (2 * ctx.pi)
    terms = []
    for n in range(1, n_max + 1):
        a_n = int(series.coefficients[n])
        if a_n == 0:
            continue
        x_n = n / scale
        terms.append(a_n * ((1 + x_n) * ctx.exp(-x_n) / (n * n) + eps * ctx.e1(x_n) / scale ** 2))
    return ctx.fsum(terms)


def l_value(model: WeierstrassModel, prec: Optional[Precision] = None) -> Tuple[XReal, int, int]:
    """L(E, 2) of a curve together with its conductor and root number."""
    prec = resolve(prec)
    minimal, local = minimal_local_data(model)
    level = 1
    for p, data in local.items():
        level *= p ** data.f_p
    n_max = required_terms(level, prec)
    series = LSeries(level, _coefficients(minimal, local, level, n_max))
    series = series.with_root_number(root_number(series, prec))
    logger.debug("l_value: conductor %d, %d coefficients, eps %+d", level, n_max, series.root_number)
    return l_value_2(series, prec), level, series.root_number
