"""
Exact elliptic curve arithmetic over Q.

Models for the three regulator families, standard invariants, Tate's
algorithm at every prime (2 and 3 included), global minimal models,
conductors and Frobenius traces a_p. Everything here is integer or Fraction
arithmetic; numpy only vectorizes the point count.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_gcd, gf_pow_mod, gf_sub

from engine.errors import DomainError, SingularFiberError
from engine.precision import parse_rational

logger = logging.getLogger(__name__)

# Stand-in for the valuation of 0
_INFINITE_VALUATION = 10**9

FAMILY_NAMES = ("legendre", "family2", "family3")


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise DomainError(f"expected an exact rational, got {x!r}")


@dataclass(frozen=True)
class WeierstrassModel:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with rational coefficients."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, _to_fraction(getattr(self, name)))

    @classmethod
    def from_ainvs(cls, ainvs: Sequence) -> "WeierstrassModel":
        if len(ainvs) != 5:
            raise DomainError(f"expected five coefficients [a1,a2,a3,a4,a6], got {len(ainvs)}")
        return cls(*ainvs)

    @property
    def ainvs(self) -> Tuple[Fraction, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self.ainvs)

    def int_ainvs(self) -> Tuple[int, int, int, int, int]:
        if not self.is_integral():
            raise DomainError(f"model {self} is not integral")
        return tuple(int(a) for a in self.ainvs)

    def b_invariants(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def c_invariants(self) -> Tuple[Fraction, Fraction]:
        b2, b4, b6, _ = self.b_invariants()
        return b2 * b2 - 24 * b4, -b2 ** 3 + 36 * b2 * b4 - 216 * b6

    def discriminant(self) -> Fraction:
        b2, b4, b6, b8 = self.b_invariants()
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def j_invariant(self) -> Fraction:
        delta = self.discriminant()
        if delta == 0:
            raise SingularFiberError(f"model {list(map(str, self.ainvs))} is singular")
        c4, _ = self.c_invariants()
        return c4 ** 3 / delta

    def rst(self, r, s, t) -> "WeierstrassModel":
        """Substitute x = x' + r, y = y' + s x' + t."""
        a1, a2, a3, a4, a6 = self.ainvs
        return WeierstrassModel(
            a1 + 2 * s,
            a2 - s * a1 + 3 * r - s * s,
            a3 + r * a1 + 2 * t,
            a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1,
        )

    def scaled(self, u) -> "WeierstrassModel":
        """Model with a_i replaced by a_i u^i, i.e. (x, y) -> (x/u^2, y/u^3)."""
        u = Fraction(u)
        a1, a2, a3, a4, a6 = self.ainvs
        return WeierstrassModel(a1 * u, a2 * u ** 2, a3 * u ** 3, a4 * u ** 4, a6 * u ** 6)

    def integral_model(self) -> "WeierstrassModel":
        u = reduce(lcm, (a.denominator for a in self.ainvs), 1)
        return self.scaled(u)

    def __str__(self) -> str:
        return "[" + ",".join(str(a) for a in self.ainvs) + "]"


@dataclass(frozen=True)
class LocalData:
    """Reduction data at one prime from Tate's algorithm."""

    p: int
    kodaira: str
    f_p: int
    c_p: int
    reduction: str  # good, split, nonsplit or additive
    ord_disc: int
    non_minimal_steps: int = 0


@dataclass
class CurveInvariants:
    c4: Fraction
    c6: Fraction
    discriminant: Fraction
    j: Fraction
    conductor: Optional[int] = None
    local_data: Dict[int, LocalData] = field(default_factory=dict)


# --- Family models ---------------------------------------------------------

def _family_t(t) -> Fraction:
    t = _to_fraction(t)
    if t == 0 or t == 1:
        raise SingularFiberError(f"t = {t} is a singular fibre")
    return t


def legendre_model(t) -> WeierstrassModel:
    """y^2 = x(x-1)(x-t), made integral."""
    t = _family_t(t)
    return WeierstrassModel(0, -(1 + t), 0, t, 0).integral_model()


def family2_model(t) -> WeierstrassModel:
    """3y^2 = 2x^3 - 3x^2 + t, i.e. Y^2 = X^3 - 9X^2 + 108t with X = 6x, Y = 18y."""
    t = _family_t(t)
    return WeierstrassModel(0, -9, 0, 0, 108 * t).integral_model()


def family3_model(t) -> WeierstrassModel:
    """y^2 = x^3 + (3x + 4t)^2."""
    t = _family_t(t)
    return WeierstrassModel(0, 9, 0, 24 * t, 16 * t * t).integral_model()


_FAMILY_MODELS = {
    "legendre": legendre_model,
    "family2": family2_model,
    "family3": family3_model,
}


def family_model(family: str, t) -> WeierstrassModel:
    try:
        builder = _FAMILY_MODELS[family]
    except KeyError:
        raise DomainError(f"unknown family {family!r}; expected one of {', '.join(FAMILY_NAMES)}")
    model = builder(t)
    if model.discriminant() == 0:
        raise SingularFiberError(f"{family} model at t = {t} is singular")
    return model


def invariants(model: WeierstrassModel) -> CurveInvariants:
    """c4, c6, discriminant and j, with the syzygy c4^3 - c6^2 = 1728 disc checked."""
    c4, c6 = model.c_invariants()
    delta = model.discriminant()
    if c4 ** 3 - c6 ** 2 != 1728 * delta:
        raise ArithmeticError(f"syzygy c4^3 - c6^2 = 1728 disc fails for {model}")
    return CurveInvariants(c4=c4, c6=c6, discriminant=delta, j=model.j_invariant())


# --- p-adic helpers --------------------------------------------------------

def valuation(x, p: int) -> int:
    """ord_p of an integer or Fraction; 0 maps to a large sentinel."""
    x = Fraction(x)
    if x == 0:
        return _INFINITE_VALUATION
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _quadroots(a: int, b: int, c: int, p: int) -> bool:
    """Whether a T^2 + b T + c has a root mod p."""
    a, b, c = a % p, b % p, c % p
    if p == 2:
        return c == 0 or (a + b + c) % 2 == 0
    if a == 0:
        return b != 0 or c == 0
    disc = (b * b - 4 * a * c) % p
    return disc == 0 or pow(disc, (p - 1) // 2, p) == 1


def _cubic_root_count(b: int, c: int, d: int, p: int) -> int:
    """Distinct roots of T^3 + b T^2 + c T + d mod p, as deg gcd(f, T^p - T)."""
    f = [1, b % p, c % p, d % p]
    x_to_p = gf_pow_mod([1, 0], p, f, p, ZZ)
    g = gf_gcd(f, gf_sub(x_to_p, [1, 0], p, ZZ), p, ZZ)
    return len(g) - 1


def tate_local(model: WeierstrassModel, p: int) -> Tuple[LocalData, WeierstrassModel]:
    """Tate's algorithm at p on an integral model.

    Args:
        model: Integral Weierstrass model.
        p: A prime.

    Returns:
        (local data, model minimal at p). Every coordinate change is an
        integral substitution, and non-minimal steps divide a_i by p^i, so
        the returned model is unchanged at every other prime.
    """
    a1, a2, a3, a4, a6 = model.int_ainvs()
    steps = 0

    def pdiv(x) -> bool:
        return x % p == 0

    def pinv(x) -> int:
        return pow(x % p, -1, p)

    def proot(x, e) -> int:
        # Only called with p = e, where every residue is an e-th power of itself
        return x % p

    while True:
        current = WeierstrassModel(a1, a2, a3, a4, a6)
        b2, b4, b6, b8 = (int(x) for x in current.b_invariants())
        c4, c6 = (int(x) for x in current.c_invariants())
        delta = int(current.discriminant())
        v_disc = valuation(delta, p)

        if v_disc == 0:
            return LocalData(p, "I0", 0, 1, "good", 0, steps), current

        # Move the singular point to (0, 0) mod p
        if p == 2:
            if pdiv(b2):
                r = proot(a4, 2)
                t = proot(((r + a2) * r + a4) * r + a6, 2)
            else:
                temp = pinv(a1)
                r = temp * a3
                t = temp * (a4 + r * r)
        elif p == 3:
            r = proot(-b6, 3) if pdiv(b2) else -pinv(b2) * b4
            t = a1 * r + a3
        else:
            if pdiv(c4):
                r = -pinv(12) * b2
            else:
                r = -pinv(12 * c4) * (c6 + b2 * c4)
            t = -pinv(2) * (a1 * r + a3)
        r, t = r % p, t % p
        a1, a2, a3, a4, a6 = current.rst(r, 0, t).int_ainvs()
        b2, b4, b6, b8 = (int(x) for x in WeierstrassModel(a1, a2, a3, a4, a6).b_invariants())
        here = WeierstrassModel(a1, a2, a3, a4, a6)

        if not pdiv(c4):
            if _quadroots(1, a1, -a2, p):
                return LocalData(p, f"I{v_disc}", 1, v_disc, "split", v_disc, steps), here
            c_p = 2 if v_disc % 2 == 0 else 1
            return LocalData(p, f"I{v_disc}", 1, c_p, "nonsplit", v_disc, steps), here

        if valuation(a6, p) < 2:
            return LocalData(p, "II", v_disc, 1, "additive", v_disc, steps), here
        if valuation(b8, p) < 3:
            return LocalData(p, "III", v_disc - 1, 2, "additive", v_disc, steps), here
        if valuation(b6, p) < 3:
            c_p = 3 if _quadroots(1, a3 // p, -a6 // (p * p), p) else 1
            return LocalData(p, "IV", v_disc - 2, c_p, "additive", v_disc, steps), here

        # Make p | a1, a2; p^2 | a3, a4; p^3 | a6
        if p == 2:
            s = proot(a2, 2)
            t = p * proot(a6 // (p * p), 2)
        elif p == 3:
            s = a1
            t = a3
        else:
            s = -a1 * pinv(2)
            t = -a3 * pinv(2)
        a1, a2, a3, a4, a6 = here.rst(0, s, t).int_ainvs()

        # Roots of T^3 + b T^2 + c T + d mod p
        b = a2 // p
        c = a4 // (p * p)
        d = a6 // p ** 3
        w = 27 * d * d - b * b * c * c + 4 * b ** 3 * d - 18 * b * c * d + 4 * c ** 3
        x = 3 * c - b * b
        if not pdiv(w):
            shape = "distinct"
        elif not pdiv(x):
            shape = "double"
        else:
            shape = "triple"

        if shape == "distinct":
            here = WeierstrassModel(a1, a2, a3, a4, a6)
            c_p = 1 + _cubic_root_count(b, c, d, p)
            return LocalData(p, "I0*", v_disc - 4, c_p, "additive", v_disc, steps), here

        if shape == "double":
            if p == 2:
                r = proot(c, 2)
            elif p == 3:
                r = c * pinv(b)
            else:
                r = (b * c - 9 * d) * pinv(2 * x)
            r = p * (r % p)
            a1, a2, a3, a4, a6 = WeierstrassModel(a1, a2, a3, a4, a6).rst(r, 0, 0).int_ainvs()
            ix, iy = 3, 3
            mx, my = p * p, p * p
            while True:
                a2t = a2 // p
                a3t = a3 // my
                a4t = a4 // (p * mx)
                a6t = a6 // (mx * my)
                if not pdiv(a3t * a3t + 4 * a6t):
                    c_p = 4 if _quadroots(1, a3t, -a6t, p) else 2
                    break
                if p == 2:
                    t = my * proot(a6t, 2)
                else:
                    t = my * ((-a3t * pinv(2)) % p)
                a1, a2, a3, a4, a6 = WeierstrassModel(a1, a2, a3, a4, a6).rst(0, 0, t).int_ainvs()
                my *= p
                iy += 1
                a2t = a2 // p
                a3t = a3 // my
                a4t = a4 // (p * mx)
                a6t = a6 // (mx * my)
                if not pdiv(a4t * a4t - 4 * a6t * a2t):
                    c_p = 4 if _quadroots(a2t, a4t, a6t, p) else 2
                    break
                if p == 2:
                    r = mx * proot(a6t * pinv(a2t), 2)
                else:
                    r = mx * ((-a4t * pinv(2 * a2t)) % p)
                a1, a2, a3, a4, a6 = WeierstrassModel(a1, a2, a3, a4, a6).rst(r, 0, 0).int_ainvs()
                mx *= p
                ix += 1
            here = WeierstrassModel(a1, a2, a3, a4, a6)
            kodaira = f"I{ix + iy - 5}*"
            return LocalData(p, kodaira, v_disc - ix - iy + 1, c_p, "additive", v_disc, steps), here

        # Triple root: move it to T = 0 mod p
        if p == 2:
            r = b
        elif p == 3:
            r = proot(-d, 3)
        else:
            r = -b * pinv(3)
        r = p * (r % p)
        a1, a2, a3, a4, a6 = WeierstrassModel(a1, a2, a3, a4, a6).rst(r, 0, 0).int_ainvs()
        a3t = a3 // (p * p)
        a6t = a6 // p ** 4
        if not pdiv(a3t * a3t + 4 * a6t):
            here = WeierstrassModel(a1, a2, a3, a4, a6)
            c_p = 3 if _quadroots(1, a3t, -a6t, p) else 1
            return LocalData(p, "IV*", v_disc - 6, c_p, "additive", v_disc, steps), here
        if p == 2:
            t = -p * p * proot(a6t, 2)
        else:
            t = p * p * ((-a3t * pinv(2)) % p)
        a1, a2, a3, a4, a6 = WeierstrassModel(a1, a2, a3, a4, a6).rst(0, 0, t).int_ainvs()
        here = WeierstrassModel(a1, a2, a3, a4, a6)
        if valuation(a4, p) < 4:
            return LocalData(p, "III*", v_disc - 7, 2, "additive", v_disc, steps), here
        if valuation(a6, p) < 6:
            return LocalData(p, "II*", v_disc - 8, 1, "additive", v_disc, steps), here

        logger.debug("tate_local: model not minimal at p = %d, dividing out", p)
        a1, a2, a3, a4, a6 = a1 // p, a2 // p ** 2, a3 // p ** 3, a4 // p ** 4, a6 // p ** 6
        steps += 1


def bad_primes(model: WeierstrassModel) -> List[int]:
    """Primes dividing the discriminant of an integral model."""
    delta = int(model.integral_model().discriminant())
    if delta == 0:
        raise SingularFiberError(f"model {model} is singular")
    return sorted(factorint(abs(delta)))


def reduced_model(model: WeierstrassModel) -> WeierstrassModel:
    """Normalize an integral model to a1, a3 in {0, 1} and a2 in {-1, 0, 1}."""
    a1 = model.int_ainvs()[0]
    model = model.rst(0, -(a1 // 2), 0)
    a2 = model.int_ainvs()[1]
    model = model.rst(-((a2 + 1) // 3), 0, 0)
    a3 = model.int_ainvs()[2]
    return model.rst(0, 0, -(a3 // 2))


def minimal_local_data(model: WeierstrassModel) -> Tuple[WeierstrassModel, Dict[int, LocalData]]:
    """Global minimal reduced model and the local data at each of its bad primes."""
    current = model.integral_model()
    for p in bad_primes(current):
        _, current = tate_local(current, p)
    current = reduced_model(current)
    local = {}
    for p in bad_primes(current):
        data, _ = tate_local(current, p)
        local[p] = data
    return current, local


def minimal_model(model: WeierstrassModel) -> WeierstrassModel:
    return minimal_local_data(model)[0]


def conductor(model: WeierstrassModel) -> int:
    """Conductor N = prod p^f_p over the bad primes."""
    _, local = minimal_local_data(model)
    n = 1
    for p, data in local.items():
        n *= p ** data.f_p
    return n


def curve_invariants(model: WeierstrassModel) -> CurveInvariants:
    """Invariants of the minimal model together with conductor and local data."""
    minimal, local = minimal_local_data(model)
    info = invariants(minimal)
    info.local_data = local
    info.conductor = 1
    for p, data in local.items():
        info.conductor *= p ** data.f_p
    return info


# --- Frobenius traces ------------------------------------------------------

def _ap_good(ainvs: Tuple[int, ...], p: int) -> int:
    a1, a2, a3, a4, a6 = ainvs
    if p == 2:
        count = 1
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % 2 == 0:
                    count += 1
        return p + 1 - count
    b2 = (a1 * a1 + 4 * a2) % p
    b4 = (2 * a4 + a1 * a3) % p
    b6 = (a3 * a3 + 4 * a6) % p
    xs = np.arange(p, dtype=np.int64)
    # Horner with a reduction per step keeps products below p^2
    f = (4 * xs + b2) % p
    f = (f * xs + 2 * b4) % p
    f = (f * xs + b6) % p
    is_square = np.zeros(p, dtype=bool)
    is_square[(xs * xs) % p] = True
    chi = np.where(f == 0, 0, np.where(is_square[f], 1, -1))
    return -int(chi.sum())


def ap(model: WeierstrassModel, p: int, local: Optional[LocalData] = None) -> int:
    """Trace of Frobenius at p on a model that is minimal at p.

    Good p counts points on the reduction; bad p gives 1 (split), -1
    (nonsplit) or 0 (additive).
    """
    ainvs = model.int_ainvs()
    delta = int(model.discriminant())
    if delta % p != 0:
        return _ap_good(ainvs, p)
    if local is None:
        local, _ = tate_local(model, p)
    return {"split": 1, "nonsplit": -1}.get(local.reduction, 0)


def ap_naive(model: WeierstrassModel, p: int) -> int:
    """Point count over F_p with the y loop outermost, for good p."""
    a1, a2, a3, a4, a6 = model.int_ainvs()
    count = 1
    for y in range(p):
        for x in range(p):
            if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % p == 0:
                count += 1
    return p + 1 - count


# --- Integrality criteria --------------------------------------------------

def _primes_of(x: Fraction) -> set:
    primes = set(factorint(abs(x.numerator))) | set(factorint(x.denominator))
    primes.discard(1)
    return primes


def integrality_check(family: str, t) -> bool:
    """ord_p(j(X_t)) >= 0 on the primes the family's criterion names.

    legendre: primes with ord_p(1-t) != 0; family2: 2, 3 and primes of 1-t;
    family3: 2, 3 and primes of t.
    """
    t = _family_t(t)
    j = family_model(family, t).j_invariant()
    if family == "legendre":
        primes = _primes_of(1 - t)
    elif family == "family2":
        primes = {2, 3} | _primes_of(1 - t)
    else:
        primes = {2, 3} | _primes_of(t)
    return all(valuation(j, p) >= 0 for p in primes)
