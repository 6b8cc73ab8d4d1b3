"""
Rational reconstruction, the ratio R_t = reg(X_t) pi^2 / L(X_t, 2), golden-table
reproduction and the randomized identity suite.
"""

import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, List, Optional, Sequence

from tqdm import tqdm

import config
from engine.ellcurve import family_model, integrality_check
from engine.errors import DomainError, HgregError, IntegralityError
from engine.hyper import connection_beta_period, connection_one_minus_t, f_ab, g_primitive, gauss_2f1
from engine.lfunc import l_value
from engine.precision import Number, Precision, XReal, parse_rational, resolve
from engine.regulators import (
    FermatFibration,
    GaussFibration,
    _fermat_coefficients,
    cubic_dilog_identity,
    family2_reg,
    family3_reg,
    fermat_gamma_derivative_rhs,
    fermat_reg_delta,
    fermat_reg_delta_alt,
    fermat_reg_delta_digamma,
    fermat_reg_gamma,
    gauss_gamma1_forms,
    gauss_gamma_derivative_rhs,
    gauss_index_set,
    gauss_reg,
    lambda_example,
    legendre_dilog_identity,
    legendre_reg,
)
from engine.special import beta, cap_C, digamma

logger = logging.getLogger(__name__)

REGULATORS: Dict[str, Callable] = {
    "legendre": legendre_reg,
    "family2": family2_reg,
    "family3": family3_reg,
}


def rational_reconstruct(
    x: Number,
    qmax: int,
    tol: Number,
    prec: Optional[Precision] = None,
) -> Optional[Fraction]:
    """Find p/q with q <= qmax and |x - p/q| <= tol among the convergents of x.

    The deepest convergent inside the tolerance wins. If a shallower one is
    also inside it, the deeper one must be at least ten times closer,
    otherwise the answer is ambiguous and None is returned.

    Args:
        x: Real number to recognize.
        qmax: Largest admissible denominator.
        tol: Absolute tolerance.
        prec: Precision context.

    Returns:
        Optional[Fraction]: The rational, or None.
    """
    if qmax < 1:
        raise DomainError(f"qmax must be at least 1, got {qmax}")
    prec = resolve(prec)
    ctx = prec.ctx
    x = prec.real(x)
    tol = prec.real(tol)
    noise = ctx.mpf(10) ** (-prec.dps + 5)

    h_prev, h = 0, 1
    k_prev, k = 1, 0
    y = x
    inside = []
    while True:
        a = int(ctx.floor(y))
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        if k > qmax:
            break
        err = abs(x - ctx.mpf(h) / k)
        if err <= tol:
            inside.append((err, Fraction(h, k)))
        frac = y - a
        if err <= noise or frac <= noise:
            break
        y = 1 / frac

    if not inside:
        return None
    best_err, best = inside[-1]
    if len(inside) > 1 and inside[-2][0] < 10 * best_err:
        return None
    return best


@dataclass
class RtResult:
    family: str
    t: Fraction
    R_decimal: XReal
    R_rational: Optional[Fraction]
    regulator: XReal
    l_value: XReal
    conductor: int
    root_number: int


def compute_Rt(
    family: str,
    t: Number,
    prec: Optional[Precision] = None,
    allow_nonintegral: bool = False,
    qmax: int = config.RECON_QMAX,
    tol: float = config.RECON_TOL,
) -> RtResult:
    """R_t = reg(X_t) / (pi^-2 L(X_t, 2)) and its rational reconstruction.

    Raises:
        IntegralityError: If the symbol fails the family's integrality test
            and ``allow_nonintegral`` is off.
    """
    prec = resolve(prec)
    ctx = prec.ctx
    if family not in REGULATORS:
        raise DomainError(f"unknown family {family!r}; expected one of {', '.join(REGULATORS)}")
    t = parse_rational(t) if isinstance(t, str) else Fraction(t)

    if not integrality_check(family, t):
        if not allow_nonintegral:
            raise IntegralityError(f"symbol on {family} at t = {t} is not integral")
        logger.warning("compute_Rt: %s at t = %s is not integral, continuing", family, t)

    started = time.perf_counter()
    regulator = REGULATORS[family](t, prec)
    value, level, eps = l_value(family_model(family, t), prec)
    ratio = regulator * ctx.pi ** 2 / value
    logger.debug("compute_Rt: %s t=%s done in %.2fs", family, t, time.perf_counter() - started)
    return RtResult(
        family=family,
        t=t,
        R_decimal=ratio,
        R_rational=rational_reconstruct(ratio, qmax, tol, prec),
        regulator=regulator,
        l_value=value,
        conductor=level,
        root_number=eps,
    )


# --- Table reproduction ----------------------------------------------------

def _table_row(job) -> Dict:
    """Worker: one table row. Takes plain strings and ints so it pickles."""
    family, t_text, expected_text, digits, qmax, tol = job
    prec = Precision(digits)
    row = {
        "family": family,
        "t": t_text,
        "R_decimal": None,
        "R_rational": None,
        "expected": expected_text,
        "status": "failed",
        "P": digits,
        "runtime_ms": 0,
    }
    started = time.perf_counter()
    try:
        result = compute_Rt(family, parse_rational(t_text), prec, qmax=qmax, tol=tol)
        row["R_decimal"] = prec.report(result.R_decimal)
        row["R_rational"] = None if result.R_rational is None else str(result.R_rational)
        row["status"] = "match" if row["R_rational"] == expected_text else "mismatch"
    except HgregError as e:
        row["error"] = f"{type(e).__name__}: {e}"
    row["runtime_ms"] = int((time.perf_counter() - started) * 1000)
    return row


def reproduce_tables(
    prec: Optional[Precision] = None,
    families: Sequence[str] = config.FAMILIES,
    jobs: Optional[int] = None,
    entries=None,
    progress: bool = True,
    qmax: int = config.RECON_QMAX,
    tol: float = config.RECON_TOL,
) -> List[Dict]:
    """Recompute every golden-table entry of the given families.

    Rows come back in table order whatever the pool does. Failures become
    rows with status "failed" rather than exceptions.
    """
    from db.tables import get_entries

    prec = resolve(prec)
    if entries is None:
        entries = [entry for family in families for entry in get_entries(family)]
    work = [(e.family, str(e.t), str(e.expected_R), prec.digits, qmax, tol) for e in entries]

    if jobs == 1 or len(work) <= 1:
        rows = [_table_row(job) for job in tqdm(work, desc="R_t", disable=not progress)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(tqdm(pool.map(_table_row, work), total=len(work), desc="R_t", disable=not progress))
    return rows


# --- Identity suite --------------------------------------------------------

@dataclass
class IdentityCheck:
    name: str
    params: Dict[str, str]
    residual: float
    tolerance: float
    passed: bool


@dataclass
class IdentityReport:
    seed: int
    count: int
    P: int
    checks: List[IdentityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> Dict:
        return {
            "seed": self.seed,
            "count": self.count,
            "P": self.P,
            "passed": self.passed,
            "checks": [asdict(check) for check in self.checks],
        }


def finite_difference(f: Callable, t, prec: Precision, step: float = config.FD_STEP):
    """Central difference (f(t+h) - f(t-h))/(2h)."""
    h = prec.real(step)
    return (f(t + h) - f(t - h)) / (2 * h)


def _uniform(rng: random.Random, low: float, high: float) -> Fraction:
    # Six decimal places, exact
    return Fraction(round(rng.uniform(low, high) * 10**6), 10**6)


def _distinct_pair(rng: random.Random):
    while True:
        a = _uniform(rng, 0.05, 0.95)
        b = _uniform(rng, 0.05, 0.95)
        if abs(a - b) > Fraction(1, 20):
            return a, b


def _check_digamma_3f2(rng, prec: Precision, c_perturbation: float):
    ctx = prec.ctx
    a, b = _distinct_pair(rng)
    t = _uniform(rng, 3, 9)
    z = 1 / (1 - prec.real(t))
    minus_z = -z
    bump = 1 + prec.real(c_perturbation)
    inverse_side = (
        cap_C(a, b, prec) * bump * ctx.power(minus_z, prec.real(a)) * f_ab(a, b, z, prec) / prec.real(a)
        + cap_C(b, a, prec) * ctx.power(minus_z, prec.real(b)) * f_ab(b, a, z, prec) / prec.real(b)
    )
    digamma_side = (
        -2 * ctx.digamma(1) + digamma(a, prec) + digamma(b, prec)
        + ctx.log(prec.real(t) - 1) + g_primitive(a, b, 1 - t, prec)
    )
    residual = abs(digamma_side + inverse_side)
    return {"a": str(a), "b": str(b), "t": str(t)}, residual, prec.tolerance(10)


def _check_connection(rng, prec: Precision, c_perturbation: float):
    ctx = prec.ctx
    a, b = _distinct_pair(rng)
    if rng.random() < 0.5:
        t = _uniform(rng, 2.5, 8)
        reference = ctx.hyp2f1(prec.real(a), prec.real(b), 1, 1 - prec.real(t))
    else:
        t = _uniform(rng, -0.9, -0.1)
        reference = gauss_2f1(a, b, 1, 1 - t, prec, side=1)
    residual = abs(connection_one_minus_t(a, b, t, prec) - reference)
    return {"a": str(a), "b": str(b), "t": str(t)}, residual, prec.tolerance(10) * max(1, abs(reference))


def _check_connection_beta(rng, prec: Precision, c_perturbation: float):
    a, b = _distinct_pair(rng)
    t = _uniform(rng, -0.95, -0.05)
    period = beta(a, b, prec) * gauss_2f1(a, b, a + b, t, prec)
    residual = abs(connection_beta_period(a, b, t, prec) - period)
    return {"a": str(a), "b": str(b), "t": str(t)}, residual, prec.tolerance(10) * max(1, abs(period))


def _random_gauss(rng) -> GaussFibration:
    """A Gauss fibration with d = 1 and a constant rational lambda on I_e.

    With d = 1, I_e is the unit group mod N, a single Galois orbit, so a
    constant lambda always meets the rationality constraint.
    """
    N = rng.choice([3, 4, 5, 7, 8])
    while True:
        a, b = rng.randrange(1, N), rng.randrange(1, N)
        if a != b and gcd(gcd(N, a), b) == 1:
            break
    value = Fraction(rng.choice([-1, 1]) * rng.randrange(1, 10), rng.randrange(1, 10))
    return GaussFibration(N, a, b, 1, {n: value for n in gauss_index_set(N, 1)})


def _gauss_params(fib: GaussFibration) -> Dict[str, str]:
    return {
        "N": str(fib.N), "a": str(fib.a), "b": str(fib.b),
        "lambda": str(next(iter(fib.lambdas.values()))),
    }


def _check_gamma1(rng, prec: Precision, c_perturbation: float):
    fib = _random_gauss(rng)
    t = _uniform(rng, 2.5, 6)
    form1, form2, offset = gauss_gamma1_forms(fib, t, prec)
    residual = abs(form1 + offset - form2)
    params = _gauss_params(fib)
    params["t"] = str(t)
    return params, residual, prec.tolerance(10) * max(1, abs(form2))


_COPRIME_DEGREES = [(2, 3), (2, 5), (3, 4), (3, 5), (4, 5)]
# Checks that integrate G for every (i, j) stay on the small cases
_SMALL_DEGREES = [(2, 3), (2, 5), (3, 4)]


def _random_fermat(rng, degrees=_COPRIME_DEGREES) -> FermatFibration:
    n, m = rng.choice(degrees)
    return FermatFibration(
        n, m,
        rng.randrange(1, n), rng.randrange(1, m),
        rng.randrange(0, n), rng.randrange(0, m),
    )


def _fermat_params(fib: FermatFibration) -> Dict[str, str]:
    return {
        "n": str(fib.n), "m": str(fib.m),
        "nu1": str(fib.nu1_exp), "nu2": str(fib.nu2_exp),
        "eps1": str(fib.eps1_exp), "eps2": str(fib.eps2_exp),
    }


def _check_fermat_gamma_derivative(rng, prec: Precision, c_perturbation: float):
    fib = _random_fermat(rng)
    t = prec.real(_uniform(rng, -0.8, -0.2))
    e_spec = (1, 1)
    slope = finite_difference(lambda s: fermat_reg_gamma(fib, e_spec, s, prec).value, t, prec)
    residual = abs((t - 1) * slope - fermat_gamma_derivative_rhs(fib, e_spec, t, prec))
    params = _fermat_params(fib)
    params["t"] = prec.ctx.nstr(t, 8)
    return params, residual, prec.real(config.FD_TOL)


def _check_fermat_delta_derivative(rng, prec: Precision, c_perturbation: float):
    ctx = prec.ctx
    fib = _random_fermat(rng)
    t = prec.real(_uniform(rng, 0.2, 0.8))
    slope = finite_difference(lambda s: fermat_reg_delta(fib, s, prec).value, t, prec)
    expected = ctx.mpc(0)
    for a, b, c in _fermat_coefficients(fib, prec):
        expected += c * gauss_2f1(a, b, 1, 1 - t, prec)
    residual = abs((t - 1) * slope - expected)
    params = _fermat_params(fib)
    params["t"] = ctx.nstr(t, 8)
    return params, residual, prec.real(config.FD_TOL)


def _check_gauss_derivative(rng, prec: Precision, c_perturbation: float):
    N = rng.choice([3, 5, 7])
    a = rng.randrange(1, N)
    b = rng.choice([k for k in range(1, N) if k != a])
    fib = GaussFibration(N, a, b, 1, lambda_example(N, 1))
    t = prec.real(_uniform(rng, -0.8, -0.2))
    slope = finite_difference(lambda s: gauss_reg(fib, s, "gamma0", prec).value, t, prec)
    residual = abs((t - 1) * slope - gauss_gamma_derivative_rhs(fib, t, prec))
    return {"N": str(N), "a": str(a), "b": str(b), "t": prec.ctx.nstr(t, 8)}, residual, prec.real(config.FD_TOL)


def _is_rational_multiple(value, prec: Precision) -> bool:
    ctx = prec.ctx
    scaled = value / (2j * ctx.pi)
    tol = ctx.mpf(10) ** (-(prec.digits // 2))
    return abs(ctx.im(scaled)) < tol and rational_reconstruct(ctx.re(scaled), config.RATIONALITY_QMAX, tol, prec) is not None


def _check_delta_packagings(rng, prec: Precision, c_perturbation: float):
    fib = _random_fermat(rng)
    t = _uniform(rng, 0.2, 0.9)
    diff = fermat_reg_delta(fib, t, prec).value - fermat_reg_delta_digamma(fib, t, prec).value
    ok = _is_rational_multiple(diff, prec)
    params = _fermat_params(fib)
    params["t"] = str(t)
    return params, 0.0 if ok else 1.0, 0.5


def _check_delta_alt(rng, prec: Precision, c_perturbation: float):
    fib = _random_fermat(rng, _SMALL_DEGREES)
    t = _uniform(rng, 2.5, 6)
    diff = fermat_reg_delta(fib, t, prec).value - fermat_reg_delta_alt(fib, t, prec).value
    ok = _is_rational_multiple(diff, prec)
    params = _fermat_params(fib)
    params["t"] = str(t)
    return params, 0.0 if ok else 1.0, 0.5


def _check_dilog_legendre(rng, prec: Precision, c_perturbation: float):
    if rng.random() < 0.5:
        t = _uniform(rng, -0.9, -0.1)
    else:
        t = _uniform(rng, 0.1, 0.9)
    lhs, rhs = legendre_dilog_identity(t, prec)
    return {"t": str(t)}, abs(lhs - rhs), prec.tolerance(10) * max(1, abs(rhs))


def _check_dilog_cubic(rng, prec: Precision, c_perturbation: float):
    t = _uniform(rng, 1.1, 1.9)
    lhs, rhs = cubic_dilog_identity(t, prec)
    return {"t": str(t)}, abs(lhs - rhs), prec.tolerance(10) * max(1, abs(rhs))


IDENTITY_CHECKS: Dict[str, Callable] = {
    "digamma_vs_3f2": _check_digamma_3f2,
    "connection": _check_connection,
    "connection_beta": _check_connection_beta,
    "gamma1_forms": _check_gamma1,
    "fermat_gamma_derivative": _check_fermat_gamma_derivative,
    "fermat_delta_derivative": _check_fermat_delta_derivative,
    "gauss_gamma0_derivative": _check_gauss_derivative,
    "delta_constants": _check_delta_packagings,
    "delta_alt": _check_delta_alt,
    "elliptic_dilog_legendre": _check_dilog_legendre,
    "elliptic_dilog_cubic": _check_dilog_cubic,
}


def run_identity_suite(
    seed: int = config.DEFAULT_SEED,
    count: int = config.DEFAULT_IDENTITY_COUNT,
    prec: Optional[Precision] = None,
    c_perturbation: float = 0.0,
    progress: bool = False,
    kinds: Optional[Sequence[str]] = None,
) -> IdentityReport:
    """Run ``count`` random instances of every identity check kind.

    Parameters come from ``random.Random(seed)``, and kinds run in a fixed
    order, so the report is a function of the seed. ``c_perturbation`` scales
    one C_{a,b} in the digamma-vs-3F2 check by (1 + c_perturbation) as a
    harness self-test.

    Args:
        kinds: Subset of ``IDENTITY_CHECKS`` to run, all of them by default.

    Raises:
        DomainError: If a requested kind does not exist.
    """
    prec = resolve(prec)
    names = list(IDENTITY_CHECKS) if kinds is None else list(kinds)
    unknown = [name for name in names if name not in IDENTITY_CHECKS]
    if unknown:
        raise DomainError(f"unknown identity checks {unknown}; expected some of {', '.join(IDENTITY_CHECKS)}")

    rng = random.Random(seed)
    report = IdentityReport(seed=seed, count=count, P=prec.digits)
    jobs = [name for name in names for _ in range(count)]
    for name in tqdm(jobs, desc="identities", disable=not progress):
        try:
            params, residual, tolerance = IDENTITY_CHECKS[name](rng, prec, c_perturbation)
            passed = residual <= tolerance
            report.checks.append(IdentityCheck(name, params, float(residual), float(tolerance), bool(passed)))
        except HgregError as e:
            logger.warning("identity check %s raised %s", name, e)
            report.checks.append(IdentityCheck(name, {"error": str(e)}, float("inf"), 0.0, False))
    return report
