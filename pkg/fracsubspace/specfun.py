from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from scipy import integrate

from .errors import ConvergenceError, DomainError, PoleError, QuadratureError
from .spec import ML_TERM_CAP, ML_TOL, QUAD_DEPTH, QUAD_RATIO, QUAD_TOL

Real = Union[float, int, Fraction]

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class MLParams:
    alpha: float
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError(f"Mittag-Leffler parameters must be positive, got alpha={self.alpha}, beta={self.beta}")


@dataclass(frozen=True)
class FracTrigParams:
    gamma: float
    lam: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError(f"fractional trig order must be positive, got {self.gamma}")

    @property
    def n(self) -> int:
        return math.ceil(self.gamma)


def is_pole(x: Real) -> bool:
    """True when x is 0 or a negative integer (decided exactly for Fractions and ints)."""
    if isinstance(x, (Fraction, int)):
        x = Fraction(x)
        return x <= 0 and x.denominator == 1
    return x <= 0 and float(x).is_integer()


def gamma_real(x: Real) -> float:
    """Gamma function on the real line.

    Raises:
        PoleError: x is zero or a negative integer.
    """
    if is_pole(x):
        raise PoleError(f"Gamma has a pole at {x}")
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"Gamma of non-finite value {x}")
    if x.is_integer() and 0 < x <= 171:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_real(1.0 - x))
    if x > 171.7:
        return math.inf
    x -= 1.0
    a = _LANCZOS_COEF[0]
    t = x + _LANCZOS_G + 0.5
    for i in range(1, _LANCZOS_G + 2):
        a += _LANCZOS_COEF[i] / (x + i)
    # split the power so t**(x+0.5) does not overflow before exp(-t) shrinks it
    h = t ** ((x + 0.5) / 2.0)
    return _SQRT_2PI * a * (h * math.exp(-t)) * h


def rgamma(x: Real) -> float:
    """1/Gamma(x), equal to 0 at the poles."""
    if is_pole(x):
        return 0.0
    g = gamma_real(x)
    return 0.0 if math.isinf(g) else 1.0 / g


def gamma_ratio(num: Real, den: Real) -> float:
    """Gamma(num)/Gamma(den), with 1/Gamma(den) = 0 at poles of den."""
    if is_pole(den):
        return 0.0
    fnum, fden = float(num), float(den)
    if fnum > 170 or fden > 170:
        if fnum <= 0 or fden <= 0:
            raise DomainError(f"Gamma ratio out of range: {num}/{den}")
        return math.exp(math.lgamma(fnum) - math.lgamma(fden))
    return gamma_real(num) * rgamma(den)


def rl_power_rate(alpha: Real) -> float:
    """rho with RL D^alpha t^(-alpha) = rho t^(-2 alpha); -1 at alpha = 1."""
    a = Fraction(alpha) if not isinstance(alpha, float) else alpha
    if float(a).is_integer():
        return float(math.prod(-float(a) - i for i in range(int(a))))
    return gamma_ratio(1 - a, 1 - 2 * a)


def _ml_term(k: int, n: int, alpha: float, beta: float, z: float, log_abs_z: float) -> float:
    arg = alpha * (k + n) + beta
    falling = 1.0
    for i in range(1, n + 1):
        falling *= k + i
    if arg <= 170.0 and k < 300:
        zk = z ** k
        if math.isfinite(zk):
            return falling * zk / gamma_real(arg)
    # log space for large indices
    sign = -1.0 if (z < 0 and k % 2 == 1) else 1.0
    log_term = math.log(falling) + k * log_abs_z - math.lgamma(arg)
    if log_term > 700:
        raise ConvergenceError(f"Mittag-Leffler term overflow at k={k} for z={z}")
    return sign * math.exp(log_term)


def ml_derivative(p: MLParams, n: int, z: float, tol: float = ML_TOL) -> float:
    """n-th derivative in z of E_{alpha,beta}: sum_k (k+n)!/k! z^k / Gamma(alpha(k+n)+beta).

    Summation stops once the terms decrease and a geometric bound on the
    tail is below tol.

    Raises:
        ConvergenceError: the term cap is reached first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if n < 0 or int(n) != n:
        raise DomainError(f"derivative order must be a non-negative integer, got {n}")
    n = int(n)
    z = float(z)
    if z == 0.0:
        return math.factorial(n) * rgamma(p.alpha * n + p.beta)
    log_abs_z = math.log(abs(z))
    total = 0.0
    largest = 0.0
    prev = _ml_term(0, n, p.alpha, p.beta, z, log_abs_z)
    total += prev
    largest = abs(prev)
    for k in range(1, ML_TERM_CAP):
        term = _ml_term(k, n, p.alpha, p.beta, z, log_abs_z)
        total += term
        largest = max(largest, abs(term))
        if term == 0.0:
            return total
        ratio = abs(term) / abs(prev) if prev != 0.0 else math.inf
        if ratio < 1.0:
            tail = abs(term) * ratio / (1.0 - ratio)
            if tail <= tol:
                if largest > 1e8 * max(abs(total), 1e-300):
                    warnings.warn(f"Mittag-Leffler sum at z={z} lost precision (largest term {largest:.3g})")
                return total
        prev = term
    raise ConvergenceError(f"Mittag-Leffler series did not converge within {ML_TERM_CAP} terms "
                           f"(alpha={p.alpha}, beta={p.beta}, n={n}, z={z})")


def mittag_leffler(p: MLParams, z: float, tol: float = ML_TOL) -> float:
    """Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z."""
    return ml_derivative(p, 0, z, tol)


def frac_cos(p: FracTrigParams, t: float, tol: float = ML_TOL) -> float:
    """cos_gamma(lam t^gamma) = E_{2gamma,1}(-(lam t^gamma)^2)."""
    if t < 0:
        raise DomainError(f"fractional cosine needs t >= 0, got {t}")
    u = p.lam * t ** p.gamma
    return mittag_leffler(MLParams(2 * p.gamma, 1.0), -u * u, tol)


def frac_sin(p: FracTrigParams, t: float, tol: float = ML_TOL) -> float:
    """sin_gamma(lam t^gamma) = lam t^gamma E_{2gamma,gamma+1}(-(lam t^gamma)^2)."""
    if t < 0:
        raise DomainError(f"fractional sine needs t >= 0, got {t}")
    if t == 0:
        return 0.0
    u = p.lam * t ** p.gamma
    return u * mittag_leffler(MLParams(2 * p.gamma, p.gamma + 1.0), -u * u, tol)


def epsilon_fn(n: int, t: float, a: float, p: MLParams, sign: int = 1, tol: float = ML_TOL) -> float:
    """eps_n(t, a; alpha, beta) = t^(alpha n + beta - 1) E^(n)_{alpha,beta}(sign a t^alpha).

    Its Laplace transform is n! s^(alpha-beta) / (s^alpha - sign a)^(n+1).
    """
    if t <= 0:
        raise DomainError(f"epsilon function needs t > 0, got {t}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    power = t ** (p.alpha * n + p.beta - 1.0)
    return power * ml_derivative(p, n, sign * a * t ** p.alpha, tol)


def epsilon_transform(n: int, s: float, a: float, p: MLParams, sign: int = 1) -> float:
    """Closed-form Laplace transform of epsilon_fn, valid for s > |a|^(1/alpha)."""
    return math.factorial(n) * s ** (p.alpha - p.beta) / (s ** p.alpha - sign * a) ** (n + 1)


def laplace_numeric(f: Callable[[float], float], s: float, horizon: float, tol: float = QUAD_TOL) -> float:
    """Numeric Laplace transform of f over (0, horizon].

    The interval is cut geometrically toward 0 (ratio QUAD_RATIO, QUAD_DEPTH
    pieces) so an integrable t^(beta-1) singularity at the origin stays
    inside a single small piece.

    Raises:
        QuadratureError: the summed error estimate exceeds tol.
    """
    if s <= 0:
        raise DomainError(f"Laplace variable must be positive, got {s}")
    if horizon <= 0:
        raise DomainError(f"horizon must be positive, got {horizon}")

    def integrand(t: float) -> float:
        return math.exp(-s * t) * f(t) if t > 0 else 0.0

    edges = [horizon * QUAD_RATIO ** k for k in range(QUAD_DEPTH + 1)]
    pieces = [(0.0, edges[-1])] + [(edges[k + 1], edges[k]) for k in reversed(range(QUAD_DEPTH))]
    per_piece = tol / (2 * len(pieces))
    total = 0.0
    error = 0.0
    for lo, hi in pieces:
        val, err = integrate.quad(integrand, lo, hi, epsabs=per_piece, epsrel=1e-12, limit=200)
        total += val
        error += err
    if error > tol:
        raise QuadratureError(f"Laplace quadrature error estimate {error:.3g} exceeds {tol:.3g}")
    return total
