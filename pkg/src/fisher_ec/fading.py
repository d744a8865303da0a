"""Fisher-Snedecor F distribution of the received SNR.

With scale ``s = m_s * avg_snr / m`` the SNR is ``s * U / V`` for independent
unit-scale gamma variates ``U ~ Gamma(m)`` and ``V ~ Gamma(m_s)``, so the
normalised variable ``x = snr / s`` is beta-prime(m, m_s).  All
distribution-function work below is done in ``x``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import exprel, polygamma

from .errors import DivergenceError, DomainError, NonConvergenceError
from .special import gauss_2f1, ln_beta

PARAM_MIN = 1e-8
PARAM_MAX = 1e8
UNIT_M_TOL = 1e-9  # |m - 1| below this uses the logarithmic m = 1 forms
NEAR_UNIT_M = 1e-2  # inverse-moment window where 1/(m - 1) cancellation is removed


@dataclass(frozen=True)
class FadingParams:
    """Channel triple (m, m_s, avg_snr); ``avg_snr`` is the linear scale parameter."""

    m: float
    ms: float
    avg_snr: float

    def __post_init__(self):
        for name in ("m", "ms", "avg_snr"):
            val = getattr(self, name)
            if not (PARAM_MIN <= val <= PARAM_MAX) or not math.isfinite(val):
                raise DomainError(
                    f"{name}={val!r} outside [{PARAM_MIN:g}, {PARAM_MAX:g}]", "FadingParams")
        object.__setattr__(self, "scale", self.ms * self.avg_snr / self.m)
        object.__setattr__(self, "lnB", ln_beta(self.m, self.ms))

    @classmethod
    def from_true_mean(cls, m, ms, mean_snr):
        """Build from the true mean SNR, which exists only for ``ms > 1``."""
        if not ms > 1.0:
            raise DivergenceError(f"true mean undefined for m_s={ms!r} <= 1", "from_true_mean")
        return cls(m, ms, (ms - 1.0) * mean_snr / ms)

    def scaled(self, k):
        return FadingParams(self.m, self.ms, self.avg_snr * k)


def _check_snr(name, snr):
    if not snr >= 0.0:
        raise DomainError(f"{name}: snr={snr!r} must be nonnegative", name)


def pdf(p, snr):
    """Density of the SNR; accepts scalars or arrays, evaluated in log space."""
    x = np.asarray(snr, dtype=float)
    if np.any(x < 0.0) or np.any(np.isnan(x)):
        raise DomainError("pdf: snr must be nonnegative", "pdf")
    u = x / p.scale
    with np.errstate(divide="ignore", invalid="ignore"):
        lx = np.where(u > 0.0, np.log(np.where(u > 0.0, u, 1.0)), -np.inf)
        lf = -math.log(p.scale) - p.lnB - (p.m + p.ms) * np.log1p(u)
        power = np.where(u > 0.0, (p.m - 1.0) * lx, 0.0 if p.m == 1.0 else
                         (-np.inf if p.m > 1.0 else np.inf))
        out = np.exp(lf + power)
    return float(out) if out.ndim == 0 else out


def _lower(p, x):
    # P(X <= x) for x <= 1
    pre = math.exp(p.m * math.log(x) - math.log(p.m) - p.lnB)
    return pre * gauss_2f1(p.m, p.m + p.ms, p.m + 1.0, -x)


def _upper(p, x):
    # P(X > x) for x >= 1, via the reciprocal variable 1/X ~ beta-prime(m_s, m)
    y = 1.0 / x
    pre = math.exp(p.ms * math.log(y) - math.log(p.ms) - p.lnB)
    return pre * gauss_2f1(p.ms, p.m + p.ms, p.ms + 1.0, -y)


def _clamp(v):
    if -1e-12 <= v < 0.0:
        return 0.0
    if 1.0 < v <= 1.0 + 1e-12:
        return 1.0
    return v


def _other_side(fn, p, x, complement):
    # direct series for the smaller side; kept only if it agrees with the
    # complement to the precision the complement itself carries
    try:
        v = fn(p, x)
    except (OverflowError, NonConvergenceError):
        return complement
    if 0.0 < v < 1.0 and abs(v - complement) <= 1e-8:
        return v
    return complement


def _split(p, x):
    # (cdf, ccdf) with the smaller of the two summed directly, so neither side
    # loses relative accuracy by complementing a value close to one
    if x <= 1.0:
        lo = _lower(p, x)
        if lo <= 0.5:
            return lo, 1.0 - lo
        up = _other_side(_upper, p, x, 1.0 - lo)
        return 1.0 - up, up
    up = _upper(p, x)
    if up <= 0.5:
        return 1.0 - up, up
    lo = _other_side(_lower, p, x, 1.0 - up)
    return lo, 1.0 - lo


def cdf(p, snr):
    """P(gamma <= snr)."""
    _check_snr("cdf", snr)
    if snr == 0.0:
        return 0.0
    return _clamp(_split(p, snr / p.scale)[0])


def ccdf(p, snr):
    """P(gamma > snr), summed directly in the tail to keep relative accuracy."""
    _check_snr("ccdf", snr)
    if snr == 0.0:
        return 1.0
    return _clamp(_split(p, snr / p.scale)[1])


def true_mean(p):
    """E[gamma] = m_s * avg_snr / (m_s - 1), finite only for m_s > 1."""
    if not p.ms > 1.0:
        raise DivergenceError(f"first moment diverges for m_s={p.ms!r} <= 1", "true_mean")
    return p.ms * p.avg_snr / (p.ms - 1.0)


def _lgamma_slope(x, d):
    # (lnG(x + d) - lnG(x)) / d as a polygamma series, for |d| <= NEAR_UNIT_M
    total, fact, dj = 0.0, 1.0, 1.0
    for j in range(12):
        fact *= j + 1.0
        total += float(polygamma(j, x)) * dj / fact
        dj *= d
    return total


def _near_unit_tail(p, x0):
    # With d = m - 1, u0 = x0 / (1 + x0) <= 1/2 and L = ln u0,
    #   scale * B(m, ms) * J = int_{u0}^1 u^(d-1) (1-u)^ms du = A + C - D
    # where A = (1 - u0^d) / d, C = B(d, ms+1) - 1/d and
    # D = int_0^{u0} u^(d-1) ((1-u)^ms - 1) du.  Each piece is finite at d = 0.
    d = p.m - 1.0
    u0 = x0 / (1.0 + x0)
    L = math.log(u0)
    A = -L * float(exprel(d * L))
    r = _lgamma_slope(1.0, d) - _lgamma_slope(1.0 + p.ms, d)
    C = float(exprel(d * r)) * r
    coef = 1.0
    D = 0.0
    k = 0
    while True:
        k += 1
        coef *= (k - 1.0 - p.ms) / k
        term = coef * u0 ** (k + d) / (k + d)
        D += term
        if term == 0.0 or abs(term) <= 1e-17 * max(abs(D), 1e-300) or k > 100_000:
            break
    return (A + C - D) / (p.scale * math.exp(p.lnB))


def inverse_moment_tail(p, gamma0):
    """Integral of pdf(x) / x over [gamma0, inf).

    ``gamma0 = 0`` gives ``m / ((m - 1) avg_snr)`` and diverges for m <= 1.
    For gamma0 above the scale the tail hypergeometric form is summed
    directly; below it the lower part is subtracted from the full moment
    (continued analytically to m < 1), so every series argument stays
    below one in magnitude.
    """
    if not gamma0 >= 0.0:
        raise DomainError(f"inverse_moment_tail: gamma0={gamma0!r} must be >= 0",
                          "inverse_moment_tail")
    m, ms = p.m, p.ms
    if gamma0 == 0.0:
        if m <= 1.0:
            raise DivergenceError(
                f"inverse moment diverges for m={m!r} <= 1", "inverse_moment_tail")
        return m / ((m - 1.0) * p.avg_snr)
    y = p.scale / gamma0
    if y <= 1.0:
        pre = math.exp(ms * math.log(y) - p.lnB - math.log(ms + 1.0)) / gamma0
        return pre * gauss_2f1(1.0 + ms, m + ms, 2.0 + ms, -y)
    x0 = 1.0 / y
    if abs(m - 1.0) < NEAR_UNIT_M:
        return _near_unit_tail(p, x0)
    lower = math.exp((m - 1.0) * math.log(x0) - p.lnB) * gauss_2f1(m - 1.0, m + ms, m, -x0)
    return (ms - lower) / ((m - 1.0) * p.scale)


def sample(p, seed, n):
    """``n`` independent SNR draws, deterministic for a fixed seed.

    numpy's gamma generator is an exact rejection sampler.  Concurrent
    callers must pass distinct seeds.
    """
    if n < 1:
        raise DomainError(f"sample: n={n!r} must be positive", "sample")
    rng = np.random.default_rng(seed)
    return draw(p, rng, n)


def draw(p, rng, n):
    """``n`` draws from an existing generator (numerator block, then denominator block)."""
    u = rng.standard_gamma(p.m, size=n)
    v = rng.standard_gamma(p.ms, size=n)
    return p.scale * u / v
