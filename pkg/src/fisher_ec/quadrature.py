"""Quadrature-only functionals of the SNR density.

Nothing here touches the hypergeometric or Meijer-G code: every value is an
adaptive integral of the density itself, so these serve as the in-repo
reference for the closed forms.

Work is in the normalised variable ``x = snr / scale``.  ``[0, 1]`` is
handled directly (algebraic endpoint weight at 0) or in ``log x`` when the
lower limit is positive; ``[1, inf)`` is mapped to ``t = 1 / (1 + x)`` in
``(0, 1/2]`` where the density becomes ``t**(m_s-1) (1-t)**(m-1)``.
"""

import math

from scipy import integrate, optimize

from .errors import DivergenceError, ToleranceError

EPSREL = 1e-13
EPSABS = 1e-15
LIMIT = 400


def _quad(fn, a, b, **kw):
    res = integrate.quad(fn, a, b, epsabs=EPSABS, epsrel=EPSREL, limit=LIMIT,
                         full_output=1, **kw)
    val, err = res[0], res[1]
    # a fourth element means QUADPACK flagged a problem; only fail if the estimate is poor
    if len(res) > 3 and err > 1e-10 * max(abs(val), 1e-300):
        msg = str(res[3]).strip().splitlines()[0]
        raise ToleranceError(f"quadrature did not converge ({msg})", "quadrature")
    return val


def _lower(p, xa, xb, g, k=0):
    # int_{xa}^{xb} g(x) x**(m-1-k) (1+x)**(-m-ms) dx / B, with 0 <= xa < xb <= 1
    if xb <= xa:
        return 0.0
    m, ms = p.m, p.ms
    if xa == 0.0:
        val = _quad(lambda x: g(x) * math.exp((-m - ms) * math.log1p(x)), 0.0, xb,
                    weight="alg", wvar=(m - 1.0 - k, 0.0))
    else:
        def h(v):
            x = math.exp(v)
            return g(x) * math.exp((m - k) * v - (m + ms) * math.log1p(x))
        val = _quad(h, math.log(xa), math.log(xb))
    return val * math.exp(-p.lnB)


def _upper(p, xa, g, log_coef=0.0):
    # int_{max(xa,1)}^inf [g(x) + log_coef ln x] x**(m-1) (1+x)**(-m-ms) dx / B
    m, ms = p.m, p.ms
    t_hi = 1.0 / (1.0 + max(xa, 1.0))

    def smooth(t):
        x = (1.0 - t) / t if t > 0.0 else math.inf
        return (g(x) + log_coef * math.log1p(-t)) * (1.0 - t) ** (m - 1.0)

    val = _quad(smooth, 0.0, t_hi, weight="alg", wvar=(ms - 1.0, 0.0))
    if log_coef:
        val -= log_coef * _quad(lambda t: (1.0 - t) ** (m - 1.0), 0.0, t_hi,
                                weight="alg-loga", wvar=(ms - 1.0, 0.0))
    return val * math.exp(-p.lnB)


def _one(x):
    return 1.0


def expectation(p, g, lo=0.0, k=0):
    """E[g(x) x**(-k) 1{x >= lo}] for smooth ``g`` of the normalised SNR."""
    head = _lower(p, lo, 1.0, g, k) if lo < 1.0 else 0.0
    return head + _upper(p, lo, lambda x: g(x) * x ** (-k))


def total_mass(p):
    return expectation(p, _one)


def tail_mass(p, gamma0):
    """P(gamma >= gamma0) by quadrature."""
    return expectation(p, _one, gamma0 / p.scale)


def inverse_moment(p, gamma0):
    """Integral of pdf(x)/x over [gamma0, inf) by quadrature."""
    if gamma0 == 0.0 and p.m <= 1.0:
        raise DivergenceError(f"inverse moment diverges for m={p.m!r} <= 1", "inverse_moment")
    return expectation(p, _one, gamma0 / p.scale, k=1) / p.scale


def ora_capacity(p):
    """E[ln(1 + gamma)], splitting the lower range at gamma = 1."""
    s = p.scale
    x1 = min(1.0, 1.0 / s)
    g = lambda x: math.log1p(s * x)  # noqa: E731
    head = _lower(p, 0.0, x1, g) + _lower(p, x1, 1.0, g)
    tail = _upper(p, 0.0, lambda x: math.log(s) + math.log1p(1.0 / (s * x)), log_coef=1.0)
    return head + tail


def opra_capacity(p, gamma0):
    """E[ln(gamma / gamma0) 1{gamma >= gamma0}]."""
    x0 = gamma0 / p.scale
    lx0 = math.log(x0)
    head = _lower(p, x0, 1.0, lambda x: math.log(x) - lx0) if x0 < 1.0 else 0.0
    return head + _upper(p, x0, lambda x: -lx0, log_coef=1.0)


def opra_constraint(p, gamma0):
    """E[(1/gamma0 - 1/gamma) 1{gamma >= gamma0}] - 1 by quadrature."""
    return tail_mass(p, gamma0) / gamma0 - inverse_moment(p, gamma0) - 1.0


def opra_cutoff(p, xtol=1e-15):
    """Root of ``opra_constraint`` by Brent's method on (1e-12, 1]."""
    return optimize.brentq(lambda g: opra_constraint(p, g), 1e-12, 1.0, xtol=xtol,
                           rtol=1e-15, maxiter=200)
