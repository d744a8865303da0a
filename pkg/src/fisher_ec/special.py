"""Real-argument special functions and two Meijer-G instances.

The Meijer-G values are obtained by integrating the Mellin-Barnes integrand
along a vertical line ``Re(y) = c``.  Both instances have a double pole
(at ``y = -m_s`` for the OPRA kernel, at ``s = 0`` for the ORA kernel).  An
abscissa just right of it gives the textbook contour; an abscissa just left
of it adds that pole's residue explicitly.  The second placement keeps the
integrand magnitude comparable to the result for large arguments, where the
textbook contour loses every significant digit to cancellation.
"""

import math
from dataclasses import dataclass, replace

from ._backend import kernels as _k
from .errors import ContourError, DomainError, NonConvergenceError, ToleranceError

POLE_GUARD = 1e-12
SERIES_RTOL = 1e-16
SERIES_BUDGET = 100_000
MAX_CANCELLATION = 1e5  # sum of |terms| over |sum| beyond which a series is rejected

OPRA = 0
ORA = 1
_DECAY = {OPRA: math.pi, ORA: 2.0 * math.pi}
_DEFAULT_T = {OPRA: 14.0, ORA: 7.0}


def _check_positive(name, **args):
    for key, val in args.items():
        if not (val > 0.0) or not math.isfinite(val):
            raise DomainError(f"{name}: {key}={val!r} must be positive and finite", name)


def ln_gamma(x):
    """Natural log of the gamma function for real ``x > 0``."""
    _check_positive("ln_gamma", x=x)
    return _k.lgamma(float(x))


def digamma(x):
    """Digamma function psi(x) for real ``x > 0``."""
    _check_positive("digamma", x=x)
    return _k.digamma(float(x))


def ln_beta(a, b):
    """ln B(a, b) for positive ``a``, ``b``; symmetric in its arguments by construction."""
    _check_positive("ln_beta", a=a, b=b)
    lo, hi = (float(a), float(b)) if a <= b else (float(b), float(a))
    return _k.lgamma(lo) - _lgamma_shift(hi, lo, lo + hi)


# B_2k / (2k (2k - 1)) for k = 1..8
_STIRLING = (1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0,
             -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0)
_STIRLING_FROM = 10.0


def _stirling_tail(x):
    # ln G(x) - [(x - 1/2) ln x - x + ln(2 pi) / 2] for x >= 10
    r = 1.0 / (x * x)
    acc = 0.0
    for c in reversed(_STIRLING):
        acc = acc * r + c
    return acc / x


def _lgamma_shift(y, h, yh):
    """ln G(yh) - ln G(y) for positive y and yh = y + h.

    Past the Stirling threshold the difference is formed directly, so a
    large ``y`` does not swamp a small ``h``.
    """
    if min(y, yh) < _STIRLING_FROM:
        return _k.lgamma(yh) - _k.lgamma(y)
    return ((y - 0.5) * math.log1p(h / y) + h * math.log(yh) - h
            + _stirling_tail(yh) - _stirling_tail(y))


def _sinpi(x):
    # sin(pi x) with the period removed exactly before scaling by pi
    n = round(x)
    s = math.sin(math.pi * (x - n))
    return -s if n % 2 else s


def _series(a, b, c, w):
    val, nterms, ok, mag = _k.hyp2f1_series(a, b, c, w, SERIES_RTOL, SERIES_BUDGET)
    if not ok:
        raise NonConvergenceError(
            f"gauss_2f1: series at w={w!r} did not converge in {nterms} terms", "gauss_2f1")
    if not mag <= MAX_CANCELLATION * abs(val):
        raise NonConvergenceError(
            f"gauss_2f1: series at w={w!r} cancels by a factor {mag / abs(val):.3g}"
            if val else f"gauss_2f1: series at w={w!r} cancels to zero", "gauss_2f1")
    return val


def _negatives(*params):
    return sum(1 for p in params if p < 0)


def _terminates(p):
    return p <= 0 and p == math.floor(p)


def _is_pole(x):
    return x <= 0.0 and x == math.floor(x)


def _signed_lgamma(x):
    """(sign, ln|Gamma(x)|) for real x, or None at a pole."""
    if x > 0.0:
        return 1.0, _k.lgamma(x)
    if _is_pole(x):
        return None
    # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    s = _sinpi(x)
    return math.copysign(1.0, s), math.log(math.pi / abs(s)) - _k.lgamma(1.0 - x)


def _gamma_ratio(y, h, yh):
    """(sign, ln|Gamma(yh) / Gamma(y)|) with yh = y + h.

    Sign 0 means the ratio vanishes (pole of the denominator); None means
    the numerator sits on a pole.
    """
    if _is_pole(yh):
        return None
    if _is_pole(y):
        return 0.0, -math.inf
    if y > 0.0 and yh > 0.0:
        return 1.0, _lgamma_shift(y, h, yh)
    if y < 0.0 and yh < 0.0:
        # both reflected: the gamma ratio flips to Gamma(1 - y) / Gamma(1 - yh)
        sy, syh = _sinpi(y), _sinpi(yh)
        return (math.copysign(1.0, sy * syh),
                math.log(abs(sy / syh)) + _lgamma_shift(1.0 - yh, h, 1.0 - y))
    num, den = _signed_lgamma(yh), _signed_lgamma(y)
    return num[0] * den[0], num[1] - den[1]


_INTEGER_GAP = 1e-6  # |a - b - round(a - b)| below this disables the 1/(1-z) form
_CONNECTION_BELOW = -2.0
_POSITIVE_PFAFF_MAX_W = 0.9  # beyond this a positive-term Pfaff series is too slow


def _overflow(what):
    return NonConvergenceError(f"gauss_2f1: {what} leaves the floating-point range",
                               "gauss_2f1")


def _connection_term(a, b, c, z, v):
    # Gamma(c) Gamma(b-a) / (Gamma(b) Gamma(c-a)) (1-z)^(-a) 2F1(a, c-b; 1+a-b; v)
    top = _gamma_ratio(c - a, a, c)
    bottom = _gamma_ratio(b - a, a, b)
    if bottom is None or top[0] == 0.0:
        return 0.0, 0.0
    series = _series(a, c - b, 1.0 + a - b, v)
    if series == 0.0:
        return 0.0, 0.0
    lcoef = top[1] - bottom[1] - a * math.log1p(-z) + math.log(abs(series))
    try:
        val = top[0] * bottom[0] * math.copysign(math.exp(lcoef), series)
    except OverflowError:
        raise _overflow("connection coefficient") from None
    return val, abs(val)


def _connection(a, b, c, z):
    v = 1.0 / (1.0 - z)
    t1, m1 = _connection_term(a, b, c, z, v)
    t2, m2 = _connection_term(b, a, c, z, v)
    val = t1 + t2
    if not m1 + m2 <= MAX_CANCELLATION * abs(val):
        raise NonConvergenceError("gauss_2f1: connection terms cancel", "gauss_2f1")
    return val


def _pfaff(a, b, c, z, first):
    w = z / (z - 1.0)
    p, q = (a, c - b) if first else (c - a, b)
    try:
        val = math.exp(-(a if first else b) * math.log1p(-z)) * _series(p, q, c, w)
    except OverflowError:
        raise _overflow("Pfaff prefactor") from None
    if not math.isfinite(val):
        raise _overflow("Pfaff form")
    return val


def gauss_2f1(a, b, c, z):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real ``z <= 0``.

    At negative ``z`` the plain series alternates and cancels badly once
    the parameters are large, while a Pfaff form ``w = z / (z - 1)`` in
    ``(0, 1)`` whose two numerator parameters are nonnegative has only
    positive terms.  Candidates are tried in order and the first that
    converges without losing more than ``MAX_CANCELLATION`` to cancellation
    (or leaving the floating-point range) is returned:

    1. such a positive Pfaff form, while ``w <= 0.9`` (``z >= -9``);
    2. the plain series for ``z > -0.5``;
    3. below ``z = -2``, the ``1/(1 - z)`` connection formula when ``a - b``
       is not an integer and neither ``a`` nor ``b`` terminates the series;
    4. a positive Pfaff form at any ``w``;
    5. the connection formula at any ``z``, since ``1/(1 - z) < 1`` still;
    6. the terminating Pfaff form, else the one with fewer negative
       numerator parameters, then the other.

    When every candidate fails the last NonConvergenceError propagates.
    """
    if not (c > 0.0):
        raise DomainError(f"gauss_2f1: c={c!r} must be positive", "gauss_2f1")
    if not (z <= 0.0) or not math.isfinite(z):
        raise DomainError(f"gauss_2f1: z={z!r} must be real and nonpositive", "gauss_2f1")
    if z == 0.0:
        return 1.0
    w = z / (z - 1.0)
    form_a = (a, c - b)
    form_b = (c - a, b)
    positive = [first for first, form in ((True, form_a), (False, form_b)) if min(form) >= 0.0]
    d = a - b
    connection = (abs(d - round(d)) > _INTEGER_GAP
                  and not (_terminates(a) or _terminates(b)))
    if _terminates(a) or _terminates(c - b):
        first = True
    elif _terminates(b) or _terminates(c - a):
        first = False
    else:
        first = _negatives(*form_a) <= _negatives(*form_b)

    plan = []
    if positive and w <= _POSITIVE_PFAFF_MAX_W:
        plan.append(("pfaff", positive[0]))
    if z > -0.5:
        plan.append(("direct", None))
    if connection and z < _CONNECTION_BELOW:
        plan.append(("connection", None))
    if positive:
        plan.append(("pfaff", positive[0]))
    if connection:
        plan.append(("connection", None))
    plan += [("pfaff", first), ("pfaff", not first)]

    error = None
    tried = set()
    for step in plan:
        if step in tried:
            continue
        tried.add(step)
        kind, arg = step
        try:
            if kind == "pfaff":
                return _pfaff(a, b, c, z, arg)
            if kind == "direct":
                return _series(a, b, c, z)
            return _connection(a, b, c, z)
        except NonConvergenceError as exc:
            error = exc
    raise error


@dataclass(frozen=True)
class ContourSpec:
    """Vertical integration line ``Re = c`` truncated to ``|Im| <= T``.

    ``panel_width`` sets the initial Gauss-Kronrod panel width; ``None``
    picks one from the oscillation frequency ``ln z``.
    """

    c: float
    T: float
    max_nodes: int = 20_000
    tolerance: float = 1e-12
    panel_width: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise ContourError(f"abscissa c={self.c!r} is not finite")
        if not (self.T > 0.0):
            raise ContourError(f"truncation T={self.T!r} must be positive")
        if self.max_nodes < 15:
            raise ContourError(f"max_nodes={self.max_nodes!r} too small for one panel")
        if not (self.tolerance > 0.0):
            raise ContourError(f"tolerance={self.tolerance!r} must be positive")
        if self.panel_width is not None and not (self.panel_width > 0.0):
            raise ContourError(f"panel_width={self.panel_width!r} must be positive")

    def refined(self):
        """Half the panel width and twice the truncation, for self-consistency checks."""
        width = self.panel_width if self.panel_width is not None else 1.0
        return replace(self, T=2.0 * self.T, panel_width=0.5 * width,
                       max_nodes=4 * self.max_nodes)


@dataclass(frozen=True)
class ContourResult:
    """Outcome of one line integration.

    ``value`` is the normalised quantity: ``z**m_s * G / (Gamma(m) Gamma(m_s))``
    for the OPRA kernel, ``G / (Gamma(m) Gamma(m_s))`` for the ORA kernel.
    """

    value: float
    imag: float
    error: float
    l1: float
    tail: float
    nodes: int
    residue: float
    spec: ContourSpec

    @property
    def condition(self):
        return self.l1 / abs(self.value) if self.value != 0.0 else math.inf


def _allowed(kind, m, ms):
    """Open intervals of admissible abscissae; the first lies left of the double pole."""
    if kind == OPRA:
        return (-m - ms, -ms), (-ms, 0.0)
    return (-min(1.0, m), 0.0), (0.0, min(1.0, ms))


def _poly_exponent(kind, m, ms):
    # |integrand| ~ |t|**p * exp(-decay |t|) on the line
    return m + ms - 3.0 if kind == OPRA else m + ms - 2.0


def _auto_width(logz):
    return min(1.0, 3.0 / max(abs(logz), 1e-300))


def _tail_bound(kind, z, m, ms, spec, lognorm):
    logz = math.log(z)
    f = _k.mb_integrand(kind, [-spec.T, spec.T], spec.c, logz, m, ms, lognorm)
    p = max(_poly_exponent(kind, m, ms), 0.0)
    rate = _DECAY[kind] - p / spec.T
    if rate <= 0.5 * _DECAY[kind]:
        return math.inf
    return float(abs(f[0]) + abs(f[1])) / rate / (2.0 * math.pi)


def default_contour(kind, z, m, ms, tolerance=1e-12, max_nodes=20_000):
    """Contour for kernel ``kind`` at argument ``z``.

    For ``z <= 1`` the abscissa sits midway between zero and the nearest
    pole on the right of the double pole (the textbook placement); for
    ``z > 1`` it sits left of the double pole, whose residue is then added.
    The truncation starts at 14 (OPRA) or 7 (ORA) and doubles until the
    tail estimate is below tolerance.
    """
    if kind == OPRA:
        c = -0.5 * min(ms, 1.0) if z <= 1.0 else -ms - 0.5 * min(m, 1.0)
    else:
        c = 0.5 * min(1.0, ms) if z <= 1.0 else -0.5 * min(1.0, m)
    lognorm = _k.lgamma(m) + _k.lgamma(ms)
    T = _DEFAULT_T[kind]
    spec = ContourSpec(c=c, T=T, max_nodes=max_nodes, tolerance=tolerance)
    for _ in range(6):
        tail = _tail_bound(kind, z, m, ms, spec, lognorm)
        # the integrand peaks near t = 0; stay well inside the check made after integration
        peak = abs(complex(_k.mb_integrand(kind, [0.0], c, math.log(z), m, ms, lognorm)[0]))
        if tail <= 0.01 * tolerance * peak / (2.0 * math.pi):
            break
        spec = replace(spec, T=2.0 * spec.T)
    return spec


def _validate(kind, name, z, m, ms, spec):
    if not (z > 0.0) or not math.isfinite(z):
        raise DomainError(f"{name}: z={z!r} must be positive", name)
    _check_positive(name, m=m, ms=ms)
    left, right = _allowed(kind, m, ms)
    c = spec.c
    for lo, hi in (left, right):
        if lo + POLE_GUARD < c < hi - POLE_GUARD:
            return c < left[1]
    raise ContourError(
        f"{name}: abscissa c={c!r} does not separate the poles for m={m!r}, m_s={ms!r}; "
        f"admissible: {left} or {right} (at least {POLE_GUARD} from each end)", name)


def contour_integral(kind, z, m, ms, spec=None):
    """Integrate kernel ``kind`` on ``spec`` (or the default contour)."""
    name = "meijer_g_opra" if kind == OPRA else "meijer_g_ora"
    if spec is None:
        _check_positive(name, z=z, m=m, ms=ms)
        spec = default_contour(kind, z, m, ms)
    left_of_pole = _validate(kind, name, z, m, ms, spec)
    logz = math.log(z)
    lognorm = _k.lgamma(m) + _k.lgamma(ms)
    width = spec.panel_width if spec.panel_width is not None else _auto_width(logz)
    re, im, l1, err, nodes, ok = _k.mb_line(
        kind, spec.c, logz, float(m), float(ms), lognorm, spec.T, spec.tolerance,
        spec.max_nodes, width)
    if not ok:
        raise ToleranceError(f"{name}: node budget {spec.max_nodes} exhausted", name)
    tail = _tail_bound(kind, z, m, ms, spec, lognorm)
    if tail > spec.tolerance * l1:
        raise ToleranceError(
            f"{name}: tail estimate {tail:.3g} exceeds tolerance at T={spec.T}", name)
    if abs(im) > spec.tolerance * l1 + 10.0 * err:
        raise ToleranceError(f"{name}: imaginary residual {im:.3g} above tolerance", name)
    residue = 0.0
    if left_of_pole:
        residue = logz + _k.digamma(m) - _k.digamma(ms)
    return ContourResult(value=float(re) + residue, imag=float(im), error=float(err),
                         l1=float(l1), tail=tail, nodes=int(nodes), residue=residue,
                         spec=spec)


def meijer_g_opra(z, m, ms, spec=None):
    """G^{1,3}_{3,3}(z | 1-m_s, 1-m_s, 1-m-m_s; 0, -m_s, -m_s).

    Integrand Gamma(-y) Gamma(m+m_s+y) Gamma(m_s+y)^2 / Gamma(1+m_s+y)^2 z^y,
    i.e. Gamma(-y) Gamma(m+m_s+y) z^y / (m_s+y)^2.  The abscissa must lie in
    ``(-m_s, 0)`` or, with the double-pole residue added, in
    ``(-m-m_s, -m_s)``.
    """
    res = contour_integral(OPRA, z, m, ms, spec)
    return res.value * math.exp(_k.lgamma(m) + _k.lgamma(ms) - ms * math.log(z))


def meijer_g_ora(z, m, ms, spec=None):
    """G^{2,3}_{3,3}(z | 1, 1, 1-m; 1, m_s, 0).

    Integrand Gamma(1-s) Gamma(m_s-s) Gamma(s)^2 Gamma(m+s) / Gamma(1+s) z^s,
    abscissa in ``(0, min(1, m_s))`` or, with the residue at the double pole
    ``s = 0`` added, in ``(-min(1, m), 0)``.
    """
    res = contour_integral(ORA, z, m, ms, spec)
    return res.value * math.exp(_k.lgamma(m) + _k.lgamma(ms))
