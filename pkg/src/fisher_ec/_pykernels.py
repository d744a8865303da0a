"""Pure-Python/numpy implementations of the numerical kernels.

Mirrors ``_ckernels.pyx`` function for function; used when the compiled
extension is unavailable or ``FISHER_EC_BACKEND=python`` is set.
"""

import math

import numpy as np

NAME = "python"

LN_SQRT_2PI = 0.91893853320467274178032973640562

# B_2k / (2k (2k - 1)), k = 1..8
_LGAMMA_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
# B_2k / (2k), k = 1..8
_DIGAMMA_COEF = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)
_SHIFT = 10.0

# 15-point Gauss-Kronrod abscissae (non-negative half) and weights, with the
# embedded 7-point Gauss weights at the odd-indexed abscissae.
GK_X = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
GK_WK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
GK_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

# full 15-node layout on [-1, 1], ascending
_NODES = np.array([-x for x in GK_X[:-1]] + [0.0] + list(reversed(GK_X[:-1])))
_WK = np.array(list(GK_WK[:-1]) + [GK_WK[-1]] + list(reversed(GK_WK[:-1])))
_WG = np.zeros(15)
for _j, _w in enumerate(GK_WG[:-1]):
    _WG[2 * _j + 1] = _w
    _WG[13 - 2 * _j] = _w
_WG[7] = GK_WG[-1]


# (-1)**k (zeta(k) - 1) / k for k = 2..32: Taylor coefficients of ln Gamma about 2
_TAYLOR2 = (
    0.3224670334241132,
    -0.0673523010531981,
    0.020580808427784546,
    -0.007385551028673986,
    0.0028905103307415234,
    -0.001192753911703261,
    0.0005096695247430425,
    -0.00022315475845357939,
    9.945751278180853e-05,
    -4.492623673813314e-05,
    2.050721277567069e-05,
    -9.439488275268397e-06,
    4.374866789907488e-06,
    -2.039215753801366e-06,
    9.55141213040742e-07,
    -4.492469198764566e-07,
    2.1207184805554665e-07,
    -1.0043224823968099e-07,
    4.7698101693639804e-08,
    -2.2711094608943164e-08,
    1.0838659214896955e-08,
    -5.183475041970047e-09,
    2.4836745438024785e-09,
    -1.1921401405860912e-09,
    5.731367241678862e-10,
    -2.7595228851242334e-10,
    1.330476437424449e-10,
    -6.4229645638381e-11,
    3.1044247747322276e-11,
    -1.5021384080754142e-11,
    7.275974480239079e-12,
)
ONE_MINUS_EULER = 0.42278433509846713


def _lgamma_about_two(e):
    s = 0.0
    for c in reversed(_TAYLOR2):
        s = s * e + c
    return e * (ONE_MINUS_EULER + e * s)


def lgamma(x):
    """ln Gamma(x) for real x > 0 (no domain check).

    On [0.5, 2.5] a Taylor series about 2 keeps relative accuracy at the
    zeros x = 1 and x = 2; elsewhere an upward shift feeds Stirling's series.
    """
    if 1.5 <= x <= 2.5:
        return _lgamma_about_two(x - 2.0)
    if 0.5 <= x < 1.5:
        return _lgamma_about_two(x - 1.0) - math.log1p(x - 1.0)
    n = 0
    if x < _SHIFT:
        n = int(math.ceil(_SHIFT - x))
    prod = 1.0
    for k in range(n):
        prod *= x + k
    z = x + n
    iz2 = 1.0 / (z * z)
    s = 0.0
    for c in reversed(_LGAMMA_COEF):
        s = s * iz2 + c
    s /= z
    return (z - 0.5) * math.log(z) - z + LN_SQRT_2PI + s - math.log(prod)


def digamma(x):
    """psi(x) for real x > 0 (no domain check)."""
    acc = 0.0
    while x < _SHIFT:
        acc -= 1.0 / x
        x += 1.0
    iz2 = 1.0 / (x * x)
    s = 0.0
    for c in reversed(_DIGAMMA_COEF):
        s = s * iz2 + c
    s *= iz2
    return acc + math.log(x) - 0.5 / x - s


def clgamma(z):
    """Complex log-gamma for Re z > 0, vectorised; branch is arbitrary mod 2*pi*i."""
    z = np.asarray(z, dtype=complex)
    n = np.where(np.abs(z) < _SHIFT, np.ceil(_SHIFT - z.real), 0.0)
    n = np.maximum(n, 0.0)
    prod = np.ones_like(z)
    for k in range(int(n.max(initial=0.0))):
        prod = np.where(k < n, prod * (z + k), prod)
    w = z + n
    iw2 = 1.0 / (w * w)
    s = np.zeros_like(w)
    for c in reversed(_LGAMMA_COEF):
        s = s * iw2 + c
    s = s / w
    return (w - 0.5) * np.log(w) - w + LN_SQRT_2PI + s - np.log(prod)


def hyp2f1_series(a, b, c, w, rtol=1e-16, max_terms=100000):
    """Sum the Gauss series at |w| < 1.

    Returns ``(value, n_terms, converged, abs_sum)``; ``abs_sum / |value|``
    measures the cancellation.  Past ``k0`` the term ratios approach ``|w|``
    monotonically, so ``max(|next ratio|, |w|)`` bounds every later ratio and
    the remainder is geometric.  Stops once that bound puts the remainder
    below ``rtol`` of the running sum.
    """
    k0 = math.ceil(max(abs(a), abs(b), abs(c))) + 1
    total = 1.0
    mag = 1.0
    term = 1.0
    aw = abs(w)
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w
        total += term
        mag += abs(term)
        if term == 0.0:
            return total, k + 1, True, mag
        if k + 1 >= k0:
            r = max(abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2.0)) * w), aw)
            if r < 1.0 and abs(term) * r / (1.0 - r) <= rtol * abs(total):
                return total, k + 1, True, mag
    return total, max_terms, False, mag


def mb_integrand(kind, t, c, logz, m, ms, lognorm):
    """Mellin-Barnes integrand on the line Re = c, evaluated at ordinates ``t``.

    kind 0: Gamma(-y) Gamma(m+ms+y) / (ms+y)^2 * z^(y+ms)
    kind 1: Gamma(1-s) Gamma(ms-s) Gamma(1+s) Gamma(m+s) / s^2 * z^s
    Both are divided by exp(lognorm).
    """
    y = c + 1j * np.asarray(t, dtype=float)
    if kind == 0:
        lf = clgamma(-y) + clgamma(m + ms + y) - 2.0 * np.log(ms + y) + (y + ms) * logz
    else:
        lf = (clgamma(1.0 - y) + clgamma(ms - y) + clgamma(1.0 + y)
              + clgamma(m + y) - 2.0 * np.log(y) + y * logz)
    return np.exp(lf - lognorm)


def _gk_panels(kind, lo, hi, c, logz, m, ms, lognorm):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    t = mid[:, None] + half[:, None] * _NODES[None, :]
    f = mb_integrand(kind, t.ravel(), c, logz, m, ms, lognorm).reshape(t.shape)
    k15 = half * (f @ _WK)
    g7 = half * (f @ _WG)
    a15 = half * (np.abs(f) @ _WK)
    return k15, np.abs(k15 - g7), a15


def mb_line(kind, c, logz, m, ms, lognorm, T, tol, max_nodes, width0):
    """Adaptive Gauss-Kronrod integration of ``mb_integrand`` over [-T, T].

    Returns ``(re, im, l1, err, n_nodes, ok)`` for (1/2pi) times the
    integral.  A panel is accepted when its Kronrod-Gauss difference is
    below ``tol`` times the larger of its own L1 mass and its width share of
    the coarse total L1 mass.
    """
    npan = max(2, int(math.ceil(2.0 * T / width0)))
    edges = np.linspace(-T, T, npan + 1)
    lo, hi = edges[:-1], edges[1:]
    k15, err, a15 = _gk_panels(kind, lo, hi, c, logz, m, ms, lognorm)
    nodes = 15 * npan
    l1_coarse = float(a15.sum())
    density = l1_coarse / (2.0 * T)
    total = 0j
    l1 = 0.0
    err_total = 0.0
    while True:
        floor = np.maximum(a15, density * (hi - lo))
        ok = err <= tol * floor
        total += k15[ok].sum()
        l1 += float(a15[ok].sum())
        err_total += float(err[ok].sum())
        if ok.all():
            break
        lo, hi = lo[~ok], hi[~ok]
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        nodes += 15 * lo.size
        if nodes > max_nodes:
            return total.real / (2 * math.pi), total.imag / (2 * math.pi), l1 / (2 * math.pi), \
                err_total / (2 * math.pi), nodes, False
        k15, err, a15 = _gk_panels(kind, lo, hi, c, logz, m, ms, lognorm)
    s = 1.0 / (2.0 * math.pi)
    return total.real * s, total.imag * s, l1 * s, err_total * s, nodes, True
