# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels; same surface as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, log1p, fabs, fmax, ceil, sqrt
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex clog(double complex)
    double complex cexp(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)

NAME = "cython"

cdef double LN_SQRT_2PI = 0.91893853320467274178032973640562
cdef double PI = 3.14159265358979323846264338327950
cdef double SHIFT = 10.0

cdef double[8] LG_COEF
LG_COEF[:] = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0,
              1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0]
cdef double[8] DG_COEF
DG_COEF[:] = [1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0,
              1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0, -3617.0 / 8160.0]

cdef double[8] GK_X
GK_X[:] = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
           0.207784955007898467600689403773245, 0.0]
cdef double[8] GK_WK
GK_WK[:] = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
            0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
cdef double[4] GK_WG
GK_WG[:] = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
            0.381830050505118944950369775488975, 0.417959183673469387755102040816327]


# (-1)**k (zeta(k) - 1) / k for k = 2..32
cdef double[31] TAYLOR2
TAYLOR2[:] = [0.3224670334241132, -0.0673523010531981, 0.020580808427784546,
               -0.007385551028673986, 0.0028905103307415234, -0.001192753911703261,
               0.0005096695247430425, -0.00022315475845357939, 9.945751278180853e-05,
               -4.492623673813314e-05, 2.050721277567069e-05, -9.439488275268397e-06,
               4.374866789907488e-06, -2.039215753801366e-06, 9.55141213040742e-07,
               -4.492469198764566e-07, 2.1207184805554665e-07, -1.0043224823968099e-07,
               4.7698101693639804e-08, -2.2711094608943164e-08, 1.0838659214896955e-08,
               -5.183475041970047e-09, 2.4836745438024785e-09, -1.1921401405860912e-09,
               5.731367241678862e-10, -2.7595228851242334e-10, 1.330476437424449e-10,
               -6.4229645638381e-11, 3.1044247747322276e-11, -1.5021384080754142e-11,
               7.275974480239079e-12]


cdef double _lgamma_about_two(double e) nogil:
    cdef double s = 0.0
    cdef int k
    for k in range(30, -1, -1):
        s = s * e + TAYLOR2[k]
    return e * (0.42278433509846713 + e * s)


cdef double _lgamma(double x) nogil:
    cdef int n = 0, k
    cdef double prod = 1.0, z, iz2, s = 0.0
    if 1.5 <= x <= 2.5:
        return _lgamma_about_two(x - 2.0)
    if 0.5 <= x < 1.5:
        return _lgamma_about_two(x - 1.0) - log1p(x - 1.0)
    if x < SHIFT:
        n = <int>ceil(SHIFT - x)
    for k in range(n):
        prod *= x + k
    z = x + n
    iz2 = 1.0 / (z * z)
    for k in range(7, -1, -1):
        s = s * iz2 + LG_COEF[k]
    s /= z
    return (z - 0.5) * log(z) - z + LN_SQRT_2PI + s - log(prod)


cdef double _digamma(double x) nogil:
    cdef double acc = 0.0, iz2, s = 0.0
    cdef int k
    while x < SHIFT:
        acc -= 1.0 / x
        x += 1.0
    iz2 = 1.0 / (x * x)
    for k in range(7, -1, -1):
        s = s * iz2 + DG_COEF[k]
    s *= iz2
    return acc + log(x) - 0.5 / x - s


cdef double complex _clgamma(double complex z) nogil:
    cdef int n = 0, k
    cdef double complex prod = 1.0, w, iw2, s = 0.0
    if cabs(z) < SHIFT and creal(z) < SHIFT:
        n = <int>ceil(SHIFT - creal(z))
    for k in range(n):
        prod = prod * (z + k)
    w = z + n
    iw2 = 1.0 / (w * w)
    for k in range(7, -1, -1):
        s = s * iw2 + LG_COEF[k]
    s = s / w
    return (w - 0.5) * clog(w) - w + LN_SQRT_2PI + s - clog(prod)


cdef inline double complex _stirling(double complex z, double complex *prod) nogil:
    # ln Gamma(z) less ln(prod_k (z + k)), the shift product accumulated into *prod
    cdef int n = 0, k
    cdef double complex w, iw2, s = 0.0
    if cabs(z) < SHIFT and creal(z) < SHIFT:
        n = <int>ceil(SHIFT - creal(z))
    for k in range(n):
        prod[0] = prod[0] * (z + k)
    w = z + n
    iw2 = 1.0 / (w * w)
    for k in range(7, -1, -1):
        s = s * iw2 + LG_COEF[k]
    s = s / w
    return (w - 0.5) * clog(w) - w + LN_SQRT_2PI + s


cdef inline double complex _integrand(int kind, double t, double c, double logz,
                                      double m, double ms, double lognorm) nogil:
    cdef double complex y = c + 1j * t
    cdef double complex lf, prod
    if kind == 0:
        prod = (ms + y) * (ms + y)
        lf = _stirling(-y, &prod) + _stirling(m + ms + y, &prod) + (y + ms) * logz
    else:
        prod = y * y
        lf = (_stirling(1.0 - y, &prod) + _stirling(ms - y, &prod) + _stirling(1.0 + y, &prod)
              + _stirling(m + y, &prod) + y * logz)
    return cexp(lf - lognorm - clog(prod))


cdef void _gk(int kind, double lo, double hi, double c, double logz, double m,
              double ms, double lognorm, double complex *k15, double *err,
              double *a15) nogil:
    cdef double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo)
    cdef double complex fk = 0.0, fg = 0.0, f1, f2
    cdef double fa = 0.0
    cdef int j
    for j in range(7):
        f1 = _integrand(kind, mid - half * GK_X[j], c, logz, m, ms, lognorm)
        f2 = _integrand(kind, mid + half * GK_X[j], c, logz, m, ms, lognorm)
        fk += GK_WK[j] * (f1 + f2)
        fa += GK_WK[j] * (cabs(f1) + cabs(f2))
        if j % 2 == 1:
            fg += GK_WG[j // 2] * (f1 + f2)
    f1 = _integrand(kind, mid, c, logz, m, ms, lognorm)
    fk += GK_WK[7] * f1
    fa += GK_WK[7] * cabs(f1)
    fg += GK_WG[3] * f1
    k15[0] = half * fk
    err[0] = cabs(half * (fk - fg))
    a15[0] = half * fa


def lgamma(double x):
    """ln Gamma(x) for real x > 0 (no domain check)."""
    return _lgamma(x)


def digamma(double x):
    """psi(x) for real x > 0 (no domain check)."""
    return _digamma(x)


def clgamma(z):
    """Complex log-gamma for Re z > 0, vectorised; branch is arbitrary mod 2*pi*i."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(
        np.atleast_1d(np.asarray(z, dtype=complex)).ravel())
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty_like(zz)
    cdef Py_ssize_t i
    for i in range(zz.shape[0]):
        out[i] = _clgamma(zz[i])
    return out.reshape(np.shape(z))


def hyp2f1_series(double a, double b, double c, double w, double rtol=1e-16,
                  long max_terms=100000):
    """Sum the Gauss series at |w| < 1; returns ``(value, n_terms, converged, abs_sum)``."""
    cdef double total = 1.0, mag = 1.0, term = 1.0, r, aw = fabs(w)
    cdef long k, k0 = <long>ceil(fmax(fmax(fabs(a), fabs(b)), fabs(c))) + 1
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w
        total += term
        mag += fabs(term)
        if term == 0.0:
            return total, k + 1, True, mag
        if k + 1 >= k0:
            r = fmax(fabs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2.0)) * w), aw)
            if r < 1.0 and fabs(term) * r / (1.0 - r) <= rtol * fabs(total):
                return total, k + 1, True, mag
    return total, max_terms, False, mag


def mb_integrand(int kind, t, double c, double logz, double m, double ms, double lognorm):
    """Mellin-Barnes integrand at ordinates ``t``; see ``_pykernels.mb_integrand``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tt = np.ascontiguousarray(
        np.atleast_1d(np.asarray(t, dtype=float)).ravel())
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(tt.shape[0], dtype=complex)
    cdef Py_ssize_t i
    for i in range(tt.shape[0]):
        out[i] = _integrand(kind, tt[i], c, logz, m, ms, lognorm)
    return out.reshape(np.shape(t))


def mb_line(int kind, double c, double logz, double m, double ms, double lognorm,
            double T, double tol, long max_nodes, double width0):
    """Adaptive Gauss-Kronrod integration over [-T, T]; see ``_pykernels.mb_line``."""
    cdef int npan = <int>ceil(2.0 * T / width0)
    if npan < 2:
        npan = 2
    cdef long cap = max_nodes // 15 + npan + 2
    cdef double *lo = <double *>malloc(cap * sizeof(double))
    cdef double *hi = <double *>malloc(cap * sizeof(double))
    if lo == NULL or hi == NULL:
        free(lo)
        free(hi)
        raise MemoryError()
    cdef double complex k15, total = 0.0
    cdef double err, a15, l1 = 0.0, l1_coarse = 0.0, err_total = 0.0, density, floor, a, b, mid
    cdef long top = 0, nodes = 0
    cdef int j
    cdef bint ok = True
    cdef double complex *k0 = <double complex *>malloc(npan * sizeof(double complex))
    cdef double *e0 = <double *>malloc(npan * sizeof(double))
    cdef double *a0 = <double *>malloc(npan * sizeof(double))
    if k0 == NULL or e0 == NULL or a0 == NULL:
        free(lo)
        free(hi)
        free(k0)
        free(e0)
        free(a0)
        raise MemoryError()
    with nogil:
        for j in range(npan):
            a = -T + 2.0 * T * j / npan
            b = -T + 2.0 * T * (j + 1) / npan
            _gk(kind, a, b, c, logz, m, ms, lognorm, &k0[j], &e0[j], &a0[j])
            l1_coarse += a0[j]
        density = l1_coarse / (2.0 * T)
        nodes = 15 * npan
        for j in range(npan):
            a = -T + 2.0 * T * j / npan
            b = -T + 2.0 * T * (j + 1) / npan
            floor = density * (b - a)
            if a0[j] > floor:
                floor = a0[j]
            if e0[j] <= tol * floor:
                total += k0[j]
                l1 += a0[j]
                err_total += e0[j]
            else:
                lo[top] = a
                hi[top] = b
                top += 1
        while top > 0:
            top -= 1
            a = lo[top]
            b = hi[top]
            mid = 0.5 * (a + b)
            nodes += 30
            if nodes > max_nodes or top + 2 > cap:
                ok = False
                break
            for j in range(2):
                if j == 0:
                    _gk(kind, a, mid, c, logz, m, ms, lognorm, &k15, &err, &a15)
                else:
                    _gk(kind, mid, b, c, logz, m, ms, lognorm, &k15, &err, &a15)
                floor = density * 0.5 * (b - a)
                if a15 > floor:
                    floor = a15
                if err <= tol * floor:
                    total += k15
                    l1 += a15
                    err_total += err
                elif j == 0:
                    lo[top] = a
                    hi[top] = mid
                    top += 1
                else:
                    lo[top] = mid
                    hi[top] = b
                    top += 1
    free(k0)
    free(e0)
    free(a0)
    free(lo)
    free(hi)
    cdef double s = 1.0 / (2.0 * PI)
    return creal(total) * s, cimag(total) * s, l1 * s, err_total * s, nodes, ok
