"""Ergodic capacity under OPRA, ORA, CI and TCI power adaptation.

All capacities are in nats.  Closed forms go through the hypergeometric and
Meijer-G code in :mod:`fisher_ec.special`; :func:`ec_quadrature` recomputes
each one from the density alone.
"""

import enum
import math
from dataclasses import dataclass, field

from . import quadrature
from .errors import BracketError, DivergenceError, DomainError
from .fading import UNIT_M_TOL, FadingParams, ccdf, cdf, inverse_moment_tail
from .special import OPRA as _OPRA_KERNEL
from .special import ORA as _ORA_KERNEL
from .special import contour_integral, digamma, ln_beta

CUTOFF_FLOOR = 1e-12
CUTOFF_MAX_ITER = 100


class SchemeKind(str, enum.Enum):
    OPRA = "opra"
    ORA = "ora"
    CI = "ci"
    TCI = "tci"


@dataclass(frozen=True)
class Scheme:
    """A power-adaptation strategy.

    TCI needs a user cutoff ``gamma0 > 0``.  For OPRA the cutoff is always
    solved internally; a value here is only ever the solver's output as
    reported back in an :class:`EcResult`.
    """

    kind: SchemeKind
    gamma0: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if self.kind is SchemeKind.TCI:
            if self.gamma0 is None or not self.gamma0 > 0.0:
                raise DomainError(f"TCI requires gamma0 > 0, got {self.gamma0!r}", "Scheme")
        elif self.kind in (SchemeKind.ORA, SchemeKind.CI) and self.gamma0 is not None:
            raise DomainError(f"{self.kind.value} takes no cutoff", "Scheme")


@dataclass(frozen=True)
class CutoffSolution:
    gamma0: float
    residual: float
    iterations: int
    bracket: tuple


@dataclass(frozen=True)
class EcResult:
    scheme: Scheme
    ec_nats: float
    method: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def ec_bits(self):
        return self.ec_nats / math.log(2.0)


def opra_power_ratio(snr, gamma0):
    """Water-filling transmit power relative to the average, max(1/gamma0 - 1/snr, 0)."""
    if not snr > 0.0 or not gamma0 > 0.0:
        raise DomainError("opra_power_ratio: snr and gamma0 must be positive",
                          "opra_power_ratio")
    return max(1.0 / gamma0 - 1.0 / snr, 0.0)


def cutoff_function(p, gamma0):
    """Power-constraint excess for the water-filling cutoff; decreasing in gamma0."""
    return ccdf(p, gamma0) / gamma0 - inverse_moment_tail(p, gamma0) - 1.0


def solve_opra_cutoff(p, tol=1e-12):
    """Bisection for the unique root of :func:`cutoff_function` on (1e-12, 1].

    Stops once the bracket is narrower than ``tol`` and the residual is
    within ``tol``, or when the bracket can no longer be split.
    """
    if not tol >= 1e-12:
        raise DomainError(f"solve_opra_cutoff: tol={tol!r} below 1e-12", "solve_opra_cutoff")
    lo, hi = CUTOFF_FLOOR, 1.0
    f_lo, f_hi = cutoff_function(p, lo), cutoff_function(p, hi)
    if f_hi == 0.0:
        return CutoffSolution(hi, 0.0, 0, (lo, hi))
    if not (f_lo > 0.0 > f_hi):
        raise BracketError(
            f"cutoff bracket [{lo}, {hi}] gives f = ({f_lo!r}, {f_hi!r}) without a sign change",
            "solve_opra_cutoff")
    mid, f_mid = hi, f_hi
    it = 0
    for it in range(1, CUTOFF_MAX_ITER + 1):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = cutoff_function(p, mid)
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol and abs(f_mid) <= tol:
            break
    return CutoffSolution(mid, f_mid, it, (lo, hi))


def _contour_diag(res):
    return {
        "contour_abscissa": res.spec.c,
        "contour_truncation": res.spec.T,
        "contour_error": res.error,
        "contour_imag": res.imag,
        "contour_nodes": float(res.nodes),
        "contour_condition": res.condition,
    }


def ec_opra(p):
    """Exact OPRA capacity via the G^{1,3}_{3,3} closed form at the solved cutoff."""
    sol = solve_opra_cutoff(p)
    z = p.scale / sol.gamma0
    res = contour_integral(_OPRA_KERNEL, z, p.m, p.ms)
    diag = {"gamma0": sol.gamma0, "constraint_residual": sol.residual,
            "cutoff_iterations": float(sol.iterations)}
    diag.update(_contour_diag(res))
    return EcResult(Scheme(SchemeKind.OPRA, sol.gamma0), max(res.value, 0.0), "closed_form", diag)


def ec_opra_asym(p, use_solved_cutoff=True):
    """High-SNR OPRA capacity; with ``use_solved_cutoff=False`` the cutoff is taken as 1."""
    g0 = solve_opra_cutoff(p).gamma0 if use_solved_cutoff else 1.0
    return (math.log(p.avg_snr) + math.log(p.ms / (p.m * g0))
            + digamma(p.m) - digamma(p.ms))


def ec_ora(p):
    """Exact ORA capacity via the G^{2,3}_{3,3} closed form."""
    res = contour_integral(_ORA_KERNEL, p.scale, p.m, p.ms)
    return EcResult(Scheme(SchemeKind.ORA), max(res.value, 0.0), "closed_form",
                    _contour_diag(res))


def ec_ora_asym(p):
    return math.log(p.avg_snr) + math.log(p.ms / p.m) + digamma(p.m) - digamma(p.ms)


def ci_target_snr(p):
    """Received SNR held by channel inversion, the reciprocal of the inverse moment."""
    if p.m <= 1.0:
        raise DivergenceError(f"channel inversion undefined for m={p.m!r} <= 1", "ci_target_snr")
    return (p.m - 1.0) * p.avg_snr / p.m


def ec_ci(p):
    """Channel-inversion capacity; zero, and flagged, when the inverse moment diverges."""
    if p.m <= 1.0:
        return EcResult(Scheme(SchemeKind.CI), 0.0, "closed_form",
                        {"divergent_inverse_moment": 1.0})
    gt = ci_target_snr(p)
    return EcResult(Scheme(SchemeKind.CI), math.log1p(gt), "closed_form",
                    {"target_snr": gt, "divergent_inverse_moment": 0.0})


def ec_ci_asym(p):
    if p.m <= 1.0:
        raise DomainError(f"CI asymptote needs m > 1, got {p.m!r}", "ec_ci_asym")
    return math.log(p.avg_snr) + math.log((p.m - 1.0) / p.m)


def ec_tci(p, gamma0):
    """Truncated channel inversion: ln(1 + 1/J(gamma0)) * P(gamma > gamma0)."""
    scheme = Scheme(SchemeKind.TCI, gamma0)
    tail = inverse_moment_tail(p, gamma0)
    survive = ccdf(p, gamma0)
    ec = float(math.log1p(1.0 / tail) * survive)
    return EcResult(scheme, ec, "closed_form", {
        "gamma0": gamma0,
        "inverse_moment_tail": tail,
        "target_snr": 1.0 / tail,
        "outage_probability": cdf(p, gamma0),
    })


def ec_tci_asym(p, gamma0):
    """High-SNR TCI capacity; slope 1 for m > 1, m for m < 1, logarithmic correction at m = 1.

    Returns NaN where the m = 1 expression takes the log of a nonpositive
    number (low SNR); no validity guard otherwise.
    """
    if not gamma0 > 0.0:
        raise DomainError(f"ec_tci_asym: gamma0={gamma0!r} must be positive", "ec_tci_asym")
    m, ms, lg = p.m, p.ms, math.log(p.avg_snr)
    if abs(m - 1.0) < UNIT_M_TOL:
        denom = lg + math.log(ms / gamma0) + digamma(1.0) - digamma(1.0 + ms)
        num = math.exp(ln_beta(1.0, ms)) * ms
        return lg + math.log(num / denom) if denom > 0.0 else math.nan
    if m > 1.0:
        return lg + math.log((m - 1.0) / m)
    return m * lg + ln_beta(m, ms) + math.log(1.0 - m) - (m - 1.0) * math.log(gamma0) \
        - m * math.log(m / ms)


# True-mean parameterisations; each converts and delegates.

def ec_opra_asym_true_mean(m, ms, mean_snr, use_solved_cutoff=True):
    return ec_opra_asym(FadingParams.from_true_mean(m, ms, mean_snr), use_solved_cutoff)


def ec_ora_asym_true_mean(m, ms, mean_snr):
    return ec_ora_asym(FadingParams.from_true_mean(m, ms, mean_snr))


def ec_ci_asym_true_mean(m, ms, mean_snr):
    return ec_ci_asym(FadingParams.from_true_mean(m, ms, mean_snr))


def ec_tci_asym_true_mean(m, ms, mean_snr, gamma0):
    return ec_tci_asym(FadingParams.from_true_mean(m, ms, mean_snr), gamma0)


def ec_closed(p, scheme):
    """Dispatch to the closed form for ``scheme``."""
    kind = SchemeKind(scheme.kind)
    if kind is SchemeKind.OPRA:
        return ec_opra(p)
    if kind is SchemeKind.ORA:
        return ec_ora(p)
    if kind is SchemeKind.CI:
        return ec_ci(p)
    return ec_tci(p, scheme.gamma0)


def ec_asym(p, scheme):
    """Asymptotic value for ``scheme`` (OPRA uses the unit-cutoff form)."""
    kind = scheme.kind
    if kind is SchemeKind.OPRA:
        val = ec_opra_asym(p, use_solved_cutoff=False)
    elif kind is SchemeKind.ORA:
        val = ec_ora_asym(p)
    elif kind is SchemeKind.CI:
        val = ec_ci_asym(p)
    else:
        val = ec_tci_asym(p, scheme.gamma0)
    return EcResult(scheme, val, "asymptotic", {})


def verify_power_constraint(p, scheme):
    """|E[P_t(gamma)/P_avg] - 1| by quadrature, under the scheme's closed-form policy.

    OPRA uses the cutoff from :func:`solve_opra_cutoff`; CI and TCI use the
    closed-form target SNR.  Raises DivergenceError for CI with m <= 1.
    """
    kind = SchemeKind(scheme.kind)
    if kind is SchemeKind.ORA:
        return abs(quadrature.total_mass(p) - 1.0)
    if kind is SchemeKind.OPRA:
        g0 = solve_opra_cutoff(p).gamma0
        return abs(quadrature.opra_constraint(p, g0))
    if kind is SchemeKind.CI:
        return abs(ci_target_snr(p) * quadrature.inverse_moment(p, 0.0) - 1.0)
    g0 = scheme.gamma0
    target = 1.0 / inverse_moment_tail(p, g0)
    return abs(target * quadrature.inverse_moment(p, g0) - 1.0)


def ec_quadrature(p, scheme):
    """Capacity from quadrature of the density alone (no hypergeometric, no Meijer-G).

    OPRA solves its own cutoff from the quadrature constraint.
    """
    kind = SchemeKind(scheme.kind)
    if kind is SchemeKind.ORA:
        return EcResult(Scheme(kind), quadrature.ora_capacity(p), "quadrature", {})
    if kind is SchemeKind.OPRA:
        g0 = quadrature.opra_cutoff(p)
        val = quadrature.opra_capacity(p, g0)
        return EcResult(Scheme(kind, g0), max(val, 0.0), "quadrature",
                        {"gamma0": g0, "constraint_residual": quadrature.opra_constraint(p, g0)})
    if kind is SchemeKind.CI:
        if p.m <= 1.0:
            return EcResult(Scheme(kind), 0.0, "quadrature", {"divergent_inverse_moment": 1.0})
        j = quadrature.inverse_moment(p, 0.0)
        return EcResult(Scheme(kind), math.log1p(1.0 / j), "quadrature",
                        {"target_snr": 1.0 / j, "divergent_inverse_moment": 0.0})
    g0 = scheme.gamma0
    j = quadrature.inverse_moment(p, g0)
    survive = quadrature.tail_mass(p, g0)
    return EcResult(Scheme(kind, g0), math.log1p(1.0 / j) * survive, "quadrature",
                    {"gamma0": g0, "inverse_moment_tail": j, "outage_probability": 1.0 - survive})
