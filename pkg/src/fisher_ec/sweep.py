"""Parameter sweeps, figure presets and the CSV/JSON record format."""

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import capacity as cap
from .capacity import Scheme, SchemeKind
from .errors import DomainError, FisherECError
from .fading import FadingParams

FIELDS = ("snr_db", "snr_linear", "parameterization", "m", "ms", "scheme", "gamma0",
          "method", "ec_nats", "ec_bits")
HEADER = ",".join(FIELDS)
GAMMA_BAR = "gamma_bar"
GAMMA_BAR_1 = "gamma_bar_1"
OUTPUTS = ("exact", "asymptotic", "both")
LN2 = math.log(2.0)


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


def parse_db_range(text):
    """``start:stop:step`` in dB, stop included when it lands on the grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"dB range {text!r} is not start:stop:step", "parse_grid")
    start, stop, step = (float(v) for v in parts)
    if not step > 0.0 or stop < start:
        raise DomainError(f"dB range {text!r} must have step > 0 and stop >= start", "parse_grid")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def parse_grid(text, db):
    """A comma list, or (for dB input) a ``start:stop:step`` range.

    Returns ``(db_values, linear_values)``.
    """
    text = text.strip()
    if db and ":" in text:
        dbs = parse_db_range(text)
    else:
        try:
            vals = [float(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise DomainError(f"cannot parse SNR grid {text!r}", "parse_grid") from None
        if db:
            dbs = vals
        else:
            if any(not v > 0.0 for v in vals):
                raise DomainError(f"linear SNR values must be positive: {text!r}", "parse_grid")
            return [linear_to_db(v) for v in vals], vals
    return dbs, [db_to_linear(v) for v in dbs]


def parse_param_set(text):
    try:
        m, ms = (float(v) for v in text.split(","))
    except ValueError:
        raise DomainError(f"param_set {text!r} is not 'm,ms'", "parse_param_set") from None
    return m, ms


@dataclass
class SweepSpec:
    snr_db: list
    snr_linear: list
    param_sets: list
    schemes: list
    parameterization: str = GAMMA_BAR
    outputs: str = "exact"
    pt_db: float | None = None
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.snr_linear:
            raise DomainError("SNR grid is empty", "SweepSpec")
        if any(b <= a for a, b in zip(self.snr_linear, self.snr_linear[1:])):
            raise DomainError("SNR grid must be strictly increasing", "SweepSpec")
        if not self.param_sets:
            raise DomainError("no param_set given", "SweepSpec")
        if not self.schemes:
            raise DomainError("no scheme given", "SweepSpec")
        if self.parameterization not in (GAMMA_BAR, GAMMA_BAR_1):
            raise DomainError(f"parameterization {self.parameterization!r} unknown", "SweepSpec")
        if self.outputs not in OUTPUTS:
            raise DomainError(f"outputs {self.outputs!r} not one of {OUTPUTS}", "SweepSpec")
        for m, ms in self.param_sets:
            FadingParams(m, ms, 1.0)
            if self.parameterization == GAMMA_BAR_1 and not ms > 1.0:
                raise DomainError(f"true-mean grid needs m_s > 1, got {ms!r}", "SweepSpec")

    def tasks(self):
        """Row tasks in output order: grid point, then param set, scheme, output kind."""
        kinds = {"exact": ("exact",), "asymptotic": ("asymptotic",),
                 "both": ("exact", "asymptotic")}[self.outputs]
        for db, lin in zip(self.snr_db, self.snr_linear):
            for m, ms in self.param_sets:
                for scheme in self.schemes:
                    for kind in kinds:
                        yield (db, lin, m, ms, scheme, kind)
                        if kind == "asymptotic" and scheme.kind is SchemeKind.OPRA:
                            yield (db, lin, m, ms, scheme, "asymptotic_cutoff")


def params_for(m, ms, snr, parameterization):
    if parameterization == GAMMA_BAR_1:
        return FadingParams.from_true_mean(m, ms, snr)
    return FadingParams(m, ms, snr)


def evaluate_row(task, parameterization):
    """One CSV record (dict); failures come back with empty values and an ``error`` entry."""
    db, lin, m, ms, scheme, kind = task
    row = {"snr_db": db, "snr_linear": lin, "parameterization": parameterization,
           "m": m, "ms": ms, "scheme": scheme.kind.value, "gamma0": scheme.gamma0,
           "method": None, "ec_nats": None, "ec_bits": None}
    try:
        p = params_for(m, ms, lin, parameterization)
        if kind == "exact":
            res = cap.ec_closed(p, scheme)
            row["method"] = res.method
            if scheme.kind is SchemeKind.OPRA:
                row["gamma0"] = res.diagnostics["gamma0"]
            val = res.ec_nats
        elif kind == "asymptotic":
            row["method"] = "asymptotic"
            if scheme.kind is SchemeKind.OPRA:
                row["gamma0"] = 1.0
            val = cap.ec_asym(p, scheme).ec_nats
        else:
            row["method"] = "asymptotic_cutoff"
            sol = cap.solve_opra_cutoff(p)
            row["gamma0"] = sol.gamma0
            val = cap.ec_opra_asym(p, use_solved_cutoff=True)
        row["ec_nats"] = float(val)
        row["ec_bits"] = float(val) / LN2
    except FisherECError as exc:
        row["method"] = row["method"] or kind
        op = exc.operation or type(exc).__name__
        row["error"] = f"{op}: {exc}"
    return row


def run_sweep(spec, jobs=1):
    tasks = list(spec.tasks())
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda t: evaluate_row(t, spec.parameterization), tasks))
    return [evaluate_row(t, spec.parameterization) for t in tasks]


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(rows):
    """CSV text; an ``error`` column is appended only when some row failed."""
    fields = list(FIELDS)
    if any("error" in r for r in rows):
        fields.append("error")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_cell(r.get(k)) for k in fields])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def to_json(rows):
    out = [{k: _json_value(v) for k, v in r.items()} for r in rows]
    return json.dumps(out, indent=1) + "\n"


def read_csv(text):
    """Parse CSV produced by :func:`to_csv` back into typed rows."""
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if k in ("parameterization", "scheme", "method", "error"):
                row[k] = v or None
            else:
                row[k] = float(v) if v != "" else None
        rows.append(row)
    return rows


# Figure presets.  Figure 3 is one fixed parameter point; the m list of
# figure 1 and the m_s list of figure 2 are defaults that callers may replace.

FIGURE_DEFAULTS = {
    1: {"snr_db": "0:80:2", "values": (0.5, 1.0, 2.5)},
    2: {"snr_db": "0:40:2", "values": (1.5, 2.5, 5.0)},
    3: {"snr_db": "0:40:2", "values": ()},
}


def all_schemes(gamma0):
    return [Scheme(SchemeKind.OPRA), Scheme(SchemeKind.ORA), Scheme(SchemeKind.TCI, gamma0),
            Scheme(SchemeKind.CI)]


def figure_spec(number, snr_db=None, values=None, pt_db=0.0):
    """Sweep for figure ``number``; ``values`` overrides the m (figure 1) or m_s (figure 2) list."""
    if number not in FIGURE_DEFAULTS:
        raise DomainError(f"figure {number!r} is not one of 1, 2, 3", "figure_spec")
    preset = FIGURE_DEFAULTS[number]
    dbs, lins = parse_grid(snr_db or preset["snr_db"], db=True)
    vals = tuple(values) if values else preset["values"]
    if number == 1:
        return SweepSpec(dbs, lins, [(m, 2.5) for m in vals], [Scheme(SchemeKind.TCI, 0.5)],
                         GAMMA_BAR, "both", pt_db)
    if number == 2:
        return SweepSpec(dbs, lins, [(3.5, ms) for ms in vals], all_schemes(1.0),
                         GAMMA_BAR_1, "exact", pt_db)
    return SweepSpec(dbs, lins, [(2.5, 1.5)], all_schemes(1.0), GAMMA_BAR, "both", pt_db)


def read_config(text):
    """Flat ``key = value`` lines; ``param_set`` may repeat, ``#`` starts a comment."""
    conf = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"config line {num}: expected 'key = value'", "read_config")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "param_set":
            conf.setdefault("param_set", []).append(val)
        else:
            conf[key] = val
    return conf
