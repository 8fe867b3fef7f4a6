"""
Parameter sweeps over (model, w_z/w_c, beta, N, lambda/lambda_c) with
deterministic, order-stable output.
"""

import csv
import io
import itertools
import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import ed, models, thermo

SWEEP_MODELS = ("full_polaron", "effective", "sw", "analytic")
HL_MODELS = ("full", "full_polaron")

COLUMNS = (
    "model", "N", "n_ph", "beta", "omega_c", "omega_z", "lambda_over_lambda_c", "lam",
    "f_per_site", "photon_number", "sx2_over_n2", "log_z",
    "log_z_tilde", "hl_lower_slack", "hl_upper_slack", "error", "wall_time_ms",
)
# wall time differs run to run; it is kept in memory but left out of files by default
FILE_COLUMNS = tuple(c for c in COLUMNS if c != "wall_time_ms")


def _as_tuple(x):
    if isinstance(x, (str, bytes)) or not hasattr(x, "__iter__"):
        return (x,)
    return tuple(x)


@dataclass(frozen=True)
class SweepSpec:
    """
    Grid description. ``omega_ratios`` are w_z / w_c and ``lambda_ratios`` are
    lambda / lambda_c; everything else is absolute (units of ``omega_c``).
    """

    models: tuple
    lambda_ratios: tuple
    Ns: tuple
    betas: tuple
    omega_ratios: tuple
    omega_c: float = 1.0
    n_ph: int = 10
    observables: bool = True
    hepp_lieb: bool = False
    wall_time_s: float = None
    cutoff_tol: float = None

    def __post_init__(self):
        for name in ("models", "lambda_ratios", "Ns", "betas", "omega_ratios"):
            val = _as_tuple(getattr(self, name))
            if not val:
                raise ValueError(f"grid axis {name!r} is empty")
            object.__setattr__(self, name, val)
        for m in self.models:
            if m not in SWEEP_MODELS:
                raise ValueError(f"unknown model {m!r}; choose from {SWEEP_MODELS}")
        if any(not (r >= 0 and math.isfinite(r)) for r in self.lambda_ratios):
            raise ValueError("lambda/lambda_c values must be finite and >= 0")
        if any(int(n) != n or n < 1 for n in self.Ns):
            raise ValueError("N values must be positive integers")
        if any(not b > 0 for b in self.betas) or any(not w > 0 for w in self.omega_ratios):
            raise ValueError("beta and w_z/w_c values must be positive")
        if not self.omega_c > 0 or int(self.n_ph) < 1:
            raise ValueError("omega_c must be positive and n_ph >= 1")
        if self.wall_time_s is not None and not self.wall_time_s > 0:
            raise ValueError("wall-time cap must be positive")
        if self.cutoff_tol is not None and not self.cutoff_tol > 0:
            raise ValueError("cutoff tolerance must be positive")

    def points(self):
        """Grid points in output order; lambda varies fastest."""
        for m, wr, b, n, lr in itertools.product(self.models, self.omega_ratios, self.betas,
                                                 self.Ns, self.lambda_ratios):
            yield dict(model=m, omega_ratio=float(wr), beta=float(b), N=int(n), lambda_ratio=float(lr))

    def __len__(self):
        return (len(self.models) * len(self.omega_ratios) * len(self.betas)
                * len(self.Ns) * len(self.lambda_ratios))


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)

    @property
    def n_failed(self):
        return sum(1 for r in self.rows if r["error"])

    def to_csv(self, columns=FILE_COLUMNS):
        return rows_to_csv(self.rows, columns)

    def to_jsonl(self, columns=FILE_COLUMNS):
        return "".join(json.dumps({c: r[c] for c in columns}) + "\n" for r in self.rows)


def params_for(spec, pt):
    wc = spec.omega_c
    wz = pt["omega_ratio"] * wc
    lam = pt["lambda_ratio"] * thermo.critical_coupling(wc, wz)
    return models.DickeParams(omega_c=wc, omega_z=wz, lam=lam, N=pt["N"], n_ph=spec.n_ph, beta=pt["beta"])


def run_point(spec, pt):
    """One grid row. Failures are caught and reported in the ``error`` column."""
    t0 = time.perf_counter()
    row = dict.fromkeys(COLUMNS)
    row.update(model=pt["model"], N=pt["N"], n_ph=spec.n_ph, beta=pt["beta"], omega_c=spec.omega_c,
               lambda_over_lambda_c=pt["lambda_ratio"], error="")
    try:
        p = params_for(spec, pt)
        row.update(omega_z=p.omega_z, lam=p.lam)
        if pt["model"] == "analytic":
            th, _ = thermo.analytic_free_energy(p)
        else:
            deadline = None if spec.wall_time_s is None else time.monotonic() + spec.wall_time_s
            th = ed.solve(p, pt["model"], observables=spec.observables, deadline=deadline,
                          cutoff_tol=spec.cutoff_tol).thermo
        row.update(f_per_site=th.free_energy_per_site, log_z=th.log_Z)
        if spec.observables:
            row.update(photon_number=float(th.observables["photon_number"]),
                       sx2_over_n2=float(th.observables["sx2_over_n2"]))
        if spec.hepp_lieb and pt["model"] in HL_MODELS:
            lzt = thermo.log_z_tilde_dicke(p)
            row["log_z_tilde"] = lzt
            slack = thermo.hepp_lieb_gap(th.log_Z, lzt, [p.omega_c], p.beta)
            row.update(hl_lower_slack=slack.lower, hl_upper_slack=slack.upper)
    except Exception as exc:  # noqa: BLE001 - per-point isolation is the point
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["wall_time_ms"] = (time.perf_counter() - t0) * 1e3
    return row


def _run_indexed(args):
    spec, pt = args
    return run_point(spec, pt)


def run_sweep(spec, workers=1):
    """
    Evaluate every grid point. With ``workers > 1`` points go to a process pool;
    results are collected in grid order so the output does not depend on scheduling.
    """
    pts = list(spec.points())
    if workers <= 1 or len(pts) == 1:
        return SweepResult(rows=[run_point(spec, pt) for pt in pts])
    with ProcessPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(_run_indexed, [(spec, pt) for pt in pts]))
    return SweepResult(rows=rows)


# --- comparisons --------------------------------------------------------------

_KEY = ("N", "n_ph", "beta", "omega_c", "omega_z", "lambda_over_lambda_c")
_SCAN_KEY = ("N", "n_ph", "beta", "omega_c", "omega_z")


@dataclass
class Comparison:
    rows: list
    max_over_lambda: list


def compare_models(result, baseline):
    """
    Relative differences |f - f_base| / |f_base| against the ``baseline`` model at
    every grid point, and the maximum over lambda for each (model, N, beta, w_z).
    """
    rows = result.rows if isinstance(result, SweepResult) else result
    base = {tuple(r[k] for k in _KEY): r for r in rows if r["model"] == baseline}
    if not base:
        raise KeyError(f"baseline model {baseline!r} not present in the sweep")
    out = []
    for r in rows:
        if r["model"] == baseline:
            continue
        key = tuple(r[k] for k in _KEY)
        if key not in base:
            raise KeyError(f"no baseline row for {dict(zip(_KEY, key))}")
        b = base[key]
        if r["error"] or b["error"]:
            rel = math.nan
        else:
            rel = abs(r["f_per_site"] - b["f_per_site"]) / abs(b["f_per_site"])
        out.append({**{k: r[k] for k in _KEY}, "model": r["model"], "baseline": baseline,
                    "f": r["f_per_site"], "f_baseline": b["f_per_site"], "rel_diff": rel})
    scans = {}
    for r in out:
        scans.setdefault((r["model"],) + tuple(r[k] for k in _SCAN_KEY), []).append(r["rel_diff"])
    mx = [{"model": k[0], **dict(zip(_SCAN_KEY, k[1:])), "baseline": baseline,
           "max_rel_diff": max(v) if not any(math.isnan(x) for x in v) else math.nan}
          for k, v in scans.items()]
    return Comparison(rows=out, max_over_lambda=mx)


# --- output -------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def rows_to_csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")  # RFC 4180 line ends, minimal quoting
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def atomic_write(path, text):
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def spec_dict(spec):
    return asdict(spec)
