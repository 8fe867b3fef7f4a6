"""
Command-line entry point.

Every subcommand accepts ``--config file.json``; explicit flags override the
values found there. Exit status: 0 success, 1 configuration error, 2 when some
grid points (or selftest checks) failed.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import applications as app
from . import bogoliubov as bg
from . import selftest
from .effective import KernelNotConverged, MatsubaraKernelSpec, matsubara_kernel
from .sweep import SWEEP_MODELS, SweepSpec, atomic_write, compare_models, rows_to_csv, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2

DEFAULTS = {
    "model": "full_polaron",
    "N": [10],
    "nph": 10,
    "beta": [5.0],
    "omega_c": 1.0,
    "omega_z": [1.0],
    "lambda_grid": "0:2:21",
    "format": "csv",
    "workers": 1,
    "wall_time": None,
    "cutoff_tol": None,
    "hepp_lieb": False,
    "observables": True,
}


class ConfigError(ValueError):
    pass


# --- parsing helpers ----------------------------------------------------------

def _split(val, conv, name):
    if val is None:
        return None
    items = val if isinstance(val, (list, tuple)) else str(val).split(",")
    try:
        out = [conv(x) if not isinstance(x, str) else conv(x.strip()) for x in items]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {name}: {val!r}") from exc
    if not out:
        raise ConfigError(f"{name} is empty")
    return out


def _int(x):
    f = float(x)
    if not f.is_integer():
        raise ValueError(x)
    return int(f)


def parse_lambda_grid(val):
    """``start:stop:steps`` (inclusive linspace) or an explicit list of lambda/lambda_c."""
    if isinstance(val, (list, tuple)):
        return _split(val, float, "lambda-grid")
    parts = str(val).split(":")
    if len(parts) == 1:
        return _split(val, float, "lambda-grid")
    if len(parts) != 3:
        raise ConfigError(f"lambda grid must look like start:stop:steps, got {val!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), _int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad lambda grid {val!r}") from exc
    if steps < 1:
        raise ConfigError("lambda grid needs at least one step")
    return [float(x) for x in np.linspace(start, stop, steps)]


def load_config(path):
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    # accept dashed spellings as in the flags
    return {k.replace("-", "_"): v for k, v in doc.items()}


def merged(args, keys):
    """DEFAULTS < config file < explicit flags."""
    cfg = dict(DEFAULTS)
    cfg.update(load_config(getattr(args, "config", None)))
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    return cfg


# --- subcommands --------------------------------------------------------------

SWEEP_KEYS = ("model", "N", "nph", "beta", "omega_c", "omega_z", "lambda_grid", "out", "format",
              "workers", "wall_time", "cutoff_tol", "hepp_lieb", "observables", "compare")


def build_spec(cfg, forced_models=None):
    model_list = forced_models or _split(cfg["model"], str, "model")
    try:
        omega_c = float(cfg["omega_c"])
        ratios = [wz / omega_c for wz in _split(cfg["omega_z"], float, "omega-z")]
        return SweepSpec(
            models=tuple(model_list),
            lambda_ratios=tuple(parse_lambda_grid(cfg["lambda_grid"])),
            Ns=tuple(_split(cfg["N"], _int, "N")),
            betas=tuple(_split(cfg["beta"], float, "beta")),
            omega_ratios=tuple(ratios),
            omega_c=omega_c,
            n_ph=_int(cfg["nph"]),
            observables=bool(cfg["observables"]),
            hepp_lieb=bool(cfg["hepp_lieb"]),
            wall_time_s=None if cfg["wall_time"] is None else float(cfg["wall_time"]),
            cutoff_tol=None if cfg["cutoff_tol"] is None else float(cfg["cutoff_tol"]),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from exc


def _emit(text, out):
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _run_grid(args, forced_models=None, allowed=SWEEP_MODELS):
    cfg = merged(args, SWEEP_KEYS)
    spec = build_spec(cfg, forced_models)
    bad = [m for m in spec.models if m not in allowed]
    if bad:
        raise ConfigError(f"model(s) {bad} not available here; choose from {allowed}")
    fmt = cfg["format"]
    if fmt not in ("csv", "jsonl"):
        raise ConfigError(f"unknown format {fmt!r}")
    workers = _int(cfg["workers"])
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    res = run_sweep(spec, workers=workers)
    _emit(res.to_csv() if fmt == "csv" else res.to_jsonl(), cfg.get("out"))
    if cfg.get("compare"):
        try:
            cmp = compare_models(res, cfg["compare"])
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        cols = ("model", "baseline", "N", "n_ph", "beta", "omega_c", "omega_z", "max_rel_diff")
        sys.stderr.write(rows_to_csv(cmp.max_over_lambda, cols))
    for r in res.rows:
        if r["error"]:
            sys.stderr.write(f"point failed: model={r['model']} N={r['N']} beta={r['beta']} "
                             f"lambda/lambda_c={r['lambda_over_lambda_c']}: {r['error']}\n")
    return EXIT_PARTIAL if res.n_failed else EXIT_OK


def cmd_sweep(args):
    return _run_grid(args)


def cmd_analytic(args):
    return _run_grid(args, forced_models=["analytic"])


def cmd_ed(args):
    return _run_grid(args, allowed=("full_polaron", "effective", "sw"))


def _complex_matrix(val, name):
    if isinstance(val, dict):
        re = np.asarray(val.get("re", 0.0), dtype=float)
        im = np.asarray(val.get("im", np.zeros_like(re)), dtype=float)
        return re + 1j * im
    try:
        return np.asarray(val, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a numeric matrix") from exc


def _cplx_list(a):
    return {"re": np.real(a).tolist(), "im": np.imag(a).tolist()}


def cmd_bogoliubov(args):
    cfg = load_config(args.config)
    omega = args.omega if args.omega is not None else cfg.get("omega")
    delta = args.delta if args.delta is not None else cfg.get("delta", cfg.get("Delta"))
    try:
        if "H1" in cfg and args.omega is None:
            h1 = _complex_matrix(cfg["H1"], "H1")
            h2 = _complex_matrix(cfg["H2"], "H2") if "H2" in cfg else np.zeros_like(h1)
            form = bg.QuadraticBosonForm(h1, h2)
            out = {}
        else:
            if omega is None or delta is None:
                raise ConfigError("give --omega and --delta, or H1/H2 matrices in --config")
            sm = bg.single_mode(float(delta), float(omega))
            form = bg.QuadraticBosonForm([[omega + 2 * delta]], [[2 * delta]])
            out = {"lambda": sm.lambda_k, "cosh_theta": sm.cosh_theta, "sinh_theta": sm.sinh_theta}
        bogo = bg.diagonalize_quadratic(form)
    except bg.UnstableFormError as exc:
        sys.stderr.write(f"unstable form: {exc}\n")
        return EXIT_PARTIAL
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out.update(omega_tilde=bogo.omega_tilde.tolist(), alpha=_cplx_list(bogo.alpha),
               beta=_cplx_list(bogo.beta),
               pseudo_unitarity_residual=bg.pseudo_unitarity_residual(bogo),
               ground_energy=bg.ground_energy(form, bogo))
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_kernel(args):
    cfg = load_config(args.config)

    def pick(name, default):
        v = getattr(args, name)
        return v if v is not None else cfg.get(name, default)

    try:
        w = float(pick("omega_tilde", None) or pick("omega_c", 1.0))
        b = float(_split(pick("beta", 5.0), float, "beta")[0])
        n_pts = _int(pick("tau_points", 21))
        tau = (np.arange(n_pts) + 0.5) * b / n_pts  # cell centres avoid the delta at tau = 0
        spec = MatsubaraKernelSpec(w, b, _int(pick("n_max", 20000)), tau)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    try:
        k = matsubara_kernel(spec, tol=float(pick("tol", 1e-8)), zero_mode_only=bool(args.local))
    except KernelNotConverged as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_PARTIAL
    rows = [dict(tau=t, total=float(k.total[i].real), even=float(k.even[i]), odd=float(k.odd[i]),
                 even_exact=float(k.even_exact[i]), odd_exact=float(k.odd_exact[i]))
            for i, t in enumerate(k.tau)]
    cols = ("tau", "total", "even", "odd", "even_exact", "odd_exact")
    fmt = pick("format", "csv")
    text = rows_to_csv(rows, cols) if fmt == "csv" else "".join(json.dumps(r) + "\n" for r in rows)
    _emit(text, args.out)
    return EXIT_OK


def cmd_condensation(args):
    cfg = load_config(args.config)
    d0 = args.delta0 if args.delta0 is not None else cfg.get("delta0")
    w0 = args.omega0 if args.omega0 is not None else cfg.get("omega0")
    if d0 is None or w0 is None:
        raise ConfigError("condensation needs --delta0 and --omega0")
    try:
        f, ok = app.nogo_factor(float(d0), float(w0))
        out = {"nogo_factor": f, "transition_possible": ok}
        n = args.N if args.N is not None else cfg.get("N")
        c0e = args.c0e if args.c0e is not None else cfg.get("c0e")
        if n is not None and c0e is not None:
            n = _split(n, _int, "N")[0]
            f2, ok2 = app.nogo_factor_without_A2(n, float(c0e), float(w0))
            out.update(factor_without_A2=f2, transition_possible_without_A2=ok2)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _emit(json.dumps(out) + "\n", args.out)
    return EXIT_OK


def cmd_spin_couplings(args):
    cfg = load_config(args.config)
    path = args.modes or cfg.get("modes")
    if not path:
        raise ConfigError("spin-couplings needs --modes <file.json|file.csv>")
    try:
        ms = app.load_modes(path)
        J = app.spin_coupling_matrix(ms)
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"could not read mode samples: {exc}") from exc
    fmt = args.format or cfg.get("format", "csv")
    n = J.n_sites
    rows = [dict(i=i, j=j, a="xyz"[a], b="xyz"[b], J=float(J.J[i, j, a, b]))
            for i in range(n) for j in range(n) for a in range(3) for b in range(3)]
    if fmt == "csv":
        text = rows_to_csv(rows, ("i", "j", "a", "b", "J"))
    else:
        text = "".join(json.dumps(r) + "\n" for r in rows)
    _emit(text, args.out)
    return EXIT_OK


def cmd_selftest(args):
    results = selftest.run_all()
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_PARTIAL


# --- argparse -----------------------------------------------------------------

def _common(p):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--out", help="output path (default: stdout); written atomically")
    p.add_argument("--format", choices=("csv", "jsonl"))


def _grid_flags(p, with_model=True):
    if with_model:
        p.add_argument("--model", help=f"comma list from {', '.join(SWEEP_MODELS)}")
    p.add_argument("--N", help="number of spins, comma list allowed")
    p.add_argument("--nph", type=int, help="Fock cutoff N_ph")
    p.add_argument("--beta", help="inverse temperature(s), comma list allowed")
    p.add_argument("--omega-z", dest="omega_z", help="spin splitting(s), comma list allowed")
    p.add_argument("--omega-c", dest="omega_c", type=float, help="cavity frequency")
    p.add_argument("--lambda-grid", dest="lambda_grid", help="lambda/lambda_c as start:stop:steps")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--wall-time", dest="wall_time", type=float, help="per-point wall-time cap in seconds")
    p.add_argument("--cutoff-tol", dest="cutoff_tol", type=float,
                   help="require f to agree with a run at N_ph + 5 to this tolerance")
    p.add_argument("--hepp-lieb", dest="hepp_lieb", action="store_const", const=True,
                   help="also compute the coherent-state bound and check the sandwich")
    p.add_argument("--no-observables", dest="observables", action="store_const", const=False,
                   help="free energy only")
    p.add_argument("--compare", help="baseline model; max-over-lambda differences go to stderr")


def build_parser():
    ap = argparse.ArgumentParser(prog="cavityeff", description="Cavity-eliminated effective models: "
                                 "Dicke free energies, Bogoliubov transforms and evaluators.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    for name, fn, helptext, with_model in (
        ("sweep", cmd_sweep, "grid sweep over any model", True),
        ("analytic", cmd_analytic, "thermodynamic-limit free energy on a grid", False),
        ("ed", cmd_ed, "exact diagonalization on a grid", True),
    ):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        _grid_flags(p, with_model)
        p.set_defaults(func=fn)

    p = sub.add_parser("bogoliubov", help="diagonalize a quadratic bosonic form")
    _common(p)
    p.add_argument("--omega", type=float)
    p.add_argument("--delta", type=float, help="diamagnetic shift of a single mode")
    p.set_defaults(func=cmd_bogoliubov)

    p = sub.add_parser("kernel", help="sample the imaginary-time kernel")
    _common(p)
    p.add_argument("--omega-tilde", dest="omega_tilde", type=float)
    p.add_argument("--omega-c", dest="omega_c", type=float, help="used when --omega-tilde is absent")
    p.add_argument("--beta")
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--tau-points", dest="tau_points", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--local", action="store_true", help="keep only the n = 0 term")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("condensation", help="photon-condensation criteria for a uniform mode")
    _common(p)
    p.add_argument("--delta0", type=float)
    p.add_argument("--omega0", type=float)
    p.add_argument("--N")
    p.add_argument("--c0e", type=float)
    p.set_defaults(func=cmd_condensation)

    p = sub.add_parser("spin-couplings", help="cavity-mediated spin-spin coupling tensor")
    _common(p)
    p.add_argument("--modes", help="mode samples (.json or .csv)")
    p.set_defaults(func=cmd_spin_couplings)

    p = sub.add_parser("selftest", help="run the structural invariant checks")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; those are configuration errors here
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
