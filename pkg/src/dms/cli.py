"""Command-line front end.

Subcommands reproduce the characteristic scans and trajectories of the
degenerate-multistate solutions as deterministic CSV artifacts (with an
optional rendered figure next to each CSV), plus inverse-design reports and
the acceptance suite:

    dms scan-detuning --config cfg.json   populations vs delta0*T
    dms scan-area     --config cfg.json   final populations vs rms pulse area
    dms evolve        --config cfg.json   populations vs time
    dms lz-scan       --config cfg.json   populations vs Lambda
    dms design        --config cfg.json   couplings/areas/detunings + check
    dms verify                            run the acceptance criteria

Configs are single JSON documents; unknown keys are rejected.  All
frequency-like quantities are scaled by the pulse width (T = 1), so chi_t
means chi*T and delta0_t means delta0*T.  Exit codes: 0 ok, 2 config error,
3 numerical failure, 4 design failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import design as design_mod
from . import dynamics, models, propagator
from .core import CouplingSet, ModelSpec, PulseShape, StateVector
from .dynamics import IntegrationConfig, IntegrationError

__all__ = ["main", "ConfigError", "DesignError"]


class ConfigError(Exception):
    pass


class DesignError(Exception):
    pass


# ---------------------------------------------------------------------------
# config plumbing

def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def _check_keys(doc: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in {where}; allowed: {sorted(allowed)}")


def _get(doc: dict, key: str, types, where: str, required: bool = True, default=None):
    if key not in doc:
        if required:
            raise ConfigError(f"missing required key '{key}' in {where}")
        return default
    val = doc[key]
    if types is not None and not isinstance(val, types):
        raise ConfigError(f"key '{key}' in {where} has wrong type {type(val).__name__}")
    return val


def _positive_int(val, name) -> int:
    if not isinstance(val, int) or isinstance(val, bool) or val < 1:
        raise ConfigError(f"'{name}' must be a positive integer")
    return val


def _tolerances(doc: dict) -> dict:
    tol = _get(doc, "tolerances", dict, "config", required=False, default={})
    _check_keys(tol, {"rel_tol", "abs_tol"}, "'tolerances'")
    out = {}
    for key, dflt in (("rel_tol", 1e-10), ("abs_tol", 1e-12)):
        val = tol.get(key, dflt)
        if not isinstance(val, (int, float)) or not (0 < val <= 1e-3):
            raise ConfigError(f"'{key}' must lie in (0, 1e-3]")
        out[key] = float(val)
    return out


def _grid(scan: dict, points_override: int | None, variable: str) -> np.ndarray:
    _check_keys(scan, {"variable", "from", "to", "points"}, "'scan'")
    var = _get(scan, "variable", str, "'scan'")
    if var != variable:
        raise ConfigError(f"scan variable must be '{variable}' for this command")
    lo = _get(scan, "from", (int, float), "'scan'")
    hi = _get(scan, "to", (int, float), "'scan'")
    if hi < lo:
        raise ConfigError("'scan.to' must be >= 'scan.from'")
    points = points_override if points_override is not None else scan.get("points", 201)
    points = _positive_int(points, "scan.points")
    if hi == lo:
        return np.array([float(lo)])
    return np.linspace(float(lo), float(hi), points)


def _build_couplings(doc: dict, where: str = "config") -> CouplingSet:
    spec = _get(doc, "couplings", (list, dict), where)
    if isinstance(spec, list):
        try:
            return CouplingSet(spec)
        except ValueError as exc:
            raise ConfigError(f"bad couplings: {exc}") from exc
    _check_keys(spec, {"design", "n", "i", "branch"}, "'couplings'")
    name = _get(spec, "design", str, "'couplings'")
    n = _positive_int(_get(spec, "n", int, "'couplings'"), "couplings.n")
    i = spec.get("i", 1)
    branch = {"+": +1, "-": -1}.get(spec.get("branch", "+"))
    if branch is None:
        raise ConfigError("couplings.branch must be '+' or '-'")
    try:
        target = design_mod.DesignTarget(name, n, _positive_int(i, "couplings.i"), branch)
        return design_mod.design_couplings(target, 1.0)
    except ValueError as exc:
        raise ConfigError(f"bad coupling design: {exc}") from exc


def _initial_index(doc: dict, n_states: int) -> int:
    idx = _get(doc, "initial", int, "config", required=False, default=1)
    idx = _positive_int(idx, "initial")
    if idx > n_states + 1:
        raise ConfigError(f"'initial' must be in 1..{n_states + 1} "
                          "(the excited state is the last index)")
    return idx


def _threads() -> int:
    raw = os.environ.get("DMS_THREADS", "")
    cap = os.cpu_count() or 1
    if raw:
        try:
            cap = max(1, min(cap, int(raw)))
        except ValueError:
            raise ConfigError("DMS_THREADS must be an integer") from None
    return min(cap, 8)


def _map_points(fn, xs):
    workers = _threads()
    if workers <= 1 or len(xs) < 4:
        return [fn(x) for x in xs]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, xs))


# ---------------------------------------------------------------------------
# CSV / figure output

def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_csv(path, command, config, colnames, rows, footer=()):
    lines = [f"# dms {command} v{_version()}",
             "# config: " + json.dumps(config, sort_keys=True, separators=(",", ":"))]
    lines.append(",".join(colnames))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    lines.extend(footer)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _version() -> str:
    from . import __version__
    return __version__


def _figure_path(doc, args, output):
    if getattr(args, "no_figure", False):
        return None
    if getattr(args, "figure", None):
        return args.figure
    fig = doc.get("figure")
    if fig is False or fig is None and "figure" in doc:
        return None
    if isinstance(fig, str):
        return fig
    root, _ = os.path.splitext(output)
    return root + ".png"


def _render(path, x, pops, xlabel, title, **kw):
    if path is None:
        return
    from .plotting import save_population_figure
    save_population_figure(path, np.asarray(x), np.asarray(pops), xlabel, title, **kw)


# ---------------------------------------------------------------------------
# model construction for scans

def _model_from_config(mdict: dict, kinds: tuple, **overrides) -> ModelSpec:
    _check_keys(mdict, {"kind", "chi_t", "delta0_t", "b_t", "area", "Lambda", "C", "shape"},
                "'model'")
    kind = _get(mdict, "kind", str, "'model'")
    if kind not in kinds:
        raise ConfigError(f"model kind must be one of {sorted(kinds)} for this command")
    params = dict(mdict)
    params.update(overrides)
    try:
        if kind == "resonance":
            shape = params.get("shape", "sech")
            if shape not in ("sech", "rect"):
                raise ConfigError("model.shape must be 'sech' or 'rect'")
            pulse = PulseShape.sech(1.0) if shape == "sech" else PulseShape.rect(1.0)
            return ModelSpec.resonance(float(_get(params, "area", (int, float), "'model'")),
                                       shape=pulse)
        if kind == "rabi":
            return ModelSpec.rabi(chi=float(_get(params, "chi_t", (int, float), "'model'")),
                                  delta0=float(params.get("delta0_t", 0.0)), T=1.0)
        if kind == "landau_zener":
            if "Lambda" in params:
                return ModelSpec.landau_zener(Lambda=float(params["Lambda"]),
                                              C=float(params.get("C", 1.0)))
            return ModelSpec.landau_zener(chi=float(_get(params, "chi_t", (int, float),
                                                         "'model'")),
                                          C=float(params.get("C", 1.0)))
        if kind == "rosen_zener":
            return ModelSpec.rosen_zener(chi=float(_get(params, "chi_t", (int, float),
                                                        "'model'")),
                                         delta0=float(params.get("delta0_t", 0.0)), T=1.0)
        if kind == "allen_eberly":
            return ModelSpec.allen_eberly(chi=float(_get(params, "chi_t", (int, float),
                                                         "'model'")),
                                          B=float(_get(params, "b_t", (int, float), "'model'")),
                                          T=1.0)
        return ModelSpec.demkov_kunike(chi=float(_get(params, "chi_t", (int, float), "'model'")),
                                       delta0=float(params.get("delta0_t", 0.0)),
                                       B=float(params.get("b_t", 0.0)), T=1.0)
    except ValueError as exc:
        raise ConfigError(f"bad model parameters: {exc}") from exc


def _analytic_populations(chis: CouplingSet, model: ModelSpec, initial: int) -> np.ndarray:
    ck = models.cayley_klein(model)
    if initial == chis.n_ground + 1:
        return propagator.populations_from_excited(chis, ck).probs
    return propagator.populations_from_ground(chis, ck, initial).probs


def _oracle_populations(chis: CouplingSet, model: ModelSpec, initial: int,
                        tols: dict, window: list | None) -> np.ndarray:
    shape, detuning, win = dynamics.model_waveforms(model)
    if window is not None:
        win = (float(window[0]), float(window[1]))
    scaled = chis.scaled_to(model.chi) if model.chi > 0 else chis
    cfg = IntegrationConfig(t_start=win[0], t_end=win[1], samples=2,
                            rel_tol=tols["rel_tol"], abs_tol=tols["abs_tol"])
    rec = dynamics.integrate(scaled, shape, detuning,
                             StateVector.basis(chis.n_ground + 1, initial), cfg)
    return rec.final_populations


def _pop_colnames(n: int, suffix: str = "") -> list:
    return [f"P_{j + 1}{suffix}" for j in range(n + 1)]


def _window_from_config(doc) -> list | None:
    win = _get(doc, "window", list, "config", required=False)
    if win is None:
        return None
    if len(win) != 2 or not all(isinstance(v, (int, float)) for v in win):
        raise ConfigError("'window' must be [t_start, t_end]")
    if not win[0] < win[1]:
        raise ConfigError("'window' must have t_start < t_end")
    return [float(win[0]), float(win[1])]


# ---------------------------------------------------------------------------
# subcommands

_SCAN_KEYS = {"model", "couplings", "initial", "scan", "output", "oracle",
              "figure", "tolerances", "window"}


def cmd_scan_detuning(args) -> int:
    doc = _load_config(args.config)
    _check_keys(doc, _SCAN_KEYS, "config")
    chis = _build_couplings(doc)
    initial = _initial_index(doc, chis.n_ground)
    mdict = _get(doc, "model", dict, "config")
    grid = _grid(_get(doc, "scan", dict, "config"), args.points, "delta0_t")
    oracle = bool(args.oracle or doc.get("oracle", False))
    tols = _tolerances(doc)
    window = _window_from_config(doc)
    output = args.output or _get(doc, "output", str, "config")

    def point(x):
        model = _model_from_config(mdict, ("rosen_zener", "demkov_kunike"), delta0_t=x)
        row = list(_analytic_populations(chis, model, initial))
        if oracle:
            row += list(_oracle_populations(chis, model, initial, tols, window))
        return row

    # validate model construction once before launching the scan
    _model_from_config(mdict, ("rosen_zener", "demkov_kunike"), delta0_t=float(grid[0]))
    rows = _map_points(point, list(grid))
    cols = ["delta0T"] + _pop_colnames(chis.n_ground)
    if oracle:
        cols += _pop_colnames(chis.n_ground, "_oracle")
    _write_csv(output, "scan-detuning", doc, cols,
               [[x] + r for x, r in zip(grid, rows)])
    pops = np.asarray(rows)[:, :chis.n_ground + 1]
    _render(_figure_path(doc, args, output), grid, pops, "delta0*T",
            "final populations vs detuning")
    return 0


def cmd_scan_area(args) -> int:
    doc = _load_config(args.config)
    _check_keys(doc, _SCAN_KEYS, "config")
    chis = _build_couplings(doc)
    initial = _initial_index(doc, chis.n_ground)
    mdict = _get(doc, "model", dict, "config")
    scan = _get(doc, "scan", dict, "config")
    var = scan.get("variable")
    if var not in ("chi_t", "rms_area"):
        raise ConfigError("scan variable must be 'chi_t' or 'rms_area' for scan-area")
    grid = _grid(scan, args.points, var)
    oracle = bool(args.oracle or doc.get("oracle", False))
    tols = _tolerances(doc)
    window = _window_from_config(doc)
    output = args.output or _get(doc, "output", str, "config")
    kinds = ("rosen_zener", "resonance")

    def to_model(x):
        if mdict.get("kind") == "resonance":
            area = x if var == "rms_area" else math.pi * x
            return _model_from_config(mdict, kinds, area=area)
        chi_t = x if var == "chi_t" else x / math.pi
        return _model_from_config(mdict, kinds, chi_t=chi_t)

    def point(x):
        model = to_model(x)
        pops = _analytic_populations(chis, model, initial)
        dev = float(np.max(np.abs(pops[:-1] - 1.0 / chis.n_ground)))
        row = list(pops) + [dev]
        if oracle:
            row += list(_oracle_populations(chis, model, initial, tols, window))
        return row

    to_model(float(grid[0]))
    rows = _map_points(point, list(grid))
    areas = grid if var == "rms_area" else math.pi * grid
    cols = ["rms_area"] + _pop_colnames(chis.n_ground) + ["equal_dev"]
    if oracle:
        cols += _pop_colnames(chis.n_ground, "_oracle")
    _write_csv(output, "scan-area", doc, cols,
               [[a] + r for a, r in zip(areas, rows)])
    pops = np.asarray(rows)[:, :chis.n_ground + 1]
    _render(_figure_path(doc, args, output), areas, pops, "rms pulse area",
            "final populations vs rms area")
    return 0


def cmd_evolve(args) -> int:
    doc = _load_config(args.config)
    _check_keys(doc, _SCAN_KEYS | {"samples"}, "config")
    chis = _build_couplings(doc)
    initial = _initial_index(doc, chis.n_ground)
    mdict = _get(doc, "model", dict, "config")
    model = _model_from_config(mdict, ("resonance", "rabi", "landau_zener",
                                       "rosen_zener", "allen_eberly", "demkov_kunike"))
    tols = _tolerances(doc)
    samples = _positive_int(doc.get("samples", 801), "samples")
    if samples < 2:
        raise ConfigError("'samples' must be at least 2")
    output = args.output or _get(doc, "output", str, "config")

    shape, detuning, win = dynamics.model_waveforms(model)
    window = _window_from_config(doc) or list(win)
    scaled = chis.scaled_to(model.chi) if model.chi > 0 else chis
    cfg = IntegrationConfig(t_start=window[0], t_end=window[1], samples=samples,
                            rel_tol=tols["rel_tol"], abs_tol=tols["abs_tol"])
    rec = dynamics.integrate(scaled, shape, detuning,
                             StateVector.basis(chis.n_ground + 1, initial), cfg)
    cols = ["t_over_T"] + _pop_colnames(chis.n_ground)
    rows = [[t] + list(p) for t, p in zip(rec.times, rec.populations)]
    _write_csv(output, "evolve", doc, cols, rows,
               footer=[f"# peak_excited = {_fmt(rec.peak_excited)}"])
    _render(_figure_path(doc, args, output), rec.times, rec.populations,
            "t / T", "populations vs time")
    return 0


def cmd_lz_scan(args) -> int:
    doc = _load_config(args.config)
    _check_keys(doc, {"couplings", "initial", "scan", "output", "oracle",
                      "figure", "tolerances", "window_factor"}, "config")
    chis = _build_couplings(doc)
    initial = _initial_index(doc, chis.n_ground)
    grid = _grid(_get(doc, "scan", dict, "config"), args.points, "Lambda")
    if np.any(grid < 0):
        raise ConfigError("Lambda must be nonnegative")
    oracle = bool(args.oracle or doc.get("oracle", False))
    wf = doc.get("window_factor", dynamics.LZ_WINDOW_FACTOR)
    if not isinstance(wf, (int, float)) or wf <= 0:
        raise ConfigError("'window_factor' must be positive")
    tols = _tolerances(doc)
    output = args.output or _get(doc, "output", str, "config")

    def point(lam):
        row = list(propagator.lz_populations(chis, lam, initial).probs)
        if oracle:
            cfg = IntegrationConfig(t_start=-1.0, t_end=1.0,
                                    rel_tol=tols["rel_tol"], abs_tol=tols["abs_tol"])
            row += list(dynamics.lz_populations_oracle(
                chis, lam, initial, window_factor=float(wf), cfg=cfg).probs)
        return row

    rows = _map_points(point, list(grid))
    cols = ["Lambda"] + _pop_colnames(chis.n_ground)
    if oracle:
        cols += _pop_colnames(chis.n_ground, "_oracle")
    _write_csv(output, "lz-scan", doc, cols,
               [[x] + r for x, r in zip(grid, rows)])
    pops = np.asarray(rows)[:, :chis.n_ground + 1]
    _render(_figure_path(doc, args, output), grid, pops, "Lambda",
            "final populations vs sweep parameter")
    return 0


def cmd_design(args) -> int:
    doc = _load_config(args.config)
    _check_keys(doc, {"target", "chi_total", "l", "rz_alpha", "output"}, "config")
    tdict = _get(doc, "target", dict, "config")
    _check_keys(tdict, {"kind", "n", "i", "branch"}, "'target'")
    name = _get(tdict, "kind", str, "'target'")
    n = _positive_int(_get(tdict, "n", int, "'target'"), "target.n")
    i = _positive_int(tdict.get("i", 1), "target.i")
    branch = {"+": +1, "-": -1}.get(tdict.get("branch", "+"))
    if branch is None:
        raise ConfigError("target.branch must be '+' or '-'")
    chi_total = doc.get("chi_total", 1.0)
    if not isinstance(chi_total, (int, float)) or chi_total <= 0:
        raise ConfigError("'chi_total' must be positive")
    l_res = doc.get("l", 0)
    if not isinstance(l_res, int) or l_res < 0:
        raise ConfigError("'l' must be a nonnegative integer")
    rz_alpha = doc.get("rz_alpha", 9)
    if not isinstance(rz_alpha, int) or not (1 <= rz_alpha <= 15):
        raise ConfigError("'rz_alpha' must be an integer in 1..15")

    try:
        target = design_mod.DesignTarget(name, n, i, branch)
        chis = design_mod.design_couplings(target, float(chi_total))
        areas = design_mod.resonance_areas(target, l_res)
    except ValueError as exc:
        raise DesignError(str(exc)) from exc

    rms = float(math.sqrt(np.sum(areas ** 2)))
    report = {
        "target": {"kind": name, "n": n, "i": i, "branch": "+" if branch > 0 else "-"},
        "required_a": target.required_a.real,
        "couplings": [float(c) for c in chis.chis],
        "resonance_areas": [float(a) for a in areas],
        "rms_area": rms,
    }
    if target.required_a == -1.0:
        roots = design_mod.rz_minus_one_detunings(rz_alpha)
        report["rz_chi_t"] = 2 * rz_alpha
        report["rz_detunings"] = [float(r) for r in roots.roots]
        ck = models.cayley_klein(ModelSpec.rosen_zener(chi=2.0 * rz_alpha,
                                                       delta0=roots.roots[-1], T=1.0))
    else:
        ck = models.cayley_klein(ModelSpec.resonance(rms))
    check = design_mod.verify_design(target, chis, ck, tol=1e-6)
    report["verify"] = {
        "passed": bool(check.passed),
        "max_deviation": float(check.max_deviation),
        "tolerance": float(check.tolerance),
        "populations": [float(p) for p in check.populations.probs],
    }
    if not check.passed:
        raise DesignError(f"design verification failed: max deviation "
                          f"{check.max_deviation:.3e} > {check.tolerance:.1e}")

    text = json.dumps(report, indent=2, sort_keys=True)
    output = args.output or doc.get("output")
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_verify(args) -> int:
    from . import acceptance
    results = acceptance.run_all(fast=args.fast, artifacts_dir=args.output_dir)
    failed = 0
    for res in results:
        print(res.line())
        if not res.passed:
            failed += 1
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------

def _add_common(sp, config_required=True):
    sp.add_argument("--config", required=config_required, help="path to JSON config")
    sp.add_argument("--output", help="override the output path")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dms",
                                     description="degenerate-multistate pulse dynamics")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (("scan-detuning", cmd_scan_detuning),
                     ("scan-area", cmd_scan_area),
                     ("lz-scan", cmd_lz_scan)):
        sp = sub.add_parser(name)
        _add_common(sp)
        sp.add_argument("--points", type=int, help="override the scan grid size")
        sp.add_argument("--oracle", action="store_true",
                        help="add integrator columns next to the closed forms")
        sp.add_argument("--figure", help="figure path (default: CSV stem + .png)")
        sp.add_argument("--no-figure", action="store_true", help="skip the figure")
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("evolve")
    _add_common(sp)
    sp.add_argument("--figure", help="figure path (default: CSV stem + .png)")
    sp.add_argument("--no-figure", action="store_true", help="skip the figure")
    sp.set_defaults(fn=cmd_evolve, points=None, oracle=False)

    sp = sub.add_parser("design")
    _add_common(sp)
    sp.set_defaults(fn=cmd_design)

    sp = sub.add_parser("verify")
    sp.add_argument("--fast", action="store_true",
                    help="reduced oracle batch sizes (smoke mode)")
    sp.add_argument("--output-dir", default=None,
                    help="directory for the CSV artifacts the suite emits")
    sp.set_defaults(fn=cmd_verify)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except DesignError as exc:
        print(f"design failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
