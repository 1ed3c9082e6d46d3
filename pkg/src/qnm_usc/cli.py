"""Scenario-driven command line front end.

    qnm-usc run CONFIG.toml [--out DIR] [flags]
    qnm-usc sweep CONFIG.toml --scenario NAME --axis eta --values 0.02,0.05 --workers 4
    qnm-usc criteria [PARAM_FILE ...]
    qnm-usc validate CONFIG.toml

Exit codes: 0 ok, 2 config error, 3 physics error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import cmath
import concurrent.futures as cf
import dataclasses
import io
import json
import logging
import math
import sys
import warnings
from pathlib import Path

import numpy as np
from scipy import constants

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__, _kernels
from .errors import ConfigError, NumericalError, PhysicsError
from .perturbative import bs_linewidths
from .qnm import (QnmParams, criteria_table, detection_scale, dipole_coupling, ev_to_rad_per_s, find_mode,
                  free_space_rate, load_params, params_from_dict, params_to_dict, purcell_rate_multimode,
                  purcell_rate_single)
from .simulate import HOPFIELD_SETTINGS, Settings, simulate
from .spectra import CLASSICAL_VARIANTS, classical_spectrum, default_grid, fit_two_lorentzians

log = logging.getLogger("qnm_usc")

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_NUMERICAL = 0, 2, 3, 4
FLOAT_FMT = "%.16e"
E_NM = constants.e * 1e-9  # 1 e nm in C m
EV_TO_S = constants.e / constants.hbar

SETTINGS_KEYS = {f.name for f in dataclasses.fields(Settings)}
COMMON_KEYS = {"name", "kind", "qnm", "output"}
KIND_KEYS = {
    "spectrum": {"eta", "phi0", "omega0", "system", "grid", "normalize", "convergence_check"} | SETTINGS_KEYS,
    "linewidth_sweep": {"eta", "phi0", "grid", "convergence_check"} | SETTINGS_KEYS,
    "hopfield": {"lambda", "phi0", "omega0", "grid", "classical", "convergence_check"} | SETTINGS_KEYS,
    "classical": {"eta", "phi0", "omega0", "grid", "variants"},
    "purcell": {"modes", "grid", "dipole_enm"},
    "criteria": {"files", "dipole_enm"},
}
QUICK_QNM_KEYS = {"label", "omega_c_eV", "q_c", "phi0_rad"}
SWEEPABLE = {"eta", "phi0", "omega0", "lambda", "dipole_enm", "q_c", "pump_fraction",
             "n_fock", "n_matter", "keep"}
INT_KEYS = {"n_fock", "n_matter", "keep"}


# -- config handling -----------------------------------------------------------

def load_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}", [str(path)]) from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {path}", [str(exc)]) from exc
    cfg["_base"] = str(path.resolve().parent)
    check_config(cfg)
    return cfg


def check_config(cfg: dict) -> None:
    """Collect every schema problem before raising."""
    problems = []
    for k in sorted(set(cfg) - {"schema_version", "defaults", "scenario", "out", "_base"}):
        problems.append(f"unknown top-level key {k!r}")
    if "schema_version" not in cfg:
        problems.append("missing 'schema_version'")
    elif cfg["schema_version"] != SCHEMA_VERSION:
        problems.append(f"unsupported schema_version {cfg['schema_version']!r} (expected {SCHEMA_VERSION})")
    for k in sorted(set(cfg.get("defaults", {})) - SETTINGS_KEYS):
        problems.append(f"defaults: unknown key {k!r}")
    names = set()
    scenarios = cfg.get("scenario", [])
    if not isinstance(scenarios, list):
        problems.append("'scenario' must be an array of tables ([[scenario]])")
        scenarios = []
    for i, sc in enumerate(scenarios):
        where = f"scenario[{i}]"
        kind = sc.get("kind")
        if kind not in KIND_KEYS:
            problems.append(f"{where}: unknown or missing kind {kind!r}; expected one of {sorted(KIND_KEYS)}")
            continue
        name = sc.get("name")
        if not isinstance(name, str) or not name:
            problems.append(f"{where}: missing 'name'")
        elif name in names:
            problems.append(f"{where}: duplicate name {name!r}")
        names.add(name)
        for k in sorted(set(sc) - COMMON_KEYS - KIND_KEYS[kind]):
            problems.append(f"{where} ({name}): unknown key {k!r} for kind {kind!r}")
        if kind not in ("criteria", "purcell") and "qnm" not in sc:
            problems.append(f"{where} ({name}): missing 'qnm'")
        if isinstance(sc.get("qnm"), dict) and "q_c" in sc["qnm"]:
            for k in sorted(set(sc["qnm"]) - QUICK_QNM_KEYS):
                problems.append(f"{where} ({name}): unknown qnm key {k!r}")
    if problems:
        raise ConfigError(f"{len(problems)} config problem(s)", problems)


def resolve_qnm(ref, base: str | None = None) -> QnmParams:
    """QNM from a table or a 'file.json[:label]' reference."""
    if isinstance(ref, dict):
        if "q_c" in ref:
            try:
                return QnmParams.from_quality(float(ref.get("omega_c_eV", 1.0)), float(ref["q_c"]),
                                              float(ref.get("phi0_rad", 0.0)), label=str(ref.get("label", "")))
            except ValueError as exc:
                raise ConfigError("invalid qnm table", [str(exc)]) from exc
        return params_from_dict(ref)
    if not isinstance(ref, str):
        raise ConfigError("qnm must be a table or a 'file.json[:label]' string", [repr(ref)])
    fname, _, label = ref.partition(":")
    path = Path(fname)
    if base is not None and not path.is_absolute() and (Path(base) / path).exists():
        path = Path(base) / path
    modes = load_params(path)
    if label:
        return find_mode(modes, label)
    if len(modes) != 1:
        raise ConfigError(f"{fname} holds {len(modes)} modes; pick one with 'file:label'",
                          [m.label for m in modes])
    return modes[0]


def resolve_scenario(sc: dict, defaults: dict, overrides: dict) -> dict:
    """Merge defaults < scenario < command-line overrides; fill kind defaults."""
    kind = sc["kind"]
    out = dict(sc)
    if kind in ("spectrum", "linewidth_sweep", "hopfield"):
        base = HOPFIELD_SETTINGS if kind == "hopfield" else Settings()
        settings = base.as_dict()
        settings.update({k: v for k, v in defaults.items() if k in SETTINGS_KEYS})
        settings.update({k: sc[k] for k in SETTINGS_KEYS if k in sc})
        settings.update(overrides)
        out.update(settings)
        out.setdefault("convergence_check", True)
    if kind == "spectrum":
        out.setdefault("eta", 0.0)
        out.setdefault("system", "tls")
        out.setdefault("normalize", True)
    elif kind == "linewidth_sweep":
        out.setdefault("eta", [0.02, 0.05, 0.1])
    elif kind == "hopfield":
        out.setdefault("lambda", 0.5)
        out.setdefault("classical", True)
    elif kind == "classical":
        out.setdefault("variants", list(CLASSICAL_VARIANTS[1:]))
    elif kind in ("criteria", "purcell"):
        out.setdefault("dipole_enm", 1.0)
        if kind == "criteria":
            out.setdefault("files", ["table1.json", "table2.json"])
    return out


def settings_from(d: dict) -> Settings:
    kw = {k: d[k] for k in SETTINGS_KEYS if k in d}
    for k in INT_KEYS:
        if k in kw:
            kw[k] = int(kw[k])
    return Settings(**kw)


def _grid(d: dict, p: QnmParams, fallback):
    g = d.get("grid")
    if g is None:
        return fallback()
    if not isinstance(g, dict) or set(g) - {"start", "stop", "n"}:
        raise ConfigError("grid must be a table {start, stop, n} in units of omega_c", [repr(g)])
    n = int(g.get("n", 2000))
    if "start" not in g or "stop" not in g:
        return fallback(n)
    if not (0 < g["start"] < g["stop"]) or n < 3:
        raise ConfigError("grid needs 0 < start < stop and n >= 3", [repr(g)])
    return p.omega_c * np.linspace(float(g["start"]), float(g["stop"]), n)


def _qnm_for(d: dict) -> QnmParams:
    p = resolve_qnm(d["qnm"], d.get("_base"))
    if "phi0" in d and not isinstance(d["phi0"], list):
        try:
            p = p.with_phi0(float(d["phi0"]))
        except ValueError as exc:
            raise ConfigError("invalid phi0", [str(exc)]) from exc
    return p


def _phased(mag: float, p: QnmParams) -> complex:
    """Coupling with the projected QNM phase at the emitter."""
    return float(mag) * cmath.exp(1j * p.phi0)


# -- scenario evaluation -------------------------------------------------------

@dataclasses.dataclass
class Table:
    columns: list[str]
    rows: list[list]
    meta: dict = dataclasses.field(default_factory=dict)
    warnings: list[str] = dataclasses.field(default_factory=list)


def _spectrum(d: dict) -> Table:
    p = _qnm_for(d)
    s = settings_from(d)
    eta = _phased(d["eta"], p)
    omega0 = d.get("omega0")
    grid = _grid(d, p, lambda n=2000: default_grid(p, abs(eta), n))
    res = simulate(p, eta, d["system"], omega0, s, grid, normalize=bool(d["normalize"]))
    meta, warns = {"n_fock": s.n_fock, "keep": s.keep}, list(res.warnings)
    if d["convergence_check"] and d["system"] != "empty":
        ref = simulate(p, eta, d["system"], omega0, s.with_(n_fock=2 * s.n_fock), grid,
                       normalize=bool(d["normalize"]))
        meta["convergence"] = {"n_fock": [s.n_fock, 2 * s.n_fock],
                               "max_abs_delta_S": float(np.max(np.abs(ref.spectrum.values - res.spectrum.values)))}
    col = "S_normalized" if d["normalize"] else "S_arb_units"
    rows = [[w / p.omega_c, v] for w, v in zip(res.spectrum.omega_grid, res.spectrum.values)]
    return Table(["omega_over_omega_c", col], rows, meta, warns)


def _linewidth_sweep(d: dict) -> Table:
    p0 = resolve_qnm(d["qnm"], d.get("_base"))
    s = settings_from(d)
    phis = d.get("phi0", p0.phi0)
    phis = phis if isinstance(phis, list) else [phis]
    etas = d["eta"] if isinstance(d["eta"], list) else [d["eta"]]
    n = int(d.get("grid", {}).get("n", 2000))
    rows, warns, failures = [], [], []
    k = p0.kappa_c
    for phi in phis:
        p = p0.with_phi0(float(phi))
        for e in etas:
            gm_bs, gp_bs = bs_linewidths(p, float(e))
            try:
                fit, res = _fit_point(p, float(e), s, n)
            except (NumericalError, PhysicsError) as exc:
                failures.append({"phi0_rad": phi, "eta_abs": e, "error": type(exc).__name__, "message": str(exc),
                                 "exit_code": exit_code_for(exc)})
                rows.append([phi, e] + [math.nan] * 5 + [gm_bs / k, gp_bs / k])
                continue
            warns += [f"phi0={phi}, eta={e}: {w}" for w in res.warnings]
            rows.append([phi, e, fit.gamma_minus / k, fit.gamma_plus / k, fit.omega_minus / p.omega_c,
                         fit.omega_plus / p.omega_c, fit.residual_rms, gm_bs / k, gp_bs / k])
    meta = {"n_fock": s.n_fock, "keep": s.keep, "failed_points": failures}
    if d["convergence_check"] and rows:
        p, e = p0.with_phi0(float(phis[0])), float(max(etas))
        try:
            f1, _ = _fit_point(p, e, s, n)
            f2, _ = _fit_point(p, e, s.with_(n_fock=2 * s.n_fock), n)
            meta["convergence"] = {"n_fock": [s.n_fock, 2 * s.n_fock], "phi0_rad": phis[0], "eta_abs": e,
                                   "max_abs_delta_Gamma_over_kappa":
                                       max(abs(f1.gamma_minus - f2.gamma_minus), abs(f1.gamma_plus - f2.gamma_plus)) / k}
        except (NumericalError, PhysicsError) as exc:
            meta["convergence"] = {"error": str(exc)}
    cols = ["phi0_rad", "eta_abs", "Gamma_minus_over_kappa", "Gamma_plus_over_kappa", "omega_minus_over_omega_c",
            "omega_plus_over_omega_c", "fit_rms_normalized", "Gamma_minus_BS_over_kappa", "Gamma_plus_BS_over_kappa"]
    return Table(cols, rows, meta, warns)


def _fit_point(p, eta, s, n):
    res = simulate(p, _phased(eta, p), "tls", settings=s, grid=default_grid(p, eta, n))
    return fit_two_lorentzians(res.spectrum), res


def _hopfield(d: dict) -> Table:
    p = _qnm_for(d)
    s = settings_from(d)
    lam = _phased(d["lambda"], p)
    omega0 = float(d.get("omega0", p.omega_c))
    grid = _grid(d, p, lambda n=2000: p.omega_c * np.linspace(0.3, 2.0, n))
    res = simulate(p, lam, "hopfield", omega0, s, grid)
    cols = ["omega_over_omega_c", "S_quantum_normalized"]
    data = [grid / p.omega_c, res.spectrum.values]
    meta, warns = {"n_fock": s.n_fock, "n_matter": s.n_matter, "keep": s.keep}, list(res.warnings)
    if d["classical"]:
        for v in CLASSICAL_VARIANTS[1:]:
            c = classical_spectrum(p, lam, omega0, 1.0, v, grid)
            cols.append(f"S_classical_{v}_normalized")
            data.append(c.values)
    if d["convergence_check"]:
        ref = simulate(p, lam, "hopfield", omega0, s.with_(n_fock=2 * s.n_fock, n_matter=2 * s.n_matter), grid)
        meta["convergence"] = {"n_fock": [s.n_fock, 2 * s.n_fock], "n_matter": [s.n_matter, 2 * s.n_matter],
                               "max_abs_delta_S": float(np.max(np.abs(ref.spectrum.values - res.spectrum.values)))}
    return Table(cols, [list(r) for r in zip(*data)], meta, warns)


def _classical(d: dict) -> Table:
    p = _qnm_for(d)
    eta = _phased(d.get("eta", 0.0), p)
    omega0 = float(d.get("omega0", p.omega_c))
    grid = _grid(d, p, lambda n=2000: default_grid(p, abs(eta), n))
    bad = sorted(set(d["variants"]) - set(CLASSICAL_VARIANTS))
    if bad:
        raise ConfigError("unknown classical variant(s)", bad)
    cols, data, warns = ["omega_over_omega_c"], [grid / p.omega_c], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for v in d["variants"]:
            c = classical_spectrum(p, eta, omega0, 1.0, v, grid)
            warns += c.warnings
            vals = np.full(grid.shape, math.nan)
            vals[np.isin(grid, c.omega_grid)] = c.values
            cols.append(f"S_classical_{v}_normalized")
            data.append(vals)
    return Table(cols, [list(r) for r in zip(*data)], {}, warns)


def _purcell(d: dict) -> Table:
    """Weak-coupling Purcell factors Gamma/gamma_0 versus emitter frequency (eV)."""
    refs = d.get("modes") or ([d["qnm"]] if "qnm" in d else None)
    if not refs:
        raise ConfigError("purcell scenario needs 'modes' (list of qnm references) or 'qnm'")
    modes = [resolve_qnm(r, d.get("_base")) for r in refs]
    missing = [m.label for m in modes if m.f_amp is None]
    if missing:
        raise ConfigError("purcell modes need a field amplitude (f_amp_re/f_amp_im)", missing)
    p = modes[0]
    grid = _grid(d, p, lambda n=2000: p.omega_c * np.linspace(1 - 8 / p.q, 1 + 8 / p.q, n))
    dip = float(d["dipole_enm"]) * E_NM
    gamma0 = free_space_rate(dip, ev_to_rad_per_s(grid))
    cols, data = ["omega_eV"], [grid]
    for m in modes:
        g_ev = dipole_coupling(m, dip, m.f_abs * detection_scale(m)) / EV_TO_S
        cols.append(f"F_single_{m.label or 'mode'}")
        data.append(ev_to_rad_per_s(purcell_rate_single(m, g_ev, grid)) / gamma0)
    multi = purcell_rate_multimode([(m, m.f_abs * cmath.exp(1j * m.phi0)) for m in modes], dip,
                                   grid) if len(modes) > 1 else None
    if multi is not None:
        cols.append("F_multimode")
        data.append(multi / gamma0)
    return Table(cols, [list(r) for r in zip(*data)], {"dipole_C_m": dip}, [])


def _criteria(d: dict) -> Table:
    modes = []
    for f in d["files"]:
        path = Path(f)
        base = d.get("_base")
        if base is not None and not path.is_absolute() and (Path(base) / path).exists():
            path = Path(base) / path
        modes += load_params(path)
    rows = []
    for r in criteria_table(modes):
        eta_d = math.nan if r.eta_d0 is None else r.eta_d0 * float(d["dipole_enm"])
        rows.append([r.label, r.q, r.tan_2phi0, r.eta_max_first_order, r.omega_bb, eta_d])
    return Table(["label", "Q_c", "tan_2phi0", "eta1_abs", "Omega_BB_over_omega_c", "eta_abs_at_dipole"], rows)


HANDLERS = {"spectrum": _spectrum, "linewidth_sweep": _linewidth_sweep, "hopfield": _hopfield,
            "classical": _classical, "purcell": _purcell, "criteria": _criteria}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, PhysicsError):
        return EXIT_PHYSICS
    if isinstance(exc, (NumericalError, np.linalg.LinAlgError, ArithmeticError)):
        return EXIT_NUMERICAL
    if isinstance(exc, (ValueError, TypeError, KeyError)):
        return EXIT_CONFIG
    return EXIT_NUMERICAL


def evaluate(d: dict) -> Table:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        t = HANDLERS[d["kind"]](d)
    t.warnings += [str(w.message) for w in caught if str(w.message) not in t.warnings]
    return t


def _evaluate_safe(d: dict):
    """Worker entry: never raises, so one bad point cannot abort a sweep."""
    try:
        return evaluate(d), None
    except Exception as exc:  # noqa: BLE001 - classified below
        return None, {"error": type(exc).__name__, "message": str(exc),
                      "problems": getattr(exc, "problems", []), "exit_code": exit_code_for(exc)}


# -- output --------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return FLOAT_FMT % float(v)


def table_csv(columns, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


def _jsonable(d: dict) -> dict:
    return {k: v for k, v in d.items() if not k.startswith("_")}


def write_outputs(out_dir: Path, stem: str, table: Table, scenario: dict, extra: dict | None = None) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{stem}.csv"
    csv_path.write_text(table_csv(table.columns, table.rows), newline="\n")
    meta = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "kernel_backend": _kernels.BACKEND,
        "scenario": _jsonable(scenario),
        "columns": table.columns,
        "n_rows": len(table.rows),
        "metadata": table.meta,
        "warnings": table.warnings,
    }
    if "qnm" in scenario:
        try:
            meta["qnm_resolved"] = params_to_dict(_qnm_for(scenario))
        except (ConfigError, ValueError):
            pass
    meta.update(extra or {})
    (out_dir / f"{stem}.json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=_json_default) + "\n")
    return csv_path


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def _report(err: dict, where: str) -> None:
    print(json.dumps({"scenario": where, **err}, sort_keys=True), file=sys.stderr)


# -- commands ------------------------------------------------------------------

def overrides_from_args(args) -> dict:
    o = {}
    if getattr(args, "allow_negative_rates", False):
        o["policy"] = "allow"
    if getattr(args, "clamp_negative_rates", False):
        o["policy"] = "clamp"
    if getattr(args, "secular", False):
        o["secular"] = True
    if getattr(args, "fock", None) is not None:
        o["n_fock"] = args.fock
    if getattr(args, "keep", None) is not None:
        o["keep"] = args.keep
    return o


def _scenarios(cfg: dict, args) -> list[dict]:
    ov = overrides_from_args(args)
    out = []
    for sc in cfg.get("scenario", []):
        d = resolve_scenario(sc, cfg.get("defaults", {}), ov if sc["kind"] in ("spectrum", "linewidth_sweep",
                                                                                  "hopfield") else {})
        d["_base"] = cfg["_base"]
        out.append(d)
    return out


def _out_dir(cfg: dict, args) -> Path:
    if args.out:
        return Path(args.out)
    if "out" in cfg:
        return Path(cfg["_base"]) / cfg["out"]
    return Path("qnm_usc_out")


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    scs = _scenarios(cfg, args)
    for d in scs:
        if "qnm" in d:
            _qnm_for(d)
        for r in d.get("modes", []) or []:
            resolve_qnm(r, d["_base"])
    if not scs:
        log.warning("no scenarios")
    print(f"ok: {len(scs)} scenario(s)")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    scs = _scenarios(cfg, args)
    if not scs:
        log.warning("no scenarios")
        return EXIT_OK
    out = _out_dir(cfg, args)
    status = EXIT_OK
    for d in scs:
        table, err = _evaluate_safe(d)
        if err is not None:
            _report(err, d["name"])
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{d.get('output', d['name'])}.error.json").write_text(
                json.dumps({"scenario": d["name"], **err}, indent=2, sort_keys=True) + "\n")
            status = status or err["exit_code"]
            continue
        for w in table.warnings:
            log.warning("%s: %s", d["name"], w)
        path = write_outputs(out, d.get("output", d["name"]), table, d)
        print(path)
        for f in table.meta.get("failed_points", []):
            _report(f, d["name"])
            status = status or f["exit_code"]
    return status


def sweep_values(raw) -> tuple[list[float], list[str]]:
    try:
        vals = [float(v) for v in (raw.split(",") if isinstance(raw, str) else raw) if str(v).strip()]
    except (TypeError, ValueError) as exc:
        raise ConfigError("sweep values must be numeric", [str(raw)]) from exc
    if not vals or not all(math.isfinite(v) for v in vals):
        raise ConfigError("sweep needs at least one finite value", [str(raw)])
    uniq = sorted(set(vals))
    notes = []
    if uniq != vals:
        what = "deduplicated and sorted" if len(uniq) < len(vals) else "sorted"
        notes.append(f"sweep values {what}: {len(vals)} -> {len(uniq)} point(s)")
        log.warning(notes[-1])
    return uniq, notes


def _point(d: dict, axis: str, v: float) -> dict:
    d = json.loads(json.dumps(d))  # deep copy, picklable
    val = int(round(v)) if axis in INT_KEYS else v
    if axis == "q_c":
        d["qnm"] = dict(d["qnm"], q_c=val)
    else:
        d[axis] = val
    return d


def run_sweep(d: dict, axis: str, values, workers: int = 1) -> tuple[Table, list[dict], list[str]]:
    """Evaluate one scenario over an axis; rows are ordered by axis value."""
    if axis not in SWEEPABLE or (axis != "q_c" and axis not in KIND_KEYS[d["kind"]] | SETTINGS_KEYS):
        raise ConfigError(f"axis {axis!r} is not a numeric parameter of kind {d['kind']!r}",
                          [f"sweepable: {sorted(SWEEPABLE)}"])
    if axis == "q_c" and not (isinstance(d.get("qnm"), dict) and "q_c" in d["qnm"]):
        raise ConfigError("sweeping q_c needs an inline qnm table with q_c")
    if axis in d and isinstance(d[axis], (list, str, bool)):
        raise ConfigError(f"axis {axis!r} holds a non-scalar value in this scenario", [repr(d[axis])])
    if axis in SETTINGS_KEYS and d["kind"] not in ("spectrum", "linewidth_sweep", "hopfield"):
        raise ConfigError(f"axis {axis!r} does not apply to kind {d['kind']!r}")
    vals, notes = sweep_values(values)
    points = [_point(d, axis, v) for v in vals]
    if workers <= 1 or len(points) == 1:
        results = [_evaluate_safe(p) for p in points]
    else:
        with cf.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_safe, points))
    columns = None
    for t, _ in results:
        if t is not None:
            columns = t.columns
            break
    cols = [axis, "status"] + (columns or [])
    rows, errors, warns = [], [], list(notes)
    for v, (t, err) in zip(vals, results):
        if err is not None:
            errors.append({axis: v, **err})
            rows.append([v, "error"] + [math.nan] * len(columns or []))
            continue
        warns += [f"{axis}={v!r}: {w}" for w in t.warnings]
        rows += [[v, "ok"] + list(r) for r in t.rows]
    return Table(cols, rows, {"axis": axis, "values": vals}, warns), errors, notes


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    scs = {d["name"]: d for d in _scenarios(cfg, args)}
    if args.scenario not in scs:
        raise ConfigError(f"no scenario named {args.scenario!r}", sorted(scs))
    d = scs[args.scenario]
    table, errors, _ = run_sweep(d, args.axis, args.values, args.workers)
    for e in errors:
        _report(e, d["name"])
    stem = f"{d.get('output', d['name'])}_sweep_{args.axis}"
    print(write_outputs(_out_dir(cfg, args), stem, table, d, {"errors": errors}))
    if errors and len(errors) == len(table.meta["values"]):
        return errors[0]["exit_code"]
    return EXIT_OK


def cmd_criteria(args) -> int:
    d = {"kind": "criteria", "name": "criteria", "files": args.files or ["table1.json", "table2.json"],
         "dipole_enm": args.dipole_enm, "_base": str(Path.cwd())}
    t = evaluate(d)
    if args.out:
        print(write_outputs(Path(args.out), "criteria", t, d))
    else:
        print(f"{'label':<18}{'Q_c':>10}{'tan2phi0':>12}{'|eta1|':>10}{'Omega_BB':>10}{'|eta| (d)':>11}")
        for r in t.rows:
            print(f"{r[0]:<18}{r[1]:>10.2f}{r[2]:>12.4g}{r[3]:>10.2g}{r[4]:>10.2g}{r[5]:>11.2g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    pol = common.add_mutually_exclusive_group()
    pol.add_argument("--allow-negative-rates", action="store_true", help="keep negative decay rates (policy=allow)")
    pol.add_argument("--clamp-negative-rates", action="store_true", help="clamp negative decay rates to zero")
    common.add_argument("--secular", action="store_true", help="secular (alpha = alpha') dissipator")
    common.add_argument("--fock", type=int, metavar="N", help="cavity Fock truncation")
    common.add_argument("--keep", type=int, metavar="M", help="number of dressed levels kept")
    common.add_argument("--workers", type=int, default=1, metavar="K", help="sweep worker processes")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="qnm-usc", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("run", parents=[common], help="run every scenario in a config")
    p.add_argument("config")
    p = sub.add_parser("sweep", parents=[common], help="sweep one scenario parameter")
    p.add_argument("config")
    p.add_argument("--scenario", required=True)
    p.add_argument("--axis", required=True)
    p.add_argument("--values", required=True, help="comma-separated numbers")
    p = sub.add_parser("criteria", parents=[common], help="single-mode validity table for QNM files")
    p.add_argument("files", nargs="*")
    p.add_argument("--dipole-enm", type=float, default=1.0, help="dipole moment in e nm")
    p = sub.add_parser("validate", parents=[common], help="check a config without running it")
    p.add_argument("config")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.fock is not None and args.fock < 2 or args.keep is not None and args.keep < 1:
        print(json.dumps({"error": "ConfigError", "message": "--fock must be >= 2 and --keep >= 1"}), file=sys.stderr)
        return EXIT_CONFIG
    cmds = {"run": cmd_run, "sweep": cmd_sweep, "criteria": cmd_criteria, "validate": cmd_validate}
    try:
        return cmds[args.cmd](args)
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes
        code = exit_code_for(exc)
        print(json.dumps({"error": type(exc).__name__, "message": str(exc),
                          "problems": getattr(exc, "problems", []), "exit_code": code}, sort_keys=True),
              file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
