"""Experiment harness: manifests, subcommands, CSV/JSON reports.

Experiments are described by a manifest (experiment kind, seed, output
location, parameter block); the command line builds one from flags, or
`parse_manifest` reads a JSON document directly.  All outputs are
deterministic for a fixed manifest and seed: no timestamps, sorted JSON
keys, shortest-roundtrip float formatting.  Every CSV carries a header
row; every JSON report carries a schema version and the manifest echo.

Subcommands
-----------
roots          characteristic-root tables (kmag, sigma, beta, omega, residual)
propagate      advance one Fourier mode from a mode-file (JSON)
verify-linear  closed form vs RK4 oracle, constraint drift, decay margins
decay-linear   whole-space norm series and decay-exponent fit
simulate       nonlinear periodic-box run (energy.csv, snapshots, summary)
energy-report  energy functional of a stored snapshot

Exit code 0 means every invariant checked during the run passed.

File formats
------------
Mode file (JSON): {"k": [kx, ky, kz], "fields": {"rho": [re, im],
"u": [[re, im] x3], "theta": [re, im], "E": [[re, im] x3],
"B": [[re, im] x3]}}.

Snapshot (binary): little-endian header `struct` layout "<8sIIdd" holding
the magic b"EMFIELDS", format version 1, grid size N, box length, time;
then the 11 physical fields [rho, u(3), theta, E(3), B(3)], each N^3
float64 in C order.
"""

from __future__ import annotations

import argparse
import json
import os
import struct
import sys
from dataclasses import dataclass

import numpy as np

from . import decay as decay_mod
from .fields import FieldState, SpectralGrid
from .modes import (IncompatibleModeError, ModeState, WaveVector,
                    propagate_mode, random_compatible_mode)
from .oracle import (DEFAULT_WEIGHTS, LyapunovWeights, integrate,
                     lyapunov_decay_check)
from .simulation import SimConfig, energy_functional, run
from .spectrum import canonical_family, roots_grid

SCHEMA_VERSION = 1
SNAPSHOT_MAGIC = b"EMFIELDS"

TOLERANCE_PROFILES = {
    "default": {
        "roots_residual": 1e-12,
        "closed_form": 1e-6,
        "constraint_drift": 1e-9,
        "lyapunov_margin": 1e-10,
        "sim_constraint": 1e-10,
        "energy_increase": 1e-8,
        "compat": 1e-10,
    },
    "strict": {
        "roots_residual": 1e-13,
        "closed_form": 1e-7,
        "constraint_drift": 1e-10,
        "lyapunov_margin": 1e-11,
        "sim_constraint": 1e-11,
        "energy_increase": 1e-9,
        "compat": 1e-11,
    },
}

_EXPERIMENTS = {}

_PARAM_SCHEMAS = {
    "roots": {
        "family": ("long", str),
        "kmin": (1e-3, float),
        "kmax": (1e3, float),
        "n": (1000, int),
    },
    "propagate": {
        "kmag": (None, float),
        "t": (1.0, float),
        "mode_file": (None, str),
    },
    "verify-linear": {
        "kmin": (1e-2, float),
        "kmax": (1e2, float),
        "n": (8, int),
        "T": (5.0, float),
        "modes_per_k": (3, int),
    },
    "decay-linear": {
        "component": ("B", str),
        "norm": ("l2", str),
        "width": (0.5, float),
        "tmax": (500.0, float),
    },
    "simulate": {
        "config": (None, str),
        "n": (32, int),
        "box_length": (2.0 * np.pi, float),
        "dt": (0.01, float),
        "t_final": (50.0, float),
        "delta": (1e-2, float),
        "s": (4, int),
        "out_every": (25, int),
        "snapshots": (True, bool),
    },
    "energy-report": {
        "snapshot": (None, str),
        "s": (4, int),
    },
}

_POSITIVE_PARAMS = {"kmin", "kmax", "n", "T", "width", "tmax", "dt",
                    "t_final", "s", "out_every", "modes_per_k",
                    "box_length"}
_NONNEGATIVE_PARAMS = {"t", "delta", "kmag"}


@dataclass
class RunManifest:
    experiment: str
    seed: int
    out: str
    tolerance_profile: str
    params: dict

    def tolerances(self) -> dict:
        return TOLERANCE_PROFILES[self.tolerance_profile]


class ManifestError(ValueError):
    pass


def parse_manifest(text: str) -> RunManifest:
    """Validate a JSON manifest, filling documented defaults.

    Unknown keys are rejected by name, as are out-of-range parameters.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"malformed manifest document: {exc}") from None
    if not isinstance(doc, dict):
        raise ManifestError("manifest must be a JSON object")

    allowed_top = {"experiment", "seed", "out", "tolerance_profile", "params"}
    for key in doc:
        if key not in allowed_top:
            raise ManifestError(f"unknown manifest key {key!r}")
    experiment = doc.get("experiment")
    if experiment not in _PARAM_SCHEMAS:
        raise ManifestError(
            f"unknown experiment {experiment!r}; "
            f"expected one of {sorted(_PARAM_SCHEMAS)}")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ManifestError("seed must be an integer")
    out = doc.get("out", "out")
    profile = doc.get("tolerance_profile", "default")
    if profile not in TOLERANCE_PROFILES:
        raise ManifestError(f"unknown tolerance_profile {profile!r}")

    schema = _PARAM_SCHEMAS[experiment]
    params = dict(doc.get("params", {}))
    for key in params:
        if key not in schema:
            raise ManifestError(
                f"unknown parameter {key!r} for experiment {experiment!r}")
    filled = {}
    for key, (default, typ) in schema.items():
        value = params.get(key, default)
        if value is not None and typ in (int, float):
            try:
                value = typ(value)
            except (TypeError, ValueError):
                raise ManifestError(f"parameter {key!r} must be {typ.__name__}")
            if key in _POSITIVE_PARAMS and value <= 0:
                raise ManifestError(f"parameter {key!r} must be positive")
            if key in _NONNEGATIVE_PARAMS and value < 0:
                raise ManifestError(f"parameter {key!r} must be nonnegative")
        filled[key] = value
    return RunManifest(experiment, seed, out, profile, filled)


def _manifest_echo(manifest: RunManifest) -> dict:
    return {
        "experiment": manifest.experiment,
        "seed": manifest.seed,
        "out": manifest.out,
        "tolerance_profile": manifest.tolerance_profile,
        "params": {k: v for k, v in manifest.params.items()},
    }


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(c) for c in row) + "\n")


def _format_cell(c):
    if isinstance(c, (bool, np.bool_)):
        return "true" if c else "false"
    if isinstance(c, (float, np.floating)):
        return repr(float(c))
    return str(c)


def write_json(path, obj):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# mode files and snapshots
# ---------------------------------------------------------------------------

def _pair(z):
    return [float(np.real(z)), float(np.imag(z))]


def mode_to_json(mode: ModeState, k: WaveVector, time: float = 0.0) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "k": [float(c) for c in k.k],
        "time": time,
        "fields": {
            "rho": _pair(mode.rho),
            "u": [_pair(c) for c in mode.u],
            "theta": _pair(mode.theta),
            "E": [_pair(c) for c in mode.E],
            "B": [_pair(c) for c in mode.B],
        },
    }


def mode_from_json(doc: dict):
    f = doc["fields"]

    def c(p):
        return complex(p[0], p[1])

    mode = ModeState(c(f["rho"]), [c(p) for p in f["u"]], c(f["theta"]),
                     [c(p) for p in f["E"]], [c(p) for p in f["B"]])
    return mode, WaveVector(np.array(doc["k"], dtype=float))


def write_snapshot(path, state: FieldState):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    header = struct.pack("<8sIIdd", SNAPSHOT_MAGIC, 1, state.grid.n,
                         state.grid.box_length, state.time)
    with open(path, "wb") as fh:
        fh.write(header)
        for i in range(11):
            fh.write(np.ascontiguousarray(
                state.physical(i), dtype="<f8").tobytes())


def read_snapshot(path) -> FieldState:
    with open(path, "rb") as fh:
        header = fh.read(struct.calcsize("<8sIIdd"))
        magic, version, n, box_length, time = struct.unpack("<8sIIdd", header)
        if magic != SNAPSHOT_MAGIC or version != 1:
            raise ValueError(f"{path}: not a version-1 field snapshot")
        grid = SpectralGrid(n, box_length)
        raw = np.frombuffer(fh.read(11 * n ** 3 * 8), dtype="<f8")
    fields = raw.reshape(11, n, n, n)
    state = FieldState.zero(grid)
    state.time = time
    for i in range(11):
        state.spec[i] = grid.forward(fields[i])
    return state


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def _experiment(name):
    def wrap(fn):
        _EXPERIMENTS[name] = fn
        return fn
    return wrap


@_experiment("roots")
def _run_roots(manifest: RunManifest) -> dict:
    p = manifest.params
    tol = manifest.tolerances()["roots_residual"]
    family = canonical_family(p["family"])
    kmags = np.geomspace(p["kmin"], p["kmax"], p["n"])
    sigma, beta, omega = roots_grid(family, kmags)
    from .spectrum import characteristic_value
    residual = np.abs(characteristic_value(family, sigma, kmags))
    bound = tol * (1.0 + kmags ** 3)
    ok_resid = bool(np.all(residual <= bound))
    dsig = np.diff(sigma)
    monotone = bool(np.all(dsig > 0)) if family == "longitudinal" \
        else bool(np.all(dsig < 0))
    rows = list(zip(kmags, sigma, beta, omega, residual))
    write_csv(manifest.out, ["kmag", "sigma", "beta", "omega", "residual"],
              rows)
    return {
        "passed": ok_resid and monotone,
        "checks": {"residual_bound": ok_resid, "sigma_monotone": monotone},
        "rows": len(rows),
        "outputs": [manifest.out],
    }


@_experiment("propagate")
def _run_propagate(manifest: RunManifest) -> dict:
    p = manifest.params
    tol = manifest.tolerances()["compat"]
    if p["mode_file"] is None:
        raise ManifestError("parameter 'mode_file' is required")
    with open(p["mode_file"]) as fh:
        doc = json.load(fh)
    mode, k = mode_from_json(doc)
    if p["kmag"] is not None:
        direction = k.khat if k.kmag > 0 else np.array([0.0, 0.0, 1.0])
        k = WaveVector(direction * p["kmag"])
    mode_t = propagate_mode(mode, k, p["t"])
    gauss, mag = mode_t.constraint_residuals(k)
    scale = max(mode_t.norm(), 1e-300) * max(1.0, k.kmag)
    ok = gauss <= tol * scale and mag <= tol * scale
    out_doc = mode_to_json(mode_t, k, time=doc.get("time", 0.0) + p["t"])
    out_doc["manifest"] = _manifest_echo(manifest)
    out_doc["constraint_residuals"] = [gauss, mag]
    write_json(manifest.out, out_doc)
    return {"passed": bool(ok),
            "checks": {"output_compatible": bool(ok)},
            "outputs": [manifest.out]}


@_experiment("verify-linear")
def _run_verify_linear(manifest: RunManifest) -> dict:
    p = manifest.params
    tols = manifest.tolerances()
    rng = np.random.default_rng(manifest.seed)
    weights = DEFAULT_WEIGHTS
    rows = []
    all_pass = True
    for kmag in np.geomspace(p["kmin"], p["kmax"], p["n"]):
        k = WaveVector.along_z(kmag)
        max_err = 0.0
        max_drift = 0.0
        max_margin = -np.inf
        for _ in range(p["modes_per_k"]):
            mode0 = random_compatible_mode(k, rng)
            z0 = mode0.norm()
            traj = integrate(mode0, k, p["T"], max_samples=32)
            for i, t in enumerate(traj.times):
                if t == 0.0:
                    continue
                closed = propagate_mode(mode0, k, float(t)).as_vector()
                ref = traj.states[i]
                err = np.linalg.norm(closed - ref) \
                    / max(np.linalg.norm(ref), 1e-30 * z0)
                max_err = max(max_err, float(err))
            max_drift = max(max_drift, traj.constraint_drift() / z0)
            rep = lyapunov_decay_check(mode0, k, weights, T=p["T"])
            max_margin = max(max_margin, rep["margin"] / z0 ** 2)
        ok = (max_err <= tols["closed_form"]
              and max_drift <= tols["constraint_drift"]
              and max_margin <= tols["lyapunov_margin"])
        all_pass = all_pass and ok
        rows.append((kmag, max_err, max_drift, max_margin, ok))
    write_csv(manifest.out,
              ["kmag", "max_rel_err_closed_form", "constraint_drift",
               "lyapunov_margin", "pass"], rows)
    return {"passed": bool(all_pass),
            "weights": {"K1": weights.K1, "K2": weights.K2,
                        "K3": weights.K3, "gamma": weights.gamma},
            "outputs": [manifest.out]}


_DECAY_BANDS = {
    ("l2", "B"): ("power", (50.0, 500.0), (-0.85, -0.65)),
    ("l2", "E"): ("power", (50.0, 500.0), (-1.35, -1.15)),
    ("l2", "u"): ("power", (50.0, 500.0), (-1.35, -1.15)),
    ("l2", "rho"): ("exponential", (0.0, 20.0), (-np.inf, -0.45)),
    ("l2", "theta"): ("exponential", (0.0, 20.0), (-np.inf, -0.45)),
    ("linf", "B"): ("power", (50.0, 500.0), (-1.65, -1.35)),
    ("linf", "E"): ("power", (50.0, 500.0), (-2.15, -1.85)),
    ("linf", "u"): ("power", (50.0, 500.0), (-2.15, -1.85)),
    ("linf", "rho"): ("exponential", (0.0, 20.0), (-np.inf, -0.45)),
    ("linf", "theta"): ("exponential", (0.0, 20.0), (-np.inf, -0.45)),
}


@_experiment("decay-linear")
def _run_decay_linear(manifest: RunManifest) -> dict:
    p = manifest.params
    component = p["component"]
    norm = p["norm"].lower()
    if component not in ("rho", "u", "theta", "E", "B"):
        raise ManifestError(f"unknown component {component!r}")
    if norm not in ("l2", "linf"):
        raise ManifestError(f"unknown norm {norm!r}")
    model, window, band = _DECAY_BANDS[(norm, component)]
    window = (window[0], min(window[1], p["tmax"]))

    profiles = decay_mod.default_profiles(width=p["width"])
    if model == "exponential":
        times = np.linspace(window[0], window[1], 41)
    else:
        times = np.unique(np.concatenate([
            np.linspace(0.0, 20.0, 11),
            np.geomspace(max(1.0, window[0] / 10.0), p["tmax"], 48)]))
    if norm == "l2":
        series = decay_mod.l2_norm_series(profiles, component, 0, times)
    else:
        series = decay_mod.linf_norm_series(profiles, component, times)
    fit = decay_mod.fit_decay(series, window, model)
    ok = band[0] <= fit.slope <= band[1]

    write_csv(manifest.out, ["t", "value"],
              list(zip(series.times, series.values)))
    fit_path = os.path.splitext(manifest.out)[0] + ".fit.json"
    write_json(fit_path, {
        "schema_version": SCHEMA_VERSION,
        "manifest": _manifest_echo(manifest),
        "component": component,
        "norm": norm,
        "model": fit.model,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "rms_residual": fit.rms_residual,
        "window": list(fit.window),
        "slope_band": [band[0] if np.isfinite(band[0]) else None, band[1]],
        "quadrature_error": series.quadrature_error,
        "passed": bool(ok),
    })
    return {"passed": bool(ok), "slope": fit.slope,
            "outputs": [manifest.out, fit_path]}


def parse_sim_config(text: str) -> dict:
    """Parse the key = value run-configuration document for `simulate`.

    One assignment per line; '#' starts a comment; values are int, float,
    or bool literals.  Unknown keys are rejected by name.
    """
    allowed = {k for k in _PARAM_SCHEMAS["simulate"] if k != "config"}
    out = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ManifestError(f"line {ln}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in allowed:
            raise ManifestError(f"line {ln}: unknown configuration key {key!r}")
        if value.lower() in ("true", "false"):
            out[key] = value.lower() == "true"
        else:
            try:
                out[key] = int(value)
            except ValueError:
                try:
                    out[key] = float(value)
                except ValueError:
                    raise ManifestError(
                        f"line {ln}: cannot parse value for {key!r}")
    return out


@_experiment("simulate")
def _run_simulate(manifest: RunManifest) -> dict:
    p = dict(manifest.params)
    tols = manifest.tolerances()
    if p.get("config"):
        with open(p["config"]) as fh:
            overrides = parse_sim_config(fh.read())
        p.update(overrides)
    config = SimConfig(n=p["n"], box_length=p["box_length"], dt=p["dt"],
                       t_final=p["t_final"], delta=p["delta"], s=p["s"],
                       seed=manifest.seed, out_every=p["out_every"])
    out_dir = manifest.out
    os.makedirs(out_dir, exist_ok=True)

    grid = SpectralGrid(config.n, config.box_length, config.dealias_fraction)
    from .fields import random_state
    initial = random_state(grid, config.delta, config.seed)
    if p["snapshots"]:
        write_snapshot(os.path.join(out_dir, "snapshot_initial.bin"), initial)

    result = run(config, initial=initial)

    rows = []
    for t, rep, ga, ma in zip(result.times, result.reports,
                              result.gauss_residuals,
                              result.magnetic_residuals):
        rows.append((t, rep.E_s, rep.D_s, rep.E_s_high, rep.D_s_high, ga, ma))
    energy_csv = os.path.join(out_dir, "energy.csv")
    write_csv(energy_csv,
              ["t", "E_s", "D_s", "E_s_h", "D_s_h",
               "gauss_residual", "magnetic_residual"], rows)

    checks = {
        "energy_nonincreasing": result.summary[
            "worst_relative_energy_increase"] <= tols["energy_increase"],
        "gamma_fit_positive": result.gamma_fit > 0,
        "constraints_bounded": (
            result.summary["max_gauss_residual"] <= tols["sim_constraint"]
            and result.summary["max_magnetic_residual"]
            <= tols["sim_constraint"]),
    }
    summary = {
        "schema_version": SCHEMA_VERSION,
        "manifest": _manifest_echo(manifest),
        "checks": {k: bool(v) for k, v in checks.items()},
        "passed": bool(all(checks.values())),
    }
    summary.update(result.summary)
    write_json(os.path.join(out_dir, "summary.json"), summary)

    outputs = [energy_csv, os.path.join(out_dir, "summary.json")]
    if p["snapshots"]:
        final_path = os.path.join(out_dir, "snapshot_final.bin")
        write_snapshot(final_path, result.final_state)
        outputs.extend([os.path.join(out_dir, "snapshot_initial.bin"),
                        final_path])
    return {"passed": summary["passed"], "checks": summary["checks"],
            "gamma_fit": result.gamma_fit, "outputs": outputs}


@_experiment("energy-report")
def _run_energy_report(manifest: RunManifest) -> dict:
    p = manifest.params
    if p["snapshot"] is None:
        raise ManifestError("parameter 'snapshot' is required")
    state = read_snapshot(p["snapshot"])
    weights = LyapunovWeights(DEFAULT_WEIGHTS.K1, DEFAULT_WEIGHTS.K2,
                              DEFAULT_WEIGHTS.K3, DEFAULT_WEIGHTS.gamma)
    rep = energy_functional(state, p["s"], weights)
    ok = rep.E_s >= rep.E_s_high >= 0.0 or rep.sobolev_sq == 0.0
    write_json(manifest.out, {
        "schema_version": SCHEMA_VERSION,
        "manifest": _manifest_echo(manifest),
        "time": rep.time,
        "E_s": rep.E_s,
        "E_s_h": rep.E_s_high,
        "D_s": rep.D_s,
        "D_s_h": rep.D_s_high,
        "sobolev_sq": rep.sobolev_sq,
        "grad_breakdown": [float(v) for v in rep.grad_breakdown],
        "equivalence_ratio": rep.equivalence_ratio,
        "weights": {"K1": weights.K1, "K2": weights.K2, "K3": weights.K3,
                    "gamma": weights.gamma},
        "passed": bool(ok),
    })
    return {"passed": bool(ok), "outputs": [manifest.out]}


def run_experiment(manifest: RunManifest) -> dict:
    """Dispatch a validated manifest; returns the exit report."""
    try:
        report = _EXPERIMENTS[manifest.experiment](manifest)
    except (IncompatibleModeError, ManifestError, FileNotFoundError) as exc:
        return {"passed": False, "error": f"{type(exc).__name__}: {exc}",
                "outputs": []}
    report.setdefault("experiment", manifest.experiment)
    return report


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def _global_flags(parser, suppress=False):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int,
                        default=argparse.SUPPRESS if suppress else 0)
    parser.add_argument("--out", default=d,
                        help="output file or directory (experiment-specific)")
    parser.add_argument("--threads", type=int, default=d,
                        help="best-effort cap on BLAS/FFT threads")
    parser.add_argument("--tolerance-profile",
                        default=argparse.SUPPRESS if suppress else "default",
                        choices=sorted(TOLERANCE_PROFILES))


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="eulermaxwell", allow_abbrev=False,
        description="experiment harness for the relaxed electron-Maxwell "
                    "fluid laboratory")
    _global_flags(parser)
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("roots", help="characteristic-root table",
                        parents=[common], allow_abbrev=False)
    sp.add_argument("--family", default="long", choices=["long", "trans"])
    sp.add_argument("--kmin", type=float, default=1e-3)
    sp.add_argument("--kmax", type=float, default=1e3)
    sp.add_argument("--n", type=int, default=1000)

    sp = sub.add_parser("propagate", help="advance one Fourier mode",
                        parents=[common], allow_abbrev=False)
    sp.add_argument("--kmag", type=float, default=None)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--mode-file", required=True)

    sp = sub.add_parser("verify-linear", parents=[common], allow_abbrev=False,
                        help="closed form vs oracle and decay margins")
    sp.add_argument("--kmin", type=float, default=1e-2)
    sp.add_argument("--kmax", type=float, default=1e2)
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--T", type=float, default=5.0)
    sp.add_argument("--modes-per-k", type=int, default=3)

    sp = sub.add_parser("decay-linear", parents=[common], allow_abbrev=False,
                        help="whole-space decay-rate fit")
    sp.add_argument("--component", default="B",
                    choices=["rho", "u", "theta", "E", "B"])
    sp.add_argument("--norm", default="l2", choices=["l2", "linf"])
    sp.add_argument("--width", type=float, default=0.5)
    sp.add_argument("--tmax", type=float, default=500.0)

    sp = sub.add_parser("simulate", parents=[common], allow_abbrev=False,
                        help="nonlinear periodic-box run")
    sp.add_argument("--config", default=None,
                    help="key = value run configuration file")
    sp.add_argument("--out-dir", default=None)

    sp = sub.add_parser("energy-report", parents=[common], allow_abbrev=False,
                        help="energy functional of a snapshot")
    sp.add_argument("--snapshot", required=True)
    sp.add_argument("--s", type=int, default=4)
    return parser


_DEFAULT_OUT = {
    "roots": "roots.csv",
    "propagate": "mode_t.json",
    "verify-linear": "verify.csv",
    "decay-linear": "series.csv",
    "simulate": "runs/run",
    "energy-report": "energy_report.json",
}


def _manifest_from_args(args) -> RunManifest:
    experiment = args.command
    schema = _PARAM_SCHEMAS[experiment]
    params = {}
    for key in schema:
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) is not None:
            params[key] = getattr(args, attr)
    out = args.out
    if experiment == "simulate" and getattr(args, "out_dir", None):
        out = args.out_dir
    if out is None:
        out = _DEFAULT_OUT[experiment]
    doc = {"experiment": experiment, "seed": args.seed, "out": out,
           "tolerance_profile": args.tolerance_profile, "params": params}
    return parse_manifest(json.dumps(doc))


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    try:
        manifest = _manifest_from_args(args)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run_experiment(manifest)
    print(json.dumps(report, sort_keys=True, indent=2, default=str))
    return 0 if report.get("passed") else 1


if __name__ == "__main__":
    sys.exit(main())
