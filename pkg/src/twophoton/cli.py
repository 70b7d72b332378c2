"""Command-line front end: figure data, verification suites and oracle runs.

Settings resolve in three layers: built-in defaults, then a JSON ``--config``
file, then explicit flags.  The resolved settings are validated before any
computation and echoed, minus the output path, into every manifest.  Outputs
are staged in a temporary directory and moved into ``--out`` only when all of
them are ready, so a failed run leaves nothing behind.  Grid specs that start
with a minus sign need the ``--flag=MIN:MAX:STEP`` form.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import shutil
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from .core import ConfigurationError, InvalidParameterError, ModelParams, from_bar, make_params
from .smatrix import (deviation_map, find_peaks, fluorescence_map, origin_curvature,
                      outstate_relative_wavefunction, zero_contour)

log = logging.getLogger("twophoton")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

FLAT_TOP_TOL = 1e-2

COMMON_DEFAULTS = {"omega": 0.0, "gamma": 1.0, "out": "out", "format": "csv", "raw_units": False}

DEFAULTS = {
    "fluorescence-map": {"e_bar": "0,2,4,6", "delta_grid": "-4:4:0.02"},
    "deviation-map": {"e_bar_grid": "-6:6:0.05", "delta_grid": "-4:0:0.02"},
    "wavefunction-slice": {"points": "0:0,0:-0.8,0:-1.7320508075688772", "x_grid": "-6:6:0.01"},
    "verify": {"kmax": 40.0, "seed": 0, "no_b_channel": False, "completeness_tol": 1e-2,
               "orthonormality_tol": 1e-3, "unitarity_tol": 1e-10, "cross_tol": 1e-4},
    "oracle-compare": {"points": "0:0,0:-1.7320508075688772,40:0", "grid_n": 2049, "x_min": -260.0,
                       "width": 20.0, "fidelity_min": 0.98, "control": True, "convergence": True},
}


class OutputError(OSError):
    """Output directory or file could not be written."""


# -- config parsing ---------------------------------------------------------------

def parse_grid(spec: str) -> np.ndarray:
    """``MIN:MAX:STEP`` -> inclusive uniform grid."""
    try:
        lo, hi, step = (float(v) for v in str(spec).split(":"))
    except ValueError:
        raise ConfigurationError(f"grid must look like MIN:MAX:STEP, got {spec!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and step > 0 and hi > lo):
        raise ConfigurationError(f"grid {spec!r} needs MAX > MIN and STEP > 0")
    n = int(round((hi - lo) / step)) + 1
    if n > 20001:
        raise ConfigurationError(f"grid {spec!r} has {n} points; the limit is 20001")
    return np.linspace(lo, hi, n)


def parse_list(spec) -> list:
    if isinstance(spec, (list, tuple)):
        return [float(v) for v in spec]
    try:
        vals = [float(v) for v in str(spec).split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"expected a comma-separated list of numbers, got {spec!r}") from None
    if not vals:
        raise ConfigurationError("empty list")
    return vals


def parse_points(spec) -> list:
    """``E:D,E:D`` (bar units) -> list of (e_bar, delta_bar)."""
    if isinstance(spec, (list, tuple)):
        pts = [tuple(float(v) for v in p) for p in spec]
    else:
        try:
            pts = [tuple(float(v) for v in p.split(":")) for p in str(spec).split(",") if p.strip()]
        except ValueError:
            raise ConfigurationError(f"points must look like E:D,E:D, got {spec!r}") from None
    if not pts or any(len(p) != 2 for p in pts):
        raise ConfigurationError(f"points must look like E:D,E:D, got {spec!r}")
    return pts


def resolve_config(command: str, flags: dict, config_file: str | None) -> dict:
    cfg = dict(COMMON_DEFAULTS)
    cfg.update(DEFAULTS[command])
    if config_file:
        try:
            with open(config_file, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise ConfigurationError("config file must hold a JSON object")
        for key, val in file_cfg.items():
            key = key.replace("-", "_")
            if key not in cfg:
                raise ConfigurationError(f"unknown config key {key!r} for {command}")
            cfg[key] = val
    cfg.update({k: v for k, v in flags.items() if v is not None and k in cfg})
    if cfg["format"] not in ("csv", "json"):
        raise ConfigurationError("format must be csv or json")
    return cfg


def params_from(cfg: dict) -> ModelParams:
    try:
        return make_params(float(cfg["omega"]), float(cfg["gamma"]))
    except (InvalidParameterError, TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from None


# -- output staging ----------------------------------------------------------------

def dump_json(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n").encode("utf-8")


def dump_csv(header: list, columns: list) -> bytes:
    buf = io.StringIO()
    data = np.column_stack([np.asarray(c, dtype=float).ravel() for c in columns])
    np.savetxt(buf, data, fmt="%.12e", delimiter=",", newline="\n", header=",".join(header), comments="")
    return buf.getvalue().encode("utf-8")


@dataclass
class OutputSet:
    files: dict

    def commit(self, out_dir: str) -> list:
        """Write all files or none of them."""
        try:
            os.makedirs(out_dir, exist_ok=True)
            stage = tempfile.mkdtemp(prefix=".stage-", dir=out_dir)
        except OSError as exc:
            raise OutputError(f"cannot create output directory {out_dir!r}: {exc}") from None
        moved = []
        try:
            for name, blob in self.files.items():
                with open(os.path.join(stage, name), "wb") as fh:
                    fh.write(blob)
            for name in self.files:
                target = os.path.join(out_dir, name)
                os.replace(os.path.join(stage, name), target)
                moved.append(target)
        except OSError as exc:
            for path in moved:
                try:
                    os.remove(path)
                except OSError:
                    pass
            raise OutputError(f"writing outputs failed: {exc}") from None
        finally:
            shutil.rmtree(stage, ignore_errors=True)
        return moved


def _recorded(cfg: dict) -> dict:
    """Settings echoed into reports; the output location is left out so reruns elsewhere match."""
    return {k: v for k, v in cfg.items() if k != "out"}


def _tag(value: float) -> str:
    return f"{value:g}".replace("-", "m").replace(".", "p")


# -- subcommands ---------------------------------------------------------------------

def cmd_fluorescence_map(cfg: dict):
    params = params_from(cfg)
    e_bars = parse_list(cfg["e_bar"])
    axis = parse_grid(cfg["delta_grid"])
    raw = bool(cfg["raw_units"])
    step = float(axis[1] - axis[0]) if axis.size > 1 else 1e-2
    files, summary = {}, []
    for e_bar in e_bars:
        fmap = fluorescence_map(params, e_bar, axis)
        peaks = find_peaks(fmap.values, fmap.delta1_bar_axis, fmap.delta2_bar_axis)
        curv = origin_curvature(params, e_bar, step)
        single_origin = len(peaks) == 1 and all(abs(v) <= 0.5 * step for v in peaks[0])
        entry = {"e_bar": e_bar, "peaks": [list(p) for p in peaks], "n_peaks": len(peaks),
                 "origin_curvature": curv, "flat_top": bool(single_origin and abs(curv) < FLAT_TOP_TOL),
                 "max_abs_B_bar_sq": float(np.max(fmap.values))}
        d1, d2 = np.meshgrid(fmap.delta1_bar_axis, fmap.delta2_bar_axis, indexing="ij")
        vals = fmap.values
        header = ["delta1_bar", "delta2_bar", "abs_B_bar_sq"]
        if raw:
            h = params.half_gamma
            d1, d2, vals = d1 * h, d2 * h, vals / (h * h)
            header = ["delta1", "delta2", "abs_B_sq"]
        name = f"fluorescence_e{_tag(e_bar)}"
        if cfg["format"] == "csv":
            files[name + ".csv"] = dump_csv(header, [d1, d2, vals])
        else:
            files[name + ".json"] = dump_json({"columns": header, "delta1": d1[:, 0].tolist(),
                                                "delta2": d2[0].tolist(), "values": vals.tolist()})
        summary.append(entry)
    files["manifest.json"] = dump_json({"command": "fluorescence-map", "config": _recorded(cfg), "maps": summary})
    return files, EXIT_OK


def cmd_deviation_map(cfg: dict):
    params = params_from(cfg)
    dmap = deviation_map(params, parse_grid(cfg["e_bar_grid"]), parse_grid(cfg["delta_grid"]))
    contour = zero_contour(dmap)
    e_axis, d_axis = dmap.e1_bar_axis, dmap.delta1_bar_axis
    cell = float(np.max(np.diff(d_axis))) if d_axis.size > 1 else 0.0
    # distance along delta from each contour point to the hyperbola 4 d^2 - e^2 = 4, delta < 0
    if contour.size:
        dist = np.abs(contour[:, 1] + np.sqrt(1.0 + 0.25 * contour[:, 0] ** 2))
        rms = float(np.sqrt(np.mean(dist ** 2)))
    else:
        rms = float("nan")
    i, j = np.unravel_index(int(np.argmax(dmap.values)), dmap.values.shape)
    e1, d1 = np.meshgrid(e_axis, d_axis, indexing="ij")
    header = ["e1_bar", "delta1_bar", "deviation"]
    if cfg["raw_units"]:
        e1, d1 = from_bar(params, "energy", e1), from_bar(params, "detuning", d1)
        header = ["e1", "delta1", "deviation"]
    files = {}
    if cfg["format"] == "csv":
        files["deviation.csv"] = dump_csv(header, [e1, d1, dmap.values])
        files["zero_contour.csv"] = dump_csv(["e1_bar", "delta1_bar"], [contour[:, 0], contour[:, 1]])
    else:
        files["deviation.json"] = dump_json({"columns": header, "e1": e1[:, 0].tolist(), "delta1": d1[0].tolist(),
                                             "values": dmap.values.tolist(), "zero_contour": contour.tolist()})
    files["manifest.json"] = dump_json({
        "command": "deviation-map", "config": _recorded(cfg),
        "max_deviation": float(dmap.values[i, j]), "argmax": [float(e_axis[i]), float(d_axis[j])],
        "zero_contour_points": int(contour.shape[0]),
        "zero_contour_rms_to_hyperbola": rms, "grid_cell": cell,
        "contour_within_one_cell": bool(contour.size and rms < cell),
    })
    return files, EXIT_OK


def cmd_wavefunction_slice(cfg: dict):
    params = params_from(cfg)
    x_bar = parse_grid(cfg["x_grid"])
    x = from_bar(params, "length", x_bar)
    files, summary = {}, []
    norm = math.sqrt(2.0) / (2.0 * math.pi)
    for e_bar, d_bar in parse_points(cfg["points"]):
        e1, d1 = from_bar(params, "energy", e_bar), from_bar(params, "detuning", d_bar)
        phi = outstate_relative_wavefunction(params, e1, d1, x) / norm
        free = np.cos(d1 * x)
        mid = int(np.argmin(np.abs(x_bar)))
        summary.append({"e1_bar": e_bar, "delta1_bar": d_bar,
                        "abs_phi_sq_at_0": float(abs(phi[mid]) ** 2), "free_at_0": float(free[mid] ** 2)})
        header = ["x_bar", "abs_phi_sq", "abs_phi_free_sq"]
        xs = x_bar
        if cfg["raw_units"]:
            header, xs = ["x", "abs_phi_sq", "abs_phi_free_sq"], x
        name = f"slice_e{_tag(e_bar)}_d{_tag(d_bar)}"
        if cfg["format"] == "csv":
            files[name + ".csv"] = dump_csv(header, [xs, np.abs(phi) ** 2, free ** 2])
        else:
            files[name + ".json"] = dump_json({"columns": header, "x": xs.tolist(),
                                               "abs_phi_sq": (np.abs(phi) ** 2).tolist(),
                                               "abs_phi_free_sq": (free ** 2).tolist()})
    files["manifest.json"] = dump_json({"command": "wavefunction-slice", "config": _recorded(cfg),
                                        "normalisation": "divided by sqrt(2)/(2 pi); free slice is cos^2",
                                        "slices": summary})
    return files, EXIT_OK


def _check(name, value, tol, passed, diagnostic=""):
    return {"name": name, "value": value, "tolerance": tol, "passed": bool(passed), "diagnostic": diagnostic}


def run_verify_suite(params: ModelParams, cfg: dict) -> list:
    from . import verification as vf

    g = params.gamma
    checks = []
    kmax = float(cfg["kmax"]) * g
    if kmax <= 0:
        raise ConfigurationError("kmax must be positive")
    tol_o = float(cfg["orthonormality_tol"])
    e0 = 2.0 * params.omega
    ww = vf.SmearingSpec("W", e0, 0.25 * g, -2.0 * g, 0.25 * g)
    ww2 = vf.SmearingSpec("W", e0 + 0.1 * g, 0.25 * g, -2.1 * g, 0.25 * g)
    bb = vf.SmearingSpec("B", e0, 0.25 * g)
    bb_far = vf.SmearingSpec("B", e0 + 10.0 * 0.25 * g, 0.25 * g)
    for name, a, b in (("orthonormality_WW_self", ww, ww), ("orthonormality_WW_shifted", ww, ww2),
                       ("orthonormality_BB_self", bb, bb), ("orthonormality_WB_cross", ww, bb)):
        r = vf.orthonormality_check(params, a, b)
        checks.append(_check(name, r, tol_o, r < tol_o))
    num, _, na, nb = vf.smeared_overlap(params, bb, bb_far)
    sep = abs(num) / math.sqrt(na * nb)
    checks.append(_check("orthonormality_BB_separated", sep, 1e-6, sep < 1e-6))

    include_b = not bool(cfg["no_b_channel"])
    tol_c = float(cfg["completeness_tol"])
    fam = vf.seeded_test_family(params, int(cfg["seed"]))
    base = vf.default_cutoffs(params, kmax)
    errs = [vf.completeness_reconstruct(params, fam, vf.default_cutoffs(params, kmax * f), include_b).l2_error_relative
            for f in (0.25, 0.5, 1.0, 2.0)]
    err = errs[2]
    diag = ""
    if not err < tol_c:
        finer = vf.Cutoffs(base.k_max, base.e_step, 0.5 * base.delta_step)
        err_fine = vf.completeness_reconstruct(params, fam, finer, include_b).l2_error_relative
        if errs[3] <= err_fine:
            diag = f"binding cutoff: k_max = {base.k_max:g} (doubling it gives {errs[3]:.3e})"
        else:
            diag = f"binding cutoff: delta_step = {base.delta_step:g} (halving it gives {err_fine:.3e})"
        if not include_b:
            diag = "B channel disabled; " + diag
    checks.append(_check("completeness_seeded_family", err, tol_c, err < tol_c, diag))
    mono = all(a > b for a, b in zip(errs, errs[1:]))
    checks.append(_check("completeness_monotone_in_kmax", errs, None, mono))

    bound = vf.bound_state_test_function(params)
    rb = vf.completeness_reconstruct(params, bound, base, include_b)
    checks.append(_check("completeness_bound_state", rb.l2_error_relative, tol_c, rb.l2_error_relative < tol_c,
                         "" if include_b else "B channel disabled"))
    checks.append(_check("bound_state_b_fraction", rb.b_fraction, 0.99, rb.b_fraction > 0.99))
    if include_b:
        rep = vf.completeness_reconstruct(params, fam, base)
        closed = vf.b_fraction_closed_form(params, fam, base)
        diff = abs(rep.b_fraction - closed)
        tol_x = float(cfg["cross_tol"])
        checks.append(_check("b_fraction_cross_validation", diff, tol_x, diff < tol_x))

    tol_u = float(cfg["unitarity_tol"])
    drifts = []
    for sigma in (0.01, 0.1, 1.0):
        for centre in (0.0, 3.0):
            pk = vf.gaussian_spectral_packet(params, e0 + centre * g, -12.0 * sigma * g - 0.5 * g,
                                             sigma * g, sigma * g, 0.3)
            drifts.append(vf.unitarity_check(params, pk))
    checks.append(_check("unitarity_norm_drift", max(drifts), tol_u, max(drifts) < tol_u))
    return checks


def cmd_verify(cfg: dict):
    params = params_from(cfg)
    checks = run_verify_suite(params, cfg)
    passed = all(c["passed"] for c in checks)
    for c in checks:
        log.info("%s %s", "PASS" if c["passed"] else "FAIL", c["name"])
    report = {"command": "verify", "config": _recorded(cfg), "checks": checks, "passed": passed}
    return {"verify_report.json": dump_json(report)}, EXIT_OK if passed else EXIT_VERIFY


def cmd_oracle_compare(cfg: dict):
    from . import oracle as orc

    params = params_from(cfg)
    g = params.gamma
    n = int(cfg["grid_n"])
    if n < 65 or n > 4097:
        raise ConfigurationError("grid_n must lie in [65, 4097] to stay within desk memory")
    grid = orc.GridSpec(float(cfg["x_min"]) / g, 0.0, n)
    width = float(cfg["width"]) / g
    fmin = float(cfg["fidelity_min"])
    points = []

    def run(grid_, e_bar, d_bar, on=True):
        e1, d1 = from_bar(params, "energy", e_bar), from_bar(params, "detuning", d_bar)
        res = orc.fidelity_vs_analytic(params, grid_, e1, d1, (width, width), coupling_on=on)
        log.info("oracle point (%g, %g) on=%s n=%d: fidelity %.8f in %.1f s",
                 e_bar, d_bar, on, grid_.n_points, res.fidelity, res.runtime_s)
        return res

    coarse = None
    if cfg["convergence"]:
        coarse = orc.GridSpec(grid.x_min, 0.0, (n + 1) // 2)
    for e_bar, d_bar in parse_points(cfg["points"]):
        res = run(grid, e_bar, d_bar)
        entry = {"e1_bar": e_bar, "delta1_bar": d_bar, "fidelity": res.fidelity,
                 "enhancement": res.enhancement, "residual_excitation": res.residual_excitation,
                 "norm_drift": res.norm_drift, "out_of_box": res.out_of_box,
                 "passed": res.fidelity >= fmin}
        if coarse is not None:
            rc = run(coarse, e_bar, d_bar)
            entry["coarse_fidelity"] = rc.fidelity
            entry["converging"] = bool(1.0 - res.fidelity < 1.0 - rc.fidelity)
        points.append(entry)
    if cfg["control"]:
        res = run(grid, 0.0, 0.0, on=False)
        points.append({"e1_bar": 0.0, "delta1_bar": 0.0, "control_v0": True, "fidelity": res.fidelity,
                       "passed": res.fidelity >= 1.0 - 1e-8})
    grid_info = {"x_min": grid.x_min, "x_max": grid.x_max, "n_points": grid.n_points, "dx": grid.dx,
                 "dt": grid.time_step}
    passed = all(p["passed"] for p in points)
    report = {"command": "oracle-compare", "config": _recorded(cfg), "grid": grid_info, "points": points, "passed": passed}
    return {"oracle_report.json": dump_json(report)}, EXIT_OK if passed else EXIT_VERIFY


COMMANDS = {
    "fluorescence-map": cmd_fluorescence_map,
    "deviation-map": cmd_deviation_map,
    "wavefunction-slice": cmd_wavefunction_slice,
    "verify": cmd_verify,
    "oracle-compare": cmd_oracle_compare,
}


# -- argument parsing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twophoton",
                                     description="Two-photon transport through a two-level emitter in a chiral waveguide.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--omega", type=float, help="emitter transition energy (default 0)")
        p.add_argument("--gamma", type=float, help="decay rate, sets the unit of energy (default 1)")
        p.add_argument("--out", help="output directory (default ./out)")
        p.add_argument("--format", choices=["csv", "json"], help="data file format (default csv)")
        p.add_argument("--config", help="JSON file with settings; flags override it")
        p.add_argument("--raw-units", action="store_const", const=True, dest="raw_units",
                       help="emit raw rather than bar units")

    p = sub.add_parser("fluorescence-map", help="|B_bar|^2 over (delta1_bar, delta2_bar)")
    common(p)
    p.add_argument("--e-bar", help="comma-separated E_bar values (default 0,2,4,6)")
    p.add_argument("--delta-grid", help="MIN:MAX:STEP in delta_bar (default -4:4:0.02)")

    p = sub.add_parser("deviation-map", help="bunching deviation at x = 0 over (E1_bar, delta1_bar)")
    common(p)
    p.add_argument("--e-bar-grid", help="MIN:MAX:STEP in E1_bar (default -6:6:0.05)")
    p.add_argument("--delta-grid", help="MIN:MAX:STEP in delta1_bar (default -4:0:0.02)")

    p = sub.add_parser("wavefunction-slice", help="|phi(x_bar)|^2 of the scattered state")
    common(p)
    p.add_argument("--points", help="E_bar:delta_bar pairs, comma separated")
    p.add_argument("--x-grid", help="MIN:MAX:STEP in x_bar (default -6:6:0.01)")

    p = sub.add_parser("verify", help="orthonormality, completeness and unitarity suite")
    common(p)
    p.add_argument("--kmax", type=float, help="momentum cutoff in units of gamma (default 40)")
    p.add_argument("--seed", type=int, help="seed of the test-function family (default 0)")
    p.add_argument("--no-b-channel", action="store_const", const=True, dest="no_b_channel",
                   help="drop the bound-state channel from the completeness sum")
    p.add_argument("--completeness-tol", type=float, help="relative L2 tolerance (default 1e-2)")
    p.add_argument("--orthonormality-tol", type=float, help="relative tolerance (default 1e-3)")
    p.add_argument("--unitarity-tol", type=float, help="norm drift tolerance (default 1e-10)")

    p = sub.add_parser("oracle-compare", help="time-domain oracle vs analytic S-matrix")
    common(p)
    p.add_argument("--points", help="E1_bar:delta1_bar pairs, comma separated")
    p.add_argument("--grid-n", type=int, help="grid points per axis (default 2049)")
    p.add_argument("--x-min", type=float, help="left grid edge in units of 1/gamma (default -260)")
    p.add_argument("--width", type=float, help="packet widths in units of 1/gamma (default 20)")
    p.add_argument("--fidelity-min", type=float, help="pass threshold (default 0.98)")
    p.add_argument("--no-control", action="store_const", const=False, dest="control",
                   help="skip the V = 0 control run")
    p.add_argument("--no-convergence", action="store_const", const=False, dest="convergence",
                   help="skip the coarse-grid convergence run")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    try:
        cfg = resolve_config(args.command, flags, args.config)
        files, status = COMMANDS[args.command](cfg)
        OutputSet(files).commit(cfg["out"])
    except (ConfigurationError, InvalidParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if status == EXIT_VERIFY:
        print("verification failed; see the report for details", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
