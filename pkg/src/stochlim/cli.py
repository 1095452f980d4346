"""Batch front-end: run checks from a config file, emit CSV/JSON verdicts.

Subcommands: ``expansion``, ``coeffs``, ``model``, ``fock``, ``all``.
Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 configuration error,
3 a numerical routine missed its accuracy target.  Outputs are written with
fixed float formatting and fixed ordering, so identical configurations give
byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import coeffs as coeffs_mod
from . import fock as fock_mod
from . import models as models_mod
from .config import RunConfig, build_model_matrix, build_profile
from .errors import (
    AccuracyError,
    ConfigError,
    InsufficientDataError,
    StochlimError,
    UnsupportedInputError,
)
from .funcspace import PiecewiseC1, gaussian
from .oscint import LambdaGrid, expansion_report
from .textio import dump_json

EXIT_PASS = 0
EXIT_VERDICT = 1
EXIT_CONFIG = 2
EXIT_ACCURACY = 3


def _write(out_dir: Path, name: str, text: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text, encoding="utf-8")


def _mat(m: np.ndarray) -> list:
    return [[complex(v) for v in row] for row in np.atleast_2d(m)]


def cmd_expansion(cfg: RunConfig, out_dir: Path, echo: bool) -> int:
    theorem = cfg["expansion.theorem"]
    order = cfg["expansion.order"]
    grid = LambdaGrid(cfg["lambda.grid"])
    f = gaussian(cfg["expansion.f.width"], cfg["expansion.f.center"])
    tol = cfg["tol.quadrature"]
    if theorem == "simplex":
        phi = PiecewiseC1.single(
            gaussian(cfg["expansion.phi.width"], cfg["expansion.phi.center"]),
            cfg["expansion.simplex.cutoff"],
        )
        a = cfg["expansion.simplex.endpoint"]
    else:
        phi = gaussian(cfg["expansion.phi.width"], cfg["expansion.phi.center"])
        a = 1.0
    report = expansion_report(theorem, f, phi, order, grid, a=a, tol=tol)
    slope_min = cfg["expansion.slope.min"]
    if slope_min < 0.0:
        slope_min = 2.0 * order + 0.5
    summary = report.summary(slope_min, cfg["expansion.slope.max"])
    summary["theorem"] = theorem
    summary["order"] = order
    _write(out_dir, "expansion.csv", report.to_csv())
    _write(out_dir, "expansion.json", dump_json(summary))
    if echo:
        sys.stdout.write(dump_json(summary))
    return EXIT_PASS if summary["pass"] else EXIT_VERDICT


def cmd_coeffs(cfg: RunConfig, out_dir: Path, echo: bool) -> int:
    profile = build_profile(cfg)
    omega0 = cfg["profile.omega0"]
    gap_tol = cfg["tol.gap"]
    records = []
    all_pass = True
    for n in (0, 1):
        cv = coeffs_mod.cross_validate_gamma(profile, omega0, n)
        ok = cv.gap <= gap_tol * (1.0 + abs(cv.route1))
        all_pass = all_pass and ok
        records.append(
            {
                "n": n,
                "gamma_causal": complex(cv.route1),
                "gamma_full": complex(coeffs_mod.gamma_full(profile, omega0, n)),
                "route_plemelj": complex(cv.route1),
                "route_damped": complex(cv.route2),
                "gap": float(cv.gap),
                "pass": bool(ok),
            }
        )
    for n in (2,):
        records.append(
            {
                "n": n,
                "gamma_full": complex(coeffs_mod.gamma_full(profile, omega0, n)),
            }
        )
    doc = {"omega0": float(omega0), "profile": profile.label,
           "coefficients": records, "pass": bool(all_pass)}
    _write(out_dir, "coeffs.json", dump_json(doc))
    if echo:
        sys.stdout.write(dump_json(doc))
    return EXIT_PASS if all_pass else EXIT_VERDICT


def _model_linear(cfg: RunConfig, profile) -> tuple[list, bool]:
    model = models_mod.SystemModel.linear(cfg["model.coupling"],
                                          cfg["profile.omega0"], profile)
    tol = cfg["tol.oracle"]
    rows = []
    ok = True
    for lam in cfg["lambda.grid"]:
        for t in cfg["time.grid"]:
            abc = models_mod.linear_abc(model, lam, t)
            oracle = models_mod.cumulant_oracle(model, lam, t)
            gap = abs(abc.full - oracle) / max(abs(oracle), 1e-300)
            ok = ok and gap <= tol
            rows.append(
                {
                    "model": "linear",
                    "lambda": float(lam),
                    "t": float(t),
                    "order0": _mat(models_mod.u0_vacuum(model, t).value),
                    "order2": _mat(np.array([[abc.full]])),
                    "oracle_gap": float(gap),
                }
            )
    return rows, ok


def _model_rwa(cfg: RunConfig, profile) -> tuple[list, bool]:
    d = build_model_matrix(cfg)
    model = models_mod.SystemModel.rwa_matrix(d, cfg["profile.omega0"], profile)
    tol = cfg["tol.oracle"]
    rows = []
    ok = True
    scalar = model.dim == 1
    for lam in cfg["lambda.grid"]:
        for t in cfg["time.grid"]:
            vac = models_mod.rwa_matrix_vacuum(model, lam, t,
                                               series_tol=cfg["series.tol"])
            row = {
                "model": "rwa_matrix",
                "lambda": float(lam),
                "t": float(t),
                "order0": _mat(models_mod.u0_vacuum(model, t).value),
                "order2": _mat(vac.value),
                "series_tail_bound": float(vac.truncation_bound),
            }
            if scalar:
                truncated = models_mod.linear_abc(
                    models_mod.SystemModel.linear(d[0, 0],
                                                  cfg["profile.omega0"],
                                                  profile), lam, t).truncated
                gap = abs(vac.value[0, 0] - truncated)
                row["oracle_gap"] = float(gap)
                ok = ok and gap <= tol
            rows.append(row)
    return rows, ok


def _model_spin_boson(cfg: RunConfig, profile) -> tuple[list, bool]:
    delta = cfg["model.delta"]
    constants = coeffs_mod.spinboson_constants(profile, delta)
    step = cfg["model.ode_step"]
    tol = cfg["tol.ode"]
    rows = []
    ok = True
    for lam in cfg["lambda.grid"]:
        for t in cfg["time.grid"]:
            u0 = models_mod.spinboson_u0(constants, t)
            closed = models_mod.spinboson_correction_closed(constants, t)
            ode = models_mod.spinboson_correction_ode(constants, t, step)
            residual = float(np.max(np.abs(closed.value - ode.value)))
            assembled = u0.value + lam * lam * closed.value
            ok = ok and residual <= tol
            rows.append(
                {
                    "model": "spin_boson",
                    "lambda": float(lam),
                    "t": float(t),
                    "order0": _mat(u0.value),
                    "order2": _mat(closed.value),
                    "assembled": _mat(assembled),
                    "ode_residual": residual,
                }
            )
    return rows, ok


def cmd_model(cfg: RunConfig, out_dir: Path, echo: bool) -> int:
    profile = build_profile(cfg)
    kind = cfg["model.kind"]
    if kind == "linear":
        rows, ok = _model_linear(cfg, profile)
    elif kind == "rwa_matrix":
        rows, ok = _model_rwa(cfg, profile)
    else:
        rows, ok = _model_spin_boson(cfg, profile)
    doc = {"model": kind, "runs": rows, "pass": bool(ok)}
    _write(out_dir, "model.json", dump_json(doc))
    if echo:
        sys.stdout.write(dump_json(doc))
    return EXIT_PASS if ok else EXIT_VERDICT


def cmd_fock(cfg: RunConfig, out_dir: Path, echo: bool) -> int:
    grid = fock_mod.OneParticleGrid(cfg["fock.grid_size"], cfg["fock.tau_max"])
    trunc = cfg["fock.truncation"]
    rng = np.random.default_rng(cfg["fock.seed"])
    k = grid.size

    def rand_vec():
        return fock_mod.OneParticleVector(
            grid, rng.standard_normal(k) + 1j * rng.standard_normal(k)
        )

    worst_ccr = 0.0
    worst_adj = 0.0
    for _ in range(cfg["fock.draws"]):
        f = rand_vec()
        g = rand_vec()
        comps = [np.asarray(complex(rng.standard_normal(),
                                    rng.standard_normal()))]
        comps.append(rng.standard_normal(k) + 1j * rng.standard_normal(k))
        for n in range(2, trunc + 1):
            comps.append(np.zeros((k,) * n, dtype=complex))
        phi = fock_mod.FockVector(grid, tuple(comps))
        worst_ccr = max(worst_ccr, fock_mod.ccr_defect(f, g, phi))
        s2 = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        s2 = 0.5 * (s2 + s2.T)
        psi_comps = [comps[0], comps[1], s2]
        psi_comps += [np.zeros((k,) * n, dtype=complex)
                      for n in range(3, trunc + 1)]
        psi = fock_mod.FockVector(grid, tuple(psi_comps))
        phi2 = fock_mod.FockVector(grid, tuple(psi_comps))
        worst_adj = max(worst_adj, fock_mod.adjoint_defect(f, phi2, psi))

    wit_plus = gaussian(1.0, 0.0) + gaussian(1.0, 0.0, (0.0, 1j))
    wit_minus = gaussian(1.0, 0.0, (0.0, 1.0)) + gaussian(1.0, 0.0, (1j,))
    vp = fock_mod.OneParticleVector.from_time_function(grid, wit_plus)
    vm = fock_mod.OneParticleVector.from_time_function(grid, wit_minus)
    plus = fock_mod.indefinite_inner(vp, vp)
    minus = fock_mod.indefinite_inner(vm, vm)
    target = float(np.sqrt(np.pi / 2.0))

    probe = rand_vec()
    eta_exact = bool(np.array_equal(
        fock_mod.eta_apply(fock_mod.eta_apply(probe)).amps, probe.amps))

    defect_tol = cfg["tol.defect"]
    witness_tol = cfg["tol.oracle"]
    ok = (worst_ccr <= defect_tol and worst_adj <= defect_tol and eta_exact
          and abs(plus - target) <= witness_tol
          and abs(minus + target) <= witness_tol)
    doc = {
        "grid_size": grid.size,
        "tau_max": grid.tau_max,
        "truncation": trunc,
        "draws": cfg["fock.draws"],
        "ccr_defect_max": float(worst_ccr),
        "adjoint_defect_max": float(worst_adj),
        "eta_squared_is_identity": eta_exact,
        "witness_positive": complex(plus),
        "witness_negative": complex(minus),
        "witness_target": target,
        "pass": bool(ok),
    }
    _write(out_dir, "fock.json", dump_json(doc))
    sys.stdout.write(
        f"ccr defect {worst_ccr:.3e}, adjoint defect {worst_adj:.3e}, "
        f"eta^2 exact: {eta_exact}, witnesses {plus.real:+.9f} / "
        f"{minus.real:+.9f} (target +/-{target:.9f})\n"
    )
    if echo:
        sys.stdout.write(dump_json(doc))
    return EXIT_PASS if ok else EXIT_VERDICT


_COMMANDS = {
    "expansion": cmd_expansion,
    "coeffs": cmd_coeffs,
    "model": cmd_model,
    "fock": cmd_fock,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stochlim",
        description="verification runs for weak-coupling asymptotics",
    )
    parser.add_argument("command", choices=[*_COMMANDS, "all"])
    parser.add_argument("--config", type=str, default=None,
                        help="path to a dotted key = value config file")
    parser.add_argument("--out", type=str, default="out",
                        help="output directory for CSV/JSON artifacts")
    parser.add_argument("--json", action="store_true",
                        help="echo the JSON verdicts to stdout")
    parser.add_argument("--tol", type=float, default=None,
                        help="override the verdict tolerance (gap/oracle/defect)")
    args = parser.parse_args(argv)

    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig.defaults()
        if args.tol is not None:
            if args.tol <= 0.0:
                raise ConfigError("--tol must be positive", key="tol")
            cfg = cfg.replace(**{"tol.gap": args.tol, "tol.oracle": args.tol,
                                 "tol.defect": args.tol})
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except OSError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG

    out_dir = Path(args.out)
    names = list(_COMMANDS) if args.command == "all" else [args.command]
    code = EXIT_PASS
    for name in names:
        try:
            rc = _COMMANDS[name](cfg, out_dir, args.json)
        except ConfigError as exc:
            sys.stderr.write(f"config error in {name}: {exc}\n")
            return EXIT_CONFIG
        except (AccuracyError, InsufficientDataError) as exc:
            sys.stderr.write(f"accuracy error in {name}: {exc}\n")
            return EXIT_ACCURACY
        except UnsupportedInputError as exc:
            sys.stderr.write(f"config error in {name}: {exc}\n")
            return EXIT_CONFIG
        except StochlimError as exc:
            sys.stderr.write(f"error in {name}: {exc}\n")
            return EXIT_ACCURACY
        code = max(code, rc)
    return code


if __name__ == "__main__":
    sys.exit(main())
