"""Command-line entry point: configuration-driven experiment drivers.

Subcommands: simulate, normalform-check, smoothing, attractor, bounds,
gauge.  Each run writes into a fresh timestamped directory under the
configured output root: a config snapshot, a manifest, and the
experiment's CSV/JSON artifacts.  Exit codes: 0 success, 2 configuration
error, 3 numerical failure (blow-up or non-convergent fit).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, ExperimentConfig, load_config, parse_alpha, validate
from .dynamics import (
    BlowUpError,
    ModelParams,
    ZakharovState,
    default_dt,
    integrate,
    trajectory_norms,
)
from .fields import FourierField, field_from_csv, field_to_csv, random_sobolev_field
from . import runio

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _model_params(cfg: ExperimentConfig) -> ModelParams:
    alpha, frac = cfg.alpha()
    return ModelParams(alpha, frac)


def _random_state(cfg: ExperimentConfig, radius: int) -> ZakharovState:
    if cfg.get("zero_data"):
        return ZakharovState(
            FourierField.zero(radius), FourierField.zero(radius), 0.0
        )
    u0 = random_sobolev_field(
        cfg["s0"], radius, seed=cfg["seed"], amplitude=cfg["amplitude"]
    )
    n0 = random_sobolev_field(
        cfg["s1"], radius, seed=cfg["seed"] + 10**6, mean_zero=True,
        amplitude=cfg["amplitude"],
    )
    return ZakharovState(u0, n0, 0.0)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _cmd_simulate(cfg: ExperimentConfig, run_dir: Path) -> int:
    radius = cfg["N"]
    params = _model_params(cfg)
    state = _random_state(cfg, radius)
    dt = cfg["dt"] or default_dt(radius)
    gamma = cfg["gamma"]
    forcing = None
    if cfg["forcing_modes"]:
        from .dissipative import forcing_from_modes

        forcing = forcing_from_modes(radius, cfg["forcing_modes"])
    elif gamma > 0 and cfg["forcing_h1"] > 0:
        from .dissipative import default_forcing

        forcing = default_forcing(radius, cfg["forcing_h1"], cfg["forcing_max_mode"])
    traj = integrate(
        state,
        params,
        dt,
        cfg["t_end"],
        sample_dt=cfg["sample_stride"],
        nl_scale=cfg["nl_scale"],
        coupling=cfg["coupling"],
        gamma=gamma,
        forcing=forcing,
        blowup_threshold=cfg["blowup_threshold"],
    )
    runio.trajectory_to_csv(run_dir / "trajectory.csv", traj)
    norms = trajectory_norms(traj, cfg["s_list"])
    runio.diagnostics_to_csv(run_dir / "diagnostics.csv", norms)
    summary = {
        "samples": len(traj),
        "t_end": float(traj.times[-1]),
        "mass_initial": float(norms["mass"][0]),
        "mass_final": float(norms["mass"][-1]),
        "energy_initial": float(norms["energy"][0]),
        "energy_final": float(norms["energy"][-1]),
    }
    # tail fit of the final state, for downstream figure annotation
    from .fields import fit_regularity

    try:
        s_hat = fit_regularity(traj.final_state().u, (max(4, radius // 16), radius))
        summary["tail_fit_u"] = {"s_hat": s_hat, "sigma_hat": s_hat + 0.5,
                                 "fit_kmin": max(4, radius // 16), "fit_kmax": radius}
    except Exception:
        summary["tail_fit_u"] = None
    runio.write_json(run_dir / "summary.json", summary)
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# normalform-check
# ---------------------------------------------------------------------------

def _cmd_normalform(cfg: ExperimentConfig, run_dir: Path) -> int:
    from .normal_form import normal_form_residual

    radius = cfg["N"]
    params = _model_params(cfg)
    state = _random_state(cfg, radius)
    rep = normal_form_residual(
        state,
        params,
        include_resonant=cfg["with_rho"],
        interior_fraction=cfg["interior_fraction"],
    )
    payload = {
        "alpha": cfg["alpha"],
        "N": radius,
        "seed": cfg["seed"],
        "mode": rep.mode,
        "with_rho": cfg["with_rho"],
        "residual_u": rep.residual_u,
        "residual_n": rep.residual_n,
        "excluded_tuples_count": rep.excluded_tuples_count,
    }
    runio.write_json(run_dir / "report.json", payload)
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# smoothing
# ---------------------------------------------------------------------------

def _smoothing_config(cfg: ExperimentConfig, alpha: str):
    from .smoothing import SmoothingConfig

    return SmoothingConfig(
        alpha=alpha,
        s0=cfg["s0"],
        s1=cfg["s1"],
        radius=cfg["N"],
        seeds=tuple(cfg["seeds"]),
        sample_times=tuple(float(t) for t in cfg["sample_times"]),
        dt=cfg["dt"] or None,
        amplitude=cfg["amplitude"],
        fit_kmin=cfg["fit_kmin"],
        fit_kmax=cfg["fit_kmax"] or None,
    )


def _write_smoothing_series(run_dir: Path, rep: dict, tag: str) -> None:
    times = rep["times"]
    for entry in rep["per_seed"]:
        rows = []
        for i, t in enumerate(times):
            rows.append(
                (
                    t,
                    entry["residue_u_norm"][i],
                    entry["residue_n_norm"][i],
                    entry["reg_u"][i],
                    entry["reg_residue_u"][i],
                    entry["reg_n"][i],
                    entry["reg_residue_n"][i],
                )
            )
        runio.write_rows_csv(
            run_dir / f"series-{tag}-seed{entry['seed']}.csv",
            ["t", "residue_u_norm", "residue_n_norm", "fitted_reg_u",
             "fitted_reg_res_u", "fitted_reg_n", "fitted_reg_res_n"],
            rows,
        )


def _cmd_smoothing(cfg: ExperimentConfig, run_dir: Path) -> int:
    from .smoothing import smoothing_report

    rep = smoothing_report(_smoothing_config(cfg, cfg["alpha"]))
    _write_smoothing_series(run_dir, rep, "main")
    payload = {"main": rep}
    if cfg["contrast_alpha"]:
        rep2 = smoothing_report(_smoothing_config(cfg, cfg["contrast_alpha"]))
        _write_smoothing_series(run_dir, rep2, "contrast")
        payload["contrast"] = rep2
        payload["contrast_summary"] = {
            "alpha_main": cfg["alpha"],
            "alpha_contrast": cfg["contrast_alpha"],
            "gain_n_main": rep["ensemble"]["measured_a1"],
            "gain_n_contrast": rep2["ensemble"]["measured_a1"],
            "theory_main": rep["theory"],
            "theory_contrast": rep2["theory"],
        }
    runio.write_json(run_dir / "report.json", payload)
    print(json.dumps({"measured_a0": rep["ensemble"]["measured_a0"],
                      "measured_a1": rep["ensemble"]["measured_a1"]}, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# attractor
# ---------------------------------------------------------------------------

def _cmd_attractor(cfg: ExperimentConfig, run_dir: Path) -> int:
    from .dissipative import (
        AbsorbingConfig,
        AttractorConfig,
        absorbing_fit,
        attractor_probe,
    )

    alpha = cfg["alpha"]
    dt = cfg["dt"] or None
    fmodes = tuple(tuple(row) for row in cfg["forcing_modes"])
    absorbing = absorbing_fit(
        AbsorbingConfig(
            alpha=alpha,
            gamma=cfg["gamma"],
            forcing_h1=cfg["forcing_h1"],
            radius=cfg["N"],
            seeds=tuple(cfg["seeds"]),
            data_scale=cfg["absorbing_data_scale"],
            t_end=cfg["absorbing_t_end"],
            dt=dt,
            fit_burn_in=cfg["fit_burn_in"],
            forcing_modes=fmodes,
        )
    )
    for b, seed in enumerate(cfg["seeds"]):
        rows = list(zip(absorbing["times"], absorbing["q_series"][b]))
        runio.write_rows_csv(run_dir / f"absorbing-seed{seed}.csv", ["t", "Q"], rows)

    probe_cfg = AttractorConfig(
        alpha=alpha,
        gamma=cfg["gamma"],
        forcing_h1=cfg["forcing_h1"],
        radius=cfg["N"],
        seeds=tuple(cfg["seeds"]),
        data_scale=cfg["data_scale"],
        t_window=tuple(cfg["t_window"]),
        sample_dt=cfg["sample_stride"],
        dt=dt,
        a_list=tuple(cfg["a_list"]),
        forcing_modes=fmodes,
    )
    probe = attractor_probe(probe_cfg)
    payload = {
        "C1": absorbing["C1_hat"],
        "C2": absorbing["C2_hat"],
        "C3": absorbing["C3_hat"],
        "C1_spread": absorbing["C1_spread"],
        "R_hat": probe["R_hat"],
        "diameters": probe["diameters"],
        "absorbing": absorbing,
        "probe": probe,
    }
    if cfg["second_ensemble_offset"]:
        probe2 = attractor_probe(
            AttractorConfig(
                alpha=alpha,
                gamma=cfg["gamma"],
                forcing_h1=cfg["forcing_h1"],
                radius=cfg["N"],
                seeds=tuple(cfg["seeds"]),
                data_scale=cfg["data_scale"],
                t_window=tuple(cfg["t_window"]),
                sample_dt=cfg["sample_stride"],
                dt=dt,
                a_list=tuple(cfg["a_list"]),
                seed_offset=cfg["second_ensemble_offset"],
                forcing_modes=fmodes,
            )
        )
        payload["probe_second"] = probe2
        payload["R_hat_second"] = probe2["R_hat"]
    if cfg["control_run"]:
        control = absorbing_fit(
            AbsorbingConfig(
                alpha=alpha, gamma=cfg["gamma"], forcing_h1=0.0,
                radius=cfg["N"], seeds=tuple(cfg["seeds"][:2]),
                data_scale=cfg["absorbing_data_scale"],
                t_end=cfg["absorbing_t_end"], dt=dt,
            )
        )
        payload["control_q_final"] = max(f["q_end"] for f in control["fits"])
    runio.write_json(run_dir / "summary.json", payload)
    print(json.dumps({"C1": payload["C1"], "C3": payload["C3"],
                      "R_hat": payload["R_hat"]}, sort_keys=True))
    if absorbing["n_failed_fits"]:
        return EXIT_NUMERICAL
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def _cmd_bounds(cfg: ExperimentConfig, run_dir: Path) -> int:
    from .bounds import (
        SupSumSpec,
        lemma_int_b_sweep,
        lemma_sum_a_sweep,
        lemma_sum_c_sweep,
        supsum_sweep,
    )

    verdicts = {"lemma_a": [], "lemma_c": [], "lemma_b": [], "supsums": []}
    thresh = cfg["lemma_slope_threshold"]
    for entry in cfg["lemma_a"]:
        sweep = lemma_sum_a_sweep(float(entry["beta"]), float(entry["gamma"]))
        sweep["pass"] = bool(sweep["ratio_slope"] <= thresh)
        verdicts["lemma_a"].append(sweep)
    for beta in cfg["lemma_c_betas"]:
        sweep = lemma_sum_c_sweep(float(beta))
        sweep["pass"] = bool(sweep["trend_slope"] <= thresh)
        verdicts["lemma_c"].append(sweep)
    for beta in cfg["lemma_b_betas"]:
        sweep = lemma_int_b_sweep(float(beta))
        sweep["pass"] = bool(sweep["ratio_slope"] <= thresh)
        verdicts["lemma_b"].append(sweep)
    for i, entry in enumerate(cfg["supsums"]):
        alpha, _ = parse_alpha(entry.get("alpha", cfg["alpha"]))
        spec = SupSumSpec(
            kind=str(entry["kind"]),
            s=float(entry["s"]),
            s0=float(entry["s0"]),
            s1=float(entry.get("s1", 0.0)),
            b=float(entry["b"]),
            alpha=alpha,
            K=int(entry.get("K", 2**10)),
            admissible=bool(entry.get("admissible", True)),
            label=str(entry.get("label", f"supsum{i}")),
        )
        sweep = supsum_sweep(
            spec,
            slope_threshold=cfg["slope_threshold"],
            convergence_check=cfg["convergence_check"],
        )
        runio.write_rows_csv(
            run_dir / f"supsum-{i}-{spec.kind.replace(':', '_')}.csv",
            ["k", "sum", "sup_so_far", "slope_so_far"],
            [(r["k"], r["sum"], r["sup_so_far"],
              r["slope_so_far"] if np.isfinite(r["slope_so_far"]) else 0.0)
             for r in sweep["rows"]],
        )
        verdicts["supsums"].append(sweep)
    runio.write_json(run_dir / "verdicts.json", verdicts)
    all_pass = all(
        entry.get("pass", entry.get("bounded_verdict", True))
        for group in verdicts.values()
        for entry in group
        if entry.get("admissible", True)
    )
    print(json.dumps({"n_sweeps": sum(len(v) for v in verdicts.values()),
                      "all_admissible_bounded": all_pass}, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# gauge
# ---------------------------------------------------------------------------

def _cmd_gauge(cfg: ExperimentConfig, run_dir: Path) -> int:
    from .reduction import PhysicalTriple, gauge_normalize

    if cfg["u0_csv"]:
        u0 = field_from_csv(cfg["u0_csv"])
        n0 = field_from_csv(cfg["n0_csv"])
        n1 = field_from_csv(cfg["n1_csv"])
    else:
        radius = cfg["N"]
        if not radius:
            raise ConfigError("gauge needs either CSV inputs or N for random data")
        u0 = random_sobolev_field(cfg["s0"], radius, seed=cfg["seed"])
        n0 = random_sobolev_field(cfg["s1"], radius, seed=cfg["seed"] + 1,
                                  real_valued=True)
        n1 = random_sobolev_field(cfg["s1"] - 1.0, radius, seed=cfg["seed"] + 2,
                                  real_valued=True)
    triple = PhysicalTriple(u0, n0, n1)
    gauged, record = gauge_normalize(triple)
    field_to_csv(gauged.u0, run_dir / "u0_gauged.csv")
    field_to_csv(gauged.n0, run_dir / "n0_gauged.csv")
    field_to_csv(gauged.n1, run_dir / "n1_gauged.csv")
    payload = {"A": record.A, "B": record.B}
    runio.write_json(run_dir / "gauge.json", payload)
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# dispatcher
# ---------------------------------------------------------------------------

_HANDLERS = {
    "simulate": _cmd_simulate,
    "normalform-check": _cmd_normalform,
    "smoothing": _cmd_smoothing,
    "attractor": _cmd_attractor,
    "bounds": _cmd_bounds,
    "gauge": _cmd_gauge,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zakbench",
        description="Spectral workbench for the 1-D Zakharov system on the torus",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _HANDLERS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML configuration file")
        p.add_argument("--output-dir", help="root directory for run outputs")
        p.add_argument("--alpha", help='dispersion coefficient, e.g. "3/4"')
        p.add_argument("--N", type=int, help="truncation radius")
        p.add_argument("--seed", type=int, help="base RNG seed")
        if name == "normalform-check":
            group = p.add_mutually_exclusive_group()
            group.add_argument("--with-rho", dest="with_rho", action="store_true",
                               default=None)
            group.add_argument("--without-rho", dest="with_rho", action="store_false",
                               default=None)
    return parser


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        raw = load_config(args.config) if args.config else {}
        for key in ("alpha", "N", "seed", "with_rho"):
            value = getattr(args, key, None)
            if value is not None:
                raw[key] = value
        if args.output_dir is not None:
            raw["output_dir"] = args.output_dir
        cfg = validate(args.subcommand, raw)
    except (ConfigError, FileNotFoundError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    run_dir = runio.create_run_dir(cfg["output_dir"], args.subcommand)
    snapshot = {k: v for k, v in cfg.values.items()}
    runio.write_json(run_dir / "config.json", snapshot)
    try:
        code = _HANDLERS[args.subcommand](cfg, run_dir)
    except BlowUpError as err:
        runio.write_manifest(run_dir, args.subcommand, {"status": "blow-up",
                                                        "t_last": err.t_last})
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    runio.write_manifest(run_dir, args.subcommand, {"status": "ok"})
    print(f"run directory: {run_dir}", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
