"""
Command-line front end.

Units are dimensionless with c = 1: frequencies are angular detunings,
times are their reciprocals, ``alpha`` is an inverse group velocity and
``beta`` the quadratic spectral-phase coefficient per unit length.

Every run writes a data table (``<experiment>.csv`` or ``.json``) and a
summary ``<experiment>_summary.json``.  Both embed a schema version and the
resolved configuration, from which the run can be repeated with ``--config``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .chaotic import ChaoticFieldParams, identical_dispersion_experiment
from .core import AliasingError, DispersiveMedium, RandomStream
from .dispersion import (
    BiphotonState,
    PulseTrainModel,
    quantum_timing_spread,
    sigma_C_closed_form,
    sigma_T_closed_form,
    simulate_pulse_train,
)
from .interferometer import (
    FransonSetup,
    chsh_quantum,
    coincidence_profile_no_interferometers,
    ou_mandel_chsh,
    ou_mandel_simulate,
    quantum_fringe,
    quantum_visibility,
    violation_report,
)
from .modulation import (
    ClassicalAnticorrelatedSource,
    PhaseModulator,
    delta_squared_classical,
    delta_squared_monte_carlo,
    modulation_grid,
    quantum_modulation,
)

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_CONFIG, EXIT_GUARD = 0, 2, 3

# name -> (type, default, help); names become --kebab-case flags
PARAMETERS = {
    "dispersion": {
        "sigma_f": (float, 1.0, "pair bandwidth sigma_F (1/e amplitude half-width)"),
        "sigma_pump": (float, 0.0, "pump bandwidth (0 = CW)"),
        "alpha1": (float, 0.0, "group delay per length, arm 1"),
        "alpha2": (float, 0.0, "group delay per length, arm 2"),
        "beta1": (float, 0.0, "dispersion coefficient, arm 1"),
        "beta2": (float, 0.0, "dispersion coefficient, arm 2"),
        "length": (float, 1.0, "medium length (both arms)"),
    },
    "pulse-train": {
        "sigma_p": (float, 1.0, "per-pulse intensity-spectrum std"),
        "sigma_d": (float, 0.0, "std of the pulse-to-pulse detuning"),
        "alpha1": (float, 0.0, "group delay per length, arm 1"),
        "alpha2": (float, 0.0, "group delay per length, arm 2"),
        "beta1": (float, 0.0, "dispersion coefficient, arm 1"),
        "beta2": (float, 0.0, "dispersion coefficient, arm 2"),
        "length": (float, 1.0, "medium length (both arms)"),
        "detections": (int, 1, "detections per pulse and arm"),
        "bins": (int, 101, "histogram bins for the output table"),
    },
    "chaotic": {
        "coherence_rate": (float, 1.0, "field coherence rate Gamma"),
        "beta": (float, 2.0, "dispersion coefficient of both media"),
        "alpha": (float, 0.0, "group delay per length of both media"),
        "length": (float, 1.0, "medium length"),
        "duration": (float, 512.0, "record duration"),
        "n_points": (int, 4096, "samples per record (power of two)"),
    },
    "modulation": {
        "depth1": (float, 1.0, "modulation index, beam 1"),
        "depth2": (float, 1.0, "modulation index, beam 2"),
        "omega": (float, 1.0, "modulation frequency Omega"),
        "theta1": (float, 0.0, "modulator phase offset, beam 1"),
        "theta2": (float, 0.0, "modulator phase offset, beam 2"),
        "sigma_f": (float, 50.0, "pair bandwidth for the entangled source"),
        "sigma_pump": (float, 0.25, "pump bandwidth for the entangled source"),
        "linewidth": (float, 0.0, "classical line width"),
        "source": (str, "quantum", "side reported by compare: quantum, classical or compensated"),
    },
    "franson": {
        "delta_t": (float, 5.0, "interferometer imbalance Delta T (units of tau_c)"),
        "tau_c": (float, 1.0, "two-photon correlation time"),
        "window": (float, 1.0, "coincidence window"),
        "scan_phases": (int, 32, "phase-sum samples over one period"),
        "source": (str, "quantum", "side reported by compare: quantum or ou-mandel"),
    },
}

DEFAULT_TRIALS = {"dispersion": 100_000, "pulse-train": 100_000, "chaotic": 256,
                  "modulation": 100_000, "franson": 200_000}
FAMILY = {"dispersion": "dispersion", "pulse-train": "dispersion", "chaotic": "chaotic",
          "modulation": "modulation", "franson": "franson"}
SOURCES = {"modulation": ("quantum", "classical", "compensated"),
           "franson": ("quantum", "ou-mandel")}
CONFIG_KEYS = {"experiment", "parameters", "seed", "trials", "output_path", "format"}


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    experiment: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    trials: int | None = None
    output_path: str = "results"
    format: str = "csv"

    def __post_init__(self):
        if self.experiment not in PARAMETERS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        fields = PARAMETERS[self.experiment]
        unknown = set(self.parameters) - set(fields)
        if unknown:
            raise ConfigError(f"unknown parameters for {self.experiment}: {sorted(unknown)}")
        self.parameters = {k: fields[k][0](self.parameters.get(k, fields[k][1])) for k in fields}
        src = self.parameters.get("source")
        if src is not None and src not in SOURCES[self.experiment]:
            raise ConfigError(f"source must be one of {SOURCES[self.experiment]}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        self.seed = int(self.seed)
        if self.trials is None:
            self.trials = DEFAULT_TRIALS[self.experiment]
        elif int(self.trials) < 1:
            raise ConfigError("trials must be positive")
        else:
            self.trials = int(self.trials)
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if "config" in d and "schema" in d:
            d = d["config"]
        unknown = set(d) - CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in d:
            raise ConfigError("config needs an 'experiment'")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e

    def record(self) -> dict:
        """Everything that determines the results; thread count and output location do not."""
        d = asdict(self)
        del d["output_path"]
        return d


@dataclass
class RunResult:
    columns: list
    rows: list
    summary: dict
    metrics: dict = field(default_factory=dict)  # name -> (value, std_error)
    extra: dict = field(default_factory=dict)  # suffix -> RunResult written alongside


# -- experiments ------------------------------------------------------------------

def _media(p, suffix=("1", "2")):
    return tuple(DispersiveMedium(p["alpha" + s], p["beta" + s], p["length"]) for s in suffix)


def _run_dispersion(cfg: RunConfig, threads: int) -> RunResult:
    """Entangled pair next to a classical pulse train of the same bandwidth, no jitter."""
    p = cfg.parameters
    m1, m2 = _media(p)
    s = BiphotonState(p["sigma_f"], p["sigma_pump"])
    q = quantum_timing_spread(s, m1, m2)
    model = PulseTrainModel(p["sigma_f"], 0.0, n_pulses=cfg.trials)
    c = simulate_pulse_train(model, m1, m2, rng=RandomStream(cfg.seed), threads=threads).stats
    equal = m1.length == m2.length
    row = {"beta1": p["beta1"], "beta2": p["beta2"], "L": p["length"], "sigma_F": p["sigma_f"],
           "sigma_T_theory": sigma_T_closed_form(s, m1, m2) if equal else np.nan,
           "sigma_T_numeric": q.std,
           "sigma_C_theory": sigma_C_closed_form(p["sigma_f"], m1, m2) if equal else np.nan,
           "sigma_C_mc": c.std, "mc_error": c.std_std_error}
    return RunResult(list(row), [tuple(row.values())], row,
                     {"correlation_width": (q.std, 0.0)})


def _run_pulse_train(cfg: RunConfig, threads: int) -> RunResult:
    p = cfg.parameters
    m1, m2 = _media(p)
    model = PulseTrainModel(p["sigma_p"], p["sigma_d"], n_pulses=cfg.trials)
    res = simulate_pulse_train(model, m1, m2, p["detections"], RandomStream(cfg.seed),
                               threads=threads)
    st = res.stats
    summary = {"sigma_C_numeric": st.std, "sigma_C_error": st.std_std_error,
               "sigma_C_theory": sigma_C_closed_form(p["sigma_p"], m1, m2),
               "arm_width_1": res.arm_widths[0], "arm_width_2": res.arm_widths[1],
               "time_averaged_bandwidth": model.time_averaged_bandwidth}
    if p["sigma_d"] > 0:
        summary.update(slope=res.slope, slope_error=res.slope_error)
    d = res.differences.ravel()
    lim = 5 * st.std + abs(st.mean)
    counts, edges = np.histogram(d, bins=p["bins"], range=(-lim, lim))
    centers = (edges[1:] + edges[:-1]) / 2
    dens = counts / (d.size * np.diff(edges))
    return RunResult(["tau", "density"], list(zip(centers, dens)), summary,
                     {"correlation_width": (st.std, st.std_std_error)})


def _run_chaotic(cfg: RunConfig, threads: int) -> RunResult:
    p = cfg.parameters
    params = ChaoticFieldParams(p["coherence_rate"], duration=p["duration"],
                                n_points=p["n_points"], n_records=cfg.trials)
    m = DispersiveMedium(p["alpha"], p["beta"], p["length"])
    rep = identical_dispersion_experiment(params, m, RandomStream(cfg.seed), threads=threads)
    g0, g1 = rep.without_medium, rep.with_medium
    a0, e0 = g0.at(0.0)
    a1, e1 = g1.at(0.0)
    summary = {"g2_0_without": a0, "g2_0_without_error": e0,
               "g2_0_with": a1, "g2_0_with_error": e1,
               "max_difference_sigma": rep.max_difference_sigma,
               "trace_dissimilarity": rep.dissimilarity,
               "total_samples": params.n_points * params.n_records}
    err = np.hypot(g0.std_error, g1.std_error)
    rows = list(zip(rep.tau, g0.g2, g1.g2, err, g0.std_error, g1.std_error))
    tr = rep.traces
    trace = RunResult(["t", "I_a", "I_b", "I_a_dispersed", "I_b_dispersed"],
                      list(zip(rep.times, tr["I_a"], tr["I_b"], tr["I_a_dispersed"],
                               tr["I_b_dispersed"])), {})
    return RunResult(["tau", "g2_no_medium", "g2_with_medium", "err", "err_no_medium",
                      "err_with_medium"], rows, summary,
                     {"g2_0_without": (a0, e0), "g2_0_with": (a1, e1)}, {"trace": trace})


def _run_modulation(cfg: RunConfig, threads: int) -> RunResult:
    p = cfg.parameters
    w = p["omega"]
    mod1 = PhaseModulator(w, p["depth1"], p["theta1"])
    mod2 = PhaseModulator(w, p["depth2"], p["theta2"])
    source = ClassicalAnticorrelatedSource.single_line(0.0, linewidth=p["linewidth"])
    rng = RandomStream(cfg.seed)
    exact = delta_squared_classical(mod1, mod2, source)
    mc = delta_squared_monte_carlo(mod1, mod2, source, cfg.trials, rng.child(0), threads=threads)

    comp = source.with_precompensation(mod1, mod2)
    on = delta_squared_monte_carlo(mod1, mod2, comp, cfg.trials, rng.child(1), threads=threads)
    off = delta_squared_monte_carlo(mod1, mod2, comp, cfg.trials, rng.child(2),
                                    modulators_on=False, threads=threads)

    s = BiphotonState(p["sigma_f"], p["sigma_pump"])
    # equal and opposite needs one depth; the larger sets the grid
    q1 = PhaseModulator(w, max(p["depth1"], p["depth2"]), p["theta1"])
    grid = modulation_grid(s, q1, q1)
    base = quantum_modulation(s, mod1.off(), mod2.off(), grid=grid).delta_squared
    opp = quantum_modulation(s, q1, q1.opposite(), grid=grid).delta_squared
    same = quantum_modulation(s, q1, q1, grid=grid).delta_squared

    row = {"depth1": p["depth1"], "depth2": p["depth2"], "omega_mod": w,
           "delta2_classical": exact, "delta2_mc": mc.mean, "mc_err": mc.std_error,
           "delta2_quantum_opposite": opp, "delta2_quantum_same": same,
           "delta2_baseline": base,
           "delta2_compensated_on": on.mean, "delta2_compensated_on_err": on.std_error,
           "delta2_compensated_off": off.mean, "delta2_compensated_off_err": off.std_error}
    metrics = {
        "quantum": {"delta2_with_modulators": (opp, 0.0),
                    "delta2_without_modulators": (base, 0.0)},
        "classical": {"delta2_with_modulators": (mc.mean, mc.std_error),
                      "delta2_without_modulators": (0.0, 0.0)},
        "compensated": {"delta2_with_modulators": (on.mean, on.std_error),
                        "delta2_without_modulators": (off.mean, off.std_error)},
    }[p["source"]]
    summary = dict(row, delta2_classical_theory=w ** 2 * (p["depth1"] ** 2 + p["depth2"] ** 2) / 2,
                   quantum_depth=q1.depth)
    return RunResult(list(row), [tuple(row.values())], summary, metrics)


def _run_franson(cfg: RunConfig, threads: int) -> RunResult:
    p = cfg.parameters
    setup = FransonSetup(p["delta_t"], tau_c=p["tau_c"], window=p["window"])
    rng = RandomStream(cfg.seed)
    phis, q_rate = quantum_fringe(p["scan_phases"])
    om = ou_mandel_simulate(setup, cfg.trials, rng.child(0), p["scan_phases"], threads=threads)
    nu_q = quantum_visibility(p["scan_phases"])
    cq = chsh_quantum()
    cc = ou_mandel_chsh(setup, cfg.trials, rng.child(1), threads=threads)
    profile = coincidence_profile_no_interferometers(p["tau_c"])
    vq = violation_report(profile, p["delta_t"], nu_q)
    # the classical waves are continuous, so their own coincidence rate is flat in the
    # offset and the bound that applies to them is the zero-offset value
    vc = violation_report(profile, 0.0, om.visibility, om.visibility_error)

    def chsh_record(r):
        return {"settings": list(r.settings),
                "E": [{"phi1": a, "phi2": b, "E": e} for (a, b), e in r.E.items()],
                "S": r.S, "S_error": r.std_error}

    summary = {
        "visibility_quantum": nu_q,
        "visibility_classical": om.visibility,
        "visibility_classical_error": om.visibility_error,
        "chsh_quantum": chsh_record(cq),
        "chsh_classical": chsh_record(cc),
        "inequality": {"delta_t_over_tau": vq.delta_t_over_tau, "bound": vq.bound,
                       "nu_quantum": nu_q, "nu_classical": om.visibility,
                       "violated": vq.violated, "bound_classical_model": vc.bound,
                       "violated_classical_model": vc.violated},
    }
    metrics = {
        "quantum": {"visibility": (nu_q, 0.0), "chsh_S": (cq.S, 0.0)},
        "ou-mandel": {"visibility": (om.visibility, om.visibility_error),
                      "chsh_S": (cc.S, cc.std_error)},
    }[p["source"]]
    rows = list(zip(phis, q_rate, om.rate, om.rate_error))
    return RunResult(["phi_sum", "rate_quantum", "rate_ou_mandel", "err"], rows, summary, metrics)


RUNNERS = {"dispersion": _run_dispersion, "pulse-train": _run_pulse_train,
           "chaotic": _run_chaotic, "modulation": _run_modulation, "franson": _run_franson}


def execute(cfg: RunConfig, threads: int = 1) -> RunResult:
    return RUNNERS[cfg.experiment](cfg, threads)


# -- output -----------------------------------------------------------------------

def _plain(x):
    """Convert numpy scalars for JSON."""
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


def schema_name(experiment: str) -> str:
    return f"nonlocal-optics/{experiment}/v{SCHEMA_VERSION}"


def format_csv(schema: str, config: dict, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={schema}\n")
    buf.write(f"# config={json.dumps(_plain(config))}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(float(v)) for v in r])
    return buf.getvalue()


def read_csv(path) -> tuple[dict, list, np.ndarray]:
    """Parse a table written by this tool: ``(header comments, columns, data)``."""
    meta, lines = {}, Path(path).read_text().splitlines()
    while lines and lines[0].startswith("# "):
        key, _, value = lines.pop(0)[2:].partition("=")
        meta[key] = json.loads(value) if key == "config" else value
    columns = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return meta, columns, data.reshape(-1, len(columns))


def _write_table(path: Path, fmt: str, schema: str, config: dict, result: RunResult) -> Path:
    if fmt == "csv":
        path = path.with_suffix(".csv")
        path.write_text(format_csv(schema, config, result.columns, result.rows))
    else:
        path = path.with_suffix(".json")
        table = {c: [float(r[i]) for r in result.rows] for i, c in enumerate(result.columns)}
        path.write_text(json.dumps(_plain({"schema": schema, "config": config, "table": table}),
                                   indent=2) + "\n")
    return path


def write_outputs(cfg: RunConfig, result: RunResult, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    schema = schema_name(cfg.experiment)
    config = cfg.record()
    name = cfg.experiment.replace("-", "_")
    paths = [_write_table(out_dir / name, cfg.format, schema, config, result)]
    for suffix, table in result.extra.items():
        paths.append(_write_table(out_dir / f"{name}_{suffix}", cfg.format,
                                  f"{schema}/{suffix}", config, table))
    summary_path = out_dir / f"{name}_summary.json"
    summary_path.write_text(json.dumps(
        _plain({"schema": schema, "config": config, "summary": result.summary}), indent=2) + "\n")
    paths.append(summary_path)
    return paths


def _print_summary(cfg: RunConfig, result: RunResult, paths, stream) -> None:
    print(f"{cfg.experiment} (seed {cfg.seed}, trials {cfg.trials})", file=stream)
    for k, v in result.summary.items():
        if isinstance(v, dict):
            print(f"  {k}: {json.dumps(_plain(v))}", file=stream)
        elif isinstance(v, float):
            print(f"  {k:<28s} {v:.6g}", file=stream)
        else:
            print(f"  {k:<28s} {v}", file=stream)
    for pth in paths:
        print(f"  wrote {pth}", file=stream)


# -- compare ------------------------------------------------------------------------

def _side(cfg: RunConfig) -> str:
    if cfg.experiment == "dispersion":
        return "quantum"
    if cfg.experiment in ("pulse-train", "chaotic"):
        return "classical"
    src = cfg.parameters["source"]
    return "quantum" if src == "quantum" else "classical"


def reproduces(a, b, rel: float = 0.05, k: float = 3.0) -> bool:
    """Agreement within ``k`` combined standard errors or ``rel`` relative difference."""
    (va, ea), (vb, eb) = a, b
    tol = max(k * np.hypot(ea, eb), rel * max(abs(va), abs(vb)))
    return bool(abs(va - vb) <= tol)


def compare(cfg_a: RunConfig, cfg_b: RunConfig, threads: int = 1) -> dict:
    fa, fb = FAMILY[cfg_a.experiment], FAMILY[cfg_b.experiment]
    if fa != fb:
        raise ConfigError(f"cannot compare families {fa!r} and {fb!r}")
    ra, rb = execute(cfg_a, threads), execute(cfg_b, threads)
    rows = []
    for metric in ra.metrics:
        a, b = ra.metrics[metric], rb.metrics[metric]
        rows.append({"metric": metric, "value_a": a[0], "error_a": a[1],
                     "value_b": b[0], "error_b": b[1],
                     "classical_reproduces_quantum": "yes" if reproduces(a, b) else "no"})
    return {"schema": f"nonlocal-optics/compare/v{SCHEMA_VERSION}", "family": fa,
            "a": {"config": cfg_a.record(), "side": _side(cfg_a)},
            "b": {"config": cfg_b.record(), "side": _side(cfg_b)},
            "metrics": rows}


def write_compare(report: dict, out_dir: Path, fmt: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out_dir / "compare.json"
        path.write_text(json.dumps(_plain(report), indent=2) + "\n")
        return path
    path = out_dir / "compare.csv"
    buf = io.StringIO()
    buf.write(f"# schema={report['schema']}\n")
    buf.write(f"# a={json.dumps(_plain(report['a']))}\n")
    buf.write(f"# b={json.dumps(_plain(report['b']))}\n")
    cols = list(report["metrics"][0]) if report["metrics"] else ["metric"]
    w = csv.DictWriter(buf, cols, lineterminator="\n")
    w.writeheader()
    for r in report["metrics"]:
        w.writerow({k: repr(float(v)) if isinstance(v, (float, np.floating)) else v
                    for k, v in r.items()})
    path.write_text(buf.getvalue())
    return path


# -- argument parsing ---------------------------------------------------------------

def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run options")
    g.add_argument("--seed", type=int, default=None, help="64-bit RNG seed (default 0)")
    g.add_argument("--trials", type=int, default=None,
                   help="Monte Carlo trials: pulses, records or samples")
    g.add_argument("--threads", type=int, default=1, help="worker threads (results unchanged)")
    g.add_argument("--out", default=None, help="output directory (default results)")
    g.add_argument("--format", choices=("csv", "json"), default=None,
                   help="table format (default csv)")
    g.add_argument("--config", default=None,
                   help="JSON run config; explicit flags override its values")

    parser = argparse.ArgumentParser(
        prog="nonlocal-optics",
        description="Quantum versus classical nonlocal optics simulations. "
                    "Dimensionless units with c = 1; frequencies are angular detunings "
                    "and times are their reciprocals.")
    sub = parser.add_subparsers(dest="command", required=True)
    for exp, fields in PARAMETERS.items():
        sp = sub.add_parser(exp, parents=[common], help=f"run the {exp} experiment")
        for name, (typ, default, text) in fields.items():
            kw = {"choices": SOURCES[exp]} if name == "source" else {}
            sp.add_argument(_flag(name), dest=name, type=typ, default=None,
                            help=f"{text} (default {default})", **kw)
    cp = sub.add_parser("compare", parents=[common],
                        help="run two configs of one family side by side")
    cp.add_argument("config_a")
    cp.add_argument("config_b")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig.load(args.config).__dict__ if args.config else {"experiment": args.command}
    if base["experiment"] != args.command:
        raise ConfigError(f"config is for {base['experiment']!r}, not {args.command!r}")
    params = dict(base.get("parameters", {}))
    for name in PARAMETERS[args.command]:
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    d = {"experiment": args.command, "parameters": params}
    for key, arg in (("seed", "seed"), ("trials", "trials"), ("output_path", "out"),
                     ("format", "format")):
        value = getattr(args, arg)
        if value is not None:
            d[key] = value
        elif key in base:
            d[key] = base[key]
    return RunConfig(**d)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            if args.command == "compare":
                a, b = RunConfig.load(args.config_a), RunConfig.load(args.config_b)
                report = compare(a, b, args.threads)
                path = write_compare(report, Path(args.out or "results"), args.format or "csv")
                print(f"compare ({report['family']}): a={report['a']['side']} "
                      f"b={report['b']['side']}")
                for r in report["metrics"]:
                    print(f"  {r['metric']:<28s} a={r['value_a']:.6g}  b={r['value_b']:.6g}  "
                          f"classical reproduces quantum? {r['classical_reproduces_quantum']}")
                print(f"  wrote {path}")
                return EXIT_OK
            cfg = resolve_config(args)
            result = execute(cfg, args.threads)
            paths = write_outputs(cfg, result, Path(cfg.output_path))
            _print_summary(cfg, result, paths, sys.stdout)
    except AliasingError as e:
        print(f"numerical guard failed: {e}\nhint: increase the grid "
              "(longer duration or more points)", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, TypeError) as e:
        print(f"invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
