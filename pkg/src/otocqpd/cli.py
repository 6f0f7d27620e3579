"""Command-line driver: time sweeps, shot runs, strength optimization.

Usage::

    python -m otocqpd run config.json --out results/
    python -m otocqpd optimize config.json
    python -m otocqpd validate config.json
    python -m otocqpd oracle-check config.json
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import HamiltonianSpec, Spectrum, build_hamiltonian, heisenberg, parse_pauli_string, tfim
from .estimate import CorrelatorSet, Xi, assemble_qpd, build_assignment, extract_correlators
from .measure import HALF_PI, Variant, joint_distribution, otoc_sequence
from .opcore import DensityState, basis_state, maximally_mixed, pauli_on_site
from .optimize import QpdTarget, all_targets, minimize
from .oracle import Outer, nested_correlator, qpd_direct
from .sample import ShotRecord, empirical_average, qpd_from_shots, sample_sequence

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
OUTPUTS = ("otoc", "qpd", "correlators", "nonclassicality", "optimization")
CORRELATORS = CorrelatorSet.names()
QPD_RE = [f"p_re{i}" for i in range(16)]
QPD_IM = [f"p_im{i}" for i in range(16)]
COLUMNS = ["t", "reF", "imF", "C", "N", *CORRELATORS, *QPD_RE, *QPD_IM]
ERR_COLUMNS = [f"{c}_err" for c in QPD_RE + QPD_IM]
_OPT_COLUMNS = [
    "target", "part", "bits", "phi_a", "phi_b", "phi_a2", "phi_b2",
    "phi_a_half_pi", "phi_b_half_pi", "phi_a2_half_pi", "phi_b2_half_pi", "objective",
]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    n_qubits: int
    hamiltonian: HamiltonianSpec
    site_A: tuple
    site_B: tuple
    state: DensityState
    time_grid: list
    strengths: object  # "optimal" or (strengths4, strengths3)
    shots: object  # "exact" or int
    seed: int
    outputs: list
    raw: dict = field(default_factory=dict, repr=False)


def _line_of(text: str, key: str) -> int | None:
    for n, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return n
    return None


def _fail(text: str, key: str, message: str):
    line = _line_of(text, key)
    where = f"line {line}" if line else "top level"
    raise ConfigError(f"{where}: {key}: {message}")


def _parse_hamiltonian(text, n, h) -> HamiltonianSpec:
    if not isinstance(h, dict):
        _fail(text, "hamiltonian", "expected an object")
    if h.get("preset") == "TFIM_longitudinal":
        return tfim(n, float(h.get("J", 1.0)), float(h.get("g", 1.05)), float(h.get("h", 0.5)))
    if "preset" in h:
        _fail(text, "preset", f"unknown preset {h['preset']!r}")
    terms = h.get("terms")
    if not terms:
        _fail(text, "hamiltonian", "needs a preset or a non-empty 'terms' list")
    try:
        parsed = tuple((float(c), parse_pauli_string(d)) for c, d in terms)
    except (TypeError, ValueError) as exc:
        _fail(text, "terms", str(exc))
    return HamiltonianSpec(n, parsed)


def _parse_site(text, key, value, n) -> tuple:
    if not isinstance(value, dict) or "site" not in value:
        _fail(text, key, "expected {\"pauli\": ..., \"site\": ...}")
    pauli, site = value.get("pauli", "Z"), value["site"]
    if pauli not in ("X", "Y", "Z"):
        _fail(text, key, f"pauli must be X, Y or Z, got {pauli!r}")
    if not isinstance(site, int) or not 0 <= site < n:
        _fail(text, key, f"site {site!r} out of range for {n} qubits")
    return pauli, site


def _parse_state(text, value, n, base: Path) -> DensityState:
    if value in (None, "maximally_mixed", "MaximallyMixed"):
        return maximally_mixed(n)
    if value in ("computational_zero", "ComputationalZero"):
        return basis_state(n, 0)
    if isinstance(value, dict) and "custom" in value:
        path = base / value["custom"]
        try:
            return DensityState(np.load(path))
        except (OSError, ValueError) as exc:
            _fail(text, "state", f"cannot use {path}: {exc}")
    _fail(text, "state", f"unknown state {value!r}")


def _parse_times(text, value) -> list:
    if isinstance(value, dict):
        try:
            grid = np.linspace(value["start"], value["stop"], int(value["num"])).tolist()
        except (KeyError, TypeError, ValueError) as exc:
            _fail(text, "time_grid", f"expected start/stop/num: {exc}")
    elif isinstance(value, list):
        grid = [float(t) for t in value]
    else:
        _fail(text, "time_grid", "expected a list or {start, stop, num}")
    if not grid:
        _fail(text, "time_grid", "must not be empty")
    return grid


def _parse_strengths(text, value):
    if value is None or value == "optimal":
        return "optimal"
    if not isinstance(value, dict):
        _fail(text, "strengths", "expected \"optimal\" or an object of angles")
    try:
        s4 = tuple(float(value[k]) for k in ("phi_a", "phi_b", "phi_a2", "phi_b2"))
        s3 = tuple(float(p) for p in value.get("noninformative", (HALF_PI,) * 3))
    except (KeyError, TypeError, ValueError) as exc:
        _fail(text, "strengths", f"bad angles: {exc}")
    if len(s3) != 3:
        _fail(text, "noninformative", "expected 3 angles")
    for p in s4 + s3:
        if not 0 < p <= HALF_PI + 1e-15:
            _fail(text, "strengths", f"angle {p} outside (0, pi/2]")
    if s4[0] > HALF_PI - 1e-3:
        _fail(
            text,
            "phi_a",
            f"{s4[0]} too close to pi/2: <B>, <ABA> and <BAB> need a non-projective first "
            "measurement (its collapse cannot be undone otherwise)",
        )
    return s4, s3


def parse_config(text: str, base: Path = Path(".")) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("line 1: top level must be an object")
    n = raw.get("n_qubits")
    if not isinstance(n, int) or not 2 <= n <= 8:
        _fail(text, "n_qubits", "expected an integer in 2..8")
    site_A = _parse_site(text, "A", raw.get("A"), n)
    site_B = _parse_site(text, "B", raw.get("B"), n)
    if site_A[1] == site_B[1]:
        _fail(text, "B", "A and B must sit on distinct sites")
    shots = raw.get("shots", "exact")
    if shots != "exact" and not (isinstance(shots, int) and shots >= 1):
        _fail(text, "shots", "expected \"exact\" or a positive integer")
    outputs = raw.get("outputs", ["otoc", "qpd", "correlators", "nonclassicality"])
    for o in outputs:
        if o not in OUTPUTS:
            _fail(text, "outputs", f"unknown output {o!r}")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        _fail(text, "seed", "expected a non-negative integer")
    return ExperimentConfig(
        n_qubits=n,
        hamiltonian=_parse_hamiltonian(text, n, raw.get("hamiltonian", {"preset": "TFIM_longitudinal"})),
        site_A=site_A,
        site_B=site_B,
        state=_parse_state(text, raw.get("state"), n, base),
        time_grid=_parse_times(text, raw.get("time_grid")),
        strengths=_parse_strengths(text, raw.get("strengths")),
        shots=shots,
        seed=seed,
        outputs=list(outputs),
        raw=raw,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text, path.parent)


def resolve_strengths(config: ExperimentConfig):
    """``(strengths4, strengths3)``; "optimal" uses the Re p(0,0,0,0) optimum."""
    if config.strengths != "optimal":
        return config.strengths
    re = minimize(QpdTarget((0, 0, 0, 0), "re")).argmin.as_tuple()
    im = minimize(QpdTarget((0, 0, 0, 0), "im")).argmin.as_tuple()[:3]
    return re, im


def _row_exact(rho, A, B_t, s4, s3) -> dict:
    c = extract_correlators(rho, A, B_t, s4, s3)
    c.check()
    q = assemble_qpd(c)
    return _row(c, q)


def _row_sampled(rho, A, B_t, s4, s3, shots, seed, index) -> dict:
    info = sample_sequence(rho, otoc_sequence(A, B_t, s4), shots, seed, stream=2 * index)
    non = sample_sequence(
        rho, otoc_sequence(A, B_t, s3, Variant.NONINFO_FIRST3), shots, seed, stream=2 * index + 1
    )
    est = qpd_from_shots(info, non, s4, s3)

    def avg(records, name, angles):
        n = Xi(name).length
        marg = _marginal(records, n)
        return empirical_average(marg, build_assignment(name, angles[:n])).mean

    c = CorrelatorSet(
        expA=avg(info, Xi.A, s4),
        expB=avg(info, Xi.B, s4),
        reBA=avg(info, Xi.AB, s4),
        imBA=avg(non, Xi.AB, s3),
        expBAB=avg(info, Xi.BAB, s4),
        expABA=avg(info, Xi.ABA, s4),
        reBABA=avg(info, Xi.RE_BABA3, s4),
        imBABA=avg(non, Xi.IM_BABA3, s3),
    )
    row = _row(c, est.qpd)
    row.update(zip(ERR_COLUMNS, np.concatenate([est.re_err.reshape(16), est.im_err.reshape(16)])))
    return row


def _marginal(records, n):
    acc = {}
    for r in records:
        acc[r.outcomes[:n]] = acc.get(r.outcomes[:n], 0) + r.weight
    return [ShotRecord(k, v) for k, v in sorted(acc.items())]


def _row(c: CorrelatorSet, q) -> dict:
    row = {"reF": q.otocF.real, "imF": q.otocF.imag, "C": q.commutatorC, "N": q.nonclassicalityN}
    row.update(zip(CORRELATORS, c.as_array()))
    row.update(zip(QPD_RE, q.flat.real))
    row.update(zip(QPD_IM, q.flat.imag))
    return row


def _observables(config: ExperimentConfig):
    n = config.n_qubits
    A = pauli_on_site(config.site_A[0], config.site_A[1], n)
    B = pauli_on_site(config.site_B[0], config.site_B[1], n)
    spectrum = Spectrum(build_hamiltonian(config.hamiltonian))
    return A, B, spectrum


def run_experiment(config: ExperimentConfig, threads: int = 1) -> tuple[list[dict], tuple]:
    """One row per time point, in time-grid order."""
    A, B, spectrum = _observables(config)
    s4, s3 = resolve_strengths(config)
    rho = config.state

    def point(item):
        index, t = item
        B_t = heisenberg(B, spectrum.propagator(t))
        if config.shots == "exact":
            row = _row_exact(rho, A, B_t, s4, s3)
        else:
            row = _row_sampled(rho, A, B_t, s4, s3, config.shots, config.seed, index)
        return {"t": float(t), **row}

    items = list(enumerate(config.time_grid))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(point, items))
    else:
        rows = [point(i) for i in items]
    return rows, (s4, s3)


def optimize_all(tolerance: float = 1e-5) -> list[dict]:
    rows = []
    for target in all_targets():
        res = minimize(target, tolerance)
        angles = res.argmin.as_tuple()
        rows.append(
            {
                "target": str(target),
                "part": target.part,
                "bits": "".join(map(str, target.bits)),
                **dict(zip(("phi_a", "phi_b", "phi_a2", "phi_b2"), angles)),
                **{f"{k}_half_pi": v / HALF_PI for k, v in zip(("phi_a", "phi_b", "phi_a2", "phi_b2"), angles)},
                "objective": res.objective,
            }
        )
    return rows


def oracle_check(config: ExperimentConfig) -> dict:
    """Maximum deviation of every estimator from its brute-force counterpart."""
    A, B, spectrum = _observables(config)
    s4, s3 = resolve_strengths(config)
    rho = config.state
    worst = {"qpd": 0.0, "nested_informative": 0.0, "nested_noninformative": 0.0}
    for t in config.time_grid:
        B_t = heisenberg(B, spectrum.propagator(t))
        q = assemble_qpd(extract_correlators(rho, A, B_t, s4, s3))
        worst["qpd"] = max(worst["qpd"], float(np.abs(q.values - qpd_direct(rho, A, B_t).values).max()))
        obs = (A, B_t, A, B_t)
        for variant, key, outer in (
            (Variant.ALL_INFORMATIVE, "nested_informative", Outer.ANTICOMMUTATOR),
            (Variant.NONINFO_FIRST4, "nested_noninformative", Outer.COMMUTATOR),
        ):
            angles = s4 if variant is Variant.ALL_INFORMATIVE else (*s3, HALF_PI)
            dist = joint_distribution(rho, otoc_sequence(A, B_t, angles, variant))
            for n in range(1, 5):
                marg = dist.marginal(n)
                grid = np.indices((2,) * n)
                alpha = np.prod([(1 - 2 * grid[i]) / np.sin(marg.sequence[i].strength) for i in range(n)], axis=0)
                got = float(np.sum(alpha * marg.probs))
                want = nested_correlator(rho, obs[:n], outer)
                worst[key] = max(worst[key], abs(got - want))
    worst["max"] = max(worst.values())
    return worst


def _fmt(x) -> str:
    return format(x, ".17g") if isinstance(x, float) else str(x)


def _write_table(path: Path, rows: list[dict], columns: list[str], fmt: str) -> None:
    if fmt == "json":
        path.with_suffix(".json").write_text(
            json.dumps([{c: r[c] for c in columns} for r in rows], indent=1) + "\n"
        )
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    path.with_suffix(".csv").write_text(buf.getvalue())


def _manifest(config: ExperimentConfig, strengths, command: str) -> dict:
    s4, s3 = strengths if strengths else (None, None)
    return {
        "command": command,
        "config": config.raw,
        "seed": config.seed,
        "strengths": None if s4 is None else {
            "informative": list(s4),
            "noninformative": list(s3),
            "informative_half_pi": [p / HALF_PI for p in s4],
            "noninformative_half_pi": [p / HALF_PI for p in s3],
        },
        "versions": {"otocqpd": __version__, "numpy": np.__version__, "python": platform.python_version()},
    }


def _cmd_run(config: ExperimentConfig, args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, strengths = run_experiment(config, args.threads)
    sampled = config.shots != "exact"
    columns = COLUMNS + (ERR_COLUMNS if sampled else [])
    _write_table(out / "results", rows, columns, args.format)
    products = {
        "otoc": ["t", "reF", "imF", "C"],
        "nonclassicality": ["t", "N"],
        "correlators": ["t", *CORRELATORS],
        "qpd": ["t", *QPD_RE, *QPD_IM] + (ERR_COLUMNS if sampled else []),
    }
    for name in config.outputs:
        if name in products:
            _write_table(out / name, rows, products[name], args.format)
    if "optimization" in config.outputs:
        _write_table(out / "optimization", optimize_all(), _OPT_COLUMNS, args.format)
    (out / "manifest.json").write_text(json.dumps(_manifest(config, strengths, "run"), indent=1) + "\n")
    return EXIT_OK


def _cmd_optimize(config: ExperimentConfig, args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = optimize_all()
    _write_table(out / "optimization", rows, _OPT_COLUMNS, args.format)
    (out / "manifest.json").write_text(json.dumps(_manifest(config, None, "optimize"), indent=1) + "\n")
    for r in rows:
        print(
            f"{r['target']}: phi/(pi/2) = "
            + ", ".join(f"{r[k + '_half_pi']:.4f}" for k in ("phi_a", "phi_b", "phi_a2", "phi_b2"))
            + f"  max|value| = {r['objective']:.6f}"
        )
    return EXIT_OK


def _cmd_validate(config: ExperimentConfig, args) -> int:
    print(
        f"ok: {config.n_qubits} qubits, A={''.join(map(str, config.site_A))}, "
        f"B={''.join(map(str, config.site_B))}, {len(config.time_grid)} time points, shots={config.shots}"
    )
    return EXIT_OK


def _cmd_oracle_check(config: ExperimentConfig, args) -> int:
    worst = oracle_check(config)
    for k, v in worst.items():
        print(f"{k}: max deviation {v:.3e}")
    return EXIT_OK if worst["max"] <= 1e-9 else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="otocqpd", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in (
        ("run", _cmd_run),
        ("optimize", _cmd_optimize),
        ("validate", _cmd_validate),
        ("oracle-check", _cmd_oracle_check),
    ):
        p = sub.add_parser(name)
        p.add_argument("config")
        p.add_argument("--out", default="out")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be non-negative")
            config.seed = args.seed
            config.raw = {**config.raw, "seed": args.seed}
        return args.func(config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FloatingPointError as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
