"""``qlr`` command-line front end.

Exit codes:

    0  success
    2  usage error (argparse)
    3  input parse / format error
    4  conditioning error (singular, rank-deficient or kappa above bound)
    5  postselection failure
    6  dimension mismatch
    7  fidelity below --threshold (verify)
    8  non-unitary target
    9  system not encodable by the circuit (unphysical rotation, eigenvalues off the clock grid)
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, numerics, regression
from .gloa import (
    DEFAULT_GATE_SET,
    GeneString,
    GloaParams,
    InvalidGeneError,
    build_pauli_exponential_circuit,
    circuit_to_gene_string,
    evolve,
    phase_aligned_distance,
    refine_angles,
    string_to_unitary,
    trace_fidelity,
)
from .hhl import EigenvalueEncodingError, HHLConfig, HHLResult, UnphysicalRotationError, run_hhl, verify_qpe
from .qsim import NonUnitaryError, PostselectionError, gate_matrix

log = logging.getLogger("qlr")

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_CONDITIONING = 4
EXIT_POSTSELECTION = 5
EXIT_DIMENSION = 6
EXIT_THRESHOLD = 7
EXIT_NON_UNITARY = 8
EXIT_UNENCODABLE = 9

MODES = {"exact": "exact-spectral", "gene-string": "gene-string", "pauli-circuit": "exact-pauli-circuit"}
ROTATIONS = {"arcsin": "exact-arcsin", "paper": "paper-small-angle"}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunReport:
    fingerprint: str
    config: dict
    classical: dict
    hhl: dict
    timings_ms: dict
    seed: int
    version: str = __version__
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "config": self.config,
            "classical": self.classical,
            "hhl": self.hhl,
            "timings_ms": self.timings_ms,
            "seed": self.seed,
            "version": self.version,
            "extra": self.extra,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, obj: dict) -> RunReport:
        missing = [k for k in ("fingerprint", "config", "classical", "hhl", "timings_ms", "seed") if k not in obj]
        if missing:
            raise ValueError(f"report is missing fields: {', '.join(missing)}")
        return cls(obj["fingerprint"], obj["config"], obj["classical"], obj["hhl"], obj["timings_ms"],
                   obj["seed"], obj.get("version", __version__), obj.get("extra", {}))

    @classmethod
    def loads(cls, text: str) -> RunReport:
        return cls.from_json(json.loads(text))

    def result(self) -> HHLResult:
        return HHLResult.from_json(self.hhl)


def _setup_logging() -> None:
    level = os.environ.get("QLR_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _sha256(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _entropy_seed() -> int:
    return int(np.random.SeedSequence().entropy % 2 ** 63)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    seed = _entropy_seed()
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_PARSE) from None


def _load_matrix(path: str) -> np.ndarray:
    try:
        return numerics.matrix_from_json(json.loads(_read_text(path)))
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


def _load_gene_string(path: str) -> GeneString:
    try:
        return GeneString.loads(_read_text(path))
    except InvalidGeneError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


# -- configuration --------------------------------------------------------------------

_CONFIG_KEYS = ("mode", "shots", "seed", "r", "clock_qubits", "rotation", "C", "evolution_time",
                "string", "kappa_bound", "intercept")


def _merge_config(args) -> None:
    """Fill flags the user did not give from ``--config``; flags win."""
    if not getattr(args, "config", None):
        return
    try:
        cfg = json.loads(_read_text(args.config))
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.config}: {exc}", EXIT_PARSE) from None
    if not isinstance(cfg, dict):
        raise CliError(f"{args.config}: config must be a JSON object", EXIT_PARSE)
    unknown = set(cfg) - set(_CONFIG_KEYS)
    if unknown:
        raise CliError(f"{args.config}: unknown keys {sorted(unknown)}", EXIT_PARSE)
    for key, value in cfg.items():
        if getattr(args, key, None) in (None, False):
            setattr(args, key, value)


def _hhl_config(args, seed: int) -> HHLConfig:
    mode = MODES[args.mode or "exact"]
    strings = tuple(_load_gene_string(p) for p in (args.string or ()))
    if mode == "gene-string" and not strings:
        raise CliError("--mode gene-string needs at least one --string", EXIT_PARSE)
    try:
        return HHLConfig(
            clock_qubits=args.clock_qubits if args.clock_qubits is not None else 4,
            evolution_time=args.evolution_time if args.evolution_time is not None else 2 * math.pi,
            r=args.r if args.r is not None else 6,
            C=args.C,
            unitary_mode=mode,
            rotation_mode=ROTATIONS[args.rotation or "arcsin"],
            shots=None if args.exact_statevector else args.shots,
            seed=seed,
            gene_strings=strings,
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None


# -- subcommands ----------------------------------------------------------------------

def _load_problem(args) -> tuple[regression.NormalEquations, str]:
    sources = [s for s in (args.dataset, args.system, args.builtin) if s]
    if len(sources) != 1:
        raise CliError("give exactly one of --dataset, --system or --builtin", EXIT_PARSE)
    if args.builtin:
        ne = regression.paper_system()
        return ne, _sha256(json.dumps(ne.to_json(), sort_keys=True).encode())
    path = args.dataset or args.system
    text = _read_text(path)
    try:
        if args.dataset:
            ds = regression.load_dataset(text)
            if args.intercept:
                ds = ds.with_intercept()
            ne = regression.build_normal_equations(ds)
        else:
            ne = regression.NormalEquations.from_json(json.loads(text))
    except (regression.DatasetParseError, ValueError, KeyError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    return ne, _sha256(text.encode())


def cmd_solve(args) -> int:
    _merge_config(args)
    seed = _resolve_seed(args)
    timings = {}
    t0 = time.perf_counter()
    ne, fingerprint = _load_problem(args)
    timings["load"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    bound = args.kappa_bound if args.kappa_bound is not None else 16.0
    try:
        cond = regression.validate_conditioning(ne, bound)
        classical = regression.solve_least_squares_classical(ne)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_CONDITIONING) from None
    if not cond.well_conditioned:
        raise CliError(f"condition number {cond.kappa:.6g} exceeds bound {bound:g}", EXIT_CONDITIONING)
    timings["classical"] = (time.perf_counter() - t0) * 1e3

    config = _hhl_config(args, seed)
    t0 = time.perf_counter()
    result = run_hhl(ne, config)
    timings["hhl"] = (time.perf_counter() - t0) * 1e3

    report = RunReport(
        fingerprint=fingerprint,
        config=config.to_json(),
        classical={
            "beta_hat": [float(x) for x in classical.beta_hat],
            "residual_norm": classical.residual_norm,
            "kappa": cond.kappa,
            "column_order": list(ne.column_order),
        },
        hhl=result.to_json(),
        timings_ms=timings,
        seed=seed,
    )
    _emit(report.dumps(), args.out)
    return EXIT_OK


def _approx_target(args) -> tuple[np.ndarray, np.ndarray | None]:
    """Target unitary, plus the Hermitian generator when one is known."""
    if args.target and args.builtin:
        raise CliError("give either --target or --builtin", EXIT_PARSE)
    theta = args.theta if args.theta is not None else 2 * math.pi / 16
    if args.builtin == "expA16":
        a = regression.PAPER_A
        return numerics.matrix_exp_i(a, theta), a
    if args.builtin == "cnot":
        return gate_matrix("CNOT", ()), None
    if args.target:
        return _load_matrix(args.target), None
    raise CliError("give --target or --builtin", EXIT_PARSE)


def cmd_approximate(args) -> int:
    target, generator = _approx_target(args)
    if not numerics.is_unitary(target, 1e-8):
        raise CliError("target matrix is not unitary", EXIT_NON_UNITARY)
    summary: dict = {}
    if args.method == "pauli":
        if generator is None:
            raise CliError("--method pauli needs --builtin expA16", EXIT_PARSE)
        theta = args.theta if args.theta is not None else 2 * math.pi / 16
        circ = build_pauli_exponential_circuit(generator, theta)
        gs = circuit_to_gene_string(circ, args.gate_set.split(",") if args.gate_set else DEFAULT_GATE_SET)
        summary.update(method="pauli", iterations=0)
    else:
        seed = _resolve_seed(args)
        params = GloaParams(
            n=args.groups, p=args.members, max_gates=args.max_gates,
            gate_set=tuple(args.gate_set.split(",")) if args.gate_set else DEFAULT_GATE_SET,
            fidelity_threshold=args.threshold, max_iterations=args.iterations, seed=seed,
        )
        res = evolve(target, params)
        gs = res.best
        summary.update(method="gloa", iterations=res.iterations, seed=seed)
    fid = trace_fidelity(string_to_unitary(gs), target)
    summary["fidelity"] = fid
    if args.refine:
        gs = refine_angles(gs, target)
        summary["refined_fidelity"] = trace_fidelity(string_to_unitary(gs), target)
    if args.out:
        Path(args.out).write_text(gs.dumps())
    else:
        sys.stdout.write(gs.dumps())
    print(json.dumps(summary, sort_keys=True), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def cmd_verify(args) -> int:
    gs = _load_gene_string(args.string)
    if args.builtin:
        theta = args.theta if args.theta is not None else 2 * math.pi / 16
        target = numerics.matrix_exp_i(regression.PAPER_A, theta)
    elif args.target:
        target = _load_matrix(args.target)
    else:
        raise CliError("give a target path or --builtin expA16", EXIT_PARSE)
    u = string_to_unitary(gs)
    if u.shape != target.shape:
        raise CliError(f"dimension mismatch: string is {u.shape[0]}x{u.shape[0]}, "
                       f"target is {target.shape[0]}x{target.shape[1]}", EXIT_DIMENSION)
    fid = trace_fidelity(u, target)
    dist = numerics.hilbert_schmidt_distance(u, target)
    aligned = phase_aligned_distance(u, target)
    print(json.dumps({"trace_fidelity": fid, "hilbert_schmidt_distance": dist,
                      "phase_aligned_distance": aligned}, sort_keys=True))
    return EXIT_OK if fid >= args.threshold else EXIT_THRESHOLD


def cmd_qpe(args) -> int:
    _merge_config(args)
    ne, _ = _load_problem(args)
    config = _hhl_config(args, args.seed if args.seed is not None else 0)
    dist = verify_qpe(ne.A, args.eigenvector, config, None if args.eigenvector else ne.b)
    _emit(json.dumps(dist, indent=1, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_emit_plot(args) -> int:
    text = _read_text(args.report)
    try:
        report = RunReport.loads(text)
        res = report.result()
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"{args.report}: {exc}", EXIT_PARSE) from None
    n = len(res.classical_reference)
    if n == 0 or len(res.rescaled_solution) != n:
        raise CliError(f"{args.report}: empty or inconsistent solution vectors", EXIT_PARSE)
    width = n.bit_length() - 1
    rows = [("basis_state", "predicted_amplitude", "simulated_amplitude")]
    for i in range(n):
        rows.append((format(i, f"0{width}b"), repr(float(res.classical_reference[i])),
                     repr(float(res.rescaled_solution[i]))))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        csv.writer(out, lineterminator="\n").writerows(rows)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------

def _add_hhl_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("input")
    src.add_argument("--dataset", help="CSV with header y,x1,...")
    src.add_argument("--system", help="normal-equations JSON {A, b, column_order}")
    src.add_argument("--builtin", choices=["paper"], help="the bundled 4x4 worked example")
    src.add_argument("--intercept", action="store_true", help="append an all-ones column to a dataset")
    p.add_argument("--mode", choices=sorted(MODES), help="controlled-U construction (default exact)")
    p.add_argument("--string", action="append", help="gene-string file; give 1 or clock-qubits of them")
    p.add_argument("--shots", type=int, help="sample this many shots instead of reading the statevector")
    p.add_argument("--exact-statevector", action="store_true", help="ignore --shots and read amplitudes")
    p.add_argument("--seed", type=int, help="RNG seed (entropy if omitted; echoed in the report)")
    p.add_argument("--r", type=int, help="rotation resolution; C = 8 pi / 2^r (default 6)")
    p.add_argument("--C", type=float, help="explicit rotation constant (overrides --r)")
    p.add_argument("--clock-qubits", type=int, help="clock register size (default 4)")
    p.add_argument("--evolution-time", type=float, help="t0 (default 2 pi)")
    p.add_argument("--rotation", choices=sorted(ROTATIONS), help="ancilla angle rule (default arcsin)")
    p.add_argument("--kappa-bound", type=float, help="largest accepted condition number (default 16)")
    p.add_argument("--config", help="JSON file with defaults for these flags")
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlr", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"qlr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="classical and HHL solve of a regression problem")
    _add_hhl_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("qpe", help="clock-register distribution after phase estimation")
    _add_hhl_flags(p)
    p.add_argument("--eigenvector", type=int, help="prepare the j-th eigenvector (1-based, ascending)")
    p.set_defaults(func=cmd_qpe)

    p = sub.add_parser("approximate", help="synthesize a gene string for a unitary")
    p.add_argument("--target", help="unitary matrix JSON")
    p.add_argument("--builtin", choices=["expA16", "cnot"])
    p.add_argument("--theta", type=float, help="evolution angle for expA16 (default 2 pi / 16)")
    p.add_argument("--method", choices=["gloa", "pauli"], default="gloa")
    p.add_argument("--groups", type=int, default=15)
    p.add_argument("--members", type=int, default=25)
    p.add_argument("--max-gates", type=int, default=20)
    p.add_argument("--gate-set", help="comma-separated gate kinds")
    p.add_argument("--iterations", type=int, default=10000)
    p.add_argument("--threshold", type=float, default=0.999, help="stop once fidelity reaches this")
    p.add_argument("--seed", type=int)
    p.add_argument("--refine", action="store_true", help="polish angles after the search")
    p.add_argument("--out", help="gene-string output path")
    p.set_defaults(func=cmd_approximate)

    p = sub.add_parser("verify", help="fidelity of a gene string against a target")
    p.add_argument("string", help="gene-string file")
    p.add_argument("target", nargs="?", help="unitary matrix JSON")
    p.add_argument("--builtin", choices=["expA16"])
    p.add_argument("--theta", type=float)
    p.add_argument("--threshold", type=float, default=0.999)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("emit-plot", help="CSV of predicted vs simulated amplitudes from a report")
    p.add_argument("report")
    p.add_argument("--out")
    p.set_defaults(func=cmd_emit_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"qlr: {exc}", file=sys.stderr)
        return exc.code
    except PostselectionError as exc:
        print(f"qlr: {exc}", file=sys.stderr)
        return EXIT_POSTSELECTION
    except (UnphysicalRotationError, EigenvalueEncodingError) as exc:
        print(f"qlr: {exc}", file=sys.stderr)
        return EXIT_UNENCODABLE
    except NonUnitaryError as exc:
        print(f"qlr: {exc}", file=sys.stderr)
        return EXIT_NON_UNITARY
    except numerics.DimensionError as exc:
        print(f"qlr: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except (numerics.NotHermitianError, regression.RankDeficientError) as exc:
        print(f"qlr: {exc}", file=sys.stderr)
        return EXIT_CONDITIONING
    except InvalidGeneError as exc:
        print(f"qlr: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
