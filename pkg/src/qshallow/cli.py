"""Command-line front end: compile, depth, bench.

Exit codes: 0 success, 1 parse/usage error, 2 verification failure, 3 I/O
error.  Reports are JSON; benchmark output is CSV whose first line records the
tool version and the angle-stream identifier.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

from . import __version__
from .bench import (
    AnsatzSpec,
    RNG_IDENTIFIER,
    gen_ansatz,
    gen_cx_chain,
    gen_cz_chain,
    gen_ghz_standard,
)
from .ghz import GhzMode, apply_ghz_pass
from .ir import Circuit, stats
from .pipeline import ChainMode, CompileResult, PassConfig, VerificationError, compile_circuit
from .qasm import ParseError, emit, parse

CSV_COLUMNS = [
    "name", "n", "reps", "variant",
    "depth_before", "depth_after",
    "gates_before", "gates_after",
    "measures_before", "measures_after",
    "relative_depth",
]


def _read_circuit(path: str) -> Circuit:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def _decision_summary(decision) -> dict:
    cand = decision.candidate
    return {
        "kind": cand.kind.value,
        "start_index": cand.start_index,
        "gates": len(cand.gate_indices),
        "qubits": list(cand.qubit_seq),
        "depth_before": decision.depth_before,
        "depth_after": decision.depth_after,
        "applied": decision.applied,
    }


def _report(input_circuit: Circuit, result: CompileResult) -> dict:
    input_stats = stats(input_circuit)
    output_stats = stats(result.circuit)
    return {
        "input_stats": input_stats.as_dict(),
        "output_stats": output_stats.as_dict(),
        "ghz_sites_found": result.ghz_sites_found,
        "ghz_sites_replaced": result.ghz_sites_replaced,
        "chains_found": result.chains_found,
        "chains_applied": result.chains_applied,
        "decisions": [_decision_summary(d) for d in result.decisions],
        "verified": result.verified,
        "relative_depth": input_stats.depth - output_stats.depth,
    }


def cmd_compile(args: argparse.Namespace) -> int:
    try:
        circuit = _read_circuit(args.infile)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    config = PassConfig(
        ghz_mode=GhzMode(args.ghz),
        chain_mode=ChainMode(args.chains),
        min_chain_gates=args.min_chain_gates,
        depth_scope=args.depth_scope,
        cz_to_cx=args.cz_to_cx,
        verify=args.verify,
        max_verify_qubits=args.max_verify_qubits,
    )
    passes = tuple(p.strip() for p in args.passes.split(",") if p.strip())
    try:
        result = compile_circuit(circuit, config, passes=passes)
    except VerificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        with open(args.outfile, "w", encoding="utf-8") as fh:
            fh.write(emit(result.circuit))
        if args.report:
            with open(args.report, "w", encoding="utf-8") as fh:
                json.dump(_report(circuit, result), fh, indent=2)
                fh.write("\n")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_depth(args: argparse.Namespace) -> int:
    try:
        circuit = _read_circuit(args.infile)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(stats(circuit).as_dict()))
    return 0


def _parse_range(text: str) -> range:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must be start:stop:step, got {text!r}")
    start, stop, step = (int(p) for p in parts)
    if step <= 0 or start < 2 or stop <= start:
        raise ValueError(f"invalid range {text!r}")
    return range(start, stop, step)


def _row(name: str, n: int, reps: int, variant: str, before, after) -> dict:
    return {
        "name": name, "n": n, "reps": reps, "variant": variant,
        "depth_before": before.depth, "depth_after": after.depth,
        "gates_before": before.gate_count, "gates_after": after.gate_count,
        "measures_before": before.measure_count, "measures_after": after.measure_count,
        "relative_depth": before.depth - after.depth,
    }


def ghz_suite_rows(ns: Sequence[int]) -> list[dict]:
    rows = []
    for n in ns:
        std = gen_ghz_standard(n)
        before = stats(std)
        rows.append(_row("ghz", n, 0, "standard", before, before))
        for mode in (GhzMode.ROBUST, GhzMode.PARALLEL):
            after = stats(apply_ghz_pass(std, mode))
            rows.append(_row("ghz", n, 0, mode.value, before, after))
    return rows


def chain_suite_rows(ns: Sequence[int], config: PassConfig) -> list[dict]:
    rows = []
    generators = {
        "forward": lambda n: gen_cx_chain(n, "forward"),
        "reverse": lambda n: gen_cx_chain(n, "reverse"),
        "cz": gen_cz_chain,
    }
    for n in ns:
        for variant, gen in generators.items():
            plain = gen(n)
            result = compile_circuit(plain, config, passes=("chains",))
            rows.append(_row("chain", n, 0, variant, stats(plain), stats(result.circuit)))
    return rows


def vqe_suite_rows(
    ns: Sequence[int],
    reps_list: Sequence[int],
    family: str,
    entanglement: str,
    seed: int,
    config: PassConfig,
) -> list[dict]:
    rows = []
    for reps in reps_list:
        for n in ns:
            spec = AnsatzSpec(family, n, reps, entanglement, seed)
            circuit = gen_ansatz(spec)
            result = compile_circuit(circuit, config, passes=("chains",))
            rows.append(
                _row(family, n, reps, entanglement, stats(circuit), stats(result.circuit))
            )
    return rows


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# qshallow {__version__} rng={RNG_IDENTIFIER}\n")
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        ns = list(_parse_range(args.n_range))
        reps_list = [int(r) for r in args.reps.split(",") if r]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    config = PassConfig(
        chain_mode=ChainMode(args.chains),
        min_chain_gates=args.min_chain_gates,
        depth_scope=args.depth_scope,
        cz_to_cx=args.cz_to_cx,
    )
    if args.suite == "ghz":
        rows = ghz_suite_rows(ns)
    elif args.suite == "chains":
        rows = chain_suite_rows(ns, config)
    else:
        rows = vqe_suite_rows(ns, reps_list, args.family, args.entanglement, args.seed, config)
    text = render_csv(rows)
    if args.csv:
        try:
            with open(args.csv, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qshallow",
        description="Depth-reducing optimizer for OpenQASM 2.0 circuits.",
    )
    parser.add_argument("--version", action="version", version=f"qshallow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_compile = sub.add_parser("compile", help="rewrite a circuit and emit QASM")
    p_compile.add_argument("--in", dest="infile", required=True, help="input QASM file")
    p_compile.add_argument("--out", dest="outfile", required=True, help="output QASM file")
    p_compile.add_argument("--ghz", choices=[m.value for m in GhzMode], default="off")
    p_compile.add_argument("--chains", choices=[m.value for m in ChainMode], default="off")
    p_compile.add_argument("--min-chain-gates", type=int, default=5)
    p_compile.add_argument("--depth-scope", type=int, default=100)
    p_compile.add_argument("--cz-to-cx", action="store_true",
                           help="lower rewritten CZ chains to H/CX form")
    p_compile.add_argument("--verify", action="store_true",
                           help="oracle-check every rewrite (small windows only)")
    p_compile.add_argument("--max-verify-qubits", type=int, default=10)
    p_compile.add_argument("--report", help="write a JSON compile report here")
    p_compile.add_argument("--passes", default="ghz,chains",
                           help="comma-separated pass order (default ghz,chains)")
    p_compile.set_defaults(func=cmd_compile)

    p_depth = sub.add_parser("depth", help="print depth/gate statistics as JSON")
    p_depth.add_argument("--in", dest="infile", required=True)
    p_depth.set_defaults(func=cmd_depth)

    p_bench = sub.add_parser("bench", help="run a benchmark suite, emit CSV")
    p_bench.add_argument("--suite", choices=["ghz", "chains", "vqe"], required=True)
    p_bench.add_argument("--n-range", required=True,
                         help="qubit counts as start:stop:step (stop exclusive)")
    p_bench.add_argument("--reps", default="1", help="comma-separated repetition counts (vqe)")
    p_bench.add_argument("--family", choices=["efficient_su2", "real_amplitudes", "two_local"],
                         default="two_local")
    p_bench.add_argument("--entanglement",
                         choices=["linear", "reverse_linear", "circular", "sca", "full"],
                         default="linear")
    p_bench.add_argument("--seed", type=int, default=7)
    p_bench.add_argument("--chains", choices=[m.value for m in ChainMode],
                         default="conservative")
    p_bench.add_argument("--min-chain-gates", type=int, default=5)
    p_bench.add_argument("--depth-scope", type=int, default=100)
    p_bench.add_argument("--cz-to-cx", action="store_true")
    p_bench.add_argument("--csv", help="write CSV here instead of stdout")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
