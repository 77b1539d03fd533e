"""Command-line front door.

One executable with subcommands that wire the library together: code
construction and inspection, schedule validation, circuit emission,
Monte Carlo runs, standalone decoding, and report rendering.  All
randomness flows from explicit --seed flags, so identical invocations
produce identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import experiment as ex
from . import protocol as pr
from .code_factory import build_25_4_3, build_34_4_3, build_generalized
from .css_code import CssCode, distance, permutation_logical_action, validate
from .decoder import DecodeProblem, bp_osd, logical_correction
from .f2linalg import vector_from_bits, vector_to_bits

DEFAULT_THREADS_ENV = "F2QEC_THREADS"


def _fail(msg: str) -> int:
    print(json.dumps({"error": msg}), file=sys.stderr)
    return 1


def _load_code(path: str) -> CssCode:
    with open(path) as fh:
        return CssCode.from_json(json.load(fh))


def _cmd_build_code(args) -> int:
    if args.family == "paper2543":
        code = build_25_4_3()
    elif args.family == "hgp":
        code = build_34_4_3()
    elif args.family == "generalized":
        code = build_generalized(args.l, args.c)
    else:
        return _fail(f"unknown family {args.family}")
    with open(args.out, "w") as fh:
        json.dump(code.to_json(), fh, indent=1, sort_keys=True)
    print(f"wrote {code.name} ({code.n} qubits, k={code.k}) to {args.out}")
    return 0


def _cmd_distance(args) -> int:
    code = _load_code(args.code)
    dx, dz = distance(code, args.wmax)
    fmt = lambda d: str(d) if d is not None else f">{args.wmax}"  # noqa: E731
    print(f"({fmt(dx)}, {fmt(dz)})")
    return 0


def _parse_cycles(notation: str, n: int) -> tuple[int, ...]:
    perm = list(range(n))
    body = notation.strip()
    if body in ("()", ""):
        return tuple(perm)
    for chunk in body.strip("()").split(")("):
        cyc = [int(tok) for tok in chunk.split()]
        for i, q in enumerate(cyc):
            perm[q] = cyc[(i + 1) % len(cyc)]
    return tuple(perm)


def _cmd_logical_action(args) -> int:
    code = _load_code(args.code)
    perm = _parse_cycles(args.perm, code.n)
    action = permutation_logical_action(code, perm)
    cnots = action.cnot_pairs()
    print(json.dumps({
        "x_action": action.x_matrix.row_strings(),
        "z_action": action.z_matrix.row_strings(),
        "cnots": None if cnots is None else [list(p) for p in cnots],
        "identity": action.is_identity(),
    }, indent=1))
    return 0


def _cmd_validate_schedule(args) -> int:
    code = _load_code(args.code)
    if args.schedule:
        with open(args.schedule) as fh:
            raw = json.load(fh)
        sched = pr.Schedule(tuple(tuple(o) for o in raw["x"]),
                            tuple(tuple(o) for o in raw["z"]))
    else:
        sched = pr.zigzag_schedule(code)
    report = pr.validate_schedule(code, sched)
    print(json.dumps({
        "ok": report.ok,
        "violations": [list(v) for v in report.violations],
    }, indent=1))
    return 0 if report.ok else 2


def _cmd_emit_circuit(args) -> int:
    if args.mode == "physical":
        circ = pr.physical_ghz_circuit(args.basis)
    elif args.mode == "logical":
        circ, _ = pr.logical_ghz_circuit(build_25_4_3(), args.basis)
    elif args.mode == "generalized":
        circ, _ = pr.generalized_ghz_circuit(build_generalized(args.l, args.c), args.basis)
    else:
        return _fail(f"unknown mode {args.mode}")
    with open(args.out, "w") as fh:
        fh.write(circ.to_text())
    rep = pr.circuit_report(circ)
    print(f"wrote {args.mode}/{args.basis} circuit to {args.out}: "
          f"{rep['data_qubits']} data, {rep['ancilla_qubits']} ancilla, "
          f"{rep['two_qubit_gates']} two-qubit gates")
    return 0


def _cmd_run_ghz(args) -> int:
    if not os.path.exists(args.config):
        return _fail(f"config file not found: {args.config}")
    cfg = ex.RunConfig.from_file(args.config)
    overrides = {}
    if args.mode:
        overrides["mode"] = args.mode
    if args.basis_shots:
        nz, nx = (int(t) for t in args.basis_shots.split(","))
        overrides["shots_z"] = nz
        overrides["shots_x"] = nx
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    if overrides:
        cfg = ex.RunConfig.from_dict({**cfg.to_dict(), **overrides})
    summary = ex.run(cfg, out_dir=args.out)
    print(ex.report({cfg.mode: summary}, "text"))
    return 0


def _cmd_decode(args) -> int:
    code = _load_code(args.code)
    h = code.hz if args.basis == "z" else code.hx
    priors = (args.prior,) * h.cols
    out_lines = []
    with open(args.syndromes) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            syndrome = vector_from_bits(row["syndrome"])
            result = bp_osd(DecodeProblem(h, priors, syndrome),
                            iters=args.bp_iters, depth=args.osd_depth)
            mask = logical_correction(code, result.error_estimate, args.basis)
            out_lines.append(json.dumps({
                "syndrome": row["syndrome"],
                "estimate": vector_to_bits(result.error_estimate, h.cols),
                "logical_mask": vector_to_bits(mask, code.k),
                "converged": result.converged,
                "method": result.method,
            }))
    with open(args.out, "w") as fh:
        fh.write("\n".join(out_lines) + "\n")
    print(f"decoded {len(out_lines)} syndromes to {args.out}")
    return 0


def _cmd_report(args) -> int:
    summaries = {}
    for mode in ex.MODES:
        path = os.path.join(args.dir, mode, "summary.json")
        if os.path.exists(path):
            with open(path) as fh:
                summaries[mode] = ex.RunSummary.from_json(json.load(fh))
    if not summaries:
        return _fail(f"no summaries under {args.dir}")
    print(ex.report(summaries, args.format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="f2qec",
                                description="quantum LDPC GHZ workbench")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-code", help="construct a code and write it as JSON")
    b.add_argument("--family", required=True, choices=["paper2543", "hgp", "generalized"])
    b.add_argument("--l", type=int, default=3)
    b.add_argument("--c", type=int, default=1)
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_build_code)

    d = sub.add_parser("distance", help="exhaustive distance search up to a weight cap")
    d.add_argument("code")
    d.add_argument("--wmax", type=int, required=True)
    d.set_defaults(func=_cmd_distance)

    la = sub.add_parser("logical-action",
                        help="logical CNOT action of a qubit permutation")
    la.add_argument("code")
    la.add_argument("--perm", required=True,
                    help="cycle notation, e.g. '(0 4)(1 3)'")
    la.set_defaults(func=_cmd_logical_action)

    vs = sub.add_parser("validate-schedule",
                        help="check a CNOT schedule for distance-reducing hook faults")
    vs.add_argument("code")
    vs.add_argument("--schedule", help="JSON file {x: [...], z: [...]}; default zigzag")
    vs.set_defaults(func=_cmd_validate_schedule)

    ec = sub.add_parser("emit-circuit", help="write a GHZ pipeline in the text IR")
    ec.add_argument("--mode", required=True, choices=["physical", "logical", "generalized"])
    ec.add_argument("--basis", required=True, choices=["z", "x"])
    ec.add_argument("--l", type=int, default=3)
    ec.add_argument("--c", type=int, default=1)
    ec.add_argument("--out", required=True)
    ec.set_defaults(func=_cmd_emit_circuit)

    rg = sub.add_parser("run-ghz", help="Monte Carlo GHZ experiment from a config file")
    rg.add_argument("--config", required=True)
    rg.add_argument("--mode")
    rg.add_argument("--basis-shots", help="Nz,Nx")
    rg.add_argument("--seed", type=int)
    rg.add_argument("--threads", type=int,
                    default=int(os.environ.get(DEFAULT_THREADS_ENV, "0")) or None)
    rg.add_argument("--out", help="output directory for summary and shot archive")
    rg.set_defaults(func=_cmd_run_ghz)

    dc = sub.add_parser("decode", help="decode a JSONL stream of syndromes")
    dc.add_argument("--code", required=True)
    dc.add_argument("--basis", required=True, choices=["z", "x"])
    dc.add_argument("--syndromes", required=True)
    dc.add_argument("--out", required=True)
    dc.add_argument("--prior", type=float, default=0.01)
    dc.add_argument("--bp-iters", type=int, default=10)
    dc.add_argument("--osd-depth", type=int, default=14)
    dc.set_defaults(func=_cmd_decode)

    rp = sub.add_parser("report", help="render summaries from a run directory")
    rp.add_argument("dir")
    rp.add_argument("--format", default="text", choices=["text", "json", "csv"])
    rp.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        return _fail(f"file not found: {exc.filename}")
    except (ValueError, KeyError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
