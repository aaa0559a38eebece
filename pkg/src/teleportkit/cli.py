"""``teleportkit`` command line.

Exit codes: 0 success, 1 verification mismatch, 2 usage or schema error.
When ``--out`` is omitted and ``TELEPORTKIT_OUT`` names a directory, reports
are written there under a default file name; otherwise they go to stdout.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import bases, circuits, correlations, tables, teleport
from .formatting import dumps_json, fmt_csv_float
from .statevector import StateVector, basis_ket

OUT_ENV = "TELEPORTKIT_OUT"
EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None, default_name: str) -> None:
    if out is None and os.environ.get(OUT_ENV):
        out = str(Path(os.environ[OUT_ENV]) / default_name)
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _parse_particles(text: str | None):
    if not text:
        return None
    try:
        return tuple(int(p) for p in text.replace(" ", "").split(","))
    except ValueError:
        raise UsageError(f"--particles expects a comma list of integers, got {text!r}") from None


def _amplitudes_from_json(data) -> StateVector:
    """Accepts ``[re, ...]``, ``[[re, im], ...]``, ``{"amplitudes": ...}`` or golden entries."""
    if isinstance(data, dict) and "amplitudes" in data and "n_qubits" in data \
            and data["amplitudes"] and isinstance(data["amplitudes"][0], dict):
        return bases.decode_state(data["amplitudes"], int(data["n_qubits"]))
    if isinstance(data, dict):
        data = data.get("amplitudes")
    try:
        a = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise UsageError("amplitudes must be numbers or [re, im] pairs") from None
    if a.ndim == 2 and a.shape[1] == 2:
        a = a[:, 0] + 1j * a[:, 1]
    if a.ndim != 1:
        raise UsageError("amplitudes must be a flat list")
    try:
        return StateVector(a.astype(complex))
    except ValueError as e:
        raise UsageError(str(e)) from None


def _resolve_state(spec: str) -> StateVector:
    """Catalog label, bitstring, or a JSON file of amplitudes."""
    if set(spec) <= {"0", "1"}:
        return basis_ket(spec)
    if spec.endswith(".json") or os.path.exists(spec):
        return _amplitudes_from_json(json.loads(_read(spec)))
    try:
        return bases.catalog_state(spec)
    except (KeyError, ValueError, IndexError):
        raise UsageError(f"unknown state {spec!r}") from None


# -- subcommands ---------------------------------------------------------------

def cmd_tables(args) -> int:
    ids = tables.TABLE_IDS if args.id.lower() == "all" else (args.id.upper(),)
    status = EXIT_OK
    for tid in ids:
        try:
            rep = tables.build_table(tid)
        except KeyError as e:
            raise UsageError(str(e.args[0])) from None
        text = {"csv": rep.to_csv, "json": rep.to_json, "text": rep.to_text}[args.format]()
        out = args.out
        if out and len(ids) > 1:
            out = str(Path(out) / f"table_{tid}.{args.format}")
        _emit(text, out, f"table_{tid}.{args.format}")
        if not rep.ok:
            status = EXIT_MISMATCH
            for line in rep.mismatches():
                print(line, file=sys.stderr)
    return status


def _load_protocol(spec: str) -> teleport.Protocol:
    catalog = {**teleport.all_protocols(), **circuits.builtin_networks()}
    if spec in catalog:
        return catalog[spec]
    try:
        return teleport.load_protocol(_read(spec))
    except teleport.ProtocolSchemaError as e:
        raise UsageError(f"{spec}: schema error in {e}") from None


def cmd_teleport(args) -> int:
    proto = _load_protocol(args.protocol)
    if args.input is not None:
        unknown = _resolve_state(args.input)
        if unknown.n_qubits != proto.unknown_arity:
            raise UsageError(f"input has {unknown.n_qubits} qubits, protocol teleports "
                             f"{proto.unknown_arity}")
        rep = teleport.run(proto, unknown.normalize(), args.seed)
        text = rep.to_json() if args.format == "json" else rep.to_text()
        ok = rep.success
        nulls = rep.null_outcome_count
    else:
        summary = teleport.run_random(proto, args.random, args.seed, keep_reports=False)
        fa = teleport.failure_analysis(proto, args.random, args.seed)
        cmap = teleport.correction_map(proto)
        payload = {
            "protocol": proto.name,
            "version": __version__,
            "seed": args.seed,
            "n_inputs": args.random,
            "expect_failure": proto.expect_failure,
            "success": summary.all_success,
            "min_fidelity": summary.min_fidelity,
            "max_probability_deviation": summary.max_probability_deviation,
            "max_total_probability_error": summary.max_total_probability_error,
            "null_outcome_count": fa.null_count,
            "null_outcomes": fa.null_labels,
            "success_probability": fa.success_probability,
            "corrections": {k: (v.word if v else None) for k, v in cmap.items()},
        }
        if args.format == "json":
            text = dumps_json(payload)
        else:
            items = [(k, v, k in fa.null_labels) for k, v in cmap.items()]
            text = (f"protocol {proto.name}: {args.random} random inputs, seed {args.seed}\n"
                    f"min fidelity {summary.min_fidelity:.12g}, "
                    f"null outcomes {fa.null_count}\n"
                    + teleport.grouped_corrections_text(items, proto.bob_qubits))
        ok = summary.all_success
        nulls = fa.null_count
    _emit(text, args.out, f"teleport_{proto.name}.{'json' if args.format == 'json' else 'txt'}")
    if proto.expect_failure:
        return EXIT_OK if nulls > 0 else EXIT_MISMATCH
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_correlate(args) -> int:
    if bool(args.state) == bool(args.amplitudes):
        raise UsageError("give exactly one of --state or --amplitudes")
    if args.state:
        s, label = _resolve_state(args.state), args.state
    else:
        s, label = _amplitudes_from_json(json.loads(_read(args.amplitudes))), "amplitudes"
    parts = _parse_particles(args.particles)
    if parts and (max(parts) > s.n_qubits or min(parts) < 1):
        raise UsageError(f"--particles outside a {s.n_qubits}-qubit state")
    try:
        table = correlations.nonzero_scan(s.normalize(), parts, label,
                                          keep_zeros=not args.nonzero_only)
    except ValueError as e:
        raise UsageError(str(e)) from None
    text = table.to_json() if args.format == "json" else table.to_csv()
    _emit(text, args.out, f"correlate_{label.replace('/', '_')}.{args.format}")
    return EXIT_OK


def cmd_basis(args) -> int:
    if args.action == "dump":
        try:
            b = bases.family(args.family)
        except ValueError as e:
            raise UsageError(str(e)) from None
        parts = _parse_particles(args.particles)
        if parts:
            if len(parts) != b.n_qubits:
                raise UsageError(f"{b.name} needs {b.n_qubits} particle labels")
            b = b.relabel(parts)
        _emit(bases.to_golden(b), args.out, f"basis_{b.name}.json")
        return EXIT_OK
    try:
        chk = bases.check_golden(_read(args.file))
    except (KeyError, ValueError, json.JSONDecodeError) as e:
        raise UsageError(f"{args.file}: not a basis file ({e})") from None
    text = (f"{chk.family}: {chk.n_members} members, normalized={chk.normalized}, "
            f"orthonormal={chk.orthonormal}, complete={chk.complete}, "
            f"max off-diagonal {chk.max_offdiag:.3g}\n")
    _emit(text, args.out, f"check_{chk.family}.txt")
    return EXIT_OK if chk.ok else EXIT_MISMATCH


def cmd_circuit(args) -> int:
    try:
        c = circuits.load_circuit(_read(args.file))
    except (ValueError, json.JSONDecodeError) as e:
        raise UsageError(f"{args.file}: {e}") from None
    s = basis_ket("0" * c.n_qubits) if args.input is None else _resolve_state(args.input)
    if s.n_qubits != c.n_qubits:
        raise UsageError(f"input has {s.n_qubits} qubits, circuit has {c.n_qubits}")
    s = s.normalize()
    outs = circuits.measure_outcomes(c, s)
    counts = circuits.sample(c, s, args.seed, args.shots) if args.shots else {}
    rows = [{"bits": o.bits, "probability": o.probability, "count": counts.get(o.bits, 0)}
            for o in outs]
    if args.format == "json":
        text = dumps_json({"version": __version__, "seed": args.seed, "shots": args.shots,
                           "measured": list(c.measure or range(1, c.n_qubits + 1)),
                           "outcomes": rows})
    else:
        lines = ["bits,probability,count"]
        lines += [f"{r['bits']},{fmt_csv_float(r['probability'])},{r['count']}" for r in rows]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out, f"circuit.{args.format}")
    return EXIT_OK


def cmd_tracing(args) -> int:
    entries = tables.tracing_report()
    if args.format == "json":
        text = dumps_json(tables.tracing_report_dict(entries))
    else:
        text = "".join(e.describe() + "\n" for e in entries)
    _emit(text, args.out, f"tracing.{args.format}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="teleportkit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"teleportkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tables", help="recompute a reference table and check it")
    t.add_argument("--id", required=True, help="I..XII, or 'all'")
    t.add_argument("--format", choices=("csv", "json", "text"), default="text")
    t.add_argument("--out", help="output file (a directory with --id all)")
    t.set_defaults(func=cmd_tables)

    tp = sub.add_parser("teleport", help="run a protocol file or catalog protocol")
    tp.add_argument("protocol", help="protocol JSON file or catalog name")
    grp = tp.add_mutually_exclusive_group()
    grp.add_argument("--input", help="unknown state: label, bitstring or amplitude file")
    grp.add_argument("--random", type=int, default=100, help="number of random inputs")
    tp.add_argument("--seed", type=int, default=0)
    tp.add_argument("--format", choices=("json", "text"), default="json")
    tp.add_argument("--out")
    tp.set_defaults(func=cmd_teleport)

    c = sub.add_parser("correlate", help="full correlation-coefficient scan of a state")
    c.add_argument("--state", help="catalog label (chi.1, eq21.5, eq5, ...) or bitstring")
    c.add_argument("--amplitudes", help="JSON file of amplitudes")
    c.add_argument("--particles", help="comma list, default all qubits")
    c.add_argument("--nonzero-only", action="store_true")
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.add_argument("--out")
    c.set_defaults(func=cmd_correlate)

    b = sub.add_parser("basis", help="dump or check basis golden files")
    bsub = b.add_subparsers(dest="action", required=True)
    bd = bsub.add_parser("dump")
    bd.add_argument("--family", required=True)
    bd.add_argument("--particles")
    bd.add_argument("--out")
    bc = bsub.add_parser("check")
    bc.add_argument("file")
    bc.add_argument("--out")
    b.set_defaults(func=cmd_basis)

    cr = sub.add_parser("circuit", help="run a circuit file")
    crsub = cr.add_subparsers(dest="action", required=True)
    run = crsub.add_parser("run")
    run.add_argument("--file", required=True)
    run.add_argument("--input", help="bitstring, catalog label or amplitude file")
    run.add_argument("--shots", type=int, default=0)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--out")
    cr.set_defaults(func=cmd_circuit)

    tr = sub.add_parser("tracing", help="reduced-state entanglement report")
    tr.add_argument("--format", choices=("text", "json"), default="text")
    tr.add_argument("--out")
    tr.set_defaults(func=cmd_tracing)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
