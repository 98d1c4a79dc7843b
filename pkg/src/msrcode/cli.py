"""Command-line front end: ``msrcode <command> ...``.

Exit status: 0 success, 1 verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import checker, codec
from .codes import (
    CodeId,
    CodeSpec,
    ConstructionError,
    build_code,
    dumps,
    dumps_table,
    format_table1,
    loads,
    loads_table,
    minimal_field,
    table1_report,
    table_from_params,
)
from .gf import GF

DEFAULT_SEED = 20240101

CODE_NAMES = {
    "c1": CodeId.C1,
    "c2": CodeId.C2,
    "c3": CodeId.C3,
    "c4": CodeId.C4,
    "zigzag": CodeId.ZIGZAG,
    "longmds": CodeId.LONGMDS,
}


class UsageError(Exception):
    pass


def _load_spec(path: str) -> CodeSpec:
    return loads(Path(path).read_text())


def _field_for(code_id: CodeId, m: int, q: int | None):
    if q is not None:
        return GF(q)
    if code_id in (CodeId.ZIGZAG, CodeId.LONGMDS):
        return None
    return minimal_field(code_id, m)


def cmd_build(args: argparse.Namespace) -> int:
    code_id = CODE_NAMES[args.code]
    field = _field_for(code_id, args.m, args.q)
    table = None
    if args.coeffs:
        if field is None:
            raise UsageError("--coeffs for zigzag/longmds also needs --q")
        table = loads_table(Path(args.coeffs).read_text(), field)
    elif code_id in (CodeId.ZIGZAG, CodeId.LONGMDS):
        if field is None:
            result = checker.search_minimal_field(code_id, args.m)
        else:
            result = checker.search_coefficients(code_id, args.m, field)
        if not result.found:
            print(f"no coefficients found for {code_id.value} m={args.m} over GF({field.q})", file=sys.stderr)
            return 1
        field = result.field
        table = table_from_params(result.found[0])
    code = build_code(code_id, args.m, field, table)
    Path(args.out).write_text(dumps(code))
    print(f"wrote {code_id.value} m={code.m} k={code.k} q={code.field.q} to {args.out}")
    return 0


def cmd_encode(args: argparse.Namespace) -> int:
    code = _load_spec(args.spec)
    data = Path(args.input).read_bytes()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for shard in codec.encode(data, code):
        shard.write(out / f"node{shard.node_index:03d}.shard")
    print(f"encoded {len(data)} bytes into {code.n} shards in {out}")
    return 0


def _read_shards(paths: Sequence[str]) -> list[codec.Shard]:
    return [codec.Shard.read(p) for p in paths]


def cmd_reconstruct(args: argparse.Namespace) -> int:
    code = _load_spec(args.spec)
    data = codec.reconstruct(_read_shards(args.shards), code)
    Path(args.out).write_bytes(data)
    print(f"reconstructed {len(data)} bytes to {args.out}")
    return 0


def cmd_repair(args: argparse.Namespace) -> int:
    code = _load_spec(args.spec)
    shards = [s for s in _read_shards(args.shards) if s.node_index != args.failed]
    if args.failed <= code.k:
        transcript = codec.repair_systematic(args.failed, shards, code)
    else:
        transcript = codec.repair_parity(args.failed, [s for s in shards if s.node_index <= code.k], code)
    transcript.recovered.write(args.out)
    text = transcript.to_text()
    if args.transcript:
        Path(args.transcript).write_text(text + "\n")
    print(text)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    code = _load_spec(args.spec)
    reports = [checker.check_mds(code), checker.check_repair(code), checker.access_report(code), checker.update_report(code)]
    reports.append(checker.check_block_ranks(code))
    lines = [r.line() for r in reports]
    ok = all(r.passed for r in reports)
    if args.exhaustive:
        print(f"seed {args.seed}")
        rec = checker.verify_reconstruction_exhaustive(code, args.trials, args.seed)
        lines.append(rec.line())
        ok = ok and rec.passed
    print("\n".join(lines))
    return 0 if ok else 1


def cmd_search(args: argparse.Namespace) -> int:
    code_id = CODE_NAMES[args.code]
    result = checker.search_coefficients(code_id, args.m, GF(args.q), args.budget, args.all)
    status = "complete" if result.complete else "budget exhausted"
    print(f"# {code_id.value} m={args.m} q={args.q}: {len(result.found)} found ({status}, {result.explored} pair checks)")
    if not result.found:
        print("NONE")
        return 0
    for n, params in enumerate(result.found, start=1):
        print(f"# solution {n}")
        sys.stdout.write(dumps_table(table_from_params(params)))
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    codes = [_load_spec(p) for p in args.specs]
    print(format_table1(table1_report(codes)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msrcode", description="(k+2, k) MSR codes with alpha = 2^m")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a code and write its spec file")
    p.add_argument("--code", choices=sorted(CODE_NAMES), required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", type=int, help="field order (default: smallest valid)")
    p.add_argument("--coeffs", help="coefficient table file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("encode", help="encode a file into n shards")
    p.add_argument("--spec", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("reconstruct", help="rebuild a file from any k shards")
    p.add_argument("--spec", required=True)
    p.add_argument("--shards", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("repair", help="regenerate one failed node")
    p.add_argument("--spec", required=True)
    p.add_argument("--failed", type=int, required=True)
    p.add_argument("--shards", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--transcript")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("verify", help="run the MDS, repair, access and update checks")
    p.add_argument("--spec", required=True)
    p.add_argument("--exhaustive", action="store_true", help="also round-trip random files through every k-subset")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="search coefficient assignments over a field")
    p.add_argument("--code", choices=sorted(CODE_NAMES), required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--all", action="store_true")
    p.add_argument("--budget", type=int, default=1_000_000, help="maximum pair checks")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("report", help="print k, k_A, k_U, k_A&U and q per spec")
    p.add_argument("--specs", nargs="+", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, UsageError, ConstructionError) as exc:
        print(f"msrcode: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
