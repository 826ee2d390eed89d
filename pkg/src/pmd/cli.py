"""The ``pmd`` command line.

Exit codes: 0 on success, 1 for bad input (including usage errors), 2 when
a computation contradicts a structure theorem.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .decomp import decompose
from .errors import CounterexampleFound, InputError, NonBlockSummand, ParseError, RouteDisagreement
from .ingest import (GeneratorSpec, SampledFunction, interlevel_h0, random_interval,
                     random_module, sublevel_h0)
from .linalg import FieldSpec
from .module import dualize, validate
from .poset import Chain, TriangleRegion, ZigzagFence
from .structure import (barcode_chain, block_decompose, check_middle_exact,
                        extend_zigzag, verify_triangle_blocks, zigzag_barcode)
from .svg import render_svg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _field(doc: dict | None = None) -> FieldSpec:
    if doc and "field_char" in doc:
        return FieldSpec(doc["field_char"])
    return FieldSpec.from_env()


def _emit(args, result: dict, lines: list[str], counterexample: dict | None = None):
    for line in lines:
        print(line)
    out = getattr(args, "json", None)
    if out:
        seed = getattr(args, "seed", None)
        report = io.make_report(args.argv, seed, result, counterexample)
        io.write_text(out, io.serialize_report(report))


def _bar_lines(barcode) -> list[str]:
    tags = getattr(barcode, "tags", None)
    lines = []
    for k, (carrier, mult) in enumerate(barcode.bars):
        labels = [barcode.poset.labels[x] for x in sorted(carrier)]
        extra = f" [{','.join(sorted(tags[k] or ()))}]" if tags is not None else ""
        if isinstance(barcode.poset.shape, Chain):
            desc = f"[{min(carrier)}, {max(carrier)}]"
        elif barcode.poset.is_grid_like:
            (i0, i1), (j0, j1) = barcode.rectangles()[k]
            desc = f"[{i0}..{i1}] x [{j0}..{j1}] ({len(carrier)} points)"
        else:
            desc = " ".join(str(v) for v in labels)
        lines.append(f"{desc} x{mult}{extra}")
    return lines or ["(empty)"]


# --- commands ------------------------------------------------------------------

def cmd_validate(args) -> int:
    module = io.read_module(args.file)
    report = validate(module)
    print(f"ok: {module.poset.shape.__class__.__name__} module, dims {list(module.dims)}, p={module.p}"
          if report.ok else f"invalid: {report.message}")
    return 0 if report.ok else 1


def cmd_decompose(args) -> int:
    module = io.read_module(args.file)
    dec = decompose(module, seed=args.seed)
    if not dec.reconstructs():
        raise CounterexampleFound("summand witnesses do not reconstruct the identity")
    lines = [f"{len(dec)} summands"]
    for s in dec:
        lines.append(f"support {sorted(s.support)} dims {list(s.module.dims)} {s.certificate}")
    _emit(args, io.decomposition_payload(dec), lines)
    return 0


def cmd_barcode(args) -> int:
    bc = barcode_chain(io.read_module(args.file))
    _emit(args, io.barcode_payload(bc), _bar_lines(bc))
    return 0


def _blocks_of(module, seed):
    if isinstance(module.poset.shape, TriangleRegion):
        return verify_triangle_blocks(module, seed)
    return block_decompose(module, seed)


def cmd_blocks(args) -> int:
    module = io.read_module(args.file)
    try:
        blocks = _blocks_of(module, args.seed)
    except NonBlockSummand as exc:
        _emit(args, {}, [], {"kind": "NonBlockSummand", "carrier": sorted(exc.carrier)})
        raise
    _emit(args, io.barcode_payload(blocks), _bar_lines(blocks))
    return 0


def cmd_middle_exact(args) -> int:
    module = io.read_module(args.file)
    report = check_middle_exact(module)
    short = sum(s.short_exact for s in report.squares)
    if report.ok:
        print(f"middle exact on all {len(report.squares)} unit squares ({short} short exact)")
        return 0
    print(f"not middle exact at square {report.square}")
    return 1


def cmd_dualize(args) -> int:
    module = io.read_module(args.file)
    io.write_text(args.output, io.serialize_module(dualize(module)))
    return 0


def cmd_extend(args) -> int:
    module = io.read_module(args.file)
    io.write_text(args.output, io.serialize_module(extend_zigzag(module)))
    return 0


def cmd_zigzag(args) -> int:
    module = io.read_module(args.file)
    try:
        bc = zigzag_barcode(module, seed=args.seed)
    except RouteDisagreement as exc:
        _emit(args, {}, [], {"kind": "RouteDisagreement",
                             "generic": io.barcode_payload(exc.route_a),
                             "extension": io.barcode_payload(exc.route_b)})
        raise
    _emit(args, io.barcode_payload(bc), _bar_lines(bc))
    return 0


def _read_spec(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = io._loads(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if not isinstance(doc, dict):
        raise ParseError("generator spec must be a JSON object")
    return doc


_GEN_KEYS = {
    "intervals": {"poset", "carriers", "count", "scramble", "field_char"},
    "sublevel": {"values", "thresholds", "field_char"},
    "interlevel": {"values", "s_grid", "t_grid", "field_char"},
}


def _gen_carriers(doc, poset, rng):
    if "carriers" in doc:
        out = []
        for k, item in enumerate(doc["carriers"]):
            if isinstance(item, dict):
                extra = set(item) - {"carrier", "multiplicity"}
                if extra or "carrier" not in item:
                    raise ParseError("carrier entries are lists or {carrier, multiplicity}",
                                     key=f"carriers[{k}]")
                out.append((frozenset(item["carrier"]), int(item.get("multiplicity", 1))))
            elif isinstance(item, list):
                out.append((frozenset(item), 1))
            else:
                raise ParseError("carrier entries are lists or objects", key=f"carriers[{k}]")
        return out
    count = doc.get("count", 3)
    return [(random_interval(poset, rng), 1) for _ in range(int(count))]


def cmd_gen(args) -> int:
    doc = _read_spec(args.spec)
    extra = set(doc) - _GEN_KEYS[args.kind]
    if extra:
        raise ParseError(f"unknown keys {sorted(extra)}", key=sorted(extra)[0])
    field = _field(doc)
    if args.kind == "intervals":
        if "poset" not in doc:
            raise ParseError("missing key", key="poset")
        poset = io.poset_from_json(doc["poset"])
        rng = np.random.default_rng(args.seed)
        carriers = _gen_carriers(doc, poset, rng)
        spec = GeneratorSpec.of(poset, carriers, bool(doc.get("scramble", True)), args.seed, field)
        module = random_module(spec).module
    else:
        for k in ("values",) + (("thresholds",) if args.kind == "sublevel" else ("s_grid", "t_grid")):
            if k not in doc:
                raise ParseError("missing key", key=k)
        f = SampledFunction.of(doc["values"], doc.get("thresholds", ()),
                               doc.get("s_grid", ()), doc.get("t_grid", ()))
        module = sublevel_h0(f, field) if args.kind == "sublevel" else interlevel_h0(f, field)
    io.write_text(args.output, io.serialize_module(module))
    return 0


def cmd_plot(args) -> int:
    module = io.read_module(args.file)
    shape = module.poset.shape
    if isinstance(shape, Chain):
        result = barcode_chain(module)
    elif isinstance(shape, ZigzagFence):
        result = zigzag_barcode(module, seed=args.seed)
    elif module.poset.is_grid_like:
        result = _blocks_of(module, args.seed)
    else:
        raise InputError("plot needs a chain, zigzag, grid or triangle module")
    render_svg(result, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pmd", description="Decompose finite persistence modules over F_p.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text, seed=False, json_out=False, output=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="module file (JSON)")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        if json_out:
            p.add_argument("--json", metavar="OUT", help="write a machine-readable report")
        if output:
            p.add_argument("-o", "--output", required=True, help="output path")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "check that all structure maps commute")
    add("decompose", cmd_decompose, "decompose into indecomposables", seed=True, json_out=True)
    add("barcode", cmd_barcode, "barcode of a chain module", json_out=True)
    add("blocks", cmd_blocks, "block decomposition of a middle exact module", seed=True, json_out=True)
    add("middle-exact", cmd_middle_exact, "check middle exactness on unit squares")
    add("dualize", cmd_dualize, "write the dual module over the opposite poset", output=True)
    add("extend", cmd_extend, "extend a zigzag module to its window grid", output=True)
    add("zigzag", cmd_zigzag, "zigzag barcode by two independent routes", seed=True, json_out=True)
    add("plot", cmd_plot, "render a barcode or block diagram as SVG", seed=True, output=True)

    gen = sub.add_parser("gen", help="generate a module file")
    gen.add_argument("kind", choices=["intervals", "interlevel", "sublevel"])
    gen.add_argument("spec", help="generator spec (JSON)")
    gen.add_argument("-o", "--output", required=True, help="output path")
    gen.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    gen.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except CounterexampleFound as exc:
        print(f"counterexample: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
