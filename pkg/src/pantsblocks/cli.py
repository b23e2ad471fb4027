"""Command-line entry point: ``pantsblocks <verb> [inputs] [flags]``.

Every verb writes its result to stdout (or ``-o``).  Failures print one
JSON line {"error", "message", "exit"} to stderr and exit with 1 for parse
errors, 2 for validation failures and 3 when no move or match applies.
"""

import argparse
import json
import random
import sys
from pathlib import Path

from .block_builder import (
    BlockDecomposition, InvalidDecomposition, NotABijection, NotAdjacent, NotAPath, PathSource,
    collapse,
)
from .core_model import NotDecomposable, PantsError, SupportId, SurfaceType, UnsupportedSurface
from .move_calculus import NoMatch, ParseError, VerificationFailed, free_reduce, matches_relation, parse_words, verify_lemma4
from .pgraph_pcomplex import (
    InvalidComplex, InvalidIncidence, InvalidTags, NotEligible, PComplex, ReebGraph,
    pcomplex_from_blocks, pgraph_from_decomposition, reeb_to_pgraph,
)
from .reeb_cerf import (
    InvalidSite, OutOfRange, Stuck, UnannotatedCrossing, induced_move, inflate_virtual_edges,
    parse_cerf, simplify_to_pcomplex, word_from_cerf,
)
from .search_engine import DEFAULT_BUDGET, ReplayMismatch, connect
from .surface_states import IllegalMove

EXIT_PARSE, EXIT_INVALID, EXIT_NOMATCH = 1, 2, 3

_PARSE = (ParseError, json.JSONDecodeError)
_INVALID = (InvalidDecomposition, NotAPath, NotAdjacent, NotABijection, InvalidComplex, InvalidIncidence,
            InvalidTags, InvalidSite, NotDecomposable, UnsupportedSurface, IllegalMove, VerificationFailed,
            UnannotatedCrossing, OutOfRange, ReplayMismatch, ValueError, KeyError)
_NOMATCH = (NoMatch, Stuck, NotEligible)


def _read(path):
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _json(path):
    return json.loads(_read(path))


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _supports(decls):
    out = {}
    for d in decls or ():
        try:
            s = SupportId.parse(d)
        except ValueError as e:
            raise ParseError(str(e), 0, 0) from None
        out[s.id] = s
    return out


def _decomposition(data):
    """A block decomposition from either its own JSON or a path spec."""
    if "blocks" in data:
        return BlockDecomposition.from_json(data)
    src = PathSource.from_json(data)
    return collapse(src.path(), src)


def cmd_normalize(args):
    words = parse_words(_read(args.input), _supports(args.support))
    return "".join(f"{free_reduce(w)}\n" for w in words)


def cmd_verify_relation(args):
    out = []
    for w in parse_words(_read(args.input), _supports(args.support)):
        if not len(w):
            continue
        p = matches_relation(w)
        out.append(f"{p.name if p else 'none'}\n")
    return "".join(out)


def cmd_lemma4(args):
    report = verify_lemma4()
    if args.format == "json":
        text = _dump(report.to_json())
    else:
        text = "\n".join(report.lines()) + "\n"
    if not report.ok:
        raise VerificationFailed(text)
    return text


def cmd_build_blocks(args):
    return _dump(_decomposition(_json(args.input)).to_json())


def cmd_pgraph(args):
    data = _json(args.input)
    if "tags" in data:
        g = reeb_to_pgraph(ReebGraph(tuple((k, v) for k, v in sorted(data["tags"].items())),
                                     tuple(tuple(e) for e in data["edges"])))
    else:
        g = pgraph_from_decomposition(SurfaceType.parse(data["surface"]), data["pants"])
    return g.to_dot() + "\n" if args.format == "dot" else _dump(g.to_json())


def cmd_pcomplex(args):
    data = _json(args.input)
    pc = PComplex.from_json(data) if "vertices" in data else pcomplex_from_blocks(_decomposition(data))
    return pc.to_dot() + "\n" if args.format == "dot" else _dump(pc.to_json())


def cmd_simplify_reeb(args):
    data = _json(args.input)
    base = PComplex.from_json(data["pcomplex"]) if "pcomplex" in data \
        else pcomplex_from_blocks(_decomposition(data["decomposition"]))
    rc = inflate_virtual_edges(base, data.get("decoration", ()))
    for m in data.get("moves", ()):
        rc = induced_move(rc, int(m["move"]), m.get("location"), m.get("dir", "bwd") == "fwd")
    pc, trace = simplify_to_pcomplex(rc)
    return _dump({"pcomplex": pc.to_json(), "trace": trace})


def cmd_cerf_to_word(args):
    d = parse_cerf(_read(args.input))
    return f"{word_from_cerf(d, _supports(args.support))}\n"


def cmd_connect(args):
    a = _decomposition(_json(args.a))
    b = _decomposition(_json(args.b))
    seq = connect(a, b, budget=args.budget)
    if seq is None:
        raise NoMatch(f"no sequence within budget {args.budget}")
    return _dump(seq.to_json())


def cmd_selftest(args):
    import pytest
    here = Path(__file__).resolve()
    target = here.parents[2] / "tests" / "test_acceptance.py"
    if not target.exists():
        raise ValueError(f"acceptance suite not found at {target}")
    random.seed(args.seed)
    code = pytest.main(["-q", "-s", str(target), "-p", "no:cacheprovider"])
    if code:
        raise VerificationFailed(f"acceptance suite exited with {code}")
    return ""


def build_parser():
    p = argparse.ArgumentParser(prog="pantsblocks", description="Pants moves, block decompositions and P-moves.")
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, *inputs, fmt=None, support=False):
        sp = sub.add_parser(name)
        for i in inputs:
            sp.add_argument(i)
        if fmt:
            sp.add_argument("--format", choices=fmt, default=fmt[0])
        if support:
            sp.add_argument("--support", action="append", metavar="ID:KIND", default=[])
        sp.add_argument("-o", "--output")
        sp.add_argument("--seed", type=int, default=0)
        sp.set_defaults(fn=fn)
        return sp

    verb("normalize", cmd_normalize, "input", support=True)
    verb("verify-relation", cmd_verify_relation, "input", support=True)
    verb("lemma4", cmd_lemma4, fmt=("text", "json"))
    verb("build-blocks", cmd_build_blocks, "input")
    verb("pgraph", cmd_pgraph, "input", fmt=("json", "dot"))
    verb("pcomplex", cmd_pcomplex, "input", fmt=("json", "dot"))
    verb("simplify-reeb", cmd_simplify_reeb, "input")
    verb("cerf-to-word", cmd_cerf_to_word, "input", support=True)
    verb("connect", cmd_connect, "a", "b").add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    verb("selftest", cmd_selftest)
    return p


def _fail(code, kind, msg):
    first = str(msg).strip().splitlines()[0] if str(msg).strip() else ""
    print(json.dumps({"error": kind, "message": first, "exit": code}), file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = args.fn(args)
    except _PARSE as e:
        return _fail(EXIT_PARSE, type(e).__name__, e)
    except _NOMATCH as e:
        return _fail(EXIT_NOMATCH, type(e).__name__, e)
    except (*_INVALID, PantsError) as e:
        return _fail(EXIT_INVALID, type(e).__name__, e)
    except OSError as e:
        return _fail(EXIT_PARSE, type(e).__name__, e)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
