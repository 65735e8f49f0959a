"""Command-line front end: ``bisimod <subcommand> ...``.

Exit codes: 0 the property holds (or the proof is accepted, or the input
parsed), 1 it fails and a witness is printed, 2 usage or format error,
3 an enumeration bound was exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bisim, calculus, models, search, semantics
from .errors import BisimodError, BoundExceeded, FormatError
from .models import LEFT, RIGHT, Point
from .syntax import atoms, is_lsquare, modal_depth, parse, render

OK, FAILS, USAGE, BOUND = 0, 1, 2, 3
ENV_CAP = "BISIMOD_MAX_ENUM"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits with 2 already; keep the message on stderr only
        self.print_usage(sys.stderr)
        raise _Usage(f"{self.prog}: error: {message}")


class _Usage(Exception):
    pass


def _emit(args, doc, text):
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(text)


def _read(path):
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _load(path):
    return models.load_bimodel(_read(path))


def _point_dict(pt):
    return {"side": pt.side, "world": pt.world}


# -- subcommands -------------------------------------------------------------

def cmd_parse(args):
    f = parse(args.formula)
    doc = {"formula": render(f), "core": render(f, resugar=False),
           "atoms": sorted(atoms(f)), "modal_depth": modal_depth(f),
           "lsquare": is_lsquare(f)}
    _emit(args, doc, render(f, resugar=not args.core))
    return OK


def cmd_check(args):
    m = _load(args.model)
    f = parse(args.formula)
    pt = Point(args.side, args.world)
    verdict = semantics.satisfies(m, pt, f)
    _emit(args, {"verdict": verdict, "point": _point_dict(pt)},
          f"{'true' if verdict else 'false'} at {pt}")
    return OK if verdict else FAILS


def cmd_valid(args):
    m = _load(args.model)
    f = parse(args.formula)
    if args.frame:
        report = semantics.valid_in_frame(m, f, bound=args.bound)
    else:
        report = semantics.valid_in_model(m, f)
    if report.verdict:
        text = "valid"
    else:
        text = f"not valid: fails at {report.point}"
        if report.valuation is not None:
            text += "\nvaluation: " + json.dumps(report.valuation, sort_keys=True)
    _emit(args, report.to_dict(), text)
    return OK if report.verdict else FAILS


def cmd_bisim_check(args):
    report = bisim.check_conditions(_load(args.model))
    lines = ["bisimulation" if report.is_bisimulation else "not a bisimulation"]
    if not report.nonempty:
        lines.append("z is empty")
    for (w, w1), a in report.harmony_violations:
        lines.append(f"harmony: ({w}, {w1}) disagree on {a}")
    for w, w1, v in report.forth_violations:
        lines.append(f"forth: ({w}, {w1}) with {w} R {v} unmatched")
    for w, w1, v1 in report.back_violations:
        lines.append(f"back: ({w}, {w1}) with {w1} R' {v1} unmatched")
    _emit(args, report.to_dict(), "\n".join(lines))
    return OK if report.is_bisimulation else FAILS


def cmd_bisim_max(args):
    m = _load(args.model)
    z = sorted(bisim.max_bisimulation(m.left, m.right))
    text = "\n".join(f"{w} {w1}" for w, w1 in z) if z else "empty"
    _emit(args, {"verdict": bool(z), "z": [list(p) for p in z]}, text)
    return OK if z else FAILS


def cmd_bisim_distinguish(args):
    m = _load(args.model)
    f = bisim.distinguishing_formula(m.left, args.left_world, m.right, args.right_world)
    if f is None:
        _emit(args, {"verdict": True, "formula": None},
              f"{args.left_world} and {args.right_world} are bisimilar")
        return OK
    _emit(args, {"verdict": False, "formula": render(f)}, render(f))
    return FAILS


def cmd_proof_check(args):
    try:
        proof = calculus.parse_proof(_read(args.proof).decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise FormatError(f"proof file is not UTF-8: {exc}") from None
    goal = parse(args.goal) if args.goal else None
    verdict = calculus.check_proof(proof, goal, [parse(a) for a in args.asm])
    text = "accepted" if verdict.accepted else \
        "rejected\n" + "\n".join(str(d) for d in verdict.diagnostics)
    _emit(args, verdict.to_dict(), text)
    return OK if verdict.accepted else FAILS


def _proof_doc(p):
    return {"goal": render(p.conclusion),
            "lines": [{"index": ln.index, "formula": render(ln.formula),
                       "justification": ln.justification()} for ln in p.lines]}


def cmd_gen_harmony(args):
    p = calculus.gen_harmony_proof(parse(args.formula), negative=args.negative)
    _emit(args, _proof_doc(p), p.format().rstrip("\n"))
    return OK


def cmd_gen_nts(args):
    p = calculus.gen_nts_tower_proof(args.n, bound=args.bound)
    _emit(args, _proof_doc(p), p.format().rstrip("\n"))
    return OK


def _cap():
    raw = os.environ.get(ENV_CAP)
    if raw is None:
        return search.DEFAULT_CAP
    try:
        return int(raw)
    except ValueError:
        raise _Usage(f"{ENV_CAP} must be an integer, got {raw!r}") from None


def cmd_countermodel(args):
    conclusion = parse(args.formula)
    premises = [parse(p) for p in args.premise]
    names = set(atoms(conclusion)).union(*map(atoms, premises))
    if args.atom:
        names |= set(args.atom)
    bounds = search.SearchBounds(args.max_left, args.max_right, tuple(names),
                                 args.bimodel, cap=_cap())
    hit = search.find_countermodel(premises, conclusion, bounds)
    if hit is None:
        _emit(args, {"verdict": True, "witness": None},
              "no countermodel within bounds")
        return OK
    m, pt = hit
    doc = {"verdict": False,
           "witness": {**_point_dict(pt), "model": models.bimodel_to_dict(m)}}
    text = f"countermodel, fails at {pt}:\n" + models.save_bimodel(m).decode().rstrip("\n")
    _emit(args, doc, text)
    return FAILS


def cmd_fixture(args):
    data = models.save_bimodel(models.fixture(args.name))
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode())
    return OK


# -- argument parsing ----------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = _Parser(prog="bisimod", description="Bisimulation modal logic toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("parse", parents=[common], help="parse and pretty-print a formula")
    sp.add_argument("formula")
    sp.add_argument("--core", action="store_true", help="print without sugar")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("check", parents=[common], help="truth at one point")
    sp.add_argument("-m", "--model", required=True)
    sp.add_argument("-s", "--side", required=True, choices=[LEFT, RIGHT])
    sp.add_argument("-w", "--world", required=True)
    sp.add_argument("formula")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("valid", parents=[common], help="model or frame validity")
    sp.add_argument("-m", "--model", required=True)
    sp.add_argument("--frame", action="store_true")
    sp.add_argument("--bound", type=int, default=semantics.DEFAULT_FRAME_BOUND,
                    help="maximum valuation bits for --frame")
    sp.add_argument("formula")
    sp.set_defaults(func=cmd_valid)

    bp = sub.add_parser("bisim", help="bisimulation checks")
    bsub = bp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = bsub.add_parser("check", parents=[common])
    sp.add_argument("-m", "--model", required=True)
    sp.set_defaults(func=cmd_bisim_check)
    sp = bsub.add_parser("max", parents=[common])
    sp.add_argument("-m", "--model", required=True)
    sp.set_defaults(func=cmd_bisim_max)
    sp = bsub.add_parser("distinguish", parents=[common])
    sp.add_argument("-m", "--model", required=True)
    sp.add_argument("-w", dest="left_world", required=True)
    sp.add_argument("-v", dest="right_world", required=True)
    sp.set_defaults(func=cmd_bisim_distinguish)

    pp = sub.add_parser("proof", help="check or generate proofs")
    psub = pp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = psub.add_parser("check", parents=[common])
    sp.add_argument("-p", "--proof", required=True)
    sp.add_argument("-g", "--goal")
    sp.add_argument("--asm", action="append", default=[])
    sp.set_defaults(func=cmd_proof_check)
    sp = psub.add_parser("gen-harmony", parents=[common])
    sp.add_argument("formula")
    sp.add_argument("--negative", action="store_true", help="prove ~A -> [b]~A")
    sp.set_defaults(func=cmd_gen_harmony)
    sp = psub.add_parser("gen-nts", parents=[common])
    sp.add_argument("n", type=int)
    sp.add_argument("--bound", type=int, default=calculus.DEFAULT_TOWER_BOUND)
    sp.set_defaults(func=cmd_gen_nts)

    sp = sub.add_parser("countermodel", parents=[common], help="bounded countermodel search")
    sp.add_argument("formula")
    sp.add_argument("--premise", action="append", default=[])
    sp.add_argument("--max-left", type=int, required=True)
    sp.add_argument("--max-right", type=int, required=True)
    sp.add_argument("--bimodel", action="store_true", help="search bi-models only")
    sp.add_argument("--atom", action="append", default=[],
                    help="extra atom to vary besides those in the formulas")
    sp.set_defaults(func=cmd_countermodel)

    sp = sub.add_parser("fixture", help="write a named example structure")
    sp.add_argument("name", choices=models.FIXTURE_NAMES)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_fixture)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _Usage as exc:
        print(exc, file=sys.stderr)
        return USAGE
    except BoundExceeded as exc:
        print(f"bound exceeded: {exc}", file=sys.stderr)
        return BOUND
    except (BisimodError, OSError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE


def main():
    sys.exit(run())
