"""Command-line front end.

Exit codes: 0 success, 1 domain refusal (line prefixed ``REFUSED:``, or
``EXCLUDED:`` from classify-exterior), 2 malformed input.  Output is
byte-deterministic for identical inputs; timestamps are opt-in.  The
environment variable HYPERFORGE_STEP_BUDGET overrides the R1/R2
reduction budget used by the certifiers.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import certificate as cert_mod
from . import classifier as cls
from . import diagram as dg
from . import generators as gen
from . import moves as mv
from . import tangle as tg
from .errors import (
    CertificateError,
    ExcludedExteriorError,
    FormatError,
    HyperforgeError,
    InvalidDiagramError,
    PremiseError,
    SiteError,
)

OK, REFUSED, MALFORMED = 0, 1, 2


def _budget() -> int:
    try:
        return int(os.environ.get("HYPERFORGE_STEP_BUDGET", dg.DEFAULT_STEP_BUDGET))
    except ValueError:
        return dg.DEFAULT_STEP_BUDGET


def _read_input(args, stdin_text: str) -> str:
    if getattr(args, "infile", None):
        with open(args.infile, "r", encoding="utf-8") as fh:
            return fh.read()
    return stdin_text


def _parse_evidence(text: str) -> cls.ExteriorEvidence:
    if text == "unchecked":
        return cls.Unchecked()
    kind, _, rest = text.partition(":")
    if kind == "rational":
        return cls.Rational(tg.ConwaySequence.parse(rest))
    if kind == "nonrational":
        return cls.DeclaredNonRational(rest or "declared by the caller")
    raise FormatError(
        f"evidence must be rational:SEQ, nonrational:TEXT, or unchecked, got {text!r}"
    )


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperforge", add_help=True)
    p.add_argument("--timestamps", action="store_true", help="prepend a timestamp line")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("fraction", help="continued-fraction value of a Conway sequence")
    q.add_argument("--seq", required=True)

    q = sub.add_parser("tangle-eq", help="are two Conway sequences the same tangle?")
    q.add_argument("--s1", required=True)
    q.add_argument("--s2", required=True)

    q = sub.add_parser("classify-exterior", help="exceptional-exterior check")
    q.add_argument("--fraction", required=True)
    q.add_argument("--k", type=int, required=True)

    q = sub.add_parser("parse", help="parse and reprint a PD or Gauss document")
    q.add_argument("infile", nargs="?")
    q.add_argument("--gauss", action="store_true", help="input is Gauss text")

    q = sub.add_parser("validate", help="run the diagram validator")
    q.add_argument("infile", nargs="?")

    q = sub.add_parser("convert", help="convert between PD and Gauss text")
    q.add_argument("infile", nargs="?")
    q.add_argument("--to", choices=("pd", "gauss"), required=True)

    q = sub.add_parser("gen", help="generate a named link family diagram")
    gsub = q.add_subparsers(dest="family", required=True)
    g = gsub.add_parser("chain")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--twists", default="")
    g.add_argument("--alternating", dest="alternating", action="store_true", default=True)
    g.add_argument("--non-alternating", dest="alternating", action="store_false")
    g = gsub.add_parser("rational")
    g.add_argument("--seq", required=True)
    g = gsub.add_parser("tk")
    g.add_argument("--seq", required=True)
    g.add_argument("--k", type=int, default=0)
    g.add_argument("--extra-twists", type=int, default=0)

    q = sub.add_parser("apply", help="apply a move to a PD diagram")
    q.add_argument("infile", nargs="?")
    q.add_argument("--move", required=True,
                   choices=("chain", "augchain", "switch", "halftwist", "r1", "r1-undo", "r2", "r2-undo"))
    q.add_argument("--component", type=int)
    q.add_argument("--strands")
    q.add_argument("--k", type=int, default=0)
    q.add_argument("--evidence", default="unchecked")
    q.add_argument("--arcs")
    q.add_argument("--skew", choices=("pos", "neg"))
    q.add_argument("--direction", type=int, choices=(1, -1))
    q.add_argument("--arc", type=int)
    q.add_argument("--handedness", type=int, choices=(1, -1), default=1)
    q.add_argument("--crossing", type=int)
    q.add_argument("--crossings")
    q.add_argument("--layering", choices=("first_over", "second_over"), default="first_over")

    q = sub.add_parser("certify", help="run a base certifier on a PD diagram")
    q.add_argument("infile", nargs="?")
    q.add_argument("--base", choices=("menasco", "augmented"), default="menasco")
    q.add_argument("--augmenting", default="")

    q = sub.add_parser("verify", help="re-play certificates")
    q.add_argument("files", nargs="*")
    q.add_argument("--jobs", type=int, default=1)

    q = sub.add_parser("pipeline", help="run a command file threading named slots")
    q.add_argument("infile")
    return p


def _cmd_fraction(args, _):
    return OK, str(tg.fraction(tg.ConwaySequence.parse(args.seq))) + "\n"


def _cmd_tangle_eq(args, _):
    same = tg.equivalent(tg.ConwaySequence.parse(args.s1), tg.ConwaySequence.parse(args.s2))
    return OK, ("equivalent\n" if same else "not-equivalent\n")


def _cmd_classify(args, _):
    f = tg.Fraction.parse(args.fraction)
    kind = cls.excluded_exterior(f, args.k)
    if kind is None:
        return OK, "admissible\n"
    return REFUSED, f"EXCLUDED: {kind.value}\n"


def _cmd_parse(args, stdin_text):
    text = _read_input(args, stdin_text)
    if args.gauss:
        return OK, dg.format_gauss(dg.parse_gauss(text))
    return OK, dg.format_pd(dg.parse_pd(text))


def _cmd_validate(args, stdin_text):
    d = dg.parse_pd(_read_input(args, stdin_text))
    rep = dg.validate(d)
    out = rep.summary() + "\n"
    return (OK, out) if rep.valid else (MALFORMED, out)


def _cmd_convert(args, stdin_text):
    text = _read_input(args, stdin_text)
    if args.to == "gauss":
        d = dg.parse_pd(text)
        return OK, dg.format_gauss(dg.to_gauss(d))
    g = dg.parse_gauss(text)
    return OK, dg.format_pd(dg.from_gauss(g))


def _cmd_gen(args, _):
    if args.family == "chain":
        twists = tuple(int(t) for t in args.twists.split(",") if t.strip()) if args.twists else ()
        d = gen.chain_link(gen.ChainSpec(args.n, twists, alternating=args.alternating))
    elif args.family == "rational":
        d = gen.rational_link(tg.ConwaySequence.parse(args.seq))
    else:
        d = gen.tk_closure(tg.ConwaySequence.parse(args.seq), args.k, args.extra_twists)
    return OK, dg.format_pd(d)


def _cmd_apply(args, stdin_text):
    d = dg.parse_pd(_read_input(args, stdin_text))
    if args.move in ("chain", "augchain"):
        if args.component is None or not args.strands:
            raise FormatError("chain moves need --component N --strands a1,a2")
        strands = tuple(int(a) for a in args.strands.split(","))
        if len(strands) != 2:
            raise FormatError("--strands wants two arc labels")
        site = next(
            (s for s in mv.find_chain_sites(d)
             if s.trivial_component == args.component
             and {s.strand1, s.strand2} == set(strands)),
            None,
        )
        if site is None:
            raise SiteError(
                f"no chain site at component {args.component} strands {strands}"
            )
        ev = _parse_evidence(args.evidence)
        move = mv.chain_move if args.move == "chain" else mv.augmented_chain_move
        return OK, dg.format_pd(move(d, site, args.k, ev))
    if args.move == "switch":
        if not args.arcs or not args.skew:
            raise FormatError("switch needs --arcs g,g2 --skew pos|neg")
        g1, g2 = (int(a) for a in args.arcs.split(","))
        h = mv.Handedness.PositiveSkew if args.skew == "pos" else mv.Handedness.NegativeSkew
        return OK, dg.format_pd(mv.switch_move(d, mv.SwitchSite(g1, g2), h))
    if args.move == "halftwist":
        if args.component is None or args.direction is None:
            raise FormatError("halftwist needs --component N --direction +1|-1")
        return OK, dg.format_pd(mv.half_twist(d, args.component, args.direction))
    if args.move == "r1":
        return OK, dg.format_pd(dg.reidemeister1(d, args.arc, args.handedness))
    if args.move == "r1-undo":
        if args.crossing is None:
            raise FormatError("r1-undo needs --crossing N")
        return OK, dg.format_pd(dg.reidemeister1_undo(d, args.crossing))
    if args.move == "r2":
        if not args.arcs:
            raise FormatError("r2 needs --arcs a,b")
        a, b = (int(x) for x in args.arcs.split(","))
        return OK, dg.format_pd(dg.reidemeister2(d, (a, b), args.layering))
    if args.move == "r2-undo":
        if not args.crossings:
            raise FormatError("r2-undo needs --crossings i,j")
        i, j = (int(x) for x in args.crossings.split(","))
        return OK, dg.format_pd(dg.reidemeister2_undo(d, (i, j)))
    raise FormatError(f"unknown move {args.move!r}")


def _cmd_certify(args, stdin_text):
    d = dg.parse_pd(_read_input(args, stdin_text))
    budget = _budget()
    if args.base == "menasco":
        result = cls.menasco_certify(d, budget)
    else:
        augmenting = frozenset(int(c) for c in args.augmenting.split(",") if c.strip())
        result = cls.augmented_alternating_certify(d, augmenting, budget)
    if isinstance(result, cls.Refusal):
        return REFUSED, f"REFUSED: {result}\n"
    return OK, cert_mod.serialize(result)


def _verify_one(text: str):
    c = cert_mod.deserialize(text)
    return cert_mod.verify(c)


def _cmd_verify(args, stdin_text):
    texts = []
    if args.files:
        for path in args.files:
            with open(path, "r", encoding="utf-8") as fh:
                texts.append(fh.read())
    else:
        texts.append(stdin_text)
    if args.jobs > 1 and len(texts) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            verdicts = list(pool.map(_verify_one, texts))
    else:
        verdicts = [_verify_one(t) for t in texts]
    lines = []
    all_valid = True
    for i, v in enumerate(verdicts):
        if v.valid:
            lines.append(f"certificate {i}: VALID")
            for note in v.trusted_premises:
                lines.append(f"  trusted: {note}")
        else:
            all_valid = False
            where = "base" if v.failed_step == -1 else f"step {v.failed_step}"
            lines.append(f"certificate {i}: INVALID at {where}: {v.reason}")
    out = "\n".join(lines) + "\n"
    if not all_valid:
        out += "REFUSED: certificate-invalid\n"
        return REFUSED, out
    return OK, out


def _cmd_pipeline(args, _):
    with open(args.infile, "r", encoding="utf-8") as fh:
        script = fh.read()
    slots: dict[str, str] = {}
    transcript = []
    for raw in script.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name = None
        if "=" in line.split()[0] or (len(line.split("=", 1)) == 2 and line.split("=", 1)[0].strip().isidentifier() and not line.split("=", 1)[0].strip() == line):
            left, _, right = line.partition("=")
            if left.strip().isidentifier() and right.strip():
                name, line = left.strip(), right.strip()
        argv = line.split()
        stdin_text = ""
        resolved = []
        for tok in argv:
            if tok.startswith("@"):
                slot = tok[1:]
                if slot not in slots:
                    raise FormatError(f"pipeline references unknown slot @{slot}")
                stdin_text = slots[slot]
            else:
                resolved.append(tok)
        transcript.append(f"$ {line}")
        code, out = run(resolved, stdin_text=stdin_text)
        transcript.append(out.rstrip("\n"))
        transcript.append(f"[exit {code}]")
        if code != OK:
            return code, "\n".join(transcript) + "\n"
        if name:
            slots[name] = out
    return OK, "\n".join(transcript) + "\n"


_COMMANDS = {
    "fraction": _cmd_fraction,
    "tangle-eq": _cmd_tangle_eq,
    "classify-exterior": _cmd_classify,
    "parse": _cmd_parse,
    "validate": _cmd_validate,
    "convert": _cmd_convert,
    "gen": _cmd_gen,
    "apply": _cmd_apply,
    "certify": _cmd_certify,
    "verify": _cmd_verify,
    "pipeline": _cmd_pipeline,
}


_VALUE_FLAGS = {
    "--fraction", "--seq", "--s1", "--s2", "--twists", "--k", "--strands",
    "--arcs", "--direction", "--extra-twists", "--handedness", "--arc",
    "--component", "--crossing", "--crossings", "--n", "--jobs", "--evidence",
}


def _join_negative_values(argv):
    """Let value flags accept arguments starting with '-' (e.g. -3/1)."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run(argv, stdin_text: str = "") -> tuple[int, str]:
    """Execute a command line; returns (exit code, output text)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(_join_negative_values(list(argv)))
    except SystemExit as exc:
        # argparse already printed to stderr; normalize the exit code
        return (MALFORMED if exc.code not in (0, None) else OK), ""
    header = ""
    if args.timestamps:
        header = f"# {time.strftime('%Y-%m-%dT%H:%M:%S')}\n"
    try:
        code, out = _COMMANDS[args.command](args, stdin_text)
        return code, header + out
    except ExcludedExteriorError as err:
        return REFUSED, header + f"REFUSED: excluded-exterior {err.kind.value}\n"
    except (FormatError, InvalidDiagramError, CertificateError, SiteError,
            PremiseError, HyperforgeError) as err:
        return MALFORMED, header + f"ERROR: {err}\n"
    except (OSError, ValueError) as err:
        return MALFORMED, header + f"ERROR: {err}\n"


def main() -> None:
    stdin_text = "" if sys.stdin.isatty() else sys.stdin.read()
    code, out = run(sys.argv[1:], stdin_text=stdin_text)
    sys.stdout.write(out)
    sys.exit(code)


if __name__ == "__main__":
    main()
