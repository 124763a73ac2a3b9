"""Command-line front end: ``synwb families|fraisse|zgrp <subcommand>``.

Every command builds one report dictionary (schema version
:data:`REPORT_VERSION`).  ``--json`` prints it as JSON; otherwise the same
dictionary is rendered as ``key=value`` lines.  Verdicts never change the
exit status: 0 means the command ran, 1 a workbench or input error, 2 a
usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .errors import HorizonExhausted, NotFound, WorkbenchError
from .family import (
    enumerate_s_ultrafilters,
    has_disjointness,
    is_conservative,
    phi_max,
    phi_min,
    pushforward_family,
    regularity_counterexample,
    strong_counterexample,
)
from .formats import (
    format_certificate,
    load_exhaustion,
    parse_certificate,
    parse_family,
    parse_level_header,
    parse_level_set,
    parse_map,
    parse_upset,
)
from .fraisse import Exhaustion, LevelSet, builtin, solve_absorption
from .horizon import carve_thick, decompose, is_pws, is_syndetic_up_to, is_thick_up_to, split_pws
from .zgroup import classify_up, decompose_up, psi

REPORT_VERSION = 1

GUIDANCE = {
    HorizonExhausted: "raise the horizon (SYNWB_MAX_UNIVERSE) or lower the levels",
    NotFound: "try a larger --nmax/--nprime or a set with a higher horizon",
}


class Inputs:
    """Reads input files once and records their digests for the report."""

    def __init__(self):
        self.digests: dict[str, str] = {}

    def read(self, path: str) -> str:
        data = Path(path).read_bytes()
        self.digests[path] = hashlib.sha256(data).hexdigest()
        return data.decode()


def _atoms(ground, mask: int) -> list[str]:
    return [str(a) for a in ground.atoms(mask)]


def _family_view(S) -> list[list[str]]:
    return [_atoms(S.ground, m) for m in S.minimals]


# families

def cmd_families(args, inputs: Inputs) -> dict:
    if args.sub == "ults":
        S = parse_family(inputs.read(args.family), args.family)
        bases = [_atoms(S.ground, p.base) for p in enumerate_s_ultrafilters(S)]
        return {"ground": [str(a) for a in S.ground], "count": len(bases), "bases": bases}
    if args.sub == "disjoint":
        S = parse_family(inputs.read(args.family), args.family)
        ok, pair = has_disjointness(S)
        return {"disjoint": ok,
                "overlap": None if pair is None else [_atoms(S.ground, p.base) for p in pair]}
    fam = parse_family(inputs.read(args.family), args.family)
    if args.sub == "check-map":
        phi = parse_map(inputs.read(args.map), args.map, default_source=fam.ground)
        T = pushforward_family(phi, fam)
        strong_cx = strong_counterexample(phi, fam)
        reg_cx = regularity_counterexample(phi, fam)
        return {
            "strong": strong_cx is None,
            "regular": reg_cx is None,
            "conservative": is_conservative(phi_min(phi, T), fam),
            "pushforward": _family_view(T),
            "strong_counterexample": None if strong_cx is None else _atoms(fam.ground, strong_cx),
            "regularity_counterexample": None if reg_cx is None else _atoms(fam.ground, reg_cx.base),
        }
    # min-max: the family lives on the target
    phi = parse_map(inputs.read(args.map), args.map, default_target=fam.ground)
    return {"phi_min": _family_view(phi_min(phi, fam)), "phi_max": _family_view(phi_max(phi, fam))}


# fraisse

def _exhaustion(args, inputs: Inputs, class_name: str | None = None) -> Exhaustion:
    if getattr(args, "exhaustion", None):
        inputs.read(args.exhaustion)
        return load_exhaustion(args.exhaustion)
    name = getattr(args, "cls", None) or class_name
    if name is None:
        raise WorkbenchError("give --class or --exhaustion")
    try:
        return builtin(name)
    except ValueError as exc:
        raise WorkbenchError(str(exc)) from None


def _level_set(path: str, args, inputs: Inputs, ex: Exhaustion | None = None) -> LevelSet:
    text = inputs.read(path)
    if ex is None:
        ex = _exhaustion(args, inputs, parse_level_header(text, path).class_name)
    return parse_level_set(text, ex, path)


def _horizon(S: LevelSet, **params) -> dict:
    return {"class": S.exhaustion.name, "m": S.m, "N": S.N, **params}


def _cert(c) -> str | None:
    return None if c is None else format_certificate(c).strip()


def _hex(S: LevelSet) -> str:
    return f"{S.bits:x}"


def cmd_fraisse(args, inputs: Inputs) -> dict:
    sub = args.sub
    if sub == "emb-count":
        ex = _exhaustion(args, inputs)
        return {"class": ex.name, "m": args.m, "n": args.n, "count": len(ex.table(args.m, args.n))}
    if sub == "absorb":
        ex = _exhaustion(args, inputs)
        table = ex.table(args.m, args.n)
        fs = [ex.embedding(args.m, args.n, _ints(args.images))] if args.images else list(table)
        rows = []
        for f in fs:
            a = solve_absorption(f, ex)
            rows.append({"f": list(f.images), "N": a.N, "h": list(a.h.images)})
        return {"class": ex.name, "m": args.m, "n": args.n, "solutions": rows,
                "worst_N": max(r["N"] for r in rows)}
    S = _level_set(args.set, args, inputs)
    if sub == "classify":
        thick = is_thick_up_to(S, args.nmax)
        synd = is_syndetic_up_to(S, args.nmax)
        out = {"horizon": _horizon(S, n_max=args.nmax),
               "thick": thick.thick, "thick_witnesses": [list(w) for w in thick.witnesses],
               "refuted_at": thick.refuted_at,
               "syndetic": synd.syndetic, "syndetic_level": synd.level,
               "avoiders": [list(a) for a in synd.avoiders]}
        if args.nprime is not None:
            n = args.n if args.n is not None else min(args.nmax, args.nprime)
            v = is_pws(S, n, args.nprime)
            out.update({"pws": v.pws, "pws_n": n, "pws_n_prime": args.nprime,
                        "certificate": _cert(v.certificate),
                        "pws_refutation": list(v.refutation)})
        return out
    if sub == "decompose":
        d = decompose(S, args.nmax, args.nprime)
        return {"horizon": _horizon(S, n_max=args.nmax, n_prime=args.nprime),
                "strategy": d.strategy, "S": _hex(d.S), "T": _hex(d.T),
                "certificate": _cert(d.certificate),
                "thick_witnesses": [list(w) for w in d.thick.witnesses],
                "syndetic_level": d.syndetic.level, "valid": d.validate()}
    if sub == "split":
        if args.cert:
            cert = parse_certificate(inputs.read(args.cert), args.cert)
        else:
            cert = is_pws(S, args.n, args.nprime).certificate
            if cert is None:
                raise NotFound(f"the set has no pws certificate at ({args.n}, {args.nprime})")
        if args.part:
            P1 = _level_set(args.part, args, inputs, S.exhaustion) & S
            partition = "file"
        else:
            rng = random.Random(args.seed)
            P1 = S.from_indices(S.exhaustion, S.m, S.N,
                                [i for i in S.indices() if rng.random() < 0.5])
            partition = f"seed {args.seed}"
        P2 = S - P1
        idx, found = split_pws(P1, P2, cert)
        return {"horizon": _horizon(S), "partition": partition, "P1": _hex(P1), "P2": _hex(P2),
                "input_certificate": _cert(cert), "part": idx, "certificate": _cert(found),
                "valid": found.validate(P1 if idx == 1 else P2)}
    if sub == "carve":
        W = _level_set(args.avoid, args, inputs, S.exhaustion)
        c = carve_thick(S, W, args.n, args.nprime)
        return {"horizon": _horizon(S, n=args.n, n_prime=args.nprime), "U": _hex(c.U),
                "blocks": list(c.blocks), "thick_witnesses": [list(w) for w in c.thick.witnesses]}
    raise AssertionError(sub)


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise WorkbenchError(f"expected comma-separated integers, got {text!r}") from None


# zgrp

def cmd_zgrp(args, inputs: Inputs) -> dict:
    P = parse_upset(args.literal, "<argv>")
    out: dict[str, Any] = {"set": P.literal()}
    if args.sub == "classify":
        out.update(classify_up(P)._asdict())
    elif args.sub == "psi":
        r = psi(P)
        out.update({"k": r.k, "E": list(r.shifts), "T": r.T.literal(), "psi": r.value.literal()})
    else:
        d = decompose_up(P)
        out.update({"S": d.S.literal(), "T": d.T.literal(), "k": d.psi.k, "E": list(d.psi.shifts)})
    return out


# parser and rendering

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the structured report")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing")

    parser = argparse.ArgumentParser(prog="synwb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"synwb {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)

    fam = groups.add_parser("families", help="families, filters and surjections")
    fsub = fam.add_subparsers(dest="sub", required=True)
    for name in ("ults", "disjoint"):
        p = fsub.add_parser(name, parents=[common])
        p.add_argument("--family", required=True)
    p = fsub.add_parser("check-map", parents=[common], help="strong/regular/conservative verdicts")
    p.add_argument("--map", required=True)
    p.add_argument("--family", required=True, help="family on the map's source")
    p = fsub.add_parser("min-max", parents=[common], help="least and greatest lifts")
    p.add_argument("--map", required=True)
    p.add_argument("--family", required=True, help="family on the map's target")

    fr = groups.add_parser("fraisse", help="embeddings and horizon classifiers")
    rsub = fr.add_subparsers(dest="sub", required=True)
    klass = argparse.ArgumentParser(add_help=False)
    klass.add_argument("--class", dest="cls", help="built-in class: pure, linear or bit")
    klass.add_argument("--exhaustion", help="exhaustion file listing level structures")

    p = rsub.add_parser("emb-count", parents=[common, klass])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p = rsub.add_parser("absorb", parents=[common, klass])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--images", help="image positions of f, e.g. 0,2 (default: every f)")
    p = rsub.add_parser("classify", parents=[common, klass])
    p.add_argument("--set", required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--nprime", type=int, help="also test piecewise syndeticity at this block level")
    p = rsub.add_parser("decompose", parents=[common, klass])
    p.add_argument("--set", required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--nprime", type=int, required=True)
    p = rsub.add_parser("split", parents=[common, klass])
    p.add_argument("--set", required=True)
    p.add_argument("--part", help="first part; the second is the rest of the set")
    p.add_argument("--cert", help="certificate record for the set")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--nprime", type=int, default=2)
    p.add_argument("--seed", type=int, default=0, help="seed for the random partition")
    p = rsub.add_parser("carve", parents=[common, klass])
    p.add_argument("--set", required=True, help="thick set T")
    p.add_argument("--avoid", required=True, help="non-pws set W")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nprime", type=int, required=True)

    z = groups.add_parser("zgrp", help="ultimately periodic sets of integers")
    zsub = z.add_subparsers(dest="sub", required=True)
    for name in ("classify", "psi", "decompose"):
        p = zsub.add_parser(name, parents=[common])
        p.add_argument("literal", nargs="+", help="e.g. period=3 pattern=110 patch=+7,-2")
    return parser


COMMANDS: dict[str, Callable[[argparse.Namespace, Inputs], dict]] = {
    "families": cmd_families,
    "fraisse": cmd_fraisse,
    "zgrp": cmd_zgrp,
}


def run(args: argparse.Namespace) -> dict:
    inputs = Inputs()
    start = time.perf_counter()
    result = COMMANDS[args.group](args, inputs)
    report = {"version": REPORT_VERSION, "command": [args.group, args.sub],
              "inputs": dict(sorted(inputs.digests.items())), "result": result}
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    return report


def _scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, (int, str)):
        return str(value)
    return json.dumps(value, separators=(",", ":"))


def render(report: dict) -> str:
    lines = [f"synwb {' '.join(report['command'])} (report v{report['version']})"]
    for path, digest in report["inputs"].items():
        lines.append(f"input {path} sha256={digest[:16]}")
    for key, value in report["result"].items():
        if isinstance(value, dict):
            value = " ".join(f"{k}={_scalar(v)}" for k, v in value.items())
            lines.append(f"{key}: {value}")
        else:
            lines.append(f"{key}={_scalar(value)}")
    if "timing" in report:
        lines.append(f"time={report['timing']['seconds']}s")
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = run(args)
    except (WorkbenchError, OSError) as exc:
        message = f"error: {exc}"
        for kind, hint in GUIDANCE.items():
            if isinstance(exc, kind):
                message += f" ({hint})"
        print(message, file=sys.stderr)
        return 1
    print(json.dumps(report, indent=2) if args.json else render(report))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
