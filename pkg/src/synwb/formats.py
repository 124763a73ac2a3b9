"""Plain-text formats for families, maps, structures, exhaustions and sets.

Every printer emits the canonical text that its parser reads back to an
equal object.  Blank lines and ``#`` comments are ignored by all parsers; parse
errors carry the offending line number.

Family::

    ground: a, b, c
    a, b
    b, c

Map (headers optional, defaulting to first-appearance order)::

    source: a, b, c
    target: x, y
    a -> x

Structure::

    signature: lt/2
    universe: p, q
    rel lt: (p,q)

Exhaustion (one structure file per level, relative to the exhaustion file)::

    name: chains
    level: a1.str

Level set (bit ``i`` is the ``i``-th embedding of the canonical table)::

    level 2, horizon 5, class linear
    3a
"""

from __future__ import annotations

import re
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import InputParseError, WorkbenchError
from .family import Family, GroundSet, SurjectionMap, family_from_minimals
from .fraisse import Exhaustion, FinStructure, LevelSet, RelationalSignature
from .horizon import PwsCertificate
from .zgroup import UPSet, WindowSet


def _lines(text: str) -> Iterator[tuple[int, str]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _atoms(chunk: str) -> list[str]:
    return [a.strip() for a in chunk.split(",") if a.strip()]


def _header(line: str, key: str) -> str | None:
    if line.lower().startswith(key + ":"):
        return line[len(key) + 1:].strip()
    return None


@contextmanager
def _wrap(source: str, no: int | None):
    """Re-raise workbench and value errors as parse errors at line ``no``."""
    try:
        yield
    except InputParseError:
        raise
    except (WorkbenchError, ValueError) as exc:
        raise InputParseError(str(exc), source, no) from exc


# families

def parse_family(text: str, source: str = "<family>") -> Family:
    ground = None
    ground_line = None
    rows: list[tuple[int, list[str]]] = []
    for no, line in _lines(text):
        head = _header(line, "ground")
        if head is not None:
            if ground is not None or rows:
                raise InputParseError("ground header must come first and only once", source, no)
            ground, ground_line = _atoms(head), no
            continue
        atoms = _atoms(line)
        if not atoms:
            raise InputParseError("empty member line", source, no)
        rows.append((no, atoms))
    if not rows:
        raise InputParseError("a family needs at least one member", source, None)
    if ground is None:
        ground = []
        for _, atoms in rows:
            ground.extend(a for a in atoms if a not in ground)
    with _wrap(source, ground_line):
        g = GroundSet(tuple(ground))
    masks = []
    for no, atoms in rows:
        with _wrap(source, no):
            masks.append(g.mask(atoms))
    return family_from_minimals(g, masks)


def format_family(S: Family) -> str:
    out = ["ground: " + ", ".join(map(str, S.ground.elements))]
    out += [", ".join(map(str, S.ground.atoms(m))) for m in S.minimals]
    return "\n".join(out) + "\n"


# maps

def parse_map(text: str, source: str = "<map>", default_source: GroundSet | None = None,
              default_target: GroundSet | None = None) -> SurjectionMap:
    heads: dict[str, tuple[int, list[str]]] = {}
    pairs: list[tuple[int, str, str]] = []
    for no, line in _lines(text):
        for key in ("source", "target"):
            head = _header(line, key)
            if head is not None:
                if key in heads:
                    raise InputParseError(f"duplicate {key} header", source, no)
                heads[key] = (no, _atoms(head))
                break
        else:
            if "->" not in line:
                raise InputParseError("expected 'atom -> atom'", source, no)
            a, b = (s.strip() for s in line.split("->", 1))
            if not a or not b:
                raise InputParseError("expected 'atom -> atom'", source, no)
            if any(a == p for _, p, _ in pairs):
                raise InputParseError(f"atom {a!r} is mapped twice", source, no)
            pairs.append((no, a, b))

    def ground(key: str, default: GroundSet | None, column: int) -> GroundSet:
        if key in heads:
            no, atoms = heads[key]
            with _wrap(source, no):
                return GroundSet(tuple(atoms))
        if default is not None:
            return default
        seen: list[str] = []
        for p in pairs:
            if p[column] not in seen:
                seen.append(p[column])
        with _wrap(source, None):
            return GroundSet(tuple(seen))

    src = ground("source", default_source, 1)
    tgt = ground("target", default_target, 2)
    table = [None] * src.size
    for no, a, b in pairs:
        with _wrap(source, no):
            table[src.index(a)] = tgt.index(b)
    missing = [src.elements[i] for i, t in enumerate(table) if t is None]
    if missing:
        raise InputParseError(f"unmapped source atoms {missing}", source, None)
    with _wrap(source, None):
        return SurjectionMap(src, tgt, tuple(table))


def format_map(phi: SurjectionMap) -> str:
    out = ["source: " + ", ".join(map(str, phi.source.elements)),
           "target: " + ", ".join(map(str, phi.target.elements))]
    out += [f"{a} -> {phi.target.elements[t]}" for a, t in zip(phi.source.elements, phi.table)]
    return "\n".join(out) + "\n"


# structures

_REL = re.compile(r"rel\s+(\S+)\s*:(.*)$", re.IGNORECASE)
_TUPLE = re.compile(r"\(([^()]*)\)")


def parse_structure(text: str, source: str = "<structure>") -> FinStructure:
    signature = None
    universe = None
    relations: dict[str, list[tuple]] = {}
    rel_lines: dict[str, int] = {}
    for no, line in _lines(text):
        head = _header(line, "signature")
        if head is not None:
            rels = []
            for item in _atoms(head):
                name, sep, arity = item.partition("/")
                if not sep or not arity.strip().isdigit():
                    raise InputParseError(f"expected name/arity, got {item!r}", source, no)
                rels.append((name.strip(), int(arity)))
            with _wrap(source, no):
                signature = RelationalSignature(tuple(rels))
            continue
        head = _header(line, "universe")
        if head is not None:
            universe = _atoms(head)
            continue
        match = _REL.match(line)
        if not match:
            raise InputParseError("expected signature:, universe: or rel <name>:", source, no)
        name, body = match.group(1), match.group(2)
        tuples = [tuple(_atoms(t)) for t in _TUPLE.findall(body)]
        if _TUPLE.sub("", body).strip():
            raise InputParseError("relation tuples must be written (a,b,...)", source, no)
        relations.setdefault(name, []).extend(tuples)
        rel_lines.setdefault(name, no)
    if universe is None:
        raise InputParseError("missing universe: line", source, None)
    signature = signature or RelationalSignature()
    for name, no in rel_lines.items():
        with _wrap(source, no):
            signature.arity(name)
    with _wrap(source, None):
        return FinStructure.build(signature, universe, relations)


def format_structure(A: FinStructure) -> str:
    sig = ", ".join(f"{n}/{a}" for n, a in A.signature.relations)
    out = [f"signature: {sig}", "universe: " + ", ".join(map(str, A.universe))]
    for name, tuples in A.tables:
        body = " ".join("(" + ",".join(map(str, t)) + ")" for t in tuples)
        out.append(f"rel {name}: {body}".rstrip())
    return "\n".join(out) + "\n"


def load_exhaustion(path: str | Path) -> Exhaustion:
    path = Path(path)
    source = str(path)
    name = path.stem
    levels = []
    for no, line in _lines(path.read_text()):
        head = _header(line, "name")
        if head is not None:
            name = head
            continue
        head = _header(line, "level")
        if head is None:
            raise InputParseError("expected name: or level: <file>", source, no)
        level_path = path.parent / head
        try:
            text = level_path.read_text()
        except OSError as exc:
            raise InputParseError(f"cannot read {head}: {exc.strerror}", source, no) from exc
        levels.append(parse_structure(text, str(level_path)))
    with _wrap(source, None):
        return Exhaustion(name, levels)


# level sets and certificates

_LEVEL_HEADER = re.compile(r"level\s+(\d+)\s*,\s*horizon\s+(\d+)\s*,\s*class\s+(\S+)$", re.IGNORECASE)


@dataclass(frozen=True)
class LevelSetHeader:
    m: int
    N: int
    class_name: str
    bits: int


def parse_level_header(text: str, source: str = "<level set>") -> LevelSetHeader:
    lines = list(_lines(text))
    if not lines:
        raise InputParseError("empty level set file", source, None)
    no, first = lines[0]
    match = _LEVEL_HEADER.match(first)
    if not match:
        raise InputParseError("expected 'level m, horizon N, class <name>'", source, no)
    digits = []
    for k, (line_no, line) in enumerate(lines[1:]):
        chunk = line[2:] if k == 0 and line.lower().startswith("0x") else line
        if not re.fullmatch(r"[0-9a-fA-F]+", chunk):
            raise InputParseError("bitset must be hexadecimal", source, line_no)
        digits.append(chunk)
    return LevelSetHeader(int(match.group(1)), int(match.group(2)), match.group(3),
                          int("".join(digits) or "0", 16))


def parse_level_set(text: str, exhaustion: Exhaustion, source: str = "<level set>") -> LevelSet:
    head = parse_level_header(text, source)
    if head.class_name != exhaustion.name:
        raise InputParseError(f"set is over class {head.class_name!r}, not {exhaustion.name!r}",
                             source, 1)
    with _wrap(source, 1):
        return LevelSet(exhaustion, head.m, head.N, head.bits)


def format_level_set(S: LevelSet) -> str:
    return f"level {S.m}, horizon {S.N}, class {S.exhaustion.name}\n{S.bits:x}\n"


_CERT_KEYS = ("class", "m", "N", "n", "n_prime", "z")


def format_certificate(c: PwsCertificate) -> str:
    return (f"pws class={c.class_name} m={c.m} N={c.N} n={c.n} "
            f"n_prime={c.n_prime} z={c.z}\n")


def parse_certificate(text: str, source: str = "<certificate>") -> PwsCertificate:
    lines = list(_lines(text))
    if len(lines) != 1:
        raise InputParseError("a certificate is a single record line", source, None)
    no, line = lines[0]
    words = line.split()
    if words[0] != "pws":
        raise InputParseError("certificate records start with 'pws'", source, no)
    fields = dict(w.partition("=")[::2] for w in words[1:])
    if set(fields) != set(_CERT_KEYS):
        raise InputParseError(f"certificate needs exactly the fields {', '.join(_CERT_KEYS)}",
                             source, no)
    try:
        ints = {k: int(fields[k]) for k in _CERT_KEYS[1:]}
    except ValueError as exc:
        raise InputParseError("certificate fields must be integers", source, no) from exc
    return PwsCertificate(fields["class"], ints["m"], ints["N"], ints["n"],
                          ints["n_prime"], ints["z"])


# integer sets

def parse_upset(text: str | Iterable[str], source: str = "<upset>") -> UPSet:
    """``period=3 pattern=110 patch=+7,-2``; ``period`` and ``patch`` are optional."""
    words = text.split() if isinstance(text, str) else [w for t in text for w in t.split()]
    fields: dict[str, str] = {}
    for w in words:
        key, sep, value = w.partition("=")
        if not sep or key not in ("period", "pattern", "patch") or key in fields:
            raise InputParseError(f"unexpected token {w!r}", source, 1)
        fields[key] = value
    if "pattern" not in fields:
        raise InputParseError("missing pattern=", source, 1)
    pattern = fields["pattern"]
    try:
        period = int(fields.get("period", len(pattern)))
        patch = [int(x) for x in fields.get("patch", "").split(",") if x]
    except ValueError as exc:
        raise InputParseError("period and patch entries must be integers", source, 1) from exc
    if period != len(pattern):
        raise InputParseError(f"pattern has length {len(pattern)}, period says {period}", source, 1)
    with _wrap(source, 1):
        return UPSet.make(pattern, patch)


def format_upset(A: UPSet) -> str:
    return A.literal()


def parse_window(text: str, source: str = "<window>") -> WindowSet:
    with _wrap(source, 1):
        return WindowSet.from_string(text)


def format_window(A: WindowSet) -> str:
    return A.dump()
