"""Finite relational structures, embeddings and exhaustions.

An embedding is stored as its tuple of image *positions*: ``images[i]`` is
the index in ``target.universe`` of the image of ``source.universe[i]``.
Embedding tables list ``Emb(A, B)`` in lexicographic order of these image
tuples; every bitset in the workbench is indexed by that order.

Levels of an exhaustion are numbered from 1, so ``A_n`` is ``chain[n - 1]``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Iterator

from .errors import (
    HorizonExhausted,
    InvalidStructure,
    LevelMismatch,
    LevelOutOfRange,
    SignatureMismatch,
    UniverseTooLarge,
)

DEFAULT_MAX_UNIVERSE = 24


def max_universe() -> int:
    value = os.environ.get("SYNWB_MAX_UNIVERSE")
    return int(value) if value else DEFAULT_MAX_UNIVERSE


@dataclass(frozen=True)
class RelationalSignature:
    relations: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        rels = tuple((str(name), int(arity)) for name, arity in self.relations)
        object.__setattr__(self, "relations", rels)
        names = [name for name, _ in rels]
        if len(set(names)) != len(names):
            raise InvalidStructure("relation names must be distinct")
        if any(arity < 1 for _, arity in rels):
            raise InvalidStructure("relation arities must be positive")

    def arity(self, name: str) -> int:
        for rel, arity in self.relations:
            if rel == name:
                return arity
        raise InvalidStructure(f"no relation named {name!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)


@dataclass(frozen=True)
class FinStructure:
    """A finite structure; ``tables`` maps each relation name to its tuples."""

    signature: RelationalSignature
    universe: tuple
    tables: tuple[tuple[str, tuple[tuple, ...]], ...]

    def __post_init__(self):
        universe = tuple(self.universe)
        object.__setattr__(self, "universe", universe)
        if len(set(universe)) != len(universe):
            raise InvalidStructure("universe points must be distinct")
        if len(universe) > max_universe():
            raise UniverseTooLarge(
                f"structure has {len(universe)} points, cap is {max_universe()}"
                " (raise it with SYNWB_MAX_UNIVERSE)")
        index = {a: i for i, a in enumerate(universe)}
        given = dict(self.tables)
        if set(given) - set(self.signature.names):
            raise InvalidStructure(f"unknown relations {sorted(set(given) - set(self.signature.names))}")
        tables = []
        positional = {}
        for name, arity in self.signature.relations:
            idx_tuples = set()
            for t in given.get(name, ()):
                t = tuple(t)
                if len(t) != arity:
                    raise InvalidStructure(f"tuple {t} has wrong arity for {name}")
                try:
                    idx_tuples.add(tuple(index[a] for a in t))
                except KeyError as exc:
                    raise InvalidStructure(f"tuple {t} of {name} leaves the universe") from exc
            ordered = sorted(idx_tuples)
            tables.append((name, tuple(tuple(universe[i] for i in t) for t in ordered)))
            positional[name] = frozenset(ordered)
        object.__setattr__(self, "tables", tuple(tables))
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_positional", positional)
        object.__setattr__(self, "_hash", hash((self.signature, universe, self.tables)))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FinStructure({len(self.universe)} points, {self.signature.names})"

    @classmethod
    def build(cls, signature: RelationalSignature, universe: Iterable, relations: dict | None = None):
        relations = relations or {}
        return cls(signature, tuple(universe), tuple((k, tuple(v)) for k, v in relations.items()))

    @property
    def size(self) -> int:
        return len(self.universe)

    def position(self, point: Hashable) -> int:
        return self._index[point]

    def positional(self, name: str) -> frozenset:
        return self._positional[name]

    def holds(self, name: str, points: tuple) -> bool:
        return tuple(self._index[a] for a in points) in self._positional[name]

    def substructure(self, points: Iterable) -> "FinStructure":
        """Induced substructure on ``points``, kept in the given order."""
        points = tuple(points)
        keep = set(points)
        rels = {name: [t for t in tup if set(t) <= keep] for name, tup in self.tables}
        return FinStructure.build(self.signature, points, rels)

    def is_induced_substructure_of(self, other: "FinStructure") -> bool:
        if self.signature != other.signature:
            return False
        if not set(self.universe) <= set(other.universe):
            return False
        return other.substructure(self.universe) == self


@dataclass(frozen=True)
class Embedding:
    source: FinStructure
    target: FinStructure
    images: tuple[int, ...]

    def __repr__(self):
        return f"Embedding({self.source.size}->{self.target.size}, images={self.images})"

    def __call__(self, point):
        return self.target.universe[self.images[self.source.position(point)]]

    @property
    def image_points(self) -> tuple:
        return tuple(self.target.universe[j] for j in self.images)

    def then(self, other: "Embedding") -> "Embedding":
        """``other`` after ``self``."""
        return dual_apply(self, other)


def is_embedding(source: FinStructure, target: FinStructure, images: tuple[int, ...]) -> bool:
    """Injective, and every relation is preserved and reflected."""
    if source.signature != target.signature or len(images) != source.size:
        return False
    if len(set(images)) != len(images) or not all(0 <= i < target.size for i in images):
        return False
    for name, arity in source.signature.relations:
        src, dst = source.positional(name), target.positional(name)
        for t in itertools.product(range(source.size), repeat=arity):
            if (t in src) != (tuple(images[i] for i in t) in dst):
                return False
    return True


def iter_embeddings(A: FinStructure, B: FinStructure,
                    fixed: dict[int, int] | None = None) -> Iterator[tuple[int, ...]]:
    """Image tuples of all embeddings ``A -> B`` in lexicographic order.

    ``fixed`` pins source positions to target positions.
    """
    if A.signature != B.signature:
        raise SignatureMismatch("structures have different signatures")
    fixed = fixed or {}
    rels = [(arity, A.positional(name), B.positional(name)) for name, arity in A.signature.relations]
    n, size = A.size, B.size
    assign = [0] * n
    used = [False] * size

    def consistent(k: int) -> bool:
        for arity, src, dst in rels:
            for t in itertools.product(range(k + 1), repeat=arity):
                if k not in t:
                    continue
                if (t in src) != (tuple(assign[i] for i in t) in dst):
                    return False
        return True

    def place(k: int):
        if k == n:
            yield tuple(assign)
            return
        choices = (fixed[k],) if k in fixed else range(size)
        for j in choices:
            if used[j]:
                continue
            assign[k] = j
            if consistent(k):
                used[j] = True
                yield from place(k + 1)
                used[j] = False

    yield from place(0)


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    source: FinStructure
    target: FinStructure
    images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "_index", {im: i for i, im in enumerate(self.images)})

    def __len__(self):
        return len(self.images)

    def __getitem__(self, i: int) -> Embedding:
        return Embedding(self.source, self.target, self.images[i])

    def __iter__(self) -> Iterator[Embedding]:
        return (Embedding(self.source, self.target, im) for im in self.images)

    def index_of(self, emb) -> int:
        images = emb.images if isinstance(emb, Embedding) else tuple(emb)
        if isinstance(emb, Embedding) and (emb.source != self.source or emb.target != self.target):
            raise LevelMismatch("embedding does not belong to this table")
        return self._index[images]

    def __contains__(self, emb) -> bool:
        images = emb.images if isinstance(emb, Embedding) else tuple(emb)
        return images in self._index


@lru_cache(maxsize=512)
def enumerate_embeddings(A: FinStructure, B: FinStructure) -> EmbeddingTable:
    return EmbeddingTable(A, B, tuple(iter_embeddings(A, B)))


def dual_apply(f: Embedding, x: Embedding) -> Embedding:
    """``x o f``: the dual map of ``f`` applied to ``x``."""
    if x.source != f.target:
        raise LevelMismatch("the target of f is not the source of x")
    return Embedding(f.source, x.target, tuple(x.images[i] for i in f.images))


# exhaustions

class Exhaustion:
    """A chain ``A_1 <= A_2 <= ... <= A_top`` of induced substructures."""

    def __init__(self, name: str, chain: Iterable[FinStructure]):
        chain = tuple(chain)
        if not chain:
            raise InvalidStructure("an exhaustion needs at least one level")
        for lo, hi in zip(chain, chain[1:]):
            if lo.signature != hi.signature:
                raise SignatureMismatch("levels of an exhaustion share one signature")
            if hi.size <= lo.size:
                raise InvalidStructure("exhaustion levels must grow strictly")
            if not lo.is_induced_substructure_of(hi):
                raise InvalidStructure("each level must be an induced substructure of the next")
        self.name = name
        self.chain = chain
        self._levels = {s: i + 1 for i, s in enumerate(chain)}
        self._cache: dict = {}

    def __repr__(self):
        return f"Exhaustion({self.name!r}, top={self.top})"

    def __eq__(self, other):
        if not isinstance(other, Exhaustion):
            return NotImplemented
        return self is other or (self.name == other.name and self.chain == other.chain)

    def __hash__(self):
        return hash((self.name, self.chain[0]))

    def compatible(self, other: "Exhaustion", upto: int) -> bool:
        """Whether both exhaustions agree on levels ``1..upto``."""
        if self is other:
            return True
        return (self.name == other.name and upto <= min(self.top, other.top)
                and self.chain[:upto] == other.chain[:upto])

    @property
    def signature(self) -> RelationalSignature:
        return self.chain[0].signature

    @property
    def top(self) -> int:
        return len(self.chain)

    def check_level(self, n: int):
        if not 1 <= n <= self.top:
            raise LevelOutOfRange(f"level {n} outside 1..{self.top}")

    def level(self, n: int) -> FinStructure:
        self.check_level(n)
        return self.chain[n - 1]

    def level_of(self, structure: FinStructure) -> int:
        try:
            return self._levels[structure]
        except KeyError:
            raise LevelMismatch("structure is not a level of this exhaustion") from None

    def table(self, m: int, N: int) -> EmbeddingTable:
        return enumerate_embeddings(self.level(m), self.level(N))

    def embedding(self, m: int, N: int, images) -> Embedding:
        """The embedding of level ``m`` into level ``N`` with these image positions."""
        A, B, images = self.level(m), self.level(N), tuple(images)
        if not is_embedding(A, B, images):
            raise InvalidStructure(f"{images} is not an embedding of level {m} into level {N}")
        return Embedding(A, B, images)

    def inclusion(self, m: int, n: int) -> Embedding:
        if m > n:
            raise LevelMismatch(f"no inclusion of level {m} into level {n}")
        A, B = self.level(m), self.level(n)
        return Embedding(A, B, tuple(B.position(a) for a in A.universe))

    def compose_table(self, m: int, n: int, N: int) -> tuple[tuple[int, ...], ...]:
        """Row ``x`` lists the ``Emb(A_m, A_N)`` indices of ``x o f``, ``f`` in ``Emb(A_m, A_n)``."""
        key = ("compose", m, n, N)
        if key not in self._cache:
            inner, outer, result = self.table(m, n), self.table(n, N), self.table(m, N)
            rows = []
            for x in outer.images:
                rows.append(tuple(result.index_of(tuple(x[i] for i in f)) for f in inner.images))
            self._cache[key] = tuple(rows)
        return self._cache[key]

    def block_masks(self, m: int, n: int, N: int) -> tuple[int, ...]:
        """Bitmask of the block ``x o Emb(A_m, A_n)`` for every ``x`` in ``Emb(A_n, A_N)``."""
        key = ("blocks", m, n, N)
        if key not in self._cache:
            masks = []
            for row in self.compose_table(m, n, N):
                mask = 0
                for j in row:
                    mask |= 1 << j
                masks.append(mask)
            self._cache[key] = tuple(masks)
        return self._cache[key]


def _pure_level(n: int) -> FinStructure:
    return FinStructure.build(RelationalSignature(), range(1, n + 1))


def dyadic_points() -> Iterator[Fraction]:
    """1/2, 3/4, 1/4, then the odd multiples of 1/8, 1/16, ... in increasing order."""
    yield Fraction(1, 2)
    yield Fraction(3, 4)
    yield Fraction(1, 4)
    d = 8
    while True:
        for k in range(1, d, 2):
            yield Fraction(k, d)
        d *= 2


LINEAR_SIGNATURE = RelationalSignature((("lt", 2),))
GRAPH_SIGNATURE = RelationalSignature((("adj", 2),))


def _linear_level(points: list[Fraction]) -> FinStructure:
    pts = sorted(points)
    return FinStructure.build(LINEAR_SIGNATURE, pts,
                              {"lt": [(a, b) for a, b in itertools.combinations(pts, 2)]})


def bit_adjacent(i: int, j: int) -> bool:
    if i > j:
        i, j = j, i
    return i < j and (j >> i) & 1 == 1


def _bit_level(n: int) -> FinStructure:
    edges = []
    for i, j in itertools.permutations(range(n), 2):
        if bit_adjacent(i, j):
            edges.append((i, j))
    return FinStructure.build(GRAPH_SIGNATURE, range(n), {"adj": edges})


@lru_cache(maxsize=None)
def pure_sets(top: int | None = None) -> Exhaustion:
    """``A_n = {1, ..., n}`` with no relations."""
    top = top or max_universe()
    return Exhaustion("pure", (_pure_level(n) for n in range(1, top + 1)))


@lru_cache(maxsize=None)
def linear_orders(top: int | None = None) -> Exhaustion:
    """Finite chains of dyadic rationals exhausting a countable dense order.

    Universes are listed in increasing order, so position ``k`` is the
    ``k``-th smallest point of the level.
    """
    top = top or max_universe()
    pts = list(itertools.islice(dyadic_points(), top))
    return Exhaustion("linear", (_linear_level(pts[:n]) for n in range(1, top + 1)))


@lru_cache(maxsize=None)
def bit_graphs(top: int | None = None) -> Exhaustion:
    """Vertices ``0..n-1``; ``i < j`` adjacent iff bit ``i`` of ``j`` is set.

    Prefixes of this graph approximate the random graph but do not satisfy
    the extension property exactly.
    """
    top = top or max_universe()
    return Exhaustion("bit", (_bit_level(n) for n in range(1, top + 1)))


BUILTIN_CLASSES: dict[str, Callable[..., Exhaustion]] = {
    "pure": pure_sets,
    "linear": linear_orders,
    "bit": bit_graphs,
}


def builtin(name: str, top: int | None = None) -> Exhaustion:
    try:
        factory = BUILTIN_CLASSES[name]
    except KeyError:
        raise ValueError(f"unknown class {name!r}; choose from {sorted(BUILTIN_CLASSES)}") from None
    return factory(top)


# level sets

@dataclass(frozen=True)
class LevelSet:
    """A subset of ``Emb(A_m, A_N)`` as a bitset over the canonical table."""

    exhaustion: Exhaustion
    m: int
    N: int
    bits: int = 0

    def __post_init__(self):
        self.exhaustion.check_level(self.m)
        self.exhaustion.check_level(self.N)
        if self.m > self.N:
            raise LevelOutOfRange(f"base level {self.m} above horizon {self.N}")
        if self.bits < 0 or self.bits >> self.size:
            raise ValueError("bitset longer than the embedding table")

    @property
    def table(self) -> EmbeddingTable:
        return self.exhaustion.table(self.m, self.N)

    @property
    def size(self) -> int:
        return len(self.table)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    @classmethod
    def full(cls, exhaustion: Exhaustion, m: int, N: int) -> "LevelSet":
        return cls(exhaustion, m, N, (1 << len(exhaustion.table(m, N))) - 1)

    @classmethod
    def empty(cls, exhaustion: Exhaustion, m: int, N: int) -> "LevelSet":
        return cls(exhaustion, m, N, 0)

    @classmethod
    def from_indices(cls, exhaustion: Exhaustion, m: int, N: int, indices: Iterable[int]) -> "LevelSet":
        mask = 0
        for i in indices:
            mask |= 1 << i
        return cls(exhaustion, m, N, mask)

    @classmethod
    def from_images(cls, exhaustion: Exhaustion, m: int, N: int, images: Iterable) -> "LevelSet":
        """Members given as image tuples of target positions."""
        table = exhaustion.table(m, N)
        return cls.from_indices(exhaustion, m, N, (table.index_of(tuple(im)) for im in images))

    @classmethod
    def from_predicate(cls, exhaustion: Exhaustion, m: int, N: int,
                       pred: Callable[[Embedding], bool]) -> "LevelSet":
        table = exhaustion.table(m, N)
        return cls.from_indices(exhaustion, m, N, (i for i, e in enumerate(table) if pred(e)))

    def with_bits(self, bits: int) -> "LevelSet":
        return LevelSet(self.exhaustion, self.m, self.N, bits & self.full_mask)

    def _check(self, other: "LevelSet"):
        if (self.m, self.N) != (other.m, other.N) or not self.exhaustion.compatible(other.exhaustion, self.N):
            raise LevelMismatch("level sets live on different levels or classes")

    def indices(self) -> list[int]:
        return [i for i in range(self.size) if self.bits >> i & 1]

    def embeddings(self) -> list[Embedding]:
        table = self.table
        return [table[i] for i in self.indices()]

    def count(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, item) -> bool:
        i = item if isinstance(item, int) else self.table.index_of(item)
        return bool(self.bits >> i & 1)

    def __bool__(self):
        return self.bits != 0

    def complement(self) -> "LevelSet":
        return self.with_bits(~self.bits)

    def __or__(self, other: "LevelSet") -> "LevelSet":
        self._check(other)
        return self.with_bits(self.bits | other.bits)

    def __and__(self, other: "LevelSet") -> "LevelSet":
        self._check(other)
        return self.with_bits(self.bits & other.bits)

    def __sub__(self, other: "LevelSet") -> "LevelSet":
        self._check(other)
        return self.with_bits(self.bits & ~other.bits)

    def issubset(self, other: "LevelSet") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0


def lift_set(f: Embedding, S: LevelSet) -> LevelSet:
    """``f(S) = {x in Emb(A_n, A_N) : x o f in S}`` for ``f`` in ``Emb(A_m, A_n)``."""
    ex = S.exhaustion
    if f.source != ex.level(S.m):
        raise LevelMismatch("f does not start at the base level of S")
    n = ex.level_of(f.target)
    if n > S.N:
        raise LevelMismatch(f"f lands in level {n}, above the horizon {S.N}")
    outer = ex.table(n, S.N)
    result = ex.table(S.m, S.N)
    bits = 0
    for k, x in enumerate(outer.images):
        if S.bits >> result.index_of(tuple(x[i] for i in f.images)) & 1:
            bits |= 1 << k
    return LevelSet(ex, n, S.N, bits)


@dataclass(frozen=True)
class Absorption:
    m: int
    n: int
    N: int
    h: Embedding


def solve_absorption(f: Embedding, E: Exhaustion, top: int | None = None) -> Absorption:
    """Least ``N`` with some ``h`` in ``Emb(A_n, A_N)`` and ``h o f`` the inclusion of ``A_m``."""
    m, n = E.level_of(f.source), E.level_of(f.target)
    top = E.top if top is None else min(top, E.top)
    for N in range(n, top + 1):
        inc = E.inclusion(m, N)
        fixed = {f.images[a]: inc.images[a] for a in range(len(f.images))}
        for images in iter_embeddings(E.level(n), E.level(N), fixed):
            h = Embedding(E.level(n), E.level(N), images)
            if dual_apply(f, h) != inc:
                raise AssertionError("absorbing embedding failed its composition check")
            return Absorption(m, n, N, h)
    raise HorizonExhausted(f"no absorbing embedding up to level {top} of {E.name}")


def check_dual_surjective(f: Embedding, E: Exhaustion, N: int) -> tuple[bool, Embedding | None]:
    """Whether every ``y`` in ``Emb(A_m, A_N)`` equals ``x o f`` for some ``x`` in ``Emb(A_n, A_N)``."""
    m, n = E.level_of(f.source), E.level_of(f.target)
    if N < n:
        raise LevelOutOfRange(f"horizon {N} below level {n}")
    hit = {tuple(x[i] for i in f.images) for x in E.table(n, N).images}
    for y in E.table(m, N):
        if y.images not in hit:
            return False, y
    return True, None
