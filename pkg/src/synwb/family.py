"""Families, S-filters and S-ultrafilters on finite ground sets.

Subsets of a ground set are int bitmasks: bit ``i`` stands for
``ground.elements[i]``.  A family is stored by its antichain of minimal
members; on a finite ground set every filter is principal, so an
S-filter is stored by its base set and the S-ultrafilters of a family are
exactly the up-closures of its minimal members.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator

from .errors import (
    EmptyGenerator,
    EmptyList,
    GroundMismatch,
    GroundTooLarge,
    NoTrace,
    NotASubfamily,
    NotSurjective,
)

MAX_GROUND = 16
EXHAUSTIVE_MAX = 4


def popcount(mask: int) -> int:
    return mask.bit_count()


def bits(mask: int) -> tuple[int, ...]:
    """Indices of the set bits, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def subset_key(mask: int) -> tuple[int, ...]:
    # canonical order on subsets: lexicographic on sorted index tuples
    return bits(mask)


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


@dataclass(frozen=True)
class GroundSet:
    elements: tuple

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        if not elements:
            raise ValueError("ground set must be non-empty")
        if len(set(elements)) != len(elements):
            raise ValueError("ground set elements must be distinct")
        if len(elements) > MAX_GROUND:
            raise GroundTooLarge(
                f"ground set has {len(elements)} atoms, cap is {MAX_GROUND}")
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(elements)})

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def full(self) -> int:
        return (1 << len(self.elements)) - 1

    def index(self, atom: Hashable) -> int:
        try:
            return self._index[atom]
        except KeyError:
            raise ValueError(f"{atom!r} is not in the ground set") from None

    def mask(self, subset) -> int:
        """Bitmask of ``subset``; ints are taken to be masks already."""
        if isinstance(subset, int):
            if subset & ~self.full:
                raise ValueError(f"mask {subset:#x} exceeds the ground set")
            return subset
        m = 0
        for a in subset:
            m |= 1 << self.index(a)
        return m

    def atoms(self, mask: int) -> tuple:
        return tuple(self.elements[i] for i in bits(mask))

    def subsets(self) -> range:
        return range(self.full + 1)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


def reduce_antichain(masks: Iterable[int]) -> tuple[int, ...]:
    """Minimal elements of ``masks`` under inclusion, in canonical order."""
    kept: list[int] = []
    for m in sorted(set(masks), key=popcount):
        if not any(is_subset(k, m) for k in kept):
            kept.append(m)
    return tuple(sorted(kept, key=subset_key))


@dataclass(frozen=True)
class Family:
    """Upward closed, non-trivial family given by its minimal members.

    Build instances with :func:`family_from_minimals`; the constructor
    assumes the antichain is already reduced.
    """

    ground: GroundSet
    minimals: tuple[int, ...]

    def __contains__(self, subset) -> bool:
        return is_member(self, subset)

    def members(self) -> Iterator[int]:
        for a in self.ground.subsets():
            if any(is_subset(m, a) for m in self.minimals):
                yield a

    def issubfamily(self, other: "Family") -> bool:
        if other.ground != self.ground:
            raise GroundMismatch("families live on different ground sets")
        return all(is_member(other, m) for m in self.minimals)

    def describe(self) -> list[tuple]:
        return [self.ground.atoms(m) for m in self.minimals]


@dataclass(frozen=True)
class SFilter:
    """The principal filter ``{A : base <= A}``."""

    ground: GroundSet
    base: int

    def __post_init__(self):
        if self.base == 0:
            raise EmptyGenerator("a filter base must be non-empty")

    def __contains__(self, subset) -> bool:
        return is_subset(self.base, self.ground.mask(subset))

    def contains_filter(self, other: "SFilter") -> bool:
        # up{b} <= up{a}  iff  a <= b
        return is_subset(self.base, other.base)


def s_filter(S: Family, base) -> SFilter:
    """Attach a filter to ``S``; its base must already be a member."""
    mask = S.ground.mask(base)
    if not is_member(S, mask):
        raise ValueError("filter base is not a member of the family")
    return SFilter(S.ground, mask)


@dataclass(frozen=True)
class SurjectionMap:
    source: GroundSet
    target: GroundSet
    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(self.table)
        object.__setattr__(self, "table", table)
        if len(table) != self.source.size:
            raise ValueError("map table must assign every source atom")
        if any(not 0 <= t < self.target.size for t in table):
            raise ValueError("map table points outside the target")
        if set(table) != set(range(self.target.size)):
            raise NotSurjective("map does not cover the target")
        fibers = [0] * self.target.size
        for i, t in enumerate(table):
            fibers[t] |= 1 << i
        object.__setattr__(self, "_fibers", tuple(fibers))

    @classmethod
    def from_mapping(cls, source: GroundSet, target: GroundSet, mapping: dict):
        table = tuple(target.index(mapping[a]) for a in source.elements)
        return cls(source, target, table)

    @classmethod
    def identity(cls, ground: GroundSet):
        return cls(ground, ground, tuple(range(ground.size)))

    @property
    def fibers(self) -> tuple[int, ...]:
        return self._fibers

    def __call__(self, atom):
        return self.target.elements[self.table[self.source.index(atom)]]

    def image(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= 1 << self.table[i]
        return out

    def preimage(self, mask: int) -> int:
        out = 0
        for j in bits(mask):
            out |= self._fibers[j]
        return out

    def saturate(self, mask: int) -> int:
        return self.preimage(self.image(mask))

    def is_injective(self) -> bool:
        return self.source.size == self.target.size


def family_from_minimals(ground: GroundSet, sets: Iterable) -> Family:
    """Family generated upward by ``sets``, reduced to its antichain."""
    masks = [ground.mask(s) for s in sets]
    if not masks:
        raise EmptyList("a family needs at least one generator")
    if any(m == 0 for m in masks):
        raise EmptyGenerator("the empty set cannot generate a family")
    return Family(ground, reduce_antichain(masks))


def is_member(S: Family, subset) -> bool:
    a = S.ground.mask(subset)
    return any(is_subset(m, a) for m in S.minimals)


def _check_source(phi: SurjectionMap, ground: GroundSet, what: str):
    if phi.source != ground:
        raise GroundMismatch(f"map source differs from the ground set of {what}")


def _check_target(phi: SurjectionMap, ground: GroundSet, what: str):
    if phi.target != ground:
        raise GroundMismatch(f"map target differs from the ground set of {what}")


def pushforward_family(phi: SurjectionMap, S: Family) -> Family:
    """``{B : phi^-1(B) in S}``.

    ``phi^-1(B)`` contains a minimal ``M`` iff ``B`` contains ``phi(M)``,
    so the images of the minimal members generate the pushforward.
    """
    _check_source(phi, S.ground, "the family")
    return Family(phi.target, reduce_antichain(phi.image(m) for m in S.minimals))


def enumerate_s_ultrafilters(S: Family) -> list[SFilter]:
    return [SFilter(S.ground, m) for m in S.minimals]


def pushforward_filter(phi: SurjectionMap, F: SFilter) -> SFilter:
    _check_source(phi, F.ground, "the filter")
    return SFilter(phi.target, phi.image(F.base))


def strong_counterexample(phi: SurjectionMap, S: Family) -> int | None:
    """First ``A`` (by mask value) with ``A`` not in S but its saturation in S."""
    _check_source(phi, S.ground, "the family")
    for a in S.ground.subsets():
        if not is_member(S, a) and is_member(S, phi.saturate(a)):
            return a
    return None


def is_strong(phi: SurjectionMap, S: Family) -> bool:
    return strong_counterexample(phi, S) is None


def regularity_counterexample(phi: SurjectionMap, S: Family) -> SFilter | None:
    """An S-ultrafilter whose pushforward is not maximal, if any."""
    target_bases = set(pushforward_family(phi, S).minimals)
    for p in enumerate_s_ultrafilters(S):
        if phi.image(p.base) not in target_bases:
            return p
    return None


def is_regular(phi: SurjectionMap, S: Family) -> bool:
    return regularity_counterexample(phi, S) is None


def phi_min(phi: SurjectionMap, T: Family) -> Family:
    """Least family on the source pushing forward to ``T``."""
    _check_target(phi, T.ground, "the target family")
    return Family(phi.source, reduce_antichain(phi.preimage(m) for m in T.minimals))


def phi_max(phi: SurjectionMap, T: Family) -> Family:
    """Greatest family on the source pushing forward to ``T``: ``{A : phi(A) in T}``.

    Minimal members are sections of the fibers over a minimal member of T.
    """
    _check_target(phi, T.ground, "the target family")
    candidates = []
    for m in T.minimals:
        fibers = [bits(phi.fibers[j]) for j in bits(m)]
        for choice in itertools.product(*fibers):
            section = 0
            for i in choice:
                section |= 1 << i
            candidates.append(section)
    return Family(phi.source, reduce_antichain(candidates))


def trace(p: SFilter, S: Family) -> tuple[SFilter, ...]:
    """The S-ultrafilters contained in ``p``."""
    if p.ground != S.ground:
        raise GroundMismatch("filter and family live on different ground sets")
    return tuple(SFilter(S.ground, c) for c in S.minimals if is_subset(p.base, c))


def trace_filter(p: SFilter, S: Family) -> SFilter:
    """``p`` intersected with ``S``, read as an S-ultrafilter.

    Defined when exactly one S-ultrafilter sits inside ``p``; raises
    :class:`NoTrace` otherwise.
    """
    inside = trace(p, S)
    if len(inside) != 1:
        raise NoTrace(f"{len(inside)} S-ultrafilters lie inside the filter")
    return inside[0]


def conservativity_counterexample(S: Family, S2: Family) -> SFilter | None:
    if S.ground != S2.ground:
        raise GroundMismatch("families live on different ground sets")
    if not S.issubfamily(S2):
        raise NotASubfamily("the first family is not contained in the second")
    for p in enumerate_s_ultrafilters(S2):
        if len(trace(p, S)) != 1:
            return p
    return None


def is_conservative(S: Family, S2: Family) -> bool:
    """Whether ``S2`` is conservative over ``S``."""
    return conservativity_counterexample(S, S2) is None


def has_disjointness(S: Family) -> tuple[bool, tuple[SFilter, SFilter] | None]:
    ults = enumerate_s_ultrafilters(S)
    for p, q in itertools.combinations(ults, 2):
        if p.base & q.base:
            return False, (p, q)
    return True, None


# exhaustive enumeration, capped to keep Dedekind growth in check

def iter_families(ground: GroundSet, max_size: int = EXHAUSTIVE_MAX) -> Iterator[Family]:
    """Every non-trivial family on ``ground``, antichains in canonical order."""
    if ground.size > max_size:
        raise GroundTooLarge(
            f"exhaustive family enumeration capped at {max_size} atoms")
    candidates = sorted(range(1, ground.full + 1), key=subset_key)

    def extend(start, chosen):
        if chosen:
            yield Family(ground, tuple(chosen))
        for k in range(start, len(candidates)):
            c = candidates[k]
            if all(not is_subset(c, d) and not is_subset(d, c) for d in chosen):
                chosen.append(c)
                yield from extend(k + 1, chosen)
                chosen.pop()

    yield from extend(0, [])


def iter_surjections(source: GroundSet, target: GroundSet) -> Iterator[SurjectionMap]:
    for table in itertools.product(range(target.size), repeat=source.size):
        if len(set(table)) == target.size:
            yield SurjectionMap(source, target, table)
