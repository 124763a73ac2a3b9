"""Thick, syndetic and piecewise syndetic sets of integers.

Exact decisions for ultimately periodic sets (a periodic pattern with a
finite patch of toggled exceptions) and finite-window checkers.

Convention: translates are additive.  ``P - g`` is ``{x - g : x in P}`` and
is written ``P.shift(-g)``; the final translate of the uniformization is
``T + g_1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lcm
from typing import Callable, Iterable, NamedTuple

from .errors import NotPws, WindowTooSmall


def _minimal_period(pattern: str) -> str:
    p = len(pattern)
    for d in range(1, p + 1):
        if p % d == 0 and all(pattern[i] == pattern[i % d] for i in range(p)):
            return pattern[:d]
    return pattern


@dataclass(frozen=True)
class UPSet:
    """``x`` is a member iff ``pattern[x mod period]`` is ``"1"``, toggled on the patch.

    Instances are canonical: the period is minimal and the patch holds only
    points whose membership really differs from the periodic part.
    """

    period: int
    pattern: str
    patch: frozenset = frozenset()

    def __post_init__(self):
        if self.period < 1:
            raise ValueError("period must be at least 1")
        if len(self.pattern) != self.period or set(self.pattern) - {"0", "1"}:
            raise ValueError("pattern must be a 0/1 string of length period")
        pattern = _minimal_period(self.pattern)
        object.__setattr__(self, "pattern", pattern)
        object.__setattr__(self, "period", len(pattern))
        object.__setattr__(self, "patch", frozenset(int(x) for x in self.patch))

    @classmethod
    def make(cls, pattern: str, patch: Iterable[int] = (), period: int | None = None) -> "UPSet":
        """Toggles listed twice cancel."""
        toggled: set[int] = set()
        for x in patch:
            toggled ^= {int(x)}
        return cls(len(pattern) if period is None else period, pattern, frozenset(toggled))

    @classmethod
    def from_predicate(cls, pred: Callable[[int], bool], period: int, exceptions: Iterable[int],
                       periodic: Callable[[int], bool]) -> "UPSet":
        pattern = "".join("1" if periodic(r) else "0" for r in range(period))
        patch = {x for x in exceptions if pred(x) != periodic(x)}
        return cls(period, pattern, frozenset(patch))

    @classmethod
    def integers(cls) -> "UPSet":
        return cls(1, "1")

    @classmethod
    def empty(cls) -> "UPSet":
        return cls(1, "0")

    def periodic(self, x: int) -> bool:
        return self.pattern[x % self.period] == "1"

    def __contains__(self, x: int) -> bool:
        return self.periodic(x) != (x in self.patch)

    def members(self, lo: int, hi: int) -> list[int]:
        return [x for x in range(lo, hi + 1) if x in self]

    @property
    def radius(self) -> int:
        return max((abs(x) for x in self.patch), default=0)

    def _combine(self, other: "UPSet", op: Callable[[bool, bool], bool]) -> "UPSet":
        period = lcm(self.period, other.period)
        return UPSet.from_predicate(
            lambda x: op(x in self, x in other), period, self.patch | other.patch,
            lambda x: op(self.periodic(x), other.periodic(x)))

    def __or__(self, other: "UPSet") -> "UPSet":
        return self._combine(other, lambda a, b: a or b)

    def __and__(self, other: "UPSet") -> "UPSet":
        return self._combine(other, lambda a, b: a and b)

    def __sub__(self, other: "UPSet") -> "UPSet":
        return self._combine(other, lambda a, b: a and not b)

    def complement(self) -> "UPSet":
        flipped = "".join("0" if c == "1" else "1" for c in self.pattern)
        return UPSet(self.period, flipped, self.patch)

    def shift(self, t: int) -> "UPSet":
        """``{x + t : x in self}``."""
        pattern = "".join(self.pattern[(r - t) % self.period] for r in range(self.period))
        return UPSet(self.period, pattern, frozenset(x + t for x in self.patch))

    def window(self, W: int) -> "WindowSet":
        return WindowSet(W, tuple(x in self for x in range(-W, W + 1)))

    def literal(self) -> str:
        text = f"period={self.period} pattern={self.pattern}"
        if self.patch:
            text += " patch=" + ",".join(f"{x:+d}" for x in sorted(self.patch))
        return text


class Classification(NamedTuple):
    thick: bool
    syndetic: bool
    pws: bool


def classify_up(A: UPSet) -> Classification:
    """Finite patches never matter: everything is read off the pattern."""
    has_one = "1" in A.pattern
    return Classification("0" not in A.pattern, has_one, has_one)


# finite windows

@dataclass(frozen=True)
class WindowSet:
    """Membership on ``[-W, W]``; ``bits[i]`` describes the integer ``i - W``."""

    W: int
    bits: tuple[bool, ...]

    def __post_init__(self):
        if self.W < 1:
            raise ValueError("window bound must be at least 1")
        if len(self.bits) != 2 * self.W + 1:
            raise ValueError("window needs 2W + 1 entries")

    @classmethod
    def from_members(cls, W: int, members: Iterable[int]) -> "WindowSet":
        keep = set(members)
        return cls(W, tuple(x in keep for x in range(-W, W + 1)))

    @classmethod
    def from_string(cls, text: str) -> "WindowSet":
        text = text.strip()
        if len(text) % 2 == 0 or set(text) - {"0", "1"}:
            raise ValueError("window dump must be an odd-length 0/1 string")
        return cls((len(text) - 1) // 2, tuple(c == "1" for c in text))

    def __contains__(self, x: int) -> bool:
        return -self.W <= x <= self.W and self.bits[x + self.W]

    def members(self) -> list[int]:
        return [i - self.W for i, b in enumerate(self.bits) if b]

    def dump(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def longest_run(self) -> int:
        best = run = 0
        for b in self.bits:
            run = run + 1 if b else 0
            best = max(best, run)
        return best


def _fip(A: WindowSet, E_max: int) -> bool:
    """Whether the translates ``A - g``, ``0 <= g < E_max``, have a common point."""
    members = set(A.members())
    common = None
    for g in range(E_max):
        shifted = {a - g for a in members}
        common = shifted if common is None else common & shifted
        if not common:
            return False
    return bool(common)


def window_thick(A: WindowSet, E_max: int) -> bool:
    """``A`` contains a run of ``E_max`` consecutive integers inside the window."""
    if E_max > 2 * A.W:
        raise WindowTooSmall(f"E_max={E_max} exceeds 2W={2 * A.W}")
    if E_max < 1:
        return True
    by_run = A.longest_run() >= E_max
    by_fip = _fip(A, E_max)
    if by_run != by_fip:
        raise AssertionError("run and intersection formulations disagree")
    return by_run


def window_syndetic(A: WindowSet, gap: int) -> bool:
    """Every run of ``gap`` consecutive window integers meets ``A``."""
    if gap > 2 * A.W + 1:
        raise WindowTooSmall(f"gap={gap} exceeds the window")
    return all(any(A.bits[i:i + gap]) for i in range(len(A.bits) - gap + 1))


def window_pws(A: WindowSet, g_max: int, E_max: int) -> bool:
    """Some union of translates ``A - e``, ``0 <= e < g``, ``g <= g_max``, has a run of ``E_max``."""
    for g in range(1, g_max + 1):
        union = set()
        for e in range(g):
            union |= {a - e for a in A.members()}
        if window_thick(WindowSet.from_members(A.W, union), E_max):
            return True
    return False


# uniformization

@dataclass(frozen=True)
class Psi:
    k: int
    shifts: tuple[int, ...]
    T: UPSet
    value: UPSet


def union_of_translates(P: UPSet, shifts: Iterable[int]) -> UPSet:
    """``(P - g_1) | ... | (P - g_k)``."""
    result = UPSet.empty()
    for g in shifts:
        result = result | P.shift(-g)
    return result


def psi(P: UPSet) -> Psi:
    """Fewest residues ``g_1 < ... < g_k`` making the union of ``P - g_i`` thick.

    Candidates are ordered by ``k``, then lexicographically, so ``g_1 = 0``.
    """
    if not classify_up(P).pws:
        raise NotPws("P is not piecewise syndetic")
    p = P.period
    for k in range(1, p + 1):
        for shifts in itertools.combinations(range(p), k):
            if all(any(P.periodic(r + g) for g in shifts) for r in range(p)):
                T = union_of_translates(P, shifts)
                return Psi(k, shifts, T, T.shift(shifts[0]))
    raise AssertionError("all residues together always cover the pattern")


class UPDecomposition(NamedTuple):
    S: UPSet
    T: UPSet
    psi: Psi


def decompose_up(P: UPSet) -> UPDecomposition:
    """``P = S & T`` with ``T`` thick and ``S = (Z - T) | P`` syndetic."""
    found = psi(P)
    T = found.T.shift(found.shifts[0])
    S = T.complement() | P
    if (S & T) != P:
        raise AssertionError("decomposition does not recover P")
    return UPDecomposition(S, T, found)
