"""Thick, syndetic and piecewise syndetic subsets of ``Emb(A_m, A_N)``.

Every search is truncated at the horizon ``N`` of its level set: a witness
found below the horizon is genuine, a refutation is exhaustive only over
embeddings that land in ``A_N``.  Verdicts record ``(m, N)`` and the level
parameters they were computed with, and carry canonical indices so they
can be re-checked independently.

Blocks: for ``x`` in ``Emb(A_n, A_N)`` the *block* of ``x`` is
``x o Emb(A_m, A_n)``, a subset of ``Emb(A_m, A_N)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (
    DescentExhausted,
    HorizonExhausted,
    LevelMismatch,
    LevelOutOfRange,
    NotFound,
    PreconditionFailed,
)
from .fraisse import Embedding, LevelSet, lift_set

EXHAUSTIVE_BITS = 20


def _check_range(S: LevelSet, *levels: int):
    lo = S.m
    for n in levels:
        if not lo <= n <= S.N:
            raise LevelOutOfRange(f"level {n} outside {lo}..{S.N}")
        lo = n


def _blocks(S: LevelSet, n: int) -> tuple[int, ...]:
    return S.exhaustion.block_masks(S.m, n, S.N)


def thick_witness(T: LevelSet, n: int) -> int | None:
    """Index of the canonically first ``x`` whose block lies inside ``T``."""
    _check_range(T, n)
    for i, block in enumerate(_blocks(T, n)):
        if block & ~T.bits == 0:
            return i
    return None


def avoiding_block(S: LevelSet, n: int) -> int | None:
    """Index of the first ``x`` whose block misses ``S`` entirely."""
    _check_range(S, n)
    for i, block in enumerate(_blocks(S, n)):
        if block & S.bits == 0:
            return i
    return None


@dataclass(frozen=True)
class LevelWitness:
    level: int
    index: int | None
    embedding: Embedding | None

    @property
    def found(self) -> bool:
        return self.index is not None


def is_thick_at(T: LevelSet, n: int) -> LevelWitness:
    i = thick_witness(T, n)
    emb = T.exhaustion.table(n, T.N)[i] if i is not None else None
    return LevelWitness(n, i, emb)


@dataclass(frozen=True)
class ThickVerdict:
    """Per-level thickness witnesses for ``T``, up to the first refuting level."""

    class_name: str
    m: int
    N: int
    n_max: int
    witnesses: tuple[tuple[int, int | None], ...]

    @property
    def thick(self) -> bool:
        return all(i is not None for _, i in self.witnesses) and self.witnesses[-1][0] == self.n_max

    @property
    def refuted_at(self) -> int | None:
        for level, i in self.witnesses:
            if i is None:
                return level
        return None

    def witness(self, level: int) -> int | None:
        return dict(self.witnesses).get(level)

    def validate(self, T: LevelSet) -> bool:
        for level, i in self.witnesses:
            blocks = _blocks(T, level)
            if i is None:
                if any(b & ~T.bits == 0 for b in blocks):
                    return False
            elif blocks[i] & ~T.bits:
                return False
        return True


def is_thick_up_to(T: LevelSet, n_max: int) -> ThickVerdict:
    _check_range(T, n_max)
    found = []
    for n in range(T.m, n_max + 1):
        i = thick_witness(T, n)
        found.append((n, i))
        if i is None:
            break
    return ThickVerdict(T.exhaustion.name, T.m, T.N, n_max, tuple(found))


@dataclass(frozen=True)
class SyndeticVerdict:
    """``level`` is the least certified level, or ``None`` when refuted.

    ``avoiders`` holds, for each level below the certificate, a block that
    misses ``S``: these witness thickness of the complement.
    """

    class_name: str
    m: int
    N: int
    n_max: int
    level: int | None
    avoiders: tuple[tuple[int, int], ...]

    @property
    def syndetic(self) -> bool:
        return self.level is not None


def is_syndetic_up_to(S: LevelSet, n_max: int) -> SyndeticVerdict:
    _check_range(S, n_max)
    avoiders = []
    level = None
    for n in range(S.m, n_max + 1):
        i = avoiding_block(S, n)
        if i is None:
            level = n
            break
        avoiders.append((n, i))
    return SyndeticVerdict(S.exhaustion.name, S.m, S.N, n_max, level, tuple(avoiders))


# piecewise syndetic sets

def _inner_blocks(S: LevelSet, n: int, n_prime: int, z: int) -> list[int]:
    """Blocks of ``z o x`` for every ``x`` in ``Emb(A_n, A_n')``."""
    ex = S.exhaustion
    row = ex.compose_table(n, n_prime, S.N)[z]
    blocks = _blocks(S, n)
    return [blocks[j] for j in row]


def _syndetic_inside(P: LevelSet, n: int, n_prime: int, z: int) -> bool:
    return all(b & P.bits for b in _inner_blocks(P, n, n_prime, z))


@dataclass(frozen=True)
class PwsCertificate:
    """``P`` meets the block of ``z o x`` for every ``x`` in ``Emb(A_n, A_n')``."""

    class_name: str
    m: int
    N: int
    n: int
    n_prime: int
    z: int

    def validate(self, P: LevelSet) -> bool:
        if (P.m, P.N) != (self.m, self.N):
            return False
        return _syndetic_inside(P, self.n, self.n_prime, self.z)

    def block(self, P: LevelSet) -> LevelSet:
        """The level set ``z o Emb(A_m, A_n')``."""
        return P.with_bits(_blocks(P, self.n_prime)[self.z])


@dataclass(frozen=True)
class PwsVerdict:
    """Either a certificate, or for every block ``z`` an ``x`` whose block misses ``P``."""

    class_name: str
    m: int
    N: int
    n: int
    n_prime: int
    certificate: PwsCertificate | None
    refutation: tuple[int, ...] = field(default=())

    @property
    def pws(self) -> bool:
        return self.certificate is not None


def pws_blocks(P: LevelSet, n: int, n_prime: int) -> list[int]:
    """All ``z`` in ``Emb(A_n', A_N)`` inside which ``P`` is syndetic at level ``n``."""
    _check_range(P, n, n_prime)
    count = len(P.exhaustion.table(n_prime, P.N))
    return [z for z in range(count) if _syndetic_inside(P, n, n_prime, z)]


def is_pws(P: LevelSet, n: int, n_prime: int) -> PwsVerdict:
    """Search inner levels ``m..n`` (least first) and blocks ``z`` canonically."""
    _check_range(P, n, n_prime)
    ex = P.exhaustion
    count = len(ex.table(n_prime, P.N))
    for inner in range(P.m, n + 1):
        for z in range(count):
            if _syndetic_inside(P, inner, n_prime, z):
                cert = PwsCertificate(ex.name, P.m, P.N, inner, n_prime, z)
                return PwsVerdict(ex.name, P.m, P.N, n, n_prime, cert)
    refutation = []
    for z in range(count):
        for x, b in enumerate(_inner_blocks(P, n, n_prime, z)):
            if b & P.bits == 0:
                refutation.append(x)
                break
    return PwsVerdict(ex.name, P.m, P.N, n, n_prime, None, tuple(refutation))


def destroys(P: LevelSet, T: LevelSet, n: int) -> bool:
    """Whether ``T - P`` has no thickness witness at level ``n``."""
    if (P.m, P.N) != (T.m, T.N):
        raise LevelMismatch("P and T live on different levels")
    if thick_witness(T, n) is None:
        raise PreconditionFailed(f"T is not thick at level {n}")
    return thick_witness(T - P, n) is None


@dataclass(frozen=True)
class Decomposition:
    """``P = S & T`` with ``T`` thick through ``n_max`` and ``T - P`` refuted there."""

    P: LevelSet
    S: LevelSet
    T: LevelSet
    n_max: int
    n_prime: int
    strategy: str
    certificate: PwsCertificate
    thick: ThickVerdict
    syndetic: SyndeticVerdict

    def validate(self) -> bool:
        return (self.S.bits & self.T.bits == self.P.bits
                and self.thick.thick and self.thick.validate(self.T)
                and thick_witness(self.T - self.P, self.n_max) is None
                and self.syndetic.level is not None and self.syndetic.level <= self.n_max)


def _accepts(P: LevelSet, T: LevelSet, n_max: int) -> bool:
    if thick_witness(T - P, n_max) is not None:
        return False
    return is_thick_up_to(T, n_max).thick


def decompose(P: LevelSet, n_max: int, n_prime: int,
              exhaustive_bits: int = EXHAUSTIVE_BITS) -> Decomposition:
    """Split a certified piecewise syndetic ``P`` as syndetic ``S`` meet thick ``T``.

    Candidates for ``T``, in order: ``P`` itself; ``P`` joined with a block
    ``z o Emb(A_m, A_n')`` inside which ``P`` is syndetic; every superset of
    ``P`` when the level has at most ``exhaustive_bits`` embeddings.
    """
    _check_range(P, n_max)
    _check_range(P, n_prime)
    verdict = is_pws(P, min(n_max, n_prime), n_prime)
    if verdict.certificate is None:
        raise NotFound(f"P has no pws certificate at inner level <= {min(n_max, n_prime)}, "
                       f"block level {n_prime}; try larger parameters")
    cert = verdict.certificate

    def finish(T: LevelSet, strategy: str) -> Decomposition:
        S = P | T.complement()
        dec = Decomposition(P, S, T, n_max, n_prime, strategy, cert,
                            is_thick_up_to(T, n_max), is_syndetic_up_to(S, n_max))
        if not dec.validate():
            raise AssertionError("decomposition failed its own re-validation")
        return dec

    if _accepts(P, P, n_max):
        return finish(P, "self")
    blocks = _blocks(P, n_prime)
    for z in pws_blocks(P, cert.n, n_prime):
        T = P.with_bits(P.bits | blocks[z])
        if _accepts(P, T, n_max):
            return finish(T, "block")
    if P.size <= exhaustive_bits:
        free = [i for i in range(P.size) if not P.bits >> i & 1]
        for r in range(1, len(free) + 1):
            for extra in itertools.combinations(free, r):
                bits = P.bits
                for i in extra:
                    bits |= 1 << i
                T = P.with_bits(bits)
                if _accepts(P, T, n_max):
                    return finish(T, "exhaustive")
    raise NotFound(f"no thick T destroyed by P within horizon {P.N}; try larger parameters")


def split_pws(P1: LevelSet, P2: LevelSet, cert: PwsCertificate) -> tuple[int, PwsCertificate]:
    """One part of a certified union, with a certificate inside the original block.

    Block levels descend from ``n'`` to ``n``; at each level every sub-block
    ``z o u`` is tried for ``P1`` before any is tried for ``P2``.
    """
    union = P1 | P2
    if not cert.validate(union):
        raise PreconditionFailed("certificate does not hold for P1 | P2")
    ex = union.exhaustion
    n = cert.n
    for level in range(cert.n_prime, n - 1, -1):
        subs = ex.compose_table(level, cert.n_prime, union.N)[cert.z]
        for idx, part in ((1, P1), (2, P2)):
            for w in subs:
                if _syndetic_inside(part, n, level, w):
                    found = PwsCertificate(ex.name, union.m, union.N, n, level, w)
                    if not found.validate(part):
                        raise AssertionError("split certificate failed re-validation")
                    return idx, found
    raise DescentExhausted(f"neither part certifies inside block {cert.z} at level {cert.n_prime}")


@dataclass(frozen=True)
class Carving:
    U: LevelSet
    n: int
    n_prime: int
    blocks: tuple[int, ...]
    thick: ThickVerdict


def carve_thick(T: LevelSet, W: LevelSet, n: int, n_prime: int) -> Carving:
    """A thick ``U`` inside ``T - W`` built from ``W``-free ``n``-blocks.

    For each level ``k`` in ``n..n'`` take the witness ``x_k`` of ``T`` and
    collect every ``x_k o u`` (``u`` in ``Emb(A_n, A_k)``) whose block misses ``W``.
    """
    if (T.m, T.N) != (W.m, W.N):
        raise LevelMismatch("T and W live on different levels")
    _check_range(T, n, n_prime)
    if thick_witness(T, n_prime) is None:
        raise PreconditionFailed(f"T is not thick at level {n_prime}")
    if is_pws(W, n, n_prime).pws:
        raise PreconditionFailed(f"W is piecewise syndetic at ({n}, {n_prime})")
    ex = T.exhaustion
    inner = _blocks(T, n)
    used = []
    bits = 0
    for k in range(n, n_prime + 1):
        x = thick_witness(T, k)
        for y in ex.compose_table(n, k, T.N)[x]:
            if inner[y] & W.bits == 0 and y not in used:
                used.append(y)
                bits |= inner[y]
    if not bits:
        raise NotFound("no W-free block inside the witnesses of T")
    U = T.with_bits(bits)
    verdict = is_thick_up_to(U, n)
    if not (U.issubset(T - W) and verdict.thick):
        raise AssertionError("carved set failed its own re-validation")
    return Carving(U, n, n_prime, tuple(used), verdict)


@dataclass(frozen=True)
class PushforwardThickness:
    """Thickness of ``T`` and of ``f(T)`` side by side, with witness transfers.

    ``forward[k]``: a witness of ``T`` at level ``k`` reused for ``f(T)``.
    ``backward[k] = (l, i)``: at level ``l`` every embedding of ``A_m`` into
    ``A_l`` through ``A_k`` factors through ``f``, and a witness of ``f(T)``
    at ``l`` restricts to the witness ``i`` of ``T`` at ``k`` (``i`` is
    ``None`` when ``f(T)`` has no witness at ``l``).  Levels whose
    translation runs past the horizon are listed in ``untranslated``.
    """

    base: ThickVerdict
    lifted: ThickVerdict
    lifted_set: LevelSet
    forward: tuple[tuple[int, int], ...]
    backward: tuple[tuple[int, tuple[int, int | None]], ...]
    untranslated: tuple[int, ...]
    consistent: bool


def translation_level(f: Embedding, T: LevelSet, k: int) -> int | None:
    """Least ``l`` with ``i_k^l o Emb(A_m, A_k)`` inside ``Emb(A_n, A_l) o f``."""
    ex = T.exhaustion
    n = ex.level_of(f.target)
    for ell in range(max(k, n), T.N + 1):
        inc = ex.inclusion(k, ell)
        hit = {tuple(x[i] for i in f.images) for x in ex.table(n, ell).images}
        if all(tuple(inc.images[j] for j in h) in hit for h in ex.table(T.m, k).images):
            return ell
    return None


def pushforward_thickness(f: Embedding, T: LevelSet, n_max: int,
                          strict: bool = False) -> PushforwardThickness:
    ex = T.exhaustion
    n = ex.level_of(f.target)
    if not T.m <= n <= n_max <= T.N:
        raise LevelOutOfRange(f"need {T.m} <= {n} <= n_max={n_max} <= {T.N}")
    lifted = lift_set(f, T)
    base = is_thick_up_to(T, n_max)
    lifted_v = is_thick_up_to(lifted, n_max)
    ok = True

    forward = []
    for level, x in base.witnesses:
        if x is None or level < n:
            continue
        if _blocks(lifted, level)[x] & ~lifted.bits:
            ok = False
        forward.append((level, x))

    backward = []
    untranslated = []
    for k in range(T.m, n_max + 1):
        ell = translation_level(f, T, k)
        if ell is None:
            untranslated.append(k)
            continue
        y = thick_witness(lifted, ell)
        if y is None:
            backward.append((k, (ell, None)))
            continue
        # y is in Emb(A_l, A_N); restrict it along the inclusion of A_k
        inc = ex.inclusion(k, ell)
        y_images = ex.table(ell, T.N).images[y]
        i = ex.table(k, T.N).index_of(tuple(y_images[j] for j in inc.images))
        if _blocks(T, k)[i] & ~T.bits:
            ok = False
        backward.append((k, (ell, i)))
    if strict and untranslated:
        raise HorizonExhausted(f"levels {untranslated} need a translation past horizon {T.N}")
    return PushforwardThickness(base, lifted_v, lifted, tuple(forward), tuple(backward),
                                tuple(untranslated), ok)

