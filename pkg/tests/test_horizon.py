import pytest
from hypothesis import given, settings, strategies as st

import oracles
from synwb.errors import (
    HorizonExhausted,
    LevelMismatch,
    LevelOutOfRange,
    NotFound,
    PreconditionFailed,
)
from synwb.fraisse import LevelSet, bit_graphs, lift_set, linear_orders, pure_sets
from synwb.horizon import (
    PwsCertificate,
    avoiding_block,
    carve_thick,
    decompose,
    destroys,
    is_pws,
    is_syndetic_up_to,
    is_thick_at,
    is_thick_up_to,
    pushforward_thickness,
    split_pws,
    thick_witness,
)

LIN = linear_orders()
PURE = pure_sets()
BIT = bit_graphs()


def points(*pos, N=4, ex=LIN):
    """Level set of single points; ``pos`` counts from 1 as on a chain."""
    return LevelSet.from_images(ex, 1, N, [(p - 1,) for p in pos])


def members(S):
    return {e.images for e in S.embeddings()}


# thickness

def test_thick_full_set():
    full = LevelSet.full(LIN, 1, 4)
    v = is_thick_up_to(full, 4)
    assert v.thick and [lvl for lvl, _ in v.witnesses] == [1, 2, 3, 4]
    assert v.validate(full)


def test_thick_two_points():
    T = points(2, 3)
    w = is_thick_at(T, 2)
    assert w.found and w.embedding.images == (1, 2) and w.index == 3
    assert not is_thick_at(T, 3).found
    v = is_thick_up_to(T, 3)
    assert not v.thick and v.refuted_at == 3 and v.witness(2) == 3
    assert v.validate(T)


def test_thick_empty():
    v = is_thick_up_to(LevelSet.empty(LIN, 1, 4), 4)
    assert v.refuted_at == 1


def test_level_range_checked():
    with pytest.raises(LevelOutOfRange):
        is_thick_at(points(1), 5)
    with pytest.raises(LevelOutOfRange):
        is_pws(points(1), 3, 2)


def test_syndetic_examples():
    assert is_syndetic_up_to(LevelSet.full(LIN, 1, 4), 4).level == 1
    v = is_syndetic_up_to(points(1, 3), 3)
    assert v.level == 3
    # at level 2 the pair of points 2 and 4 avoids the set
    assert dict(v.avoiders)[2] == LIN.table(2, 4).index_of((1, 3))
    assert not is_syndetic_up_to(LevelSet.empty(LIN, 1, 4), 4).syndetic


@pytest.mark.parametrize("ex,m,N", [(LIN, 1, 4), (PURE, 2, 4), (BIT, 1, 5)], ids=["lin", "pure", "bit"])
def test_thick_syndetic_duality(ex, m, N):
    size = len(ex.table(m, N))
    for bits in range(1 << size):
        S = LevelSet(ex, m, N, bits)
        comp = S.complement()
        for n in range(m, N + 1):
            assert (thick_witness(comp, n) is None) == is_syndetic_up_to(S, n).syndetic
            assert (avoiding_block(S, n) is None) == (thick_witness(comp, n) is None)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_witnesses_are_sound_and_monotone(data):
    ex = data.draw(st.sampled_from([LIN, BIT, PURE]))
    m = data.draw(st.integers(1, 2))
    N = data.draw(st.integers(m + 1, 5))
    size = len(ex.table(m, N))
    T = LevelSet(ex, m, N, data.draw(st.integers(0, (1 << size) - 1)))
    bigger = T.with_bits(T.bits | data.draw(st.integers(0, (1 << size) - 1)))
    v = is_thick_up_to(T, N)
    for level, i in v.witnesses:
        if i is None:
            assert not oracles.thick_at(ex, m, N, members(T), level)
        else:
            x = ex.table(level, N)[i]
            inner = oracles.all_embeddings(ex.level(m), ex.level(level))
            assert all(oracles.compose(x, f) in members(T) for f in inner)
            assert is_thick_at(bigger, level).found
    s = is_syndetic_up_to(T, N)
    assert s.syndetic == oracles.syndetic_up_to(ex, m, N, members(T), N)


# piecewise syndeticity

def test_pws_examples():
    full = LevelSet.full(LIN, 1, 4)
    assert is_pws(full, 1, 2).certificate.n == 1
    c = is_pws(points(2), 1, 1).certificate
    assert c.z == 1 and c.validate(points(2))
    v = is_pws(LevelSet.empty(LIN, 1, 4), 2, 3)
    assert not v.pws and len(v.refutation) == len(LIN.table(3, 4))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_pws_certificates_match_oracle(data):
    ex = data.draw(st.sampled_from([LIN, BIT]))
    N = data.draw(st.integers(2, 5))
    n = data.draw(st.integers(1, N))
    n_prime = data.draw(st.integers(n, N))
    size = len(ex.table(1, N))
    P = LevelSet(ex, 1, N, data.draw(st.integers(0, (1 << size) - 1)))
    v = is_pws(P, n, n_prime)
    found = any(oracles.pws_certificates(ex, 1, N, members(P), k, [n_prime]) for k in range(1, n + 1))
    assert v.pws == found
    if v.pws:
        c = v.certificate
        z = ex.table(n_prime, N)[c.z]
        assert oracles.pws_inside(ex, 1, N, members(P), c.n, n_prime, z.images)


def test_destroys_examples():
    full = LevelSet.full(LIN, 1, 4)
    assert destroys(full, full, 3)
    assert not destroys(LevelSet.empty(LIN, 1, 4), full, 3)
    assert destroys(points(2, 3), full, 3)
    with pytest.raises(PreconditionFailed):
        destroys(full, points(2, 3), 3)
    with pytest.raises(LevelMismatch):
        destroys(full, LevelSet.full(LIN, 1, 5), 2)


# decomposition

def test_decompose_full():
    full = LevelSet.full(LIN, 1, 4)
    d = decompose(full, 3, 3)
    assert d.T == full and d.S == full and d.validate()


def test_decompose_two_points():
    P = points(2, 3)
    d = decompose(P, 2, 2)
    assert d.strategy == "self" and d.T == P and d.S == LevelSet.full(LIN, 1, 4)
    assert d.S & d.T == P


def test_decompose_uses_block():
    P = points(1, 2, 3, 5, 6, N=6)
    d = decompose(P, 3, 3)
    assert d.validate() and (d.S & d.T) == P
    assert thick_witness(d.T - P, 3) is None


def test_decompose_not_found():
    with pytest.raises(NotFound):
        decompose(LevelSet.empty(LIN, 1, 4), 2, 3)


# splitting

def test_split_trivial_cases():
    P = points(2, 3)
    cert = is_pws(P, 1, 2).certificate
    idx, c = split_pws(P, LevelSet.empty(LIN, 1, 4), cert)
    assert idx == 1 and c.validate(P)
    idx, c = split_pws(P, P, cert)
    assert c.validate(P)


def test_split_rejects_bad_certificate():
    bogus = PwsCertificate("linear", 1, 4, 1, 2, 0)
    with pytest.raises(PreconditionFailed):
        split_pws(LevelSet.empty(LIN, 1, 4), LevelSet.empty(LIN, 1, 4), bogus)


@pytest.mark.parametrize("ex,N,n_prime", [(LIN, 5, 2), (LIN, 5, 3), (BIT, 5, 3)], ids=["lin2", "lin3", "bit3"])
def test_split_exhaustive_small_regime(ex, N, n_prime):
    """Every certified P and every 2-partition, against brute-force certificate search."""
    size = len(ex.table(1, N))
    for bits in range(1, 1 << size):
        P = LevelSet(ex, 1, N, bits)
        cert = is_pws(P, 1, n_prime).certificate
        if cert is None or cert.n != 1:
            continue
        z = ex.table(n_prime, N)[cert.z]
        idx_bits = P.indices()
        for choice in range(1 << len(idx_bits)):
            P1 = LevelSet.from_indices(ex, 1, N, [i for k, i in enumerate(idx_bits) if choice >> k & 1])
            P2 = P - P1
            idx, found = split_pws(P1, P2, cert)
            part = P1 if idx == 1 else P2
            zz = ex.table(found.n_prime, N)[found.z]
            assert set(zz.images) <= set(z.images)
            assert oracles.pws_inside(ex, 1, N, members(part), 1, found.n_prime, zz.images)


# carving

def test_carve_empty_avoid():
    T = LevelSet.full(LIN, 1, 5)
    c = carve_thick(T, LevelSet.empty(LIN, 1, 5), 2, 3)
    assert c.U.issubset(T) and c.thick.thick


def test_carve_precondition():
    T = LevelSet.full(LIN, 1, 5)
    with pytest.raises(PreconditionFailed):
        carve_thick(T, T, 2, 3)
    with pytest.raises(PreconditionFailed):
        carve_thick(points(2, 3, N=5), LevelSet.empty(LIN, 1, 5), 2, 3)


def test_carve_around_a_point():
    T = LevelSet.full(LIN, 1, 6)
    W = points(1, N=6)
    assert not is_pws(W, 2, 3).pws
    c = carve_thick(T, W, 2, 3)
    assert c.U.issubset(T - W)
    assert oracles.thick_up_to(LIN, 1, 6, members(c.U), 2)


# pushforward thickness

def test_pushforward_identity():
    T = points(2, 3)
    r = pushforward_thickness(LIN.inclusion(1, 1), T, 3)
    assert r.base.witnesses == r.lifted.witnesses and r.consistent


def test_pushforward_full():
    r = pushforward_thickness(LIN.inclusion(1, 2), LevelSet.full(LIN, 1, 5), 4)
    assert r.base.thick and r.lifted.thick and r.consistent


def test_pushforward_two_points():
    f = LIN.inclusion(1, 2)
    T = points(2, 3)
    r = pushforward_thickness(f, T, 2)
    assert [e.images for e in r.lifted_set.embeddings()] == [(1, 2), (1, 3), (2, 3)]
    assert r.consistent and r.untranslated == (2,)
    assert dict(r.backward)[1] == (2, 1)
    with pytest.raises(HorizonExhausted):
        pushforward_thickness(f, T, 2, strict=True)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_lifted_witness_restricts(data):
    """A witness for f(T) at level n converts to one for T at level n."""
    ex = data.draw(st.sampled_from([LIN, PURE]))
    N = data.draw(st.integers(3, 5))
    f = data.draw(st.sampled_from(list(ex.table(1, 2))))
    size = len(ex.table(1, N))
    T = LevelSet(ex, 1, N, data.draw(st.integers(0, (1 << size) - 1)))
    lifted = lift_set(f, T)
    for n in range(2, N + 1):
        x = thick_witness(lifted, n)
        if x is None:
            continue
        # x o g o f lies in T for every g in Emb(A_2, A_n)
        xe = ex.table(n, N)[x]
        for g in ex.table(2, n):
            assert oracles.compose(xe, ex.embedding(1, n, oracles.compose(g, f))) in members(T)
        assert pushforward_thickness(f, T, n).consistent

