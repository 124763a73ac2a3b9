import pytest
from hypothesis import given, strategies as st

from synwb.errors import InputParseError
from synwb.family import GroundSet, iter_families, iter_surjections
from synwb.formats import (
    format_certificate,
    format_family,
    format_level_set,
    format_map,
    format_structure,
    format_upset,
    format_window,
    load_exhaustion,
    parse_certificate,
    parse_family,
    parse_level_header,
    parse_level_set,
    parse_map,
    parse_structure,
    parse_upset,
    parse_window,
)
from synwb.fraisse import LevelSet, bit_graphs, linear_orders
from synwb.horizon import PwsCertificate
from synwb.zgroup import UPSet, WindowSet

LIN = linear_orders()


def test_family_roundtrip_exhaustive():
    ground = GroundSet(("a", "b", "c"))
    for S in iter_families(ground):
        text = format_family(S)
        assert parse_family(text) == S
        assert format_family(parse_family(text)) == text


def test_family_without_header():
    S = parse_family("# size two\na, b\n\nb, c\na,c\n")
    assert S.ground.elements == ("a", "b", "c") and len(S.minimals) == 3


def test_family_errors_carry_lines():
    with pytest.raises(InputParseError, match=r"fam:3: .*not in the ground set"):
        parse_family("ground: a, b\na\nc\n", "fam")
    with pytest.raises(InputParseError, match=r":2: ground header"):
        parse_family("a\nground: a\n")
    with pytest.raises(InputParseError):
        parse_family("# nothing\n")


def test_map_roundtrip():
    X, Y = GroundSet(("1", "2", "3")), GroundSet(("x", "y"))
    for phi in iter_surjections(X, Y):
        text = format_map(phi)
        assert parse_map(text) == phi
        assert format_map(parse_map(text)) == text


def test_map_defaults_and_errors():
    phi = parse_map("a -> x\nb -> x\nc -> y\n")
    assert phi.source.elements == ("a", "b", "c") and phi.target.elements == ("x", "y")
    with pytest.raises(InputParseError, match=r":2: atom 'a' is mapped twice"):
        parse_map("a -> x\na -> y\n")
    with pytest.raises(InputParseError, match=r":1: expected"):
        parse_map("a => x\n")
    with pytest.raises(InputParseError, match="does not cover"):
        parse_map("target: x, y\na -> x\n")
    with pytest.raises(InputParseError, match="unmapped"):
        parse_map("source: a, b\na -> x\n")


def test_structure_roundtrip():
    text = "signature: lt/2\nuniverse: p, q, r\nrel lt: (p,q) (p,r) (q,r)\n"
    A = parse_structure(text)
    assert format_structure(A) == text
    assert parse_structure(format_structure(A)) == A
    pure = parse_structure("universe: a, b\n")
    assert format_structure(pure) == "signature: \nuniverse: a, b\n"
    assert parse_structure(format_structure(pure)) == pure


def test_structure_errors():
    with pytest.raises(InputParseError, match=r":1: expected name/arity"):
        parse_structure("signature: lt\nuniverse: a\n")
    with pytest.raises(InputParseError, match=r":3: no relation named 'gt'"):
        parse_structure("signature: lt/2\nuniverse: a, b\nrel gt: (a,b)\n")
    with pytest.raises(InputParseError, match="missing universe"):
        parse_structure("signature: lt/2\n")
    with pytest.raises(InputParseError, match=r":2: relation tuples"):
        parse_structure("universe: a\nrel lt: a,b\n")


def test_exhaustion_file(tmp_path):
    for n in range(1, 4):
        pts = [f"p{i}" for i in range(n)]
        rel = " ".join(f"({a},{b})" for i, a in enumerate(pts) for b in pts[i + 1:])
        (tmp_path / f"a{n}.str").write_text(f"signature: lt/2\nuniverse: {', '.join(pts)}\nrel lt: {rel}\n")
    (tmp_path / "chain.exh").write_text("name: chain\nlevel: a1.str\nlevel: a2.str\nlevel: a3.str\n")
    ex = load_exhaustion(tmp_path / "chain.exh")
    assert ex.name == "chain" and ex.top == 3 and len(ex.table(1, 3)) == 3
    (tmp_path / "bad.exh").write_text("level: a2.str\nlevel: a1.str\n")
    with pytest.raises(InputParseError, match="grow strictly"):
        load_exhaustion(tmp_path / "bad.exh")
    (tmp_path / "missing.exh").write_text("level: nope.str\n")
    with pytest.raises(InputParseError, match=r"missing.exh:1: cannot read"):
        load_exhaustion(tmp_path / "missing.exh")


@given(st.sampled_from(["linear", "bit"]), st.integers(1, 2), st.integers(2, 6), st.data())
def test_level_set_roundtrip(name, m, N, data):
    ex = LIN if name == "linear" else bit_graphs()
    size = len(ex.table(m, N))
    S = LevelSet(ex, m, N, data.draw(st.integers(0, (1 << size) - 1)))
    text = format_level_set(S)
    assert parse_level_set(text, ex) == S
    assert format_level_set(parse_level_set(text, ex)) == text


def test_level_set_parsing():
    S = parse_level_set("level 1, horizon 4, class linear\n0x6\n", LIN)
    assert S.indices() == [1, 2]
    assert parse_level_header("level 2, horizon 5, class bit\n1f\nf\n").bits == 0x1FF
    with pytest.raises(InputParseError, match=r":1: expected 'level"):
        parse_level_set("level 1 horizon 4\n", LIN)
    with pytest.raises(InputParseError, match=r":3: bitset"):
        parse_level_set("level 1, horizon 4, class linear\n1\n0xg\n", LIN)
    with pytest.raises(InputParseError, match="not 'linear'"):
        parse_level_set("level 1, horizon 4, class bit\n1\n", LIN)
    with pytest.raises(InputParseError, match="longer than"):
        parse_level_set("level 1, horizon 4, class linear\n1f\n", LIN)


def test_certificate_roundtrip():
    c = PwsCertificate("linear", 1, 6, 1, 3, 4)
    text = format_certificate(c)
    assert parse_certificate(text) == c and format_certificate(parse_certificate(text)) == text
    with pytest.raises(InputParseError):
        parse_certificate("pws class=linear m=1\n")
    with pytest.raises(InputParseError):
        parse_certificate("pws class=linear m=1 N=6 n=x n_prime=3 z=4\n")


@given(st.integers(1, 6).flatmap(lambda p: st.text("01", min_size=p, max_size=p)),
       st.lists(st.integers(-20, 20), max_size=5))
def test_upset_roundtrip(pattern, patch):
    A = UPSet.make(pattern, patch)
    text = format_upset(A)
    assert parse_upset(text) == A and format_upset(parse_upset(text)) == text


def test_upset_literal():
    A = parse_upset("period=3 pattern=110 patch=+7,-2")
    assert A.period == 3 and A.patch == {7, -2}
    assert format_upset(A) == "period=3 pattern=110 patch=-2,+7"
    assert parse_upset(["pattern=10"]) == UPSet.make("10")
    for bad in ("period=2 pattern=110", "pattern=1 colour=red", "period=3", "pattern=1 patch=a"):
        with pytest.raises(InputParseError):
            parse_upset(bad)


def test_window_roundtrip():
    W = WindowSet.from_members(4, [-4, 0, 3])
    assert parse_window(format_window(W)) == W
    with pytest.raises(InputParseError):
        parse_window("0110")
