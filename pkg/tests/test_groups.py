import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsgx.errors import AsetFormatError
from bsgx.groups import (
    AdditiveSet,
    GroupSpec,
    add,
    neg,
    parse_set,
    serialize_set,
    sub,
)

Z = GroupSpec((0,))


def test_group_spec_basics():
    spec = GroupSpec((0, 5))
    assert spec.dim == 2
    assert spec.zero() == (0, 0)
    assert spec.reduce((-3, 7)) == (-3, 2)
    assert spec.is_canonical((-3, 2))
    assert not spec.is_canonical((0, 5))
    assert not spec.is_canonical((0,))  # wrong arity


def test_group_spec_rejects_bad_moduli():
    with pytest.raises(ValueError):
        GroupSpec(())
    with pytest.raises(ValueError):
        GroupSpec((1,))
    with pytest.raises(ValueError):
        GroupSpec((0, -3))


def test_arithmetic_wraps_cyclic_coordinates():
    spec = GroupSpec((0, 7))
    assert add(spec, (1, 5), (2, 4)) == (3, 2)
    assert sub(spec, (0, 1), (4, 3)) == (-4, 5)
    assert neg(spec, (2, 3)) == (-2, 4)
    # free coordinate never wraps
    assert add(spec, (10**18, 0), (10**18, 0)) == (2 * 10**18, 0)


def test_arithmetic_rejects_wrong_arity():
    with pytest.raises(ValueError):
        add(Z, (1, 2), (3, 4))


def test_from_elements_canonicalizes():
    spec = GroupSpec((5,))
    a = AdditiveSet.from_elements(spec, [(7,), (2,), (-3,), (0,)])
    assert a.elements == ((0,), (2,))  # 7 and -3 collapse onto 2
    assert len(a) == 2
    assert (2,) in a
    assert (7,) not in a  # membership is on canonical forms


def test_direct_construction_is_strict():
    with pytest.raises(ValueError):
        AdditiveSet(Z, ())
    with pytest.raises(ValueError):
        AdditiveSet(Z, ((1,), (0,)))  # out of order
    with pytest.raises(ValueError):
        AdditiveSet(Z, ((0,), (0,)))  # duplicate
    with pytest.raises(ValueError):
        AdditiveSet(GroupSpec((5,)), ((6,),))  # not canonical


def test_translate_is_a_bijection():
    spec = GroupSpec((0, 3))
    a = AdditiveSet.from_elements(spec, [(0, 0), (1, 2), (4, 1)])
    t = a.translate((5, 2))
    assert len(t) == len(a)
    assert t.elements == tuple(sorted(add(spec, x, (5, 2)) for x in a))


ASET_OK = b"aset 1\ndim 2\nmod 0 5\n# a comment\n0 0\n1 7\n-2 3\n"


def test_parse_reduces_and_sorts():
    a = parse_set(ASET_OK)
    assert a.spec == GroupSpec((0, 5))
    assert a.elements == ((-2, 3), (0, 0), (1, 2))


def test_parse_accepts_str_and_bytes():
    assert parse_set(ASET_OK) == parse_set(ASET_OK.decode("utf-8"))


def test_serialize_round_trip():
    a = parse_set(ASET_OK)
    data = serialize_set(a)
    assert data.endswith(b"\n")
    assert parse_set(data) == a


@pytest.mark.parametrize(
    "text",
    [
        "",
        "aset 1\ndim 1\nmod 0\n",            # no elements
        "aset 2\ndim 1\nmod 0\n0\n",          # wrong version
        "bset 1\ndim 1\nmod 0\n0\n",          # wrong magic
        "aset 1\ndim x\nmod 0\n0\n",          # bad dimension
        "aset 1\ndim 0\nmod\n0\n",            # dim < 1
        "aset 1\ndim 2\nmod 0\n0 0\n",        # mod count mismatch
        "aset 1\ndim 1\nmod 1\n0\n",          # modulus 1 is not a group here
        "aset 1\ndim 1\nmod 0\n1 2\n",        # arity mismatch in element
        "aset 1\ndim 1\nmod 0\nzz\n",         # non-integer coordinate
        "aset 1\ndim 1\nmoduli 0\n0\n",       # bad mod keyword
    ],
)
def test_parse_rejects_malformed_input(text):
    with pytest.raises(AsetFormatError):
        parse_set(text)


def test_parse_rejects_non_utf8():
    with pytest.raises(AsetFormatError):
        parse_set(b"aset 1\xff\ndim 1\nmod 0\n0\n")


# property: parse(serialize(.)) is the identity on canonical sets

coord = st.integers(min_value=-(10**9), max_value=10**9)


@st.composite
def additive_sets(draw):
    dim = draw(st.integers(min_value=1, max_value=3))
    moduli = tuple(
        draw(st.sampled_from([0, 0, 2, 3, 5, 12, 97])) for _ in range(dim)
    )
    spec = GroupSpec(moduli)
    elems = draw(
        st.lists(
            st.tuples(*[coord for _ in range(dim)]), min_size=1, max_size=20
        )
    )
    return AdditiveSet.from_elements(spec, elems)


@given(additive_sets())
@settings(max_examples=100, deadline=None)
def test_round_trip_property(a):
    assert parse_set(serialize_set(a)) == a


@given(additive_sets())
@settings(max_examples=60, deadline=None)
def test_sub_add_inverse_property(a):
    spec = a.spec
    for x in a:
        for y in a:
            assert add(spec, sub(spec, x, y), y) == x
