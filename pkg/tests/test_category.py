from hypothesis import given, strategies as st
import pytest

from catcohom.category import FiniteCategory, LambdaModule, ModuleMorphism, validate_category, validate_module
from catcohom.errors import CapacityError, InvalidInputError
from catcohom.bar import cohomology_finite
from catcohom.instances import omega, z2_category
from catcohom.linalg import AbelianGroupStructure, IntMatrix


def cyclic_group_category(m: int) -> FiniteCategory:
    names = [f"g{i}" for i in range(m)]
    table = {(names[i], names[j]): names[(i + j) % m] for i in range(m) for j in range(m)}
    return FiniteCategory(["*"], {n: ("*", "*") for n in names}, {"*": "g0"}, table)


def test_omega_unit_square_is_a_category():
    assert validate_category(omega(2, 1)).ok


def test_identity_law_violation():
    c = z2_category()
    c.table[("1", "t")] = "1"
    assert "identity" in validate_category(c).kinds()


def test_pure_associativity_violation():
    # Three-element monoid {1, a, b} with a a = b, a b = a, b a = b, b b = b.
    table = {("1", x): x for x in "1ab"} | {(x, "1"): x for x in "1ab"}
    table |= {("a", "a"): "b", ("a", "b"): "a", ("b", "a"): "b", ("b", "b"): "b"}
    c = FiniteCategory(["*"], {x: ("*", "*") for x in "1ab"}, {"*": "1"}, table)
    assert "associativity" in validate_category(c).kinds()


def test_missing_composite_is_reported():
    c = z2_category()
    del c.table[("t", "t")]
    assert "closure" in validate_category(c).kinds()


def test_unknown_identifiers_raise():
    with pytest.raises(InvalidInputError):
        FiniteCategory(["a"], {"m": ("a", "b")}, {}, {})


def test_composable_tuples_examples():
    c = z2_category()
    assert c.composable_tuples(0) == ["*"]
    assert c.composable_tuples(2) == [("1", "1"), ("1", "t"), ("t", "1"), ("t", "t")]
    o = omega(2, 1)
    for a, b in o.composable_tuples(2):
        assert o.src(a) == o.tgt(b)


def test_sign_module_on_z2():
    c = z2_category()
    z = AbelianGroupStructure(1, ())
    a = LambdaModule(c, {"*": z}, {"1": IntMatrix([[1]]), "t": IntMatrix([[-1]])})
    assert validate_module(c, a).ok


def test_doubling_is_not_a_z2_module():
    c = z2_category()
    z = AbelianGroupStructure(1, ())
    a = LambdaModule(c, {"*": z}, {"1": IntMatrix([[1]]), "t": IntMatrix([[2]])})
    assert "contravariance" in validate_module(c, a).kinds()


def test_ill_defined_torsion_action():
    c = z2_category()
    z2, z = AbelianGroupStructure.from_orders([2]), AbelianGroupStructure(1, ())
    a = LambdaModule(c, {"*": z2}, {"1": IntMatrix([[1]]), "t": IntMatrix([[1]])})
    assert validate_module(c, a).ok
    # Z/2 -> Z by 1 is not a homomorphism.
    m = ModuleMorphism(a, LambdaModule.constant(c, z), {"*": IntMatrix([[1]])})
    assert "well-defined" in m.validate(c.morphisms).kinds()


def test_omega_module_naturality():
    o = omega(2, 1)
    const = LambdaModule.constant(o)
    twice = ModuleMorphism(const, const, {v: IntMatrix([[2]]) for v in o.objects})
    assert twice.validate(o.morphisms).ok


def test_capacity_cap(monkeypatch):
    monkeypatch.setenv("CATCOHOM_CAP", "10")
    with pytest.raises(CapacityError):
        cohomology_finite(z2_category(), None, 4)


@given(st.integers(1, 4), st.integers(0, 4))
def test_monoid_tuple_count(m, n):
    c = cyclic_group_category(m)
    assert len(c.composable_tuples(n)) == c.count_composable(n) == (m ** n if n else 1)


@given(st.integers(1, 2), st.integers(1, 4))
def test_tuple_projections_are_composable(size, n):
    o = omega(2, size)
    tuples = o.composable_tuples(n)
    assert len(tuples) == o.count_composable(n) == len(set(tuples))
    shorter = set(o.composable_tuples(n - 1)) if n > 1 else None
    for t in tuples:
        for i in range(n - 1):
            assert o.src(t[i]) == o.tgt(t[i + 1])
        if shorter is not None:
            assert t[1:] in shorter and t[:-1] in shorter


@given(st.integers(1, 5))
def test_cyclic_groups_validate(m):
    assert validate_category(cyclic_group_category(m)).ok
