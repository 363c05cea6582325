import itertools
import random

import pytest

import starcheck as sc
from starcheck.errors import BudgetError, ParseError

from conftest import all_maps, all_partitions, empty_set_algebra, load_algebra


class TestParsing:
    def test_bool2_shape(self, bool2):
        assert bool2.size == 2
        assert len(bool2.signature.symbols) == 5
        assert bool2.signature.constant_symbols == ("zero", "one")
        assert bool2.apply("and", (1, 1)) == 1
        assert bool2.apply("not", (0,)) == 1

    def test_table_length_error(self):
        text = "algebra a\nsize 2\nop and/2 = [0 0 0]\n"
        with pytest.raises(ParseError) as exc:
            sc.parse_algebra(text, "a.alg")
        assert "expected 4" in str(exc.value)
        assert exc.value.line == 3

    def test_out_of_range_entry(self):
        with pytest.raises(ParseError, match="out of range"):
            sc.parse_algebra("algebra a\nsize 2\nop f/1 = [0 2]\n")

    def test_syntax_error_position(self):
        with pytest.raises(ParseError) as exc:
            sc.parse_algebra("algebra a\nsize 2\nconst c 1\n", "a.alg")
        assert exc.value.line == 3
        assert "a.alg:3:" in str(exc.value)

    def test_duplicate_symbol(self):
        text = "algebra a\nsize 2\nconst c = 0\nconst c = 1\n"
        with pytest.raises(ParseError, match="duplicate"):
            sc.parse_algebra(text)

    def test_missing_size(self):
        with pytest.raises(ParseError):
            sc.parse_algebra("algebra a\n")

    def test_comments_and_blanks(self):
        text = "# header\nalgebra a\n\nsize 2  # two elements\nconst c = 1\n"
        a = sc.parse_algebra(text)
        assert a.constant_value("c") == 1

    def test_monoid_round_trip(self):
        text = "algebra monoid01\nsize 2\nconst zero = 0\nop max/2 = [0 1 1 1]\n"
        a = sc.parse_algebra(text)
        assert a.size == 2 and len(a.signature.symbols) == 2
        assert sc.serialize_algebra(a) == text


class TestDirectPower:
    def test_power_one_is_identity_encoding(self, monoid01):
        p = sc.direct_power(monoid01, 1)
        assert p.size == monoid01.size
        assert p.tables == monoid01.tables

    def test_monoid_square_coordinatewise(self, monoid01):
        p = sc.direct_power(monoid01, 2)
        assert p.size == 4
        # (0,1) and (1,0) join to (1,1)
        assert p.apply("max", (1, 2)) == 3
        assert p.constant_value("zero") == 0

    def test_set_power_cardinality(self, set3):
        assert sc.direct_power(set3, 2).size == 9

    def test_budget(self, set3):
        with pytest.raises(BudgetError):
            sc.direct_power(set3, 9, budget=4096)


class TestClosure:
    def test_bool4_atom_generates_everything(self, bool4):
        assert sc.subalgebra_closure(bool4, {1}) == frozenset({0, 1, 2, 3})

    def test_empty_seed_empty_signature(self, set3):
        assert sc.subalgebra_closure(set3, set()) == frozenset()

    def test_z4_constants_generate_everything(self, ring_z4):
        assert sc.subalgebra_closure(ring_z4, set()) == frozenset({0, 1, 2, 3})

    def test_monotone_and_idempotent(self, bool4, ring_z4, monoid01):
        for a in (bool4, ring_z4, monoid01):
            for k in range(a.size):
                seed = frozenset(range(k))
                closed = sc.subalgebra_closure(a, seed)
                assert seed <= closed
                assert sc.subalgebra_closure(a, closed) == closed

    def test_constants_subalgebra(self, monoid01, bool4, ring_z4):
        assert sc.constants_subalgebra(monoid01) == frozenset({0})
        assert sc.constants_subalgebra(bool4) == frozenset({0, 3})
        assert sc.constants_subalgebra(ring_z4) == frozenset({0, 1, 2, 3})


class TestHomomorphisms:
    def test_identity_valid(self, bool4):
        result = sc.check_homomorphism(bool4, bool4, range(4))
        assert isinstance(result, sc.Homomorphism)

    def test_mod2_reduction(self, ring_z4, ring_z2):
        result = sc.check_homomorphism(ring_z4, ring_z2, [0, 1, 0, 1])
        assert isinstance(result, sc.Homomorphism)

    def test_constant_violation_witness(self, ring_z2):
        result = sc.check_homomorphism(ring_z2, ring_z2, [0, 0])
        assert result == ("one", ())

    def test_shape_errors(self, ring_z2):
        with pytest.raises(ValueError):
            sc.check_homomorphism(ring_z2, ring_z2, [0])
        with pytest.raises(ValueError):
            sc.check_homomorphism(ring_z2, ring_z2, [0, 5])

    def test_constructor_rejects_non_homomorphism(self, monoid01):
        with pytest.raises(ValueError, match="commute"):
            sc.Homomorphism(monoid01, monoid01, (1, 0))


class TestImageFactorization:
    def test_set_map(self, set3, set2):
        f = sc.Homomorphism(set3, set2, (0, 0, 1))
        surj, image, incl = sc.image_factorization(f)
        assert image.size == 2
        assert surj.map == (0, 0, 1)
        assert sc.compose_homomorphisms(surj, incl).map == f.map

    def test_identity(self, bool4):
        f = sc.identity_homomorphism(bool4)
        _, image, incl = sc.image_factorization(f)
        assert image.size == bool4.size
        assert incl.map == tuple(range(4))

    def test_mod2_surjective(self, ring_z4, ring_z2):
        f = sc.Homomorphism(ring_z4, ring_z2, (0, 1, 0, 1))
        surj, image, incl = sc.image_factorization(f)
        assert image.size == 2
        assert surj.is_surjective

    def test_factorization_properties_exhaustive(self):
        for sa in range(1, 4):
            for sb in range(1, 4):
                a, b = empty_set_algebra(sa), empty_set_algebra(sb)
                for f in all_maps(a, b):
                    surj, image, incl = sc.image_factorization(f)
                    assert sc.compose_homomorphisms(surj, incl).map == f.map
                    assert incl.is_injective
                    assert surj.is_surjective


class TestCongruences:
    def test_generated_no_operations(self, set3):
        c = sc.congruence_generated(set3, [(0, 1)])
        assert c.blocks() == ((0, 1), (2,))

    def test_generated_z4(self, ring_z4):
        c = sc.congruence_generated(ring_z4, [(0, 2)])
        assert c.blocks() == ((0, 2), (1, 3))

    def test_generated_empty_is_discrete(self, bool4):
        c = sc.congruence_generated(bool4, [])
        assert c.block_count == 4

    def test_size_one(self, set1):
        assert len(sc.all_congruences(set1)) == 1

    def test_set3_bell_number(self, set3):
        assert len(sc.all_congruences(set3)) == 5

    def test_z4_lattice(self, ring_z4):
        congruences = sc.all_congruences(ring_z4)
        assert [c.blocks() for c in congruences] == [
            ((0,), (1,), (2,), (3,)),
            ((0, 2), (1, 3)),
            ((0, 1, 2, 3),),
        ]

    def test_budget(self):
        with pytest.raises(BudgetError):
            sc.all_congruences(empty_set_algebra(9))

    def test_from_pair_set_rejects_non_equivalence(self, set3):
        with pytest.raises(ValueError):
            sc.Congruence.from_pair_set(set3, {(0, 0), (1, 1), (2, 2), (0, 1)})


def _compatible_partition(a: sc.FiniteAlgebra, partition) -> bool:
    # independent oracle: the full multi-argument compatibility condition
    for sym, arity, table in a.operations():
        for u in itertools.product(a.carrier, repeat=arity):
            for v in itertools.product(a.carrier, repeat=arity):
                if all(partition[x] == partition[y] for x, y in zip(u, v)):
                    pu = a.apply(sym, u)
                    pv = a.apply(sym, v)
                    if partition[pu] != partition[pv]:
                        return False
    return True


class TestCongruenceOracle:
    @pytest.mark.parametrize(
        "name",
        ["set1", "set2", "set3", "bool2", "monoid01", "groupZ2",
         "ringZ2", "ringZ4", "bool4", "ringZ2xZ2"],
    )
    def test_matches_partition_filter(self, name):
        a = load_algebra(name)
        expected = {
            p for p in all_partitions(a.size) if _compatible_partition(a, p)
        }
        got = {c.partition for c in sc.all_congruences(a)}
        assert got == expected

    def test_set4_partition_filter(self):
        a = empty_set_algebra(4)
        assert len(sc.all_congruences(a)) == 15  # Bell(4)


class TestStructuralProperties:
    def test_preimage_of_congruence_is_congruence(self, ring_z4, ring_z2):
        rng = random.Random(7)
        f = sc.Homomorphism(ring_z4, ring_z2, (0, 1, 0, 1))
        instances = [(f, c) for c in sc.all_congruences(ring_z2)]
        for sa in range(1, 4):
            for sb in range(1, 4):
                a, b = empty_set_algebra(sa), empty_set_algebra(sb)
                maps = list(all_maps(a, b))
                for g in rng.sample(maps, min(4, len(maps))):
                    for c in sc.all_congruences(b):
                        instances.append((g, c))
        for hom, theta in instances:
            pairs = {
                (x, y)
                for x in hom.domain.carrier
                for y in hom.domain.carrier
                if theta.relates(hom.map[x], hom.map[y])
            }
            # constructor validates compatibility
            sc.Congruence.from_pair_set(hom.domain, pairs)

    def test_homomorphisms_preserve_constants_subalgebra(
        self, ring_z4, ring_z2, bool4, bool2, monoid01
    ):
        cases = [
            sc.Homomorphism(ring_z4, ring_z2, (0, 1, 0, 1)),
            sc.Homomorphism(bool4, bool2, (0, 0, 1, 1)),
        ]
        cases.extend(all_maps(monoid01, monoid01))
        for f in cases:
            ea = sc.constants_subalgebra(f.domain)
            eb = sc.constants_subalgebra(f.codomain)
            assert {f.map[x] for x in ea} <= set(eb)
