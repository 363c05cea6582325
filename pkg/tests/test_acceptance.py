"""Acceptance suite: one test per criterion, exact tolerances (bit-set
equality everywhere), each printing a single pass/fail line."""

import io
import itertools

import pytest

import starcheck as sc
from starcheck.cli import main
from starcheck.terms import SearchStatus

from cli_matrix import GOLDEN_RUNS
from conftest import CORPUS, all_maps, all_relations, empty_set_algebra, load_algebra

POSITIVE_ALGEBRAS = ["bool2", "bool4", "heyt2", "ringZ2", "ringZ4", "ringZ2xZ2"]


def report(criterion: str, ok: bool):
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}")
    assert ok, criterion


def contexts_on(a: sc.FiniteAlgebra):
    """Total, pointed at every element, and (possibly degenerate) proto."""
    out = [sc.Total()]
    out.extend(sc.Pointed(b) for b in a.carrier)
    out.append(sc.ProtoPointed())
    return out


class TestCriterion1RelationCalculus:
    def test_compose_star_identity(self):
        ok = True
        for n in (1, 2, 3):
            x = empty_set_algebra(n)
            rels = list(all_relations(x))
            for ctx in contexts_on(x):
                stars = {r.mask: sc.star(ctx, r) for r in rels}
                for s in rels:
                    star_s = stars[s.mask]
                    for r in rels:
                        if sc.star(ctx, sc.compose(s, r)) != sc.compose(star_s, r):
                            ok = False
        report("criterion-1a compose-star", ok)

    def test_star_equals_pullback_route(self):
        ok = True
        for n in (1, 2, 3):
            x = empty_set_algebra(n)
            for ctx in contexts_on(x):
                for r in all_relations(x):
                    if sc.star(ctx, r) != sc.star_via_pullback(ctx, r):
                        ok = False
        report("criterion-1b star-pullback", ok)

    def test_inverse_image_star_identity(self):
        ok = True
        for sx in (1, 2, 3):
            for sy in (1, 2, 3):
                x, y = empty_set_algebra(sx), empty_set_algebra(sy)
                rels = list(all_relations(y))
                contexts = [sc.Total(), sc.ProtoPointed()]
                contexts += [sc.Pointed(b) for b in range(min(sx, sy))]
                for f in all_maps(x, y):
                    for ctx in contexts:
                        if isinstance(ctx, sc.Pointed) and f.map[ctx.base] != ctx.base:
                            continue  # pointed morphisms preserve the base
                        for s in rels:
                            lhs = sc.star(ctx, sc.inverse_image(f, s))
                            rhs = sc.star(ctx, sc.inverse_image(f, sc.star(ctx, s)))
                            if lhs != rhs:
                                ok = False
        report("criterion-1c inverse-image-star", ok)


class TestCriterion2TotalCollapse:
    def test_total_context_collapse(self):
        ok = True
        for n in (1, 2, 3):
            x = empty_set_algebra(n)
            for r in all_relations(x):
                if sc.is_left_star_symmetric(sc.Total(), r).holds != \
                        sc.relation_predicates(r).symmetric:
                    ok = False
                if sc.star(sc.Total(), r) != r:
                    ok = False
        report("criterion-2 total-collapse", ok)


class TestCriterion3PositiveClassifications:
    def test_subtractive_terms_and_proto_audits(self):
        ok = True
        proto = sc.ProtoPointed()
        for name in POSITIVE_ALGEBRAS:
            a = load_algebra(name)
            result = sc.find_e_subtractive_terms(a)
            if result.status is not SearchStatus.FOUND:
                ok = False
                continue
            targets = sorted(sc.constants_subalgebra(a))
            if [e for e, _ in result.terms] != targets:
                ok = False
            for e, op in result.terms:
                verdict = sc.verify_term_identities(
                    op, [f"s(x,x)={e}", f"s(x,{e})=x"]
                )
                if not verdict.holds:
                    ok = False
            audit = sc.audit_algebra(proto, a)
            if not audit.passed or audit.truncated:
                ok = False
        report("criterion-3 positive-classifications", ok)


class TestCriterion4NegativeClassification:
    def test_monoid_pointed_counterexample(self):
        ok = True
        monoid = load_algebra("monoid01")
        audit = sc.audit_algebra(sc.Pointed(0), monoid)
        expected_pairs = {(0, 0), (0, 1), (1, 1)}
        for key in ("reflexive-left-star-symmetric", "reflexive-star-symmetric"):
            cond = audit.condition(key)
            if cond.verdict is not sc.Verdict.FAIL:
                ok = False
                continue
            w = cond.witnesses[0]
            if set(w.relation.pairs()) != expected_pairs or w.pair != (0, 1):
                ok = False

        search = sc.find_e_subtractive_terms(monoid)
        if not (
            search.status is SearchStatus.ABSENT
            and search.complete
            and search.clone_size == 4
        ):
            ok = False

        buf = io.StringIO()
        code = main(
            ["find-terms", "--algebra", str(CORPUS / "monoid01.alg"),
             "--kind", "e-subtractive", "--context", "pointed:0", "--machine"],
            out=buf,
        )
        if code != 1 or "clone-size=4" not in buf.getvalue():
            ok = False
        report("criterion-4 negative-classification", ok)


class TestCriterion5MaltsevBaseline:
    def test_maltsev_searches_and_permutability(self):
        ok = True
        group = load_algebra("groupZ2")
        found = sc.find_maltsev_term(group)
        xor3 = tuple(
            (a + b + c) % 2
            for a in range(2) for b in range(2) for c in range(2)
        )
        if found.status is not SearchStatus.FOUND or found.term.table != xor3:
            ok = False

        semilattice = sc.FiniteAlgebra(
            sc.Signature((("max", 2),)), 2, ((0, 1, 1, 1),), "semilattice01"
        )
        absent = sc.find_maltsev_term(semilattice)
        if absent.status is not SearchStatus.ABSENT or not absent.complete:
            ok = False

        congs = [sc.congruence_relation(c) for c in sc.all_congruences(group)]
        for r in congs:
            for s in congs:
                if sc.compose(r, s) != sc.compose(s, r):
                    ok = False
        report("criterion-5 maltsev-baseline", ok)


class TestCriterion6CertificateChain:
    def test_soundness_on_positive_algebras(self):
        ok = True
        proto = sc.ProtoPointed()
        for name in POSITIVE_ALGEBRAS:
            a = load_algebra(name)
            square = sc.direct_power(a, 2)
            for target in (a, square):
                enum = sc.enumerate_reflexive_compatible(target)
                if enum.truncated:
                    ok = False
                for r in enum.relations:
                    if not sc.is_star_symmetric(proto, r).holds:
                        ok = False
        report("criterion-6a certificate-soundness", ok)

    def test_contrapositive_on_monoid(self):
        monoid = load_algebra("monoid01")
        failing = []
        for ctx in (sc.Pointed(0), sc.ProtoPointed()):
            failing.extend(
                r
                for r in sc.enumerate_reflexive_compatible(monoid).relations
                if not sc.is_left_star_symmetric(ctx, r).holds
            )
        search = sc.find_e_subtractive_terms(monoid)
        ok = bool(failing) and search.status is SearchStatus.ABSENT
        report("criterion-6b certificate-contrapositive", ok)


class TestCriterion7Saturation:
    def test_saturation_facts(self):
        ok = True
        # pointed: every base-preserving map is saturating
        for sa, sb in itertools.product((1, 2, 3), repeat=2):
            a, b = empty_set_algebra(sa), empty_set_algebra(sb)
            for f in all_maps(a, b):
                if f.map[0] == 0 and not sc.is_saturating(sc.Pointed(0), f):
                    ok = False
                # total: saturating means surjective
                if sc.is_saturating(sc.Total(), f) != f.is_surjective:
                    ok = False
        # proto with constants: every homomorphism is saturating
        pointed_sig = sc.Signature((("c", 0),))
        pointed_algebras = [
            sc.FiniteAlgebra(pointed_sig, n, ((0,),)) for n in (1, 2, 3)
        ]
        for a in pointed_algebras:
            for b in pointed_algebras:
                for f in all_maps(a, b):
                    if not sc.is_saturating(sc.ProtoPointed(), f):
                        ok = False
        report("criterion-7 saturation", ok)


class TestCriterion8Determinism:
    def test_every_command_twice_byte_identical(self):
        ok = True
        for name, argv in GOLDEN_RUNS:
            runs = []
            for _ in range(2):
                buf = io.StringIO()
                code = main(argv, out=buf)
                runs.append((code, buf.getvalue()))
            if runs[0] != runs[1]:
                ok = False
        # corpus files re-serialize byte-identically
        for path in sorted(CORPUS.glob("*.alg")):
            text = path.read_text()
            if sc.serialize_algebra(sc.parse_algebra(text, path.name)) != text:
                ok = False
        report("criterion-8 determinism", ok)

    @pytest.fixture(autouse=True)
    def in_repo_root(self, monkeypatch):
        monkeypatch.chdir(CORPUS.parent)
