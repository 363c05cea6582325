"""Decision procedures for star-symmetry and star-permutability.

The relation checkers scan concrete pair sets; the graph checker searches
for the connecting homomorphism between the kernels of the two legs by
backtracking.  The whole-algebra audit runs four condition suites over
the congruences and the enumerated reflexive compatible relations of one
algebra.  A single finite algebra can only certify counterexamples: a
failure refutes the variety it generates, while a clean audit is evidence,
not a proof (positive variety-level certificates come from the term
searches, whose identities are sound for the whole generated variety).
"""

from __future__ import annotations

import collections
import enum
import itertools
from dataclasses import dataclass

from .algebra import (
    Congruence,
    FiniteAlgebra,
    Homomorphism,
    _encode,
    all_congruences,
    direct_power,
)
from .contexts import IdealContext, _null_elements, n_kernel, validate_context
from .relations import Relation, compose, congruence_relation, opposite, star

DEFAULT_RELATION_BUDGET = 1024
DEFAULT_SIGMA_NODE_BUDGET = 100_000


class Verdict(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class SymmetryVerdict:
    """Outcome of a star-symmetry check.

    The witness, present exactly when the check fails, is a pair (a, b)
    with a trivial, (a, b) in the relation but (b, a) not; from_opposite
    marks witnesses found on the opposite relation."""

    holds: bool
    witness: tuple[int, int] | None = None
    from_opposite: bool = False


def is_left_star_symmetric(ctx: IdealContext, r: Relation) -> SymmetryVerdict:
    """Left star-symmetry: every pair of the star must appear reversed in
    the relation."""
    if not r.is_square:
        raise ValueError("need a square relation")
    validate_context(ctx, r.source)
    nc = _null_elements(ctx, r.source)
    for a in sorted(nc):
        row = r.row(a)
        b = 0
        while row:
            if row & 1 and (b, a) not in r:
                return SymmetryVerdict(False, (a, b))
            row >>= 1
            b += 1
    return SymmetryVerdict(True)


def is_star_symmetric(ctx: IdealContext, r: Relation) -> SymmetryVerdict:
    """Star-symmetry: both the relation and its opposite are left
    star-symmetric; the relation side is checked first."""
    direct = is_left_star_symmetric(ctx, r)
    if not direct.holds:
        return direct
    reverse = is_left_star_symmetric(ctx, opposite(r))
    if not reverse.holds:
        return SymmetryVerdict(False, reverse.witness, from_opposite=True)
    return SymmetryVerdict(True)


@dataclass(frozen=True)
class PermutabilityVerdict:
    """Comparison of the two star composites of a pair of relations.

    via_second_star composes the star of the second relation with the
    first; via_first_star the other way around.  The witness is the
    smallest pair in the symmetric difference."""

    holds: bool
    witness: tuple[int, int] | None
    via_second_star: Relation
    via_first_star: Relation


def check_star_permutes(
    ctx: IdealContext, first: Relation, second: Relation
) -> PermutabilityVerdict:
    if not (first.is_square and second.is_square) or first.source != second.source:
        raise ValueError("need two square relations on the same carrier")
    via_second = compose(star(ctx, second), first)
    via_first = compose(star(ctx, first), second)
    diff = via_second.mask ^ via_first.mask
    if not diff:
        return PermutabilityVerdict(True, None, via_second, via_first)
    n = first.source.size
    idx = (diff & -diff).bit_length() - 1
    return PermutabilityVerdict(False, (idx // n, idx % n), via_second, via_first)


@dataclass(frozen=True)
class GraphSymmetryVerdict:
    verdict: Verdict
    sigma: tuple[tuple[int, int], ...] | None = None
    blocked_element: int | None = None
    nodes: int = 0


class _SigmaBudget(Exception):
    pass


def graph_left_star_symmetric(
    ctx: IdealContext,
    g0: Homomorphism,
    g1: Homomorphism,
    node_budget: int = DEFAULT_SIGMA_NODE_BUDGET,
) -> GraphSymmetryVerdict:
    """Search for a homomorphism sigma between the kernels of the two legs
    that swaps their images: g1(sigma(t)) = g0(t) and g0(sigma(t)) = g1(t).

    Elements are processed in increasing carrier order and candidates tried
    in increasing order, so the first solution found is reproducible.  An
    exhausted node budget yields INCONCLUSIVE, which is distinct from a
    definite failure."""
    if g0.domain != g1.domain or g0.codomain != g1.codomain:
        raise ValueError("graph legs must share domain and codomain")
    validate_context(ctx, g0.codomain)
    g = g0.domain
    k0 = sorted(n_kernel(ctx, g0))
    k1 = sorted(n_kernel(ctx, g1))

    candidates: dict[int, list[int]] = {}
    for t in k0:
        cands = [u for u in k1 if g0.map[u] == g1.map[t] and g1.map[u] == g0.map[t]]
        if not cands:
            return GraphSymmetryVerdict(Verdict.FAIL, blocked_element=t)
        candidates[t] = cands

    # operation applications inside K0, bucketed by the latest element
    # (in K0 order) they mention, so each is checked exactly once
    position = {t: i for i, t in enumerate(k0)}
    k0set = set(k0)
    buckets: list[list[tuple[tuple[int, ...], int, tuple[int, ...]]]] = [
        [] for _ in k0
    ]
    for sym, arity, table in g.operations():
        for combo in itertools.product(k0, repeat=arity):
            value = table[_encode(combo, g.size)]
            if value not in k0set:
                raise AssertionError("kernel is not closed under operations")
            last = max(position[c] for c in combo + (value,))
            buckets[last].append((combo, value, table))

    assignment: dict[int, int] = {}
    gsize = g.size
    nodes = 0

    def consistent(upto: int) -> bool:
        for combo, value, table in buckets[upto]:
            args = tuple(assignment[c] for c in combo)
            if table[_encode(args, gsize)] != assignment[value]:
                return False
        return True

    def search(i: int) -> bool:
        nonlocal nodes
        if i == len(k0):
            return True
        t = k0[i]
        for u in candidates[t]:
            nodes += 1
            if nodes > node_budget:
                raise _SigmaBudget
            assignment[t] = u
            if consistent(i) and search(i + 1):
                return True
            del assignment[t]
        return False

    try:
        found = search(0)
    except _SigmaBudget:
        return GraphSymmetryVerdict(Verdict.INCONCLUSIVE, nodes=nodes)
    if not found:
        return GraphSymmetryVerdict(Verdict.FAIL, nodes=nodes)
    sigma = tuple(sorted(assignment.items()))
    return GraphSymmetryVerdict(Verdict.PASS, sigma=sigma, nodes=nodes)


@dataclass(frozen=True)
class ReflexiveEnumeration:
    relations: tuple[Relation, ...]
    truncated: bool


def enumerate_reflexive_compatible(
    a: FiniteAlgebra, budget: int = DEFAULT_RELATION_BUDGET
) -> ReflexiveEnumeration:
    """All subalgebras of the square that contain the diagonal.

    Breadth-first closure expansion: start from the closed diagonal, add
    one absent pair at a time and re-close.  Any target relation is
    reached by adding its pairs one by one (every intermediate closure
    stays inside the target), so the enumeration is complete.  Output is
    sorted by bit-set encoding."""
    square = direct_power(a, 2, budget=max(a.size * a.size, 1))
    qsize = square.size
    unary: list[tuple[int, ...]] = []
    rows: list[list[tuple[int, ...]]] = []  # per binary op: q -> op(q, .)
    cols: list[list[tuple[int, ...]]] = []  # per binary op: q -> op(., q)
    higher: list[tuple[int, tuple[int, ...]]] = []
    for _, arity, table in square.operations():
        if arity == 1:
            unary.append(table)
        elif arity == 2:
            rows.append(
                [table[q * qsize : (q + 1) * qsize] for q in range(qsize)]
            )
            cols.append(
                [tuple(table[r * qsize + q] for r in range(qsize)) for q in range(qsize)]
            )
        elif arity > 2:
            higher.append((arity, table))

    def close_with(base: frozenset[int], extra: int) -> frozenset[int]:
        cur = set(base)
        cur.add(extra)
        fresh = {extra}
        while fresh:
            members = list(cur)
            new: set[int] = set()
            for q in fresh:
                for table in unary:
                    new.add(table[q])
                for by_row, by_col in zip(rows, cols):
                    row, col = by_row[q], by_col[q]
                    new.update(row[r] for r in members)
                    new.update(col[r] for r in members)
                for arity, table in higher:
                    for combo in itertools.product(members, repeat=arity):
                        if q in combo:
                            new.add(table[_encode(combo, qsize)])
            new -= cur
            cur |= new
            fresh = new
        return frozenset(cur)

    diag = frozenset(x * a.size + x for x in a.carrier)
    seen: set[frozenset[int]] = {diag}
    queue: collections.deque[frozenset[int]] = collections.deque([diag])
    truncated = False
    while queue:
        state = queue.popleft()
        for p in range(qsize):
            if p in state:
                continue
            nxt = close_with(state, p)
            if nxt not in seen:
                if len(seen) >= budget:
                    truncated = True
                    queue.clear()
                    break
                seen.add(nxt)
                queue.append(nxt)
        if truncated:
            break

    masks = sorted(sum(1 << q for q in state) for state in seen)
    relations = tuple(
        Relation(a, a, mask, compatible=True) for mask in masks
    )
    return ReflexiveEnumeration(relations, truncated)


@dataclass(frozen=True)
class PermutabilityWitness:
    first: Congruence
    second: Congruence
    pair: tuple[int, int]


@dataclass(frozen=True)
class SymmetryWitness:
    relation: Relation
    pair: tuple[int, int]
    from_opposite: bool = False


@dataclass(frozen=True)
class ConditionOutcome:
    key: str
    verdict: Verdict
    examined: int
    witnesses: tuple[object, ...] = ()
    note: str = ""


@dataclass(frozen=True)
class AuditReport:
    algebra: str
    context: str
    conditions: tuple[ConditionOutcome, ...]
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return all(c.verdict is Verdict.PASS for c in self.conditions)

    def condition(self, key: str) -> ConditionOutcome:
        for c in self.conditions:
            if c.key == key:
                return c
        raise KeyError(key)


def audit_algebra(
    ctx: IdealContext,
    a: FiniteAlgebra,
    max_relations: int = DEFAULT_RELATION_BUDGET,
    congruence_size_budget: int = 8,
) -> AuditReport:
    """Run the four condition suites on one algebra.

    1 and 2 check star-permutability over ordered pairs of congruences
    (compatible equivalence relations coincide with congruences here, so
    suite 2 runs over the same set and says so); 3 and 4 check left
    star-symmetry and star-symmetry over every enumerated reflexive
    compatible relation."""
    validate_context(ctx, a)
    congruences = all_congruences(a, size_budget=congruence_size_budget)
    cong_rel = {c: congruence_relation(c) for c in congruences}

    permute_witnesses: list[PermutabilityWitness] = []
    examined_pairs = 0
    for first in congruences:
        for second in congruences:
            examined_pairs += 1
            verdict = check_star_permutes(ctx, cong_rel[first], cong_rel[second])
            if not verdict.holds:
                permute_witnesses.append(
                    PermutabilityWitness(first, second, verdict.witness)
                )
    permute_verdict = Verdict.FAIL if permute_witnesses else Verdict.PASS
    cond1 = ConditionOutcome(
        "congruence-pairs-star-permute",
        permute_verdict,
        examined_pairs,
        tuple(permute_witnesses),
    )
    cond2 = ConditionOutcome(
        "equivalence-pairs-star-permute",
        permute_verdict,
        examined_pairs,
        tuple(permute_witnesses),
        note="compatible equivalence relations coincide with congruences here",
    )

    enum = enumerate_reflexive_compatible(a, budget=max_relations)
    left_witnesses: list[SymmetryWitness] = []
    full_witnesses: list[SymmetryWitness] = []
    for r in enum.relations:
        lv = is_left_star_symmetric(ctx, r)
        if not lv.holds:
            left_witnesses.append(SymmetryWitness(r, lv.witness))
        fv = is_star_symmetric(ctx, r)
        if not fv.holds:
            full_witnesses.append(
                SymmetryWitness(r, fv.witness, fv.from_opposite)
            )

    def sym_verdict(witnesses) -> Verdict:
        if witnesses:
            return Verdict.FAIL
        return Verdict.INCONCLUSIVE if enum.truncated else Verdict.PASS

    note = "enumeration truncated by budget" if enum.truncated else ""
    cond3 = ConditionOutcome(
        "reflexive-left-star-symmetric",
        sym_verdict(left_witnesses),
        len(enum.relations),
        tuple(left_witnesses),
        note=note,
    )
    cond4 = ConditionOutcome(
        "reflexive-star-symmetric",
        sym_verdict(full_witnesses),
        len(enum.relations),
        tuple(full_witnesses),
        note=note,
    )
    return AuditReport(
        a.name or "<anonymous>",
        str(ctx),
        (cond1, cond2, cond3, cond4),
        truncated=enum.truncated,
    )
