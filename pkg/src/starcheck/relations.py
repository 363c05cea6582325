"""Binary relations between finite algebras, stored as bit-sets.

A pair (a, b) occupies bit a * target.size + b of the mask.  Composition,
opposites, kernel pairs, inverse images and the star operator live here;
the star of a relation keeps exactly the pairs whose first component is a
trivial element of the context.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

from .algebra import Congruence, FiniteAlgebra, Homomorphism, _encode
from .contexts import IdealContext, _null_elements, validate_context


class Relation:
    """A set of pairs between two carriers, with a cached compatibility
    certificate (true iff the pair set is a subalgebra of the product)."""

    __slots__ = ("source", "target", "mask", "_compatible")

    def __init__(
        self,
        source: FiniteAlgebra,
        target: FiniteAlgebra,
        mask: int,
        compatible: bool | None = None,
    ):
        if not 0 <= mask < 1 << (source.size * target.size):
            raise ValueError("mask out of range for the carriers")
        self.source = source
        self.target = target
        self.mask = mask
        self._compatible = compatible

    @classmethod
    def from_pairs(
        cls,
        source: FiniteAlgebra,
        target: FiniteAlgebra,
        pairs: Iterable[tuple[int, int]],
    ) -> "Relation":
        mask = 0
        for a, b in pairs:
            if not (0 <= a < source.size and 0 <= b < target.size):
                raise ValueError(f"pair ({a},{b}) out of range")
            mask |= 1 << (a * target.size + b)
        return cls(source, target, mask)

    def pairs(self) -> Iterator[tuple[int, int]]:
        nt = self.target.size
        mask = self.mask
        idx = 0
        while mask:
            if mask & 1:
                yield idx // nt, idx % nt
            mask >>= 1
            idx += 1

    def __contains__(self, pair: tuple[int, int]) -> bool:
        a, b = pair
        return bool(self.mask >> (a * self.target.size + b) & 1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Relation)
            and self.source == other.source
            and self.target == other.target
            and self.mask == other.mask
        )

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.mask))

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __repr__(self) -> str:
        return f"Relation({pair_set_text(self)})"

    @property
    def is_square(self) -> bool:
        return self.source == self.target

    def row(self, a: int) -> int:
        nt = self.target.size
        return (self.mask >> (a * nt)) & ((1 << nt) - 1)

    @property
    def compatible(self) -> bool:
        if self._compatible is None:
            self._compatible = self.verify_compatible()
        return self._compatible

    def verify_compatible(self) -> bool:
        """Recompute the compatibility certificate from scratch."""
        ps = list(self.pairs())
        ns, nt = self.source.size, self.target.size
        for sym, arity, stable in self.source.operations():
            ttable = self.target.table(sym)
            for combo in itertools.product(ps, repeat=arity):
                a = stable[_encode((p[0] for p in combo), ns)]
                b = ttable[_encode((p[1] for p in combo), nt)]
                if (a, b) not in self:
                    return False
        return True


def pair_set_text(r: Relation) -> str:
    return "{" + ",".join(f"({a},{b})" for a, b in r.pairs()) + "}"


def diagonal(a: FiniteAlgebra) -> Relation:
    mask = 0
    for x in a.carrier:
        mask |= 1 << (x * a.size + x)
    return Relation(a, a, mask, compatible=True)


def full_relation(a: FiniteAlgebra) -> Relation:
    return Relation(a, a, (1 << a.size * a.size) - 1, compatible=True)


def compose(r: Relation, s: Relation) -> Relation:
    """First r, then s: pairs (x, z) with (x, y) in r and (y, z) in s for
    some middle y."""
    if r.target != s.source:
        raise ValueError("relations are not composable")
    ny, nz = s.source.size, s.target.size
    srows = [s.row(y) for y in range(ny)]
    mask = 0
    for x in range(r.source.size):
        rrow = r.row(x)
        out = 0
        y = 0
        while rrow:
            if rrow & 1:
                out |= srows[y]
            rrow >>= 1
            y += 1
        mask |= out << (x * nz)
    hint = True if (r._compatible and s._compatible) else None
    return Relation(r.source, s.target, mask, compatible=hint)


def opposite(r: Relation) -> Relation:
    mask = 0
    ns = r.source.size
    for a, b in r.pairs():
        mask |= 1 << (b * ns + a)
    return Relation(r.target, r.source, mask, compatible=r._compatible)


def kernel_pair(f: Homomorphism) -> Relation:
    """Pairs identified by f; always a congruence's pair set."""
    n = f.domain.size
    mask = 0
    for a in range(n):
        for b in range(n):
            if f.map[a] == f.map[b]:
                mask |= 1 << (a * n + b)
    return Relation(f.domain, f.domain, mask, compatible=True)


def inverse_image(f: Homomorphism, s: Relation) -> Relation:
    """Pairs of the domain whose images land in s."""
    if s.source != f.codomain or s.target != f.codomain:
        raise ValueError("relation must be square on the codomain of f")
    n = f.domain.size
    mask = 0
    for a in range(n):
        for b in range(n):
            if (f.map[a], f.map[b]) in s:
                mask |= 1 << (a * n + b)
    hint = True if s._compatible else None
    return Relation(f.domain, f.domain, mask, compatible=hint)


def _require_star_input(ctx: IdealContext, r: Relation) -> None:
    if not r.is_square:
        raise ValueError("star needs a square relation")
    validate_context(ctx, r.source)
    if not r.source.signature.is_empty and not r.compatible:
        raise ValueError("star over a non-empty signature needs a compatible relation")


def star(ctx: IdealContext, r: Relation) -> Relation:
    """Largest sub-star: the pairs of r whose first component is trivial."""
    _require_star_input(ctx, r)
    n = r.source.size
    nc = _null_elements(ctx, r.source)
    mask = 0
    row = (1 << n) - 1
    for a in nc:
        mask |= (row << (a * n))
    hint = True if r._compatible else None
    return Relation(r.source, r.source, r.mask & mask, compatible=hint)


def star_via_pullback(ctx: IdealContext, r: Relation) -> Relation:
    """Same pair set as star, computed by the independent route: view the
    pair set as an algebra, take the kernel of its first projection under
    the context, and map the kernel forward."""
    from .contexts import n_kernel  # local import to keep the module graph flat

    _require_star_input(ctx, r)
    x = r.source
    ps = sorted(r.pairs())
    if not ps:
        return Relation(x, x, 0, compatible=r._compatible)
    pindex = {p: i for i, p in enumerate(ps)}
    tables = []
    for sym, arity, table in x.operations():
        entries = []
        for combo in itertools.product(ps, repeat=arity):
            a = table[_encode((p[0] for p in combo), x.size)]
            b = table[_encode((p[1] for p in combo), x.size)]
            entries.append(pindex[(a, b)])
        tables.append(tuple(entries))
    pair_algebra = FiniteAlgebra(x.signature, len(ps), tuple(tables))
    r0 = Homomorphism(pair_algebra, x, tuple(p[0] for p in ps))
    kernel = n_kernel(ctx, r0)
    mask = 0
    for i in kernel:
        a, b = ps[i]
        mask |= 1 << (a * x.size + b)
    hint = True if r._compatible else None
    return Relation(x, x, mask, compatible=hint)


def star_kernel(ctx: IdealContext, f: Homomorphism) -> Relation:
    return star(ctx, kernel_pair(f))


def graph_image(g0: Homomorphism, g1: Homomorphism) -> Relation:
    """The relation {(g0(t), g1(t))}; a subalgebra of the square, hence
    compatible."""
    if g0.domain != g1.domain or g0.codomain != g1.codomain:
        raise ValueError("graph legs must share domain and codomain")
    x = g0.codomain
    mask = 0
    for t in g0.domain.carrier:
        mask |= 1 << (g0.map[t] * x.size + g1.map[t])
    return Relation(x, x, mask, compatible=True)


@dataclass(frozen=True)
class RelationPredicates:
    reflexive: bool
    symmetric: bool
    transitive: bool
    compatible: bool


def relation_predicates(r: Relation) -> RelationPredicates:
    if not r.is_square:
        raise ValueError("predicates need a square relation")
    n = r.source.size
    reflexive = all((a, a) in r for a in range(n))
    symmetric = all((b, a) in r for a, b in r.pairs())
    transitive = True
    for a in range(n):
        row = r.row(a)
        reach = 0
        b = 0
        rr = row
        while rr:
            if rr & 1:
                reach |= r.row(b)
            rr >>= 1
            b += 1
        if reach & ~row:
            transitive = False
            break
    return RelationPredicates(reflexive, symmetric, transitive, r.compatible)


def congruence_relation(c: Congruence) -> Relation:
    """The pair set of a congruence as a relation."""
    n = c.algebra.size
    mask = 0
    for a in range(n):
        for b in range(n):
            if c.partition[a] == c.partition[b]:
                mask |= 1 << (a * n + b)
    return Relation(c.algebra, c.algebra, mask, compatible=True)
