"""Finite algebras over arbitrary signatures.

Carriers are initial segments {0..n-1} of the non-negative integers and
operations are stored as flat value tables in lexicographic argument order
(leftmost argument most significant).  Everything here is immutable and
hashable, so results can be cached and compared structurally.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import BudgetError, ParseError

DEFAULT_POWER_BUDGET = 4096
DEFAULT_CONGRUENCE_SIZE_BUDGET = 8


@dataclass(frozen=True)
class Signature:
    """Operation symbols with arities; arity-0 symbols are constants."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        seen = set()
        for name, arity in self.symbols:
            if not name:
                raise ValueError("empty symbol name")
            if name in seen:
                raise ValueError(f"duplicate symbol {name!r}")
            if arity < 0:
                raise ValueError(f"negative arity for {name!r}")
            seen.add(name)

    def arity(self, name: str) -> int:
        for sym, arity in self.symbols:
            if sym == name:
                return arity
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(sym == name for sym, _ in self.symbols)

    @property
    def constant_symbols(self) -> tuple[str, ...]:
        return tuple(sym for sym, arity in self.symbols if arity == 0)

    @property
    def is_empty(self) -> bool:
        return not self.symbols


EMPTY_SIGNATURE = Signature(())


def _encode(args: Iterable[int], size: int) -> int:
    idx = 0
    for a in args:
        idx = idx * size + a
    return idx


def _decode(idx: int, size: int, length: int) -> tuple[int, ...]:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        out[i] = idx % size
        idx //= size
    return tuple(out)


@dataclass(frozen=True)
class FiniteAlgebra:
    """A finite carrier {0..size-1} with one value table per symbol."""

    signature: Signature
    size: int
    tables: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("carrier must have at least one element")
        if len(self.tables) != len(self.signature.symbols):
            raise ValueError("one table per symbol required")
        for (sym, arity), table in zip(self.signature.symbols, self.tables):
            if len(table) != self.size ** arity:
                raise ValueError(
                    f"table for {sym}/{arity} has {len(table)} entries, "
                    f"expected {self.size ** arity}"
                )
            for v in table:
                if not 0 <= v < self.size:
                    raise ValueError(f"table entry {v} for {sym} out of range")

    def operations(self) -> Iterator[tuple[str, int, tuple[int, ...]]]:
        for (sym, arity), table in zip(self.signature.symbols, self.tables):
            yield sym, arity, table

    def table(self, name: str) -> tuple[int, ...]:
        for (sym, _), table in zip(self.signature.symbols, self.tables):
            if sym == name:
                return table
        raise KeyError(name)

    def apply(self, name: str, args: tuple[int, ...]) -> int:
        return self.table(name)[_encode(args, self.size)]

    def constant_value(self, name: str) -> int:
        if self.signature.arity(name) != 0:
            raise ValueError(f"{name!r} is not a constant symbol")
        return self.table(name)[0]

    @property
    def carrier(self) -> range:
        return range(self.size)


@dataclass(frozen=True)
class Homomorphism:
    """A structure-preserving map, validated at construction."""

    domain: FiniteAlgebra
    codomain: FiniteAlgebra
    map: tuple[int, ...]

    def __post_init__(self):
        _check_map_shape(self.domain, self.codomain, self.map)
        witness = _commutation_violation(self.domain, self.codomain, self.map)
        if witness is not None:
            sym, args = witness
            raise ValueError(
                f"map does not commute with {sym} at arguments {args}"
            )

    def __call__(self, x: int) -> int:
        return self.map[x]

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.map)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.codomain.size

    @property
    def is_injective(self) -> bool:
        return len(set(self.map)) == self.domain.size


def _check_map_shape(a: FiniteAlgebra, b: FiniteAlgebra, m: tuple[int, ...]):
    if a.signature != b.signature:
        raise ValueError("domain and codomain must share a signature")
    if len(m) != a.size:
        raise ValueError(f"map has length {len(m)}, expected {a.size}")
    for v in m:
        if not 0 <= v < b.size:
            raise ValueError(f"map value {v} out of codomain range")


def _commutation_violation(a, b, m):
    """First (symbol, args) where m fails to commute, or None."""
    for sym, arity, table in a.operations():
        btable = b.table(sym)
        for idx, value in enumerate(table):
            args = _decode(idx, a.size, arity)
            mapped = tuple(m[x] for x in args)
            if m[value] != btable[_encode(mapped, b.size)]:
                return sym, args
    return None


def check_homomorphism(
    a: FiniteAlgebra, b: FiniteAlgebra, m: Iterable[int]
) -> Homomorphism | tuple[str, tuple[int, ...]]:
    """Validate a candidate map; return the Homomorphism or the first
    (symbol, argument tuple) where commutation fails."""
    m = tuple(m)
    _check_map_shape(a, b, m)
    witness = _commutation_violation(a, b, m)
    if witness is not None:
        return witness
    return Homomorphism(a, b, m)


def identity_homomorphism(a: FiniteAlgebra) -> Homomorphism:
    return Homomorphism(a, a, tuple(range(a.size)))


def compose_homomorphisms(f: Homomorphism, g: Homomorphism) -> Homomorphism:
    """First f, then g."""
    if f.codomain != g.domain:
        raise ValueError("homomorphisms are not composable")
    return Homomorphism(f.domain, g.codomain, tuple(g.map[v] for v in f.map))


def direct_power(
    a: FiniteAlgebra, k: int, budget: int = DEFAULT_POWER_BUDGET
) -> FiniteAlgebra:
    """The k-th direct power; carrier tuples are encoded lexicographically."""
    if k < 1:
        raise ValueError("power must be positive")
    size = a.size ** k
    if size > budget:
        raise BudgetError(f"power carrier {size} exceeds budget {budget}")
    tables = []
    for sym, arity, table in a.operations():
        entries = []
        for idx in range(size ** arity):
            args = _decode(idx, size, arity)
            coords = [_decode(x, a.size, k) for x in args]
            value = tuple(
                table[_encode((c[i] for c in coords), a.size)] for i in range(k)
            )
            entries.append(_encode(value, a.size))
        tables.append(tuple(entries))
    name = f"{a.name}^{k}" if a.name else ""
    return FiniteAlgebra(a.signature, size, tuple(tables), name)


def subalgebra_closure(a: FiniteAlgebra, seed: Iterable[int]) -> frozenset[int]:
    """Least subset containing the seed and all constants, closed under
    every operation; worklist fixpoint."""
    members: list[int] = []
    pos: dict[int, int] = {}

    def add(x: int):
        if x not in pos:
            pos[x] = len(members)
            members.append(x)

    for sym, arity, table in a.operations():
        if arity == 0:
            add(table[0])
    for s in sorted(set(seed)):
        if not 0 <= s < a.size:
            raise ValueError(f"seed element {s} out of range")
        add(s)

    positive = [(arity, table) for _, arity, table in a.operations() if arity > 0]
    i = 0
    while i < len(members):
        for arity, table in positive:
            # every argument tuple whose newest member is members[i]
            for combo in itertools.product(range(i + 1), repeat=arity):
                if i not in combo:
                    continue
                idx = _encode((members[j] for j in combo), a.size)
                add(table[idx])
        i += 1
    return frozenset(members)


@functools.lru_cache(maxsize=None)
def constants_subalgebra(a: FiniteAlgebra) -> frozenset[int]:
    """Subalgebra generated by the constants; empty iff there are none."""
    return subalgebra_closure(a, ())


def image_factorization(
    f: Homomorphism,
) -> tuple[Homomorphism, FiniteAlgebra, Homomorphism]:
    """Split f as surjection onto its image followed by the inclusion."""
    values = sorted(set(f.map))
    reindex = {v: i for i, v in enumerate(values)}
    b = f.codomain
    tables = []
    for sym, arity, table in b.operations():
        entries = []
        for combo in itertools.product(values, repeat=arity):
            v = table[_encode(combo, b.size)]
            entries.append(reindex[v])  # closed: image of a hom is a subalgebra
        tables.append(tuple(entries))
    image = FiniteAlgebra(b.signature, len(values), tuple(tables))
    surjection = Homomorphism(f.domain, image, tuple(reindex[v] for v in f.map))
    inclusion = Homomorphism(image, b, tuple(values))
    return surjection, image, inclusion


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


@dataclass(frozen=True)
class Congruence:
    """A compatible equivalence relation, stored as the map sending each
    element to the smallest member of its block."""

    algebra: FiniteAlgebra
    partition: tuple[int, ...]

    def __post_init__(self):
        a = self.algebra
        if len(self.partition) != a.size:
            raise ValueError("partition length must equal carrier size")
        for x, rep in enumerate(self.partition):
            if rep > x or self.partition[rep] != rep:
                raise ValueError("partition is not in smallest-member form")
        # compatibility via single-argument translations (transitivity
        # supplies the multi-argument case)
        for sym, arity, table in a.operations():
            if arity == 0:
                continue
            for pos in range(arity):
                for x in a.carrier:
                    for y in range(x + 1, a.size):
                        if self.partition[x] != self.partition[y]:
                            continue
                        for rest in itertools.product(a.carrier, repeat=arity - 1):
                            u = rest[:pos] + (x,) + rest[pos:]
                            v = rest[:pos] + (y,) + rest[pos:]
                            pu = table[_encode(u, a.size)]
                            pv = table[_encode(v, a.size)]
                            if self.partition[pu] != self.partition[pv]:
                                raise ValueError(
                                    f"partition not compatible with {sym}"
                                )

    def relates(self, x: int, y: int) -> bool:
        return self.partition[x] == self.partition[y]

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        by_rep: dict[int, list[int]] = {}
        for x, rep in enumerate(self.partition):
            by_rep.setdefault(rep, []).append(x)
        return tuple(tuple(block) for _, block in sorted(by_rep.items()))

    @property
    def block_count(self) -> int:
        return len(set(self.partition))

    @classmethod
    def from_pair_set(
        cls, a: FiniteAlgebra, pairs: Iterable[tuple[int, int]]
    ) -> "Congruence":
        """Build from an equivalence given extensionally as its pair set."""
        pairs = set(pairs)
        uf = _UnionFind(a.size)
        for x, y in pairs:
            uf.union(x, y)
        partition = _canonical_partition(uf, a.size)
        for x in a.carrier:
            for y in a.carrier:
                if (partition[x] == partition[y]) != ((x, y) in pairs):
                    raise ValueError("pair set is not an equivalence relation")
        return cls(a, partition)


def _canonical_partition(uf: _UnionFind, n: int) -> tuple[int, ...]:
    smallest: dict[int, int] = {}
    for x in range(n):
        root = uf.find(x)
        if root not in smallest:
            smallest[root] = x
    return tuple(smallest[uf.find(x)] for x in range(n))


def congruence_generated(
    a: FiniteAlgebra, pairs: Iterable[tuple[int, int]]
) -> Congruence:
    """Least congruence relating every given pair: union-find interleaved
    with closure under all single-argument translations, to fixpoint."""
    uf = _UnionFind(a.size)
    queue: list[tuple[int, int]] = []
    for x, y in sorted(set(pairs)):
        if not (0 <= x < a.size and 0 <= y < a.size):
            raise ValueError(f"pair ({x},{y}) out of range")
        if uf.union(x, y):
            queue.append((x, y))
    positive = [
        (arity, table) for _, arity, table in a.operations() if arity > 0
    ]
    while queue:
        x, y = queue.pop()
        for arity, table in positive:
            for pos in range(arity):
                for rest in itertools.product(a.carrier, repeat=arity - 1):
                    u = rest[:pos] + (x,) + rest[pos:]
                    v = rest[:pos] + (y,) + rest[pos:]
                    pu = table[_encode(u, a.size)]
                    pv = table[_encode(v, a.size)]
                    if uf.union(pu, pv):
                        queue.append((pu, pv))
    return Congruence(a, _canonical_partition(uf, a.size))


def _join_partitions(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    uf = _UnionFind(len(p))
    for x in range(len(p)):
        uf.union(x, p[x])
        uf.union(x, q[x])
    return _canonical_partition(uf, len(p))


def all_congruences(
    a: FiniteAlgebra, size_budget: int = DEFAULT_CONGRUENCE_SIZE_BUDGET
) -> tuple[Congruence, ...]:
    """Every congruence, as the join-closure of the principal ones.

    Returned in a canonical order (partition tuples descending, so the
    discrete congruence comes first and the full one last).
    """
    if a.size > size_budget:
        raise BudgetError(
            f"carrier size {a.size} exceeds congruence budget {size_budget}"
        )
    found: dict[tuple[int, ...], Congruence] = {}
    discrete = congruence_generated(a, ())
    found[discrete.partition] = discrete
    worklist = [discrete.partition]
    for x in a.carrier:
        for y in range(x + 1, a.size):
            c = congruence_generated(a, [(x, y)])
            if c.partition not in found:
                found[c.partition] = c
                worklist.append(c.partition)
    while worklist:
        p = worklist.pop()
        for q in list(found):
            j = _join_partitions(p, q)
            if j not in found:
                # equivalence join of congruences is again a congruence
                found[j] = Congruence(a, j)
                worklist.append(j)
    ordered = sorted(found, reverse=True)
    return tuple(found[p] for p in ordered)


# --- algebra document format ------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_^.+-]*")
_INT_RE = re.compile(r"\d+")


class _LineParser:
    def __init__(self, filename: str, lineno: int, text: str):
        self.filename = filename
        self.lineno = lineno
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise ParseError(self.filename, self.lineno, self.pos + 1, message)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def literal(self, token: str):
        self.skip_ws()
        if not self.text.startswith(token, self.pos):
            self.error(f"expected {token!r}")
        self.pos += len(token)

    def name(self) -> str:
        self.skip_ws()
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a name")
        self.pos = m.end()
        return m.group()

    def integer(self) -> int:
        self.skip_ws()
        m = _INT_RE.match(self.text, self.pos)
        if not m:
            self.error("expected an integer")
        self.pos = m.end()
        return int(m.group())

    def finish(self):
        if not self.at_end():
            self.error("unexpected trailing text")


def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield lineno, line


def parse_algebra(text: str, filename: str = "<algebra>") -> FiniteAlgebra:
    """Parse an algebra description document.

    Format: ``algebra <name>``, ``size <n>``, then ``const <sym> = <elem>``
    and ``op <sym>/<arity> = [e0 e1 ...]`` lines; ``#`` starts a comment.
    """
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError(filename, 1, 1, "empty document")

    lp = _LineParser(filename, lines[0][0], lines[0][1])
    lp.literal("algebra")
    name = lp.name()
    lp.finish()

    if len(lines) < 2:
        raise ParseError(filename, lines[0][0], 1, "missing size line")
    lp = _LineParser(filename, lines[1][0], lines[1][1])
    lp.literal("size")
    size = lp.integer()
    lp.finish()
    if size < 1:
        raise ParseError(filename, lines[1][0], 1, "size must be at least 1")

    symbols: list[tuple[str, int]] = []
    tables: list[tuple[int, ...]] = []
    seen: set[str] = set()
    for lineno, line in lines[2:]:
        lp = _LineParser(filename, lineno, line)
        lp.skip_ws()
        if line.lstrip().startswith("const"):
            lp.literal("const")
            sym = lp.name()
            lp.literal("=")
            value = lp.integer()
            lp.finish()
            if sym in seen:
                lp.error(f"duplicate symbol {sym!r}")
            if value >= size:
                lp.error(f"constant value {value} out of range for size {size}")
            seen.add(sym)
            symbols.append((sym, 0))
            tables.append((value,))
        elif line.lstrip().startswith("op"):
            lp.literal("op")
            sym = lp.name()
            lp.literal("/")
            arity = lp.integer()
            lp.literal("=")
            lp.literal("[")
            entries = []
            while True:
                lp.skip_ws()
                if lp.pos < len(lp.text) and lp.text[lp.pos] == "]":
                    lp.pos += 1
                    break
                entries.append(lp.integer())
            lp.finish()
            if sym in seen:
                lp.error(f"duplicate symbol {sym!r}")
            expected = size ** arity
            if len(entries) != expected:
                lp.error(
                    f"table for {sym}/{arity} has {len(entries)} entries, "
                    f"expected {expected}"
                )
            for v in entries:
                if v >= size:
                    lp.error(f"table entry {v} out of range for size {size}")
            seen.add(sym)
            symbols.append((sym, arity))
            tables.append(tuple(entries))
        else:
            lp.error("expected a const or op line")
    return FiniteAlgebra(Signature(tuple(symbols)), size, tuple(tables), name)


def serialize_algebra(a: FiniteAlgebra) -> str:
    """Canonical document for an algebra: constants first, then operations."""
    out = [f"algebra {a.name}", f"size {a.size}"]
    for sym, arity, table in a.operations():
        if arity == 0:
            out.append(f"const {sym} = {table[0]}")
    for sym, arity, table in a.operations():
        if arity > 0:
            body = " ".join(str(v) for v in table)
            out.append(f"op {sym}/{arity} = [{body}]")
    return "\n".join(out) + "\n"
