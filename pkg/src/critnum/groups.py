"""Finite groups as validated Cayley tables with 0-based element indices."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Optional, Sequence


class GroupValidationError(ValueError):
    """A multiplication table violates one of the group axioms."""


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


def smallest_prime_divisor(n: int) -> int:
    """Smallest prime dividing n (n must be at least 2)."""
    if n < 2:
        raise ValueError(f"smallest_prime_divisor requires n >= 2, got {n}")
    if n % 2 == 0:
        return 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return f
        f += 2
    return n


def chunked_translation_tables(
    op: Sequence[Sequence[int]], n: int, chunk_bits: int
) -> list[list[list[int]]]:
    """Per-element lookup tables mapping bit-set chunks to their right translates.

    tables[x][c][v] is the translate {y + x : y in chunk c with pattern v},
    so a full translate is the OR of one lookup per chunk.
    """
    nchunks = (n + chunk_bits - 1) // chunk_bits
    tables: list[list[list[int]]] = []
    for x in range(n):
        col = [op[y][x] for y in range(n)]
        per_chunk = []
        for c in range(nchunks):
            base = c * chunk_bits
            width = min(chunk_bits, n - base)
            tab = [0] * (1 << width)
            for v in range(1, 1 << width):
                low = (v & -v).bit_length() - 1
                tab[v] = tab[v & (v - 1)] | (1 << col[base + low])
            per_chunk.append(tab)
        tables.append(per_chunk)
    return tables


@dataclass(frozen=True)
class GroupTable:
    """A finite group given by its full multiplication table, identity at index 0."""

    n: int
    op: tuple[tuple[int, ...], ...]
    inv: tuple[int, ...]
    labels: tuple[str, ...]
    name: str
    reindex: Optional[tuple[int, ...]] = field(default=None, compare=False, repr=False)

    def mul(self, a: int, b: int) -> int:
        return self.op[a][b]

    def inverse(self, a: int) -> int:
        return self.inv[a]

    def elements(self) -> range:
        return range(self.n)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def is_abelian(self) -> bool:
        op = self.op
        for a in range(self.n):
            row = op[a]
            for b in range(a + 1, self.n):
                if row[b] != op[b][a]:
                    return False
        return True

    @cached_property
    def _chunk_tables(self) -> tuple[int, list[list[list[int]]]]:
        bits = 9
        return bits, chunked_translation_tables(self.op, self.n, bits)

    def translate(self, bits: int, x: int) -> int:
        """Right translate of a bit-set: {y + x : y in bits}."""
        chunk_bits, tables = self._chunk_tables
        per = tables[x]
        out = 0
        for c, tab in enumerate(per):
            v = (bits >> (c * chunk_bits)) & ((1 << chunk_bits) - 1)
            if v:
                out |= tab[v]
        return out

    def subset(self, indices: Iterable[int]) -> "ElementSet":
        return ElementSet.from_indices(self, indices)


@dataclass(frozen=True)
class ElementSet:
    """A subset of a group's elements stored as a bit-set over indices."""

    group: GroupTable
    bits: int = 0

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.group.n:
            raise ValueError(
                f"bit-set {self.bits:#x} has bits outside 0..{self.group.n - 1}"
            )

    @classmethod
    def from_indices(cls, group: GroupTable, indices: Iterable[int]) -> "ElementSet":
        bits = 0
        for i in indices:
            if not 0 <= i < group.n:
                raise ValueError(f"element index {i} out of range 0..{group.n - 1}")
            bits |= 1 << i
        return cls(group, bits)

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.group.n) if self.bits >> i & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.group.n and bool(self.bits >> i & 1)

    def _same_group(self, other: "ElementSet") -> None:
        if self.group != other.group:
            raise ValueError("element sets belong to different groups")

    def __or__(self, other: "ElementSet") -> "ElementSet":
        self._same_group(other)
        return ElementSet(self.group, self.bits | other.bits)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        self._same_group(other)
        return ElementSet(self.group, self.bits & other.bits)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        self._same_group(other)
        return ElementSet(self.group, self.bits & ~other.bits)

    def complement(self) -> "ElementSet":
        return ElementSet(self.group, self.group.full_mask & ~self.bits)

    def translate(self, x: int) -> "ElementSet":
        return ElementSet(self.group, self.group.translate(self.bits, x))


@dataclass(frozen=True)
class SubgroupInfo:
    """A subgroup given by its carrier set, with normality and index."""

    carrier: ElementSet
    is_normal: bool
    index: int


# ---------------------------------------------------------------------------
# table validation


def _find_identity(op: Sequence[Sequence[int]], n: int) -> Optional[int]:
    for e in range(n):
        if all(op[e][g] == g for g in range(n)) and all(op[g][e] == g for g in range(n)):
            return e
    return None


def _validated_table(
    rows: Sequence[Sequence[int]],
    labels: Optional[Sequence[str]],
    name: str,
) -> GroupTable:
    """Validate group axioms, re-index so the identity sits at 0, and build the table."""
    n = len(rows)
    if n == 0:
        raise GroupValidationError("empty table")
    for g, row in enumerate(rows):
        if len(row) != n:
            raise GroupValidationError(f"row {g} has {len(row)} entries, expected {n}")
        for h, v in enumerate(row):
            if not 0 <= v < n:
                raise GroupValidationError(f"entry op[{g}][{h}] = {v} out of range 0..{n - 1}")

    if labels is None:
        labels = [str(i) for i in range(n)]
    elif len(labels) != n:
        raise GroupValidationError(f"{len(labels)} labels for {n} elements")

    e = _find_identity(rows, n)
    if e is None:
        raise GroupValidationError("identity/inverse axiom violated: no two-sided identity element")
    reindex: Optional[tuple[int, ...]] = None
    if e != 0:
        perm = [e] + [g for g in range(n) if g != e]
        pos = [0] * n
        for new, old in enumerate(perm):
            pos[old] = new
        rows = [[pos[rows[perm[i]][perm[j]]] for j in range(n)] for i in range(n)]
        labels = [labels[perm[i]] for i in range(n)]
        reindex = tuple(perm)

    op = tuple(tuple(row) for row in rows)
    for a in range(n):
        opa = op[a]
        for b in range(n):
            op_ab = op[opa[b]]
            opb = op[b]
            for c in range(n):
                if op_ab[c] != opa[opb[c]]:
                    raise GroupValidationError(
                        f"associativity violated at triple ({a}, {b}, {c}): "
                        f"({a}+{b})+{c} = {op_ab[c]} but {a}+({b}+{c}) = {opa[opb[c]]}"
                    )

    inv = []
    for g in range(n):
        x = next((h for h in range(n) if op[g][h] == 0), None)
        if x is None or op[x][g] != 0:
            raise GroupValidationError(
                f"identity/inverse axiom violated: element {g} has no two-sided inverse"
            )
        inv.append(x)

    return GroupTable(n, op, tuple(inv), tuple(labels), name, reindex)


# ---------------------------------------------------------------------------
# constructors


def cyclic(n: int) -> GroupTable:
    if n < 1:
        raise ValueError(f"cyclic group order must be positive, got {n}")
    rows = [[(i + j) % n for j in range(n)] for i in range(n)]
    return _validated_table(rows, None, f"Z{n}")


def dihedral(m: int) -> GroupTable:
    """Dihedral group of order 2m: rotations r^i and reflections r^i s."""
    if m < 1:
        raise ValueError(f"dihedral parameter must be positive, got {m}")
    n = 2 * m
    rows = [[0] * n for _ in range(n)]
    for i in range(m):
        for j in range(m):
            rows[i][j] = (i + j) % m
            rows[i][m + j] = m + (i + j) % m
            rows[m + i][j] = m + (i - j) % m
            rows[m + i][m + j] = (i - j) % m
    labels = [f"r{i}" for i in range(m)] + [f"r{i}s" for i in range(m)]
    return _validated_table(rows, labels, f"D{m}")


def dicyclic(m: int) -> GroupTable:
    """Dicyclic group of order 4m: <a, b | a^(2m) = 1, b^2 = a^m, bab^-1 = a^-1>."""
    if m < 1:
        raise ValueError(f"dicyclic parameter must be positive, got {m}")
    n = 4 * m
    mm = 2 * m
    rows = [[0] * n for _ in range(n)]
    for i in range(mm):
        for j in range(mm):
            rows[i][j] = (i + j) % mm
            rows[i][mm + j] = mm + (i + j) % mm
            rows[mm + i][j] = mm + (i - j) % mm
            rows[mm + i][mm + j] = (i - j + m) % mm
    labels = [f"a{i}" for i in range(mm)] + [f"a{i}b" for i in range(mm)]
    return _validated_table(rows, labels, f"Dic{m}")


def semidirect_cyclic(a: int, b: int, k: int) -> GroupTable:
    """Z_a semidirect Z_b where the Z_b generator acts on Z_a by x -> k*x."""
    if a < 1 or b < 1:
        raise ValueError(f"semidirect_cyclic requires positive orders, got ({a}, {b})")
    if math.gcd(k, a) != 1:
        raise ValueError(f"action multiplier k={k} is not invertible mod {a}")
    if pow(k, b, a) != 1 % a:
        raise ValueError(f"k^b = {k}^{b} is not 1 mod {a}: the action has wrong order")
    n = a * b
    rows = [[0] * n for _ in range(n)]
    for x1 in range(a):
        for y1 in range(b):
            i = x1 * b + y1
            act = pow(k, y1, a)
            for x2 in range(a):
                for y2 in range(b):
                    rows[i][x2 * b + y2] = ((x1 + act * x2) % a) * b + (y1 + y2) % b
    labels = [f"({x},{y})" for x in range(a) for y in range(b)]
    return _validated_table(rows, labels, f"Z{a}:Z{b}(k={k})")


def heisenberg(p: int) -> GroupTable:
    """Upper unitriangular 3x3 matrices over Z_p, flattened lexicographically.

    Order p^3, exponent p for odd p; covers the non-abelian exponent-p group
    alongside semidirect_cyclic for prime-cube orders.
    """
    if not is_prime(p) or p == 2:
        raise ValueError(f"heisenberg requires an odd prime, got {p}")
    n = p * p * p

    def idx(x: int, y: int, z: int) -> int:
        return (x % p) * p * p + (y % p) * p + (z % p)

    rows = [[0] * n for _ in range(n)]
    for a1 in range(p):
        for b1 in range(p):
            for c1 in range(p):
                i = idx(a1, b1, c1)
                for a2 in range(p):
                    for b2 in range(p):
                        for c2 in range(p):
                            rows[i][idx(a2, b2, c2)] = idx(a1 + a2, b1 + b2, c1 + c2 + a1 * b2)
    labels = [f"({a},{b},{c})" for a in range(p) for b in range(p) for c in range(p)]
    return _validated_table(rows, labels, f"H{n}")


def direct_product(g: GroupTable, h: GroupTable) -> GroupTable:
    """Direct product with element (x, y) at index x*|H| + y."""
    n = g.n * h.n
    rows = [[0] * n for _ in range(n)]
    for x1 in range(g.n):
        for y1 in range(h.n):
            i = x1 * h.n + y1
            gr = g.op[x1]
            hr = h.op[y1]
            for x2 in range(g.n):
                base = gr[x2] * h.n
                row2 = rows[i]
                off = x2 * h.n
                for y2 in range(h.n):
                    row2[off + y2] = base + hr[y2]
    labels = [f"({g.labels[x]},{h.labels[y]})" for x in range(g.n) for y in range(h.n)]
    return _validated_table(rows, labels, f"{g.name}x{h.name}")


_DESCRIPTOR_RE = re.compile(r"^\s*([a-z_]+)\s*\((.*)\)\s*$")


def _split_args(body: str) -> list[str]:
    parts = []
    depth = 0
    cur = []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur or parts:
        parts.append("".join(cur))
    return [p.strip() for p in parts]


def make_group(descriptor: str) -> GroupTable:
    """Build a group from a constructor descriptor such as "dihedral(3)".

    Supported: cyclic(n), dihedral(m), dicyclic(m), semidirect_cyclic(a,b,k),
    heisenberg(p), direct_product(desc,desc) with nesting allowed.
    """
    m = _DESCRIPTOR_RE.match(descriptor)
    if not m:
        raise ValueError(f"unrecognized group descriptor {descriptor!r}")
    kind, body = m.group(1), m.group(2)
    args = _split_args(body)
    if kind == "direct_product":
        if len(args) != 2:
            raise ValueError(f"direct_product takes 2 arguments, got {len(args)}")
        return direct_product(make_group(args[0]), make_group(args[1]))
    try:
        ints = [int(x) for x in args]
    except ValueError:
        raise ValueError(f"non-integer arguments in descriptor {descriptor!r}") from None
    simple = {
        "cyclic": (cyclic, 1),
        "dihedral": (dihedral, 1),
        "dicyclic": (dicyclic, 1),
        "semidirect_cyclic": (semidirect_cyclic, 3),
        "heisenberg": (heisenberg, 1),
    }
    if kind not in simple:
        raise ValueError(f"unknown group constructor {kind!r}")
    fn, arity = simple[kind]
    if len(ints) != arity:
        raise ValueError(f"{kind} takes {arity} argument(s), got {len(ints)}")
    return fn(*ints)


# ---------------------------------------------------------------------------
# Cayley file format


def save_cayley(g: GroupTable) -> str:
    """Serialize to the text Cayley format (comments, order, labels, rows)."""
    lines = [f"# name: {g.name}"]
    if g.reindex is not None:
        lines.append("# reindexed: " + " ".join(str(i) for i in g.reindex))
    lines.append(str(g.n))
    lines.append("labels: " + " ".join(g.labels))
    for row in g.op:
        lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def load_cayley(text: str) -> GroupTable:
    """Parse the text Cayley format, re-validating every group axiom.

    If the identity is not at index 0 the table is re-indexed; the applied
    permutation is kept on the result and written back as a comment on save.
    """
    name = None
    data_lines = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comment = line[1:].strip()
            if comment.startswith("name:"):
                name = comment[len("name:"):].strip()
            continue
        data_lines.append(line)
    if not data_lines:
        raise GroupValidationError("no data lines in Cayley text")
    try:
        n = int(data_lines[0])
    except ValueError:
        raise GroupValidationError(f"first data line must be the order, got {data_lines[0]!r}") from None
    rest = data_lines[1:]
    labels = None
    if rest and rest[0].startswith("labels:"):
        labels = rest[0][len("labels:"):].split()
        rest = rest[1:]
    if len(rest) != n:
        raise GroupValidationError(f"expected {n} table rows, found {len(rest)}")
    rows = []
    for line in rest:
        try:
            rows.append([int(v) for v in line.split()])
        except ValueError:
            raise GroupValidationError(f"non-integer table entry in row {line!r}") from None
    return _validated_table(rows, labels, name or f"loaded[{n}]")


# ---------------------------------------------------------------------------
# subgroup machinery


def _closure_mask(g: GroupTable, seed_bits: int) -> int:
    """Bit-set of the subgroup generated by the seed elements."""
    op = g.op
    members = [0]
    mask = 1
    queue = []
    b = seed_bits
    while b:
        low = (b & -b).bit_length() - 1
        b &= b - 1
        if not mask >> low & 1:
            mask |= 1 << low
            members.append(low)
            queue.append(low)
    head = 0
    new = list(queue)
    while head < len(new):
        x = new[head]
        head += 1
        for y in list(members):
            for z in (op[x][y], op[y][x]):
                if not mask >> z & 1:
                    mask |= 1 << z
                    members.append(z)
                    new.append(z)
    return mask


def _is_normal_mask(g: GroupTable, mask: int) -> bool:
    op = g.op
    inv = g.inv
    members = [i for i in range(g.n) if mask >> i & 1]
    for x in range(g.n):
        row = op[x]
        xi = inv[x]
        for h in members:
            if not mask >> op[row[h]][xi] & 1:
                return False
    return True


def subgroup_closure(g: GroupTable, gens: ElementSet) -> SubgroupInfo:
    """Smallest subgroup containing the generators, with normality computed."""
    mask = _closure_mask(g, gens.bits)
    size = mask.bit_count()
    return SubgroupInfo(
        carrier=ElementSet(g, mask),
        is_normal=_is_normal_mask(g, mask),
        index=g.n // size,
    )


@lru_cache(maxsize=64)
def _all_subgroup_masks(g: GroupTable) -> tuple[int, ...]:
    """Every subgroup of g, found by closing known subgroups under one extra generator."""
    found = {1}
    frontier = [1]
    while frontier:
        base = frontier.pop()
        for x in range(1, g.n):
            if base >> x & 1:
                continue
            mask = _closure_mask(g, base | (1 << x))
            if mask not in found:
                found.add(mask)
                frontier.append(mask)
    return tuple(sorted(found))


def subgroups_of_index(g: GroupTable, k: int) -> list[SubgroupInfo]:
    """All subgroups of the given index, sorted by carrier bit-set."""
    if k < 1 or g.n % k != 0:
        raise ValueError(f"index {k} does not divide the group order {g.n}")
    want = g.n // k
    out = []
    for mask in _all_subgroup_masks(g):
        if mask.bit_count() == want:
            out.append(
                SubgroupInfo(ElementSet(g, mask), _is_normal_mask(g, mask), k)
            )
    return out


def quotient(g: GroupTable, k: SubgroupInfo) -> tuple[GroupTable, tuple[int, ...]]:
    """Quotient group by a normal subgroup plus the element -> coset-index map."""
    if not k.is_normal:
        raise ValueError("cannot form quotient: subgroup is not normal")
    kmask = k.carrier.bits
    n = g.n
    op = g.op
    coset_of = [-1] * n
    reps = []
    for x in range(n):
        if coset_of[x] >= 0:
            continue
        idx = len(reps)
        reps.append(x)
        for h in range(n):
            if kmask >> h & 1:
                coset_of[op[x][h]] = idx
    q = len(reps)
    rows = [[coset_of[op[reps[i]][reps[j]]] for j in range(q)] for i in range(q)]
    labels = [f"{g.labels[r]}+K" for r in reps]
    qt = _validated_table(rows, labels, f"{g.name}/K{q}")
    proj = tuple(coset_of)
    for a in range(n):
        row = op[a]
        for b in range(n):
            if proj[row[b]] != qt.op[proj[a]][proj[b]]:
                raise GroupValidationError(
                    f"quotient projection is not a homomorphism at ({a}, {b})"
                )
    return qt, proj


def center(g: GroupTable) -> ElementSet:
    """Elements commuting with everything, by brute force."""
    op = g.op
    bits = 0
    for x in range(g.n):
        row = op[x]
        if all(row[y] == op[y][x] for y in range(g.n)):
            bits |= 1 << x
    return ElementSet(g, bits)


def is_nilpotent(g: GroupTable) -> bool:
    """True iff the upper central series reaches the whole group."""
    while g.n > 1:
        z = center(g)
        if len(z) == 1:
            return False
        info = SubgroupInfo(z, True, g.n // len(z))
        g, _ = quotient(g, info)
    return True
