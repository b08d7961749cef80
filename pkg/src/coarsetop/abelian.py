"""Finitely generated abelian groups presented by generator orders.

A group is ``Z^f (+) Z/d_1 (+) ... (+) Z/d_t`` recorded as a list of
generator orders (0 for infinite order).  Elements are integer coordinate
tuples over the generators, with torsion coordinates normalized into
``[0, d)``.  Subgroup membership, kernels and images reduce to integer
lattice computations through Smith normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .intlinalg import IntegerMatrix, LatticeSolver, Vec, smith_normal_form


@dataclass(frozen=True)
class AbPres:
    """Presentation of a finitely generated abelian group by generator orders."""

    orders: tuple[int, ...]  # 0 = infinite order, otherwise the modulus (>1)

    def __post_init__(self):
        if any(d == 1 or d < 0 for d in self.orders):
            raise ValueError("orders must be 0 (free) or integers > 1")

    @property
    def ngens(self) -> int:
        return len(self.orders)

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.orders if d == 0)

    @property
    def torsion(self) -> list[int]:
        return [d for d in self.orders if d > 1]

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def normalize(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.ngens:
            raise ValueError("coordinate length mismatch")
        return tuple(
            v % d if d else v for v, d in zip(vec, self.orders)
        )

    def is_zero(self, vec: Sequence[int]) -> bool:
        return all(v == 0 for v in self.normalize(vec))

    def relation_columns(self) -> list[Vec]:
        return [{i: d} for i, d in enumerate(self.orders) if d > 1]

    def direct_sum(self, other: "AbPres") -> "AbPres":
        return AbPres(self.orders + other.orders)

    def describe(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


ZERO = AbPres(())


def _as_vec(vec: Sequence[int]) -> Vec:
    return {i: v for i, v in enumerate(vec) if v}


def _as_tuple(vec: Vec, n: int) -> tuple[int, ...]:
    return tuple(vec.get(i, 0) for i in range(n))


class GroupMap:
    """Homomorphism between presented groups, stored by generator images.

    Well-definedness on torsion (order of the image divides the order of the
    generator) is checked at construction.
    """

    def __init__(self, source: AbPres, target: AbPres, columns: Sequence[Sequence[int]]):
        if len(columns) != source.ngens:
            raise ValueError("one column per source generator required")
        self.source = source
        self.target = target
        self.columns = [target.normalize(col) for col in columns]
        for d, col in zip(source.orders, self.columns):
            if d and not target.is_zero([d * v for v in col]):
                raise ValueError(
                    f"map not well defined: order-{d} generator maps to an element "
                    f"of larger order"
                )

    @classmethod
    def zero(cls, source: AbPres, target: AbPres) -> "GroupMap":
        return cls(source, target, [[0] * target.ngens for _ in range(source.ngens)])

    @classmethod
    def identity(cls, pres: AbPres) -> "GroupMap":
        cols = [[1 if i == j else 0 for i in range(pres.ngens)] for j in range(pres.ngens)]
        return cls(pres, pres, cols)

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        vec = self.source.normalize(vec)
        out = [0] * self.target.ngens
        for x, col in zip(vec, self.columns):
            if x:
                for i, v in enumerate(col):
                    out[i] += x * v
        return self.target.normalize(out)

    def compose(self, inner: "GroupMap") -> "GroupMap":
        """self o inner."""
        if inner.target.orders != self.source.orders:
            raise ValueError("composition mismatch")
        cols = [self.apply(col) for col in inner.columns]
        return GroupMap(inner.source, self.target, cols)

    def is_zero(self) -> bool:
        return all(all(v == 0 for v in col) for col in self.columns)

    def is_identity(self) -> bool:
        if self.source.orders != self.target.orders:
            return False
        n = self.target.ngens
        return self.columns == [
            self.target.normalize([1 if i == j else 0 for i in range(n)])
            for j in range(n)
        ]

    def image_gens(self) -> list[tuple[int, ...]]:
        return [col for col in self.columns if any(col)]

    def matrix_rank(self) -> int:
        M = IntegerMatrix.from_columns(
            self.target.ngens, [_as_vec(c) for c in self.columns]
        )
        return smith_normal_form(M, transforms=()).rank

    def kernel_gens(self) -> list[tuple[int, ...]]:
        """Generators of the kernel subgroup, as source coordinates."""
        nB = self.target.ngens
        nA = self.source.ngens
        cols: list[Vec] = [_as_vec(c) for c in self.columns]
        rel = self.target.relation_columns()
        M = IntegerMatrix.from_columns(nB, cols + rel)
        basis = smith_normal_form(M, transforms=("V",)).kernel_basis()
        gens = []
        for b in basis:
            x = self.source.normalize([b.get(i, 0) for i in range(nA)])
            if any(x):
                gens.append(x)
        return gens

    def is_injective(self) -> bool:
        return all(self.source.is_zero(g) for g in self.kernel_gens())

    def is_surjective(self) -> bool:
        return image_is_full(self.target, self.image_gens())

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"GroupMap({self.source.describe()} -> {self.target.describe()}, "
            f"cols={self.columns})"
        )


# ---------------------------------------------------------------------------
# subgroup machinery


def _membership_solver(pres: AbPres, gens: Iterable[Sequence[int]]) -> LatticeSolver:
    cols = [_as_vec(pres.normalize(g)) for g in gens]
    cols += pres.relation_columns()
    return LatticeSolver(pres.ngens, cols)


def subgroup_contains(
    pres: AbPres, gens: Sequence[Sequence[int]], x: Sequence[int]
) -> bool:
    if pres.is_trivial():
        return True
    return _membership_solver(pres, gens).contains(_as_vec(pres.normalize(x)))


def subgroup_leq(
    pres: AbPres, gens_a: Sequence[Sequence[int]], gens_b: Sequence[Sequence[int]]
) -> bool:
    """<gens_a> <= <gens_b> inside the presented group."""
    if pres.is_trivial():
        return True
    solver = _membership_solver(pres, gens_b)
    return all(solver.contains(_as_vec(pres.normalize(g))) for g in gens_a)


def subgroup_equal(
    pres: AbPres, gens_a: Sequence[Sequence[int]], gens_b: Sequence[Sequence[int]]
) -> bool:
    return subgroup_leq(pres, gens_a, gens_b) and subgroup_leq(pres, gens_b, gens_a)


def image_is_full(pres: AbPres, gens: Sequence[Sequence[int]]) -> bool:
    unit = [[1 if i == j else 0 for i in range(pres.ngens)] for j in range(pres.ngens)]
    return subgroup_leq(pres, unit, gens)


def subgroup_presentation(
    pres: AbPres, gens: Sequence[Sequence[int]]
) -> tuple[AbPres, list[list[int]]]:
    """Present the subgroup generated by ``gens``.

    Returns (presentation, combinations): generator j of the subgroup equals
    ``sum_i combinations[j][i] * gens[i]`` in the ambient group.
    """
    m = len(gens)
    if m == 0:
        return ZERO, []
    cols = [_as_vec(pres.normalize(g)) for g in gens]
    rel = pres.relation_columns()
    M = IntegerMatrix.from_columns(pres.ngens, cols + rel)
    kb = smith_normal_form(M, transforms=("V",)).kernel_basis()
    # relations among the m generators: kernel basis restricted to them
    rel_cols = []
    for b in kb:
        v = {i: b[i] for i in b if i < m}
        rel_cols.append(v)
    B = IntegerMatrix.from_columns(m, rel_cols)
    sf = smith_normal_form(B, transforms=("U", "Uinv"))
    pivot_rows = {r: d for (r, _, d) in sf.pivots}
    orders: list[int] = []
    combos: list[list[int]] = []
    order_rows: list[int] = []
    for (r, _, d) in sf.pivots:
        if d > 1:
            orders.append(d)
            order_rows.append(r)
    for r in range(m):
        if r not in pivot_rows:
            orders.append(0)
            order_rows.append(r)
    for r in order_rows:
        col = sf.Uinv[r]
        combos.append([col.get(i, 0) for i in range(m)])
    return AbPres(tuple(orders)), combos
