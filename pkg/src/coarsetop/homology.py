"""Exact integer (co)homology of subcomplex windows, pairs, and induced maps.

Homology groups come back as :class:`GradedGroup`: a presentation (free rank
plus torsion in divisibility order), generator lifts at (co)chain level, and
a ``coords`` routine that locates an arbitrary (co)cycle in the presentation.
Keeping lifts and coordinates around is what lets towers and duality maps
compute induced homomorphisms without re-deriving bases.

Compactly supported cohomology of a window is modelled as cohomology relative
to the width-1 collar of the window frontier.  Any group computed that way is
tagged ``windowed=True``; quantities derived from it are only trusted after
they agree across two window sizes (the experiment layer enforces that).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Literal, Sequence

from .abelian import AbPres, GroupMap, ZERO
from .intlinalg import IntegerMatrix, SmithForm, Vec, smith_normal_form
from .simplicial import ComplexError, SimplicialComplex, Simplex, Subcomplex

EMPTY_SIMPLEX: Simplex = ()

TheoryName = Literal["H", "Hred", "Hc"]


# ---------------------------------------------------------------------------
# chain/cochain complex views


class View:
    """A (co)chain complex over a chosen simplex basis.

    ``kind='chain'``: simplicial chains of ``space`` with the simplices of
    ``rel`` struck out (relative chains), optionally augmented (reduced).
    ``kind='cochain'``: simplicial cochains of ``space`` vanishing on ``rel``;
    the differential is the transpose of the restricted boundary.
    """

    def __init__(
        self,
        space: Subcomplex,
        rel: Subcomplex | None,
        kind: str,
        reduced: bool = False,
        windowed: bool = False,
    ):
        self.space = space
        self.rel = rel
        self.kind = kind
        self.reduced = reduced
        self.windowed = windowed
        self.parent = space.parent
        self.key = (
            kind,
            space.key,
            rel.key if rel is not None else None,
            reduced,
        )
        self._bases: dict[int, list[Simplex]] = {}
        self._index: dict[int, dict[Simplex, int]] = {}
        self._matrices: dict[int, IntegerMatrix] = {}
        self._snf_out: dict[int, SmithForm] = {}
        self._groups: dict[int, "GradedGroup"] = {}

    # -- bases -----------------------------------------------------------

    def basis(self, k: int) -> list[Simplex]:
        if k not in self._bases:
            if k == -1:
                self._bases[k] = [EMPTY_SIMPLEX] if self.reduced else []
            elif k < -1 or k > self.space.parent.dim:
                self._bases[k] = []
            else:
                rel = self.rel
                items = [
                    s
                    for s in self.space.simplices_sorted(k)
                    if rel is None or not rel.contains(s)
                ]
                self._bases[k] = items
            self._index[k] = {s: i for i, s in enumerate(self._bases[k])}
        return self._bases[k]

    def basis_index(self, k: int) -> dict[Simplex, int]:
        self.basis(k)
        return self._index[k]

    def dim_at(self, k: int) -> int:
        return len(self.basis(k))

    # -- differentials -----------------------------------------------------

    def _boundary(self, k: int) -> IntegerMatrix:
        """Restricted simplicial boundary C_k -> C_{k-1} over this basis."""
        if k in self._matrices:
            return self._matrices[k]
        src = self.basis(k)
        dst_index = self.basis_index(k - 1)
        entries: dict[tuple[int, int], int] = {}
        if k == 0:
            if self.reduced:
                for c in range(len(src)):
                    entries[(0, c)] = 1
                M = IntegerMatrix(1, len(src), entries)
            else:
                M = IntegerMatrix(0, len(src))
        else:
            for c, s in enumerate(src):
                for pos in range(len(s)):
                    f = s[:pos] + s[pos + 1 :]
                    r = dst_index.get(f)
                    if r is not None:
                        entries[(r, c)] = -1 if pos % 2 else 1
            M = IntegerMatrix(len(self.basis(k - 1)), len(src), entries)
        self._matrices[k] = M
        return M

    def out_matrix(self, k: int) -> IntegerMatrix:
        """Differential leaving degree k (its kernel is the cycle group)."""
        if self.kind == "chain":
            return self._boundary(k)
        return self._boundary(k + 1).transpose()

    def in_matrix(self, k: int) -> IntegerMatrix:
        """Differential arriving at degree k (its image is divided out)."""
        if self.kind == "chain":
            return self._boundary(k + 1)
        return self._boundary(k).transpose()

    def out_snf(self, k: int) -> SmithForm:
        if k not in self._snf_out:
            self._snf_out[k] = smith_normal_form(
                self.out_matrix(k), transforms=("V", "Vinv")
            )
        return self._snf_out[k]

    # -- chains as simplex dictionaries ------------------------------------

    def vec_of(self, chain: dict[Simplex, int], k: int) -> Vec:
        index = self.basis_index(k)
        out: Vec = {}
        for s, v in chain.items():
            if not v:
                continue
            i = index.get(s)
            if i is None:
                # struck-out simplices carry no coordinate (relative quotient)
                if self.rel is not None and self.rel.contains(s):
                    continue
                raise ComplexError(f"simplex {s} outside the view basis in degree {k}")
            out[i] = out.get(i, 0) + v
        return {i: v for i, v in out.items() if v}

    def chain_of(self, vec: Vec, k: int) -> dict[Simplex, int]:
        basis = self.basis(k)
        return {basis[i]: v for i, v in vec.items() if v}


def chain_view(S: Subcomplex, reduced: bool = False) -> View:
    return _cached_view(S.parent, S, None, "chain", reduced, windowed=False)


def relative_chain_view(S: Subcomplex, A: Subcomplex) -> View:
    if not A.issubset(S):
        raise ComplexError("relative part is not contained in the subcomplex")
    return _cached_view(S.parent, S, A, "chain", False, windowed=False)


def collar_of(S: Subcomplex) -> Subcomplex:
    """Width-1 frontier collar of the window, intersected with S."""
    X = S.parent
    collar_levels = X.frontier_collar
    levels = [set(lv) & set(cl) for lv, cl in zip(S.levels, collar_levels)]
    return Subcomplex(X, levels)


def compactly_supported_view(S: Subcomplex, A: Subcomplex | None = None) -> View:
    """Cochains of S vanishing on A and on the window-frontier collar.

    For S fully interior this is the ordinary cochain complex (of the pair);
    for S touching the frontier it is the windowed stand-in for compact
    supports, and resulting groups carry the ``windowed`` tag.
    """
    collar = collar_of(S)
    rel = collar if A is None else A.union(collar)
    windowed = S.touches_frontier()
    return _cached_view(S.parent, S, rel, "cochain", False, windowed)


def _cached_view(
    X: SimplicialComplex,
    S: Subcomplex,
    rel: Subcomplex | None,
    kind: str,
    reduced: bool,
    windowed: bool,
) -> View:
    cache = X.cache.setdefault("views", {})
    key = (kind, S.key, rel.key if rel is not None else None, reduced)
    view = cache.get(key)
    if view is None:
        view = View(S, rel, kind, reduced, windowed)
        cache[key] = view
    return view


# ---------------------------------------------------------------------------
# graded groups


@dataclass
class GradedGroup:
    """A (co)homology group with chain-level access.

    ``lifts[i]`` is a (co)cycle representing generator i; ``coords`` writes an
    arbitrary (co)cycle in generator coordinates (raising if it is no cycle).
    """

    pres: AbPres
    degree: int
    view: View
    lifts: list[dict[Simplex, int]]
    coords_vec: Callable[[Vec], tuple[int, ...]] = field(repr=False)
    windowed: bool = False

    @property
    def free_rank(self) -> int:
        return self.pres.free_rank

    @property
    def torsion(self) -> list[int]:
        return self.pres.torsion

    def is_trivial(self) -> bool:
        return self.pres.ngens == 0

    def coords(self, chain: dict[Simplex, int]) -> tuple[int, ...]:
        return self.coords_vec(self.view.vec_of(chain, self.degree))

    def describe(self) -> str:
        tag = " (windowed)" if self.windowed else ""
        return self.pres.describe() + tag

    def to_report(self) -> dict:
        out = {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "degree": self.degree,
        }
        if self.windowed:
            out["windowed"] = True
        return out


def _trivial_group(view: View, k: int) -> GradedGroup:
    return GradedGroup(
        pres=ZERO,
        degree=k,
        view=view,
        lifts=[],
        coords_vec=lambda vec: (),
        windowed=view.windowed,
    )


def graded_group(view: View, k: int) -> GradedGroup:
    if k in view._groups:
        return view._groups[k]
    n = view.dim_at(k)
    if n == 0:
        grp = _trivial_group(view, k)
        view._groups[k] = grp
        return grp

    sf_out = view.out_snf(k)
    kcols = sf_out.kernel_columns()
    z = len(kcols)
    pos_of_col = {c: i for i, c in enumerate(kcols)}
    pivot_cols = [c for (_, c, _) in sf_out.pivots]

    def kernel_coords(vec: Vec) -> Vec:
        u = sf_out.apply_vinv(vec)
        for c in pivot_cols:
            if u.get(c, 0) != 0:
                raise ComplexError("chain is not a cycle in this view")
        return {pos_of_col[c]: v for c, v in u.items() if v}

    if z == 0:
        grp = _trivial_group(view, k)
        view._groups[k] = grp
        return grp

    A_in = view.in_matrix(k)
    rel_cols = [kernel_coords(col) for col in A_in.columns()]
    B = IntegerMatrix.from_columns(z, rel_cols)
    sf_rel = smith_normal_form(B, transforms=("U", "Uinv"))

    pivot_rows = {r for (r, _, _) in sf_rel.pivots}
    gen_rows: list[int] = []
    orders: list[int] = []
    for (r, _, d) in sf_rel.pivots:
        if d > 1:
            gen_rows.append(r)
            orders.append(d)
    for r in range(z):
        if r not in pivot_rows:
            gen_rows.append(r)
            orders.append(0)

    pres = AbPres(tuple(orders))

    kbasis = [sf_out.V[c] for c in kcols]

    def chain_from_kcoords(y: Vec) -> Vec:
        out: Vec = {}
        for j, s in y.items():
            for r, v in kbasis[j].items():
                nv = out.get(r, 0) + s * v
                if nv:
                    out[r] = nv
                else:
                    out.pop(r, None)
        return out

    lifts = []
    for r in gen_rows:
        y = sf_rel.Uinv[r]
        lifts.append(view.chain_of(chain_from_kcoords(y), k))

    def coords_vec(vec: Vec) -> tuple[int, ...]:
        y = kernel_coords(vec)
        w = sf_rel.apply_u(y)
        return pres.normalize([w.get(r, 0) for r in gen_rows])

    grp = GradedGroup(
        pres=pres,
        degree=k,
        view=view,
        lifts=lifts,
        coords_vec=coords_vec,
        windowed=view.windowed,
    )
    view._groups[k] = grp
    return grp


# ---------------------------------------------------------------------------
# public group operations


def boundary_matrix(X: SimplicialComplex, k: int) -> IntegerMatrix:
    """Alternating-sign boundary operator of the full complex in degree k."""
    if not (1 <= k <= X.dim):
        raise ComplexError(f"degree {k} outside 1..{X.dim}")
    return chain_view(Subcomplex.full(X))._boundary(k)


def homology(S: Subcomplex, k: int, reduced: bool = False) -> GradedGroup:
    """H_k (or reduced) of a subcomplex over the integers."""
    return graded_group(chain_view(S, reduced=reduced), k)


def relative_homology(S: Subcomplex, A: Subcomplex, k: int) -> GradedGroup:
    """H_k(S, A) via the quotient chain complex."""
    return graded_group(relative_chain_view(S, A), k)


def cohomology_c(S: Subcomplex, k: int) -> GradedGroup:
    """Windowed compactly supported cohomology of S in degree k."""
    return graded_group(compactly_supported_view(S), k)


def cohomology_c_pair(S: Subcomplex, A: Subcomplex, k: int) -> GradedGroup:
    """Windowed H^k_c(S, A): cochains vanishing on A and the frontier collar."""
    return graded_group(compactly_supported_view(S, A), k)


# ---------------------------------------------------------------------------
# transfers and induced maps


def transfer_matrix(source: View, target: View, k: int, strict: bool = True) -> IntegerMatrix:
    """Identity-on-shared-basis transfer between two views in degree k.

    Chain semantics (``strict=True``): every source basis simplex must land in
    the target complex; simplices struck out by the target's relative part map
    to zero.  Cochain restriction (``strict=False``): source duals without a
    target counterpart map to zero silently.
    """
    src = source.basis(k)
    index = target.basis_index(k)
    entries: dict[tuple[int, int], int] = {}
    for c, s in enumerate(src):
        r = index.get(s)
        if r is not None:
            entries[(r, c)] = 1
        elif strict and s != EMPTY_SIMPLEX and not target.space.contains(s):
            raise ComplexError(
                f"simplex {s} of the source is not in the target complex"
            )
    return IntegerMatrix(len(target.basis(k)), len(src), entries)


def push(
    source: GradedGroup,
    target: GradedGroup,
    matrix: IntegerMatrix,
) -> GroupMap:
    """Induced map on classes from a chain-level matrix between the views."""
    cols = []
    for lift in source.lifts:
        vec = source.view.vec_of(lift, source.degree)
        image = matrix.matvec(vec)
        cols.append(target.coords_vec(image))
    return GroupMap(source.pres, target.pres, cols)


def induced_map(
    small: Subcomplex,
    big: Subcomplex,
    k: int,
    theory: TheoryName = "H",
) -> GroupMap:
    """Induced map of an inclusion ``small <= big`` in the given theory.

    * ``H`` / ``Hred``: H_k(small) -> H_k(big) by inclusion of chains.
    * ``Hc``: restriction H^k_c(big) -> H^k_c(small) (the inverse-system
      direction used by neighborhood towers).
    """
    if not small.issubset(big):
        raise ComplexError("induced_map expects an inclusion small <= big")
    if theory in ("H", "Hred"):
        sv = chain_view(small, reduced=(theory == "Hred"))
        tv = chain_view(big, reduced=(theory == "Hred"))
        gs, gt = graded_group(sv, k), graded_group(tv, k)
        return push(gs, gt, transfer_matrix(sv, tv, k, strict=True))
    if theory == "Hc":
        sv = compactly_supported_view(big)
        tv = compactly_supported_view(small)
        gs, gt = graded_group(sv, k), graded_group(tv, k)
        return push(gs, gt, transfer_matrix(sv, tv, k, strict=False))
    raise ComplexError(f"unknown theory {theory!r}")


def relative_pair_map(
    S: Subcomplex, A_small: Subcomplex, A_big: Subcomplex, k: int
) -> GroupMap:
    """H_k(S, A_small) -> H_k(S, A_big) for nested relative parts."""
    sv = relative_chain_view(S, A_small)
    tv = relative_chain_view(S, A_big)
    return push(graded_group(sv, k), graded_group(tv, k), transfer_matrix(sv, tv, k))


# ---------------------------------------------------------------------------
# Mayer-Vietoris


@dataclass
class MayerVietorisReport:
    exact: bool
    degrees: list[int]
    failures: list[str]
    connecting: dict[int, GroupMap]
    groups: dict[str, dict[int, GradedGroup]]

    def connecting_map(self, k: int) -> GroupMap:
        return self.connecting[k]


def mayer_vietoris_check(
    A: Subcomplex, B: Subcomplex, k_range: Sequence[int] | None = None
) -> MayerVietorisReport:
    """Verify exactness of the reduced Mayer-Vietoris sequence of (A, B).

    The cover condition A union B = parent complex (as subcomplexes) is
    required.  Returns the connecting homomorphisms for reuse.
    """
    X = A.parent
    S = A.union(B)
    if S != Subcomplex.full(X):
        raise ComplexError("A and B do not cover the complex")
    AB = A.intersection(B)
    if AB.is_empty():
        raise ComplexError("reduced Mayer-Vietoris needs a nonempty intersection")

    top = X.dim
    degrees = list(k_range) if k_range is not None else list(range(top, -1, -1))

    vA, vB = chain_view(A, reduced=True), chain_view(B, reduced=True)
    vAB = chain_view(AB, reduced=True)
    vX = chain_view(Subcomplex.full(X), reduced=True)

    groups: dict[str, dict[int, GradedGroup]] = {"A": {}, "B": {}, "AB": {}, "X": {}}
    for k in range(min(degrees) - 1, max(degrees) + 1):
        groups["A"][k] = graded_group(vA, k)
        groups["B"][k] = graded_group(vB, k)
        groups["AB"][k] = graded_group(vAB, k)
        groups["X"][k] = graded_group(vX, k)

    failures: list[str] = []
    connecting: dict[int, GroupMap] = {}

    def sum_pres(k: int) -> AbPres:
        return groups["A"][k].pres.direct_sum(groups["B"][k].pres)

    def phi(k: int) -> GroupMap:
        gAB, gA, gB = groups["AB"][k], groups["A"][k], groups["B"][k]
        tA = transfer_matrix(vAB, vA, k)
        tB = transfer_matrix(vAB, vB, k)
        cols = []
        for lift in gAB.lifts:
            vec = vAB.vec_of(lift, k)
            ca = gA.coords_vec(tA.matvec(vec))
            cb = gB.coords_vec(tB.matvec(vec))
            cols.append(tuple(ca) + tuple(cb))
        return GroupMap(gAB.pres, sum_pres(k), cols)

    def psi(k: int) -> GroupMap:
        gA, gB, gX = groups["A"][k], groups["B"][k], groups["X"][k]
        tA = transfer_matrix(vA, vX, k)
        tB = transfer_matrix(vB, vX, k)
        cols = []
        for lift in gA.lifts:
            cols.append(gX.coords_vec(tA.matvec(vA.vec_of(lift, k))))
        for lift in gB.lifts:
            img = gX.coords_vec(tB.matvec(vB.vec_of(lift, k)))
            cols.append(tuple(-v for v in img))
        return GroupMap(sum_pres(k), gX.pres, cols)

    def connecting_map(k: int) -> GroupMap:
        gX, gAB = groups["X"][k], groups["AB"][k - 1]
        idxA = A.levels[k] if 0 <= k < len(A.levels) else frozenset()
        cols = []
        for lift in gX.lifts:
            part_a: dict[Simplex, int] = {}
            part_b: dict[Simplex, int] = {}
            for s, v in lift.items():
                if s == EMPTY_SIMPLEX:
                    part_a[s] = v  # augmentation splits arbitrarily
                elif s in idxA:
                    part_a[s] = v
                else:
                    part_b[s] = v
            # boundary of the A-part lies in the intersection
            da: dict[Simplex, int] = {}
            for s, v in part_a.items():
                if s == EMPTY_SIMPLEX:
                    continue
                if len(s) == 1:
                    f = EMPTY_SIMPLEX
                    da[f] = da.get(f, 0) + v
                    continue
                for pos in range(len(s)):
                    f = s[:pos] + s[pos + 1 :]
                    sign = -1 if pos % 2 else 1
                    da[f] = da.get(f, 0) + sign * v
            da = {s: v for s, v in da.items() if v}
            if k - 1 == -1:
                da_red = {EMPTY_SIMPLEX: da.get(EMPTY_SIMPLEX, 0)}
                da = {s: v for s, v in da_red.items() if v}
            else:
                da.pop(EMPTY_SIMPLEX, None)
                for s in da:
                    if not AB.contains(s):
                        raise ComplexError(
                            "connecting boundary escaped the intersection"
                        )
            cols.append(gAB.coords(da))
        return GroupMap(gX.pres, gAB.pres, cols)

    from .abelian import subgroup_leq

    def check_exact(kind: str, k: int, f: GroupMap, g: GroupMap) -> None:
        if not g.compose(f).is_zero():
            failures.append(f"{kind}@{k}: composition is nonzero")
            return
        ker = g.kernel_gens()
        im = f.image_gens()
        if not subgroup_leq(g.source, ker, im):
            failures.append(f"{kind}@{k}: kernel exceeds image")

    for k in degrees:
        f_phi, f_psi = phi(k), psi(k)
        d_k = connecting_map(k)
        connecting[k] = d_k
        check_exact("sum", k, f_phi, f_psi)
        check_exact("X", k, f_psi, d_k)
        if k + 1 in connecting:
            check_exact("cap", k, connecting[k + 1], phi(k))

    return MayerVietorisReport(
        exact=not failures,
        degrees=degrees,
        failures=failures,
        connecting=connecting,
        groups=groups,
    )


# ---------------------------------------------------------------------------
# invariant helpers used across the test corpus


def euler_from_homology(S: Subcomplex) -> int:
    total = 0
    for k in range(0, S.parent.dim + 1):
        total += (-1) ** k * homology(S, k).free_rank
    return total


def dd_is_zero(X: SimplicialComplex) -> bool:
    for k in range(2, X.dim + 1):
        dk = boundary_matrix(X, k)
        dk1 = boundary_matrix(X, k - 1)
        if not dk1.matmul(dk).is_zero():
            return False
    return True
