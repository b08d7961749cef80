"""R-indexed systems of (co)homology groups and approximate-morphism verdicts.

A :class:`Tower` stores groups at finitely many radii with the maps between
consecutive radii (projections toward smaller R for inverse systems, toward
larger R for direct systems).  Verdicts about pro-zero behaviour and
approximate mono/epi morphisms are always relative to the window: they are
emitted only while enough slack remains between the analyzed radii and the
window frontier, and report the index-shift functions as measured tables.

Deep homology of a complement Y_R is the image of the deepest window-valid
radius; on a window this replaces the inverse limit, and every verdict
records the substitution through its valid range.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

from .abelian import AbPres, GroupMap, ZERO, subgroup_leq, subgroup_presentation
from .homology import (
    GradedGroup,
    chain_view,
    compactly_supported_view,
    graded_group,
    push,
    relative_chain_view,
    transfer_matrix,
)
from .simplicial import (
    ComplexError,
    SimplicialComplex,
    Subcomplex,
    complement_closure,
    neighborhood,
    valid_radius,
)

Direction = Literal["inverse", "direct"]

#: minimum number of index steps of slack required before a verdict is emitted
EMIT_SLACK_STEPS = 3


@dataclass
class Verdict:
    status: str  # "verified" | "refuted" | "inconclusive"
    omega: dict[int, int] | None = None
    witness: dict | None = None
    valid_range: tuple[int, int] | None = None
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "verified"

    def max_shift(self) -> int | None:
        if not self.omega:
            return None
        return max(j - i for i, j in self.omega.items())

    def to_report(self) -> dict:
        out = {"status": self.status}
        if self.omega is not None:
            out["omega"] = {str(k): v for k, v in sorted(self.omega.items())}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.valid_range is not None:
            out["valid_range"] = list(self.valid_range)
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class SyntheticGroup:
    """Presentation-only stand-in so towers can be built by hand in tests."""

    pres: AbPres

    @property
    def free_rank(self) -> int:
        return self.pres.free_rank

    @property
    def torsion(self) -> list[int]:
        return self.pres.torsion

    def is_trivial(self) -> bool:
        return self.pres.is_trivial()


@dataclass
class Tower:
    """Finite window of an R-indexed inverse or direct system of groups."""

    direction: Direction
    indices: list[int]
    groups: list
    maps: list[GroupMap]
    theory: str = ""
    exhaustive: bool = False  # True when the stored range is the whole system
    frontier_limit: int | None = None

    def __post_init__(self):
        if sorted(self.indices) != list(self.indices):
            raise ComplexError("tower indices must increase")
        if len(self.maps) != max(0, len(self.groups) - 1):
            raise ComplexError("need one map per consecutive index pair")
        for i, m in enumerate(self.maps):
            lo, hi = self.groups[i], self.groups[i + 1]
            src, dst = (hi, lo) if self.direction == "inverse" else (lo, hi)
            if m.source.orders != src.pres.orders or m.target.orders != dst.pres.orders:
                raise ComplexError(f"map {i} does not match its endpoint groups")

    def __len__(self) -> int:
        return len(self.indices)

    def group(self, pos: int):
        return self.groups[pos]

    def composite(self, pos_from: int, pos_to: int) -> GroupMap:
        """Composite stored map between two stored positions.

        For inverse towers positions run from larger R to smaller
        (``pos_from >= pos_to``); for direct towers the other way.
        """
        if self.direction == "inverse":
            if pos_from < pos_to:
                raise ComplexError("inverse composite runs toward smaller index")
            m = GroupMap.identity(self.groups[pos_from].pres)
            for p in range(pos_from - 1, pos_to - 1, -1):
                m = self.maps[p].compose(m)
            return m
        if pos_to < pos_from:
            raise ComplexError("direct composite runs toward larger index")
        m = GroupMap.identity(self.groups[pos_from].pres)
        for p in range(pos_from, pos_to):
            m = self.maps[p].compose(m)
        return m

    def emittable_positions(self) -> list[int]:
        """Positions with enough slack before the window frontier."""
        if self.exhaustive or self.frontier_limit is None:
            return list(range(len(self.indices)))
        steps = [b - a for a, b in zip(self.indices, self.indices[1:])]
        step = min(steps) if steps else 1
        return [
            p
            for p, R in enumerate(self.indices)
            if R + EMIT_SLACK_STEPS * step <= self.frontier_limit
        ]

    def valid_range(self) -> tuple[int, int] | None:
        emit = self.emittable_positions()
        if not emit:
            return None
        return (self.indices[emit[0]], self.indices[emit[-1]])

    def rows_report(self) -> list[dict]:
        rows = []
        for pos, R in enumerate(self.indices):
            g = self.groups[pos]
            row = {
                "R": R,
                "free_rank": g.free_rank,
                "torsion": ";".join(str(t) for t in g.torsion),
            }
            if pos + 1 < len(self.indices):
                row["map_rank"] = self.maps[pos].matrix_rank()
            rows.append(row)
        return rows


@dataclass
class TowerMorphism:
    """Level maps ``f_i : A_i -> B_{alpha(i)}`` between towers of one direction.

    ``alpha`` maps stored positions of A to stored positions of B; the
    compatibility squares with the stored projections are checked eagerly.
    """

    source: Tower
    target: Tower
    alpha: dict[int, int]
    maps: dict[int, GroupMap]
    name: str = ""

    def __post_init__(self):
        if self.source.direction != self.target.direction:
            raise ComplexError("towers of mixed direction")
        for i, f in self.maps.items():
            gA = self.source.groups[i]
            gB = self.target.groups[self.alpha[i]]
            if f.source.orders != gA.pres.orders or f.target.orders != gB.pres.orders:
                raise ComplexError(f"morphism level {i} mismatched")
        positions = sorted(self.maps)
        for i, j in zip(positions, positions[1:]):
            ai, aj = self.alpha[i], self.alpha[j]
            if self.source.direction == "inverse":
                lhs = self.target.composite(aj, ai).compose(self.maps[j])
                rhs = self.maps[i].compose(self.source.composite(j, i))
            else:
                lhs = self.target.composite(ai, aj).compose(self.maps[i])
                rhs = self.maps[j].compose(self.source.composite(i, j))
            if lhs.columns != rhs.columns:
                raise ComplexError(
                    f"{self.name or 'morphism'}: compatibility square fails "
                    f"between levels {self.source.indices[i]} and {self.source.indices[j]}"
                )

    def positions(self) -> list[int]:
        return sorted(self.maps)


# ---------------------------------------------------------------------------
# tower builders over a complex window


SYSTEMS = {
    # (kind, theory) -> direction
    ("N", "H"): "direct",
    ("N", "Hred"): "direct",
    ("N", "Hc"): "inverse",
    ("N", "Hrel"): "direct",  # H_k(X, N_R)
    ("N", "Hcrel"): "inverse",  # H^k_c(X, N_R)
    ("Y", "H"): "inverse",
    ("Y", "Hred"): "inverse",
    ("Y", "Hc"): "direct",
    ("Y", "Hrel"): "inverse",  # H_k(X, Y_R)
    ("Y", "Hcrel"): "direct",  # H^k_c(X, Y_R)
}


def system_region(X: SimplicialComplex, K: Subcomplex, kind: str, R: int) -> Subcomplex:
    return neighborhood(K, R) if kind == "N" else complement_closure(K, R)


def system_view(X: SimplicialComplex, K: Subcomplex, kind: str, theory: str, R: int):
    S = system_region(X, K, kind, R)
    full = Subcomplex.full(X)
    if theory == "H":
        return chain_view(S)
    if theory == "Hred":
        return chain_view(S, reduced=True)
    if theory == "Hc":
        return compactly_supported_view(S)
    if theory == "Hrel":
        return relative_chain_view(full, S)
    if theory == "Hcrel":
        return compactly_supported_view(full, S)
    raise ComplexError(f"unknown tower theory {theory!r}")


def system_group(
    X: SimplicialComplex, K: Subcomplex, kind: str, theory: str, k: int, R: int
) -> GradedGroup:
    return graded_group(system_view(X, K, kind, theory, R), k)


def _system_step(
    X: SimplicialComplex,
    K: Subcomplex,
    kind: str,
    theory: str,
    k: int,
    R_small: int,
    R_big: int,
) -> GroupMap:
    """The system map between two consecutive radii, oriented with the system.

    Inverse systems map from the larger radius to the smaller one, direct
    systems the other way; cochain restrictions are the only non-strict
    transfers (duals without a counterpart restrict to zero).
    """
    va = system_view(X, K, kind, theory, R_small)
    vb = system_view(X, K, kind, theory, R_big)
    direction = SYSTEMS[(kind, theory)]
    ga, gb = graded_group(va, k), graded_group(vb, k)
    strict = theory != "Hc"
    if direction == "inverse":
        T = transfer_matrix(vb, va, k, strict=strict)
        return push(gb, ga, T)
    T = transfer_matrix(va, vb, k, strict=strict)
    return push(ga, gb, T)


def build_tower(
    X: SimplicialComplex,
    K: Subcomplex,
    kind: str,
    theory: str,
    k: int,
    R_list: Sequence[int],
) -> Tower:
    if (kind, theory) not in SYSTEMS:
        raise ComplexError(f"unknown system ({kind}, {theory})")
    R_list = sorted(R_list)
    direction = SYSTEMS[(kind, theory)]
    groups = [system_group(X, K, kind, theory, k, R) for R in R_list]
    maps = [
        _system_step(X, K, kind, theory, k, a, b)
        for a, b in zip(R_list, R_list[1:])
    ]
    return Tower(
        direction=direction,
        indices=list(R_list),
        groups=groups,
        maps=maps,
        theory=f"{theory}_{kind}",
        frontier_limit=valid_radius(K),
    )


def neighborhood_tower(
    X: SimplicialComplex,
    K: Subcomplex,
    k: int,
    theory: str,
    R_list: Sequence[int],
) -> Tower:
    """Tower of the tubular-neighborhood system {N_R(K)} in the given theory."""
    return build_tower(X, K, "N", theory, k, R_list)


def complement_tower(
    X: SimplicialComplex,
    K: Subcomplex,
    k: int,
    theory: str,
    R_list: Sequence[int],
) -> Tower:
    """Tower of the complement system {Y_R} in the given theory."""
    return build_tower(X, K, "Y", theory, k, R_list)


# ---------------------------------------------------------------------------
# verdicts


def _first_nonzero_generator(g) -> dict | None:
    for i, d in enumerate(g.pres.orders):
        return {"generator": i, "order": d}
    return None


def is_pro_zero(T: Tower) -> Verdict:
    """Does every stored index admit a later index with zero composite?

    ``verified`` comes with the measured kill table; a class surviving the
    whole stored range refutes only when the tower is exhaustive, otherwise
    the window is exhausted and the verdict is inconclusive.
    """
    if len(T) < 2:
        return Verdict("inconclusive", note="fewer than 2 stored indices")
    emit = T.emittable_positions()
    if not emit:
        return Verdict("inconclusive", note="no index has enough frontier slack")
    omega: dict[int, int] = {}
    for pos in emit:
        found = None
        for later in range(pos, len(T)):
            comp = (
                T.composite(later, pos)
                if T.direction == "inverse"
                else T.composite(pos, later)
            )
            if comp.is_zero():
                found = later
                break
        if found is None:
            witness = {
                "R": T.indices[pos],
                "survives_to": T.indices[-1],
                "class": _first_nonzero_generator(
                    T.groups[-1 if T.direction == "inverse" else pos]
                ),
            }
            status = "refuted" if T.exhaustive else "inconclusive"
            return Verdict(status, omega=omega or None, witness=witness,
                           valid_range=T.valid_range())
        omega[T.indices[pos]] = T.indices[found]
    return Verdict("verified", omega=omega, valid_range=T.valid_range())


def check_approx_mono(m: TowerMorphism) -> Verdict:
    """Search the least omega making the morphism an approximate monomorphism."""
    A, B = m.source, m.target
    positions = [p for p in m.positions() if p in set(A.emittable_positions())]
    if not positions:
        return Verdict("inconclusive", note="no level has enough frontier slack")
    omega: dict[int, int] = {}
    if A.direction == "inverse":
        for i in positions:
            found = None
            for j in [p for p in m.positions() if p >= i]:
                ker = m.maps[j].kernel_gens()
                proj = A.composite(j, i)
                if all(proj.target.is_zero(proj.apply(g)) for g in ker):
                    found = j
                    break
            if found is None:
                witness = {"R": A.indices[i], "kernel_at": A.indices[-1]}
                status = "refuted" if A.exhaustive else "inconclusive"
                return Verdict(status, omega=omega or None, witness=witness,
                               valid_range=A.valid_range())
            omega[A.indices[i]] = A.indices[found]
    else:
        for i in positions:
            ker = m.maps[i].kernel_gens()
            found = None
            for j in range(i, len(A)):
                proj = A.composite(i, j)
                if all(proj.target.is_zero(proj.apply(g)) for g in ker):
                    found = j
                    break
            if found is None:
                witness = {"R": A.indices[i], "kernel_at": A.indices[i]}
                status = "refuted" if A.exhaustive else "inconclusive"
                return Verdict(status, omega=omega or None, witness=witness,
                               valid_range=A.valid_range())
            omega[A.indices[i]] = A.indices[found]
    return Verdict("verified", omega=omega, valid_range=A.valid_range())


def _saturation_image_gens(m: TowerMorphism, jpos: int) -> list[tuple[int, ...]]:
    """Generators of Im(f-hat) inside B at stored position jpos."""
    B = m.target
    gens: list[tuple[int, ...]] = []
    for i in m.positions():
        ai = m.alpha[i]
        if B.direction == "inverse":
            if ai < jpos:
                continue
            q = B.composite(ai, jpos)
        else:
            if ai > jpos:
                continue
            q = B.composite(ai, jpos)
        comp = q.compose(m.maps[i])
        gens.extend(comp.image_gens())
    return gens


def check_approx_epi(m: TowerMorphism) -> Verdict:
    """Search the least omega-bar making the morphism an approximate epimorphism."""
    B = m.target
    emit = set(B.emittable_positions())
    positions = [p for p in range(len(B)) if p in emit]
    if not positions:
        return Verdict("inconclusive", note="no level has enough frontier slack")
    omega: dict[int, int] = {}
    if B.direction == "inverse":
        for j in positions:
            im_f = _saturation_image_gens(m, j)
            pres = B.groups[j].pres
            found = None
            for jp in range(j, len(B)):
                gens_proj = B.composite(jp, j).image_gens()
                if subgroup_leq(pres, gens_proj, im_f):
                    found = jp
                    break
            if found is None:
                status = "refuted" if B.exhaustive else "inconclusive"
                return Verdict(status, omega=omega or None,
                               witness={"R": B.indices[j]},
                               valid_range=B.valid_range())
            omega[B.indices[j]] = B.indices[found]
    else:
        for j in positions:
            found = None
            for jp in range(j, len(B)):
                im_f = _saturation_image_gens(m, jp)
                pres = B.groups[jp].pres
                gens_proj = B.composite(j, jp).image_gens()
                if subgroup_leq(pres, gens_proj, im_f):
                    found = jp
                    break
            if found is None:
                status = "refuted" if B.exhaustive else "inconclusive"
                return Verdict(status, omega=omega or None,
                               witness={"R": B.indices[j]},
                               valid_range=B.valid_range())
            omega[B.indices[j]] = B.indices[found]
    return Verdict("verified", omega=omega, valid_range=B.valid_range())


def check_approx_iso(m: TowerMorphism) -> tuple[Verdict, Verdict]:
    return check_approx_mono(m), check_approx_epi(m)


# ---------------------------------------------------------------------------
# deep homology


@dataclass
class DeepGroup:
    """Image of the deepest window-valid radius inside H_k(Y_R)."""

    pres: AbPres
    degree: int
    R: int
    R_max: int
    ambient: GradedGroup
    lifts: list[dict]
    inclusion: GroupMap  # DeepGroup -> ambient presentation

    @property
    def free_rank(self) -> int:
        return self.pres.free_rank

    @property
    def torsion(self) -> list[int]:
        return self.pres.torsion

    def is_trivial(self) -> bool:
        return self.pres.is_trivial()


def window_deep_rmax(X: SimplicialComplex, K: Subcomplex) -> int:
    """Deepest radius whose complement still carries a window collar."""
    lim = valid_radius(K)
    if lim is None:
        raise ComplexError("complex has no marked frontier; deep radius undefined")
    return max(0, lim - 1)


def deep_homology(
    X: SimplicialComplex,
    K: Subcomplex,
    k: int,
    R: int,
    reduced: bool = False,
    R_max: int | None = None,
) -> DeepGroup:
    """Deep classes of H_k(Y_R): the image from the deepest valid radius."""
    if R_max is None:
        R_max = window_deep_rmax(X, K)
    if R > R_max:
        raise ComplexError(f"R={R} beyond the deepest valid radius {R_max}")
    theory = "Hred" if reduced else "H"
    Y_R = complement_closure(K, R)
    Y_deep = complement_closure(K, R_max)
    v_small = chain_view(Y_R, reduced=reduced)
    v_deep = chain_view(Y_deep, reduced=reduced)
    g_small = graded_group(v_small, k)
    g_deep = graded_group(v_deep, k)
    proj = push(g_deep, g_small, transfer_matrix(v_deep, v_small, k))
    gens = proj.image_gens()
    pres, combos = subgroup_presentation(g_small.pres, gens)
    chain_lifts = []
    pushed = []
    for lift in g_deep.lifts:
        vec = v_deep.vec_of(lift, k)
        pushed.append(v_small.chain_of(transfer_matrix(v_deep, v_small, k).matvec(vec), k))
    nonzero_pushed = [c for c, g in zip(pushed, proj.columns) if any(g)]
    for combo in combos:
        chain: dict = {}
        for coeff, base in zip(combo, nonzero_pushed):
            if not coeff:
                continue
            for s, v in base.items():
                nv = chain.get(s, 0) + coeff * v
                if nv:
                    chain[s] = nv
                else:
                    chain.pop(s, None)
        chain_lifts.append(chain)
    incl_cols = [g_small.coords(c) for c in chain_lifts]
    inclusion = GroupMap(pres, g_small.pres, incl_cols)
    return DeepGroup(
        pres=pres,
        degree=k,
        R=R,
        R_max=R_max,
        ambient=g_small,
        lifts=chain_lifts,
        inclusion=inclusion,
    )


def stable_deep_component_table(
    X: SimplicialComplex, K: Subcomplex, R_list: Sequence[int]
) -> dict[int, list[Subcomplex]]:
    from .simplicial import deep_components

    out: dict[int, list[Subcomplex]] = {}
    for R in sorted(R_list):
        deep, _ = deep_components(complement_closure(K, R))
        out[R] = deep
    return out


def stabilization_radius(
    X: SimplicialComplex,
    K: Subcomplex,
    k: int,
    R_list: Sequence[int],
    reduced: bool = True,
) -> tuple[int | None, Verdict]:
    """Least stored R0 past which the deep structure projects injectively.

    Degree 0 uses the component formulation: every deep component of Y_R0
    must meet exactly one deep component of Y_R' for each deeper stored R'.
    Higher degrees check injectivity of the projections on the deep homology
    subgroups, with the deepest window-valid radius substituted for the
    inverse limit (noted in the verdict).
    """
    R_list = sorted(R_list)
    R_max = window_deep_rmax(X, K)
    usable = [R for R in R_list if R <= R_max]
    if len(usable) < 2:
        return None, Verdict("inconclusive", note="window too small for stabilization")

    if k == 0:
        table = stable_deep_component_table(X, K, usable)
        for pos, R0 in enumerate(usable):
            ok = True
            for Rp in usable[pos + 1 :]:
                for comp in table[R0]:
                    vs = comp.vertex_set()
                    hits = sum(
                        1 for deeper in table[Rp] if min(deeper.vertex_set()) in vs
                    )
                    if hits != 1:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return R0, Verdict(
                    "verified",
                    valid_range=(usable[0], usable[-1]),
                    note="component-stability over the stored range",
                )
        return None, Verdict("refuted", valid_range=(usable[0], usable[-1]))

    deeps = {R: deep_homology(X, K, k, R, reduced=reduced, R_max=R_max) for R in usable}
    for R0 in usable:
        ok = True
        for Rp in (R for R in usable if R > R0):
            dg = deeps[Rp]
            v_from = chain_view(complement_closure(K, Rp), reduced=reduced)
            v_to = chain_view(complement_closure(K, R0), reduced=reduced)
            T = transfer_matrix(v_from, v_to, k)
            cols = [
                deeps[R0].ambient.coords_vec(T.matvec(v_from.vec_of(c, k)))
                for c in dg.lifts
            ]
            gm = GroupMap(dg.pres, deeps[R0].ambient.pres, cols)
            if not gm.is_injective():
                ok = False
                break
        if ok:
            return R0, Verdict(
                "verified",
                valid_range=(usable[0], usable[-1]),
                note=f"deep image taken from R_max={R_max}",
            )
    return None, Verdict("refuted", valid_range=(usable[0], usable[-1]))


def vanishing_tower_test(
    X: SimplicialComplex,
    K: Subcomplex,
    k_max: int,
    R_list: Sequence[int],
) -> dict[int, Verdict]:
    """Pro-zero test of the reduced neighborhood homology below degree k_max."""
    out: dict[int, Verdict] = {}
    for i in range(k_max):
        T = neighborhood_tower(X, K, i, "Hred", R_list)
        out[i] = is_pro_zero(T)
    return out
