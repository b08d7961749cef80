"""Duality chain maps with measured displacement, and their consequences.

The certificate (P, Pbar, Phi, Phibar, D0) consists of a chain map from
window-relative cochains to chains, its homotopy inverse, and the two chain
homotopies, all built degree by degree from local ball solves.  The defining
identities are verified exactly on every generator, and the displacement
bound D0 is measured, not assumed.  Downstream of the certificate live the
radius-shifted (co)homology comparison maps, the Alexander compositions into
reduced homology of complements, the pushforward construction for uniformly
proper chain maps, deep-component counting against cohomology ranks, annulus
homology, and the cyclic-ordering experiment for books of half-planes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .abelian import GroupMap, image_is_full
from .homology import (
    GradedGroup,
    chain_view,
    cohomology_c,
    collar_of,
    compactly_supported_view,
    graded_group,
    relative_chain_view,
)
from .intlinalg import smith_normal_form
from .localsolve import (
    BallSolver,
    Chain,
    SolveInfeasible,
    augmentation,
    boundary_chain,
    chain_add,
    chain_support_vertices,
)
from .simplicial import (
    ComplexError,
    SimplicialComplex,
    Simplex,
    Subcomplex,
    complement_closure,
    deep_components,
    neighborhood,
    valid_radius,
    vertex_distances,
)
from .towers import (
    Tower,
    TowerMorphism,
    Verdict,
    build_tower,
    system_group,
    system_view,
)

# ---------------------------------------------------------------------------
# manifold certificates


def manifold_facet_check(X: SimplicialComplex) -> None:
    """Every (n-1)-simplex must bound at most two n-simplices, interior ones
    exactly two."""
    n = X.dim
    cof = X.cofaces(n - 1)
    fv = X.frontier_vertices
    for facet, tops in cof.items():
        if len(tops) > 2:
            raise ComplexError(f"non-manifold facet {facet}: {len(tops)} cofaces")
        if len(tops) < 2 and not any(v in fv for v in facet):
            raise ComplexError(f"interior facet {facet} has {len(tops)} cofaces")


def _link_complex(X: SimplicialComplex, v: int) -> list[Simplex]:
    out = []
    for k in range(1, X.dim + 1):
        for s in X.simplices[k]:
            if v in s:
                out.append(tuple(u for u in s if u != v))
    return out


def pl_manifold_audit(X: SimplicialComplex) -> dict:
    """Check that interior vertex links are spheres (dim 2 and 3 windows)."""
    n = X.dim
    fv = X.frontier_vertices
    bad: list[int] = []
    checked = 0
    for v in X.vertices:
        if v in fv:
            continue
        checked += 1
        link = _link_complex(X, v)
        top = [s for s in link if len(s) == n]
        lower = [s for s in link if len(s) == n - 1]
        counts: dict[Simplex, int] = {s: 0 for s in lower}
        for s in top:
            for f in combinations(s, n - 1):
                counts[f] += 1
        if any(c != 2 for c in counts.values()):
            bad.append(v)
            continue
        # connectivity of the link facets
        if top:
            reps = {s: s for s in top}

            def find(s):
                while reps[s] != s:
                    reps[s] = reps[reps[s]]
                    s = reps[s]
                return s

            facet_of: dict[Simplex, Simplex] = {}
            for s in top:
                for f in combinations(s, n - 1):
                    if f in facet_of:
                        a, b = find(facet_of[f]), find(s)
                        if a != b:
                            reps[max(a, b)] = min(a, b)
                    else:
                        facet_of[f] = s
            if len({find(s) for s in top}) != 1:
                bad.append(v)
                continue
        if n == 3:
            verts = {u for s in link for u in s}
            chi = len(verts) - len(lower) + len(top)
            if chi != 2:
                bad.append(v)
        elif n == 2:
            if len({u for s in link for u in s}) != len(top):
                bad.append(v)
    return {"interior_vertices": checked, "bad_links": bad, "ok": not bad}


def orientation_class(X: SimplicialComplex) -> dict[Simplex, int]:
    """Coherent orientation signs on the top simplices of a manifold window.

    The returned signs define the augmentation ``alpha(phi) = sum sign*phi``
    of the top-degree windowed cochains.  Non-manifold facets and
    non-orientable complexes are rejected.
    """
    n = X.dim
    manifold_facet_check(X)
    cof = X.cofaces(n - 1)
    tops = X.simplices[n]
    adj: dict[Simplex, list[tuple[Simplex, int, int]]] = {s: [] for s in tops}
    for facet, pair in cof.items():
        if len(pair) != 2:
            continue
        a, b = pair
        sa = (-1) ** a.index(next(v for v in a if v not in facet))
        sb = (-1) ** b.index(next(v for v in b if v not in facet))
        adj[a].append((b, sa, sb))
        adj[b].append((a, sb, sa))
    signs: dict[Simplex, int] = {}
    for start in tops:
        if start in signs:
            continue
        signs[start] = 1
        stack = [start]
        while stack:
            s = stack.pop()
            for t, ss, st in adj[s]:
                want = -signs[s] * ss * st
                if t in signs:
                    if signs[t] != want:
                        raise ComplexError("complex is not orientable")
                else:
                    signs[t] = want
                    stack.append(t)
    return signs


# ---------------------------------------------------------------------------
# acyclicity profile


@dataclass
class AcyclicityProfile:
    """Sampled pairs (R1, R2): diameter-R1 subcomplexes die in their
    R2-neighborhoods on reduced homology."""

    samples: list[tuple[int, int]]

    def bound(self, r1: int) -> int:
        out = r1 + 1
        for a, b in self.samples:
            if a >= r1:
                return max(out, b)
            out = max(out, b)
        return out


def measure_acyclicity_profile(
    X: SimplicialComplex,
    S: Subcomplex | None = None,
    r1_values: Sequence[int] = (1, 2, 3),
    sample_count: int = 4,
) -> AcyclicityProfile:
    """Measure R2(R1) on sampled balls of S (default: the whole window)."""
    from .homology import push, transfer_matrix

    region = S if S is not None else Subcomplex.full(X)
    verts = sorted(region.vertex_set())
    if not verts:
        raise ComplexError("empty region")
    step = max(1, len(verts) // sample_count)
    picks = verts[::step][:sample_count]
    samples: list[tuple[int, int]] = []
    last = 1
    for r1 in sorted(r1_values):
        needed = max(last, r1)
        for v in picks:
            dist = vertex_distances(X, [v], within=region)
            ball_vs = {w for w, d in dist.items() if d <= r1}
            ball = Subcomplex.induced(X, ball_vs).intersection(region)
            if ball.is_empty():
                continue
            for r2 in range(needed, needed + 8):
                nbhd_vs = {w for w, d in dist.items() if d <= r2}
                nbhd = Subcomplex.induced(X, nbhd_vs).intersection(region)
                ok = True
                for k in range(0, X.dim + 1):
                    sv, tv = chain_view(ball, reduced=True), chain_view(nbhd, reduced=True)
                    m = push(
                        graded_group(sv, k),
                        graded_group(tv, k),
                        transfer_matrix(sv, tv, k),
                    )
                    if not m.is_zero():
                        ok = False
                        break
                if ok:
                    needed = max(needed, r2)
                    break
            else:
                raise ComplexError(f"acyclicity not reached for R1={r1} at {v}")
        samples.append((r1, needed))
        last = needed
    return AcyclicityProfile(samples)


# ---------------------------------------------------------------------------
# chain map records and the duality certificate


@dataclass
class ChainMapRecord:
    """Per-degree sparse map between (co)chain generators, with measurements."""

    kind: str  # e.g. "chains->cochains"
    tables: dict[int, dict[Simplex, Chain]]
    displacement: int = 0
    lipschitz: int = 0

    def apply(self, degree: int, chain: Chain) -> Chain:
        table = self.tables.get(degree, {})
        out: Chain = {}
        for s, v in chain.items():
            img = table.get(s)
            if img is None:
                continue
            out = chain_add(out, img, v)
        return out

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "displacement": self.displacement,
            "lipschitz": self.lipschitz,
            "tables": {
                str(k): [
                    [list(s), [[list(t), v] for t, v in sorted(img.items())]]
                    for s, img in sorted(tab.items())
                ]
                for k, tab in self.tables.items()
            },
        }

    @classmethod
    def from_json(cls, payload: dict) -> "ChainMapRecord":
        tables = {
            int(k): {
                tuple(s): {tuple(t): v for t, v in img}
                for s, img in tab
            }
            for k, tab in payload["tables"].items()
        }
        return cls(
            kind=payload["kind"],
            tables=tables,
            displacement=payload["displacement"],
            lipschitz=payload["lipschitz"],
        )


HomotopyRecord = ChainMapRecord  # same storage; degree shift differs


def _bounded_dists(
    X: SimplicialComplex, sources: Iterable[int], cap: int
) -> dict[int, int]:
    from collections import deque

    adj = X.adjacency
    dist = {v: 0 for v in sorted(set(sources))}
    dq = deque(sorted(dist))
    while dq:
        v = dq.popleft()
        if dist[v] >= cap:
            continue
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                dq.append(w)
    return dist


def _measure_spread(
    X: SimplicialComplex, tables: dict[int, dict[Simplex, Chain]]
) -> tuple[int, int]:
    """(displacement, lipschitz): max distance from generator to image
    support, and max diameter of generator-plus-image support."""
    disp = 0
    lip = 0
    cap = 24
    for table in tables.values():
        for s, img in table.items():
            if not img:
                continue
            verts = chain_support_vertices(img)
            dist = _bounded_dists(X, set(s), cap)
            reach = max(dist.get(v, cap) for v in verts)
            disp = max(disp, reach)
            all_vs = sorted(verts | set(s))
            diam = 0
            for v in all_vs:
                dv = _bounded_dists(X, [v], cap)
                diam = max(diam, max(dv.get(w, cap) for w in all_vs))
            lip = max(lip, diam)
    return disp, max(lip, disp)


@dataclass
class PDCertificate:
    """Checkable coarse duality certificate for a manifold grid window."""

    X: SimplicialComplex
    n: int
    orientation: dict[Simplex, int]
    P: ChainMapRecord  # windowed cochains (degree l) -> chains (degree n-l)
    Pbar: ChainMapRecord  # chains (degree k) -> windowed cochains (degree n-k)
    Phi: HomotopyRecord  # chains degree +1
    Phibar: HomotopyRecord  # cochains degree -1
    D0: int
    identity_failures: list = field(default_factory=list)

    @property
    def D(self) -> int:
        return self.D0 + 1

    def alpha(self, cochain: Chain) -> int:
        return sum(self.orientation[s] * v for s, v in cochain.items())

    def apply_P(self, l: int, cochain: Chain) -> Chain:
        return self.P.apply(l, cochain)

    def apply_Pbar(self, k: int, chain: Chain) -> Chain:
        return self.Pbar.apply(k, chain)


def _delta_w(X: SimplicialComplex, l: int, sigma: Simplex) -> Chain:
    """Window-relative coboundary of a dual generator."""
    out: Chain = {}
    for t in X.cofaces(l).get(sigma, ()):
        if X.in_collar(t):
            continue
        pos = t.index(next(v for v in t if v not in sigma))
        out[t] = (-1) ** pos
    return out


def _cochain_delta_w(X: SimplicialComplex, cochain: Chain) -> Chain:
    out: Chain = {}
    for s, v in cochain.items():
        out = chain_add(out, _delta_w(X, len(s) - 1, s), v)
    return out


def poincare_maps(X: SimplicialComplex) -> PDCertificate:
    """Construct and verify the duality certificate on a grid window.

    Every map value is produced by a ball-restricted integer solve; the
    construction raises if a solve is infeasible inside the radius schedule
    (an acyclicity violation).  All four defining identities are then checked
    exactly on every generator.
    """
    n = X.dim
    orientation = orientation_class(X)
    solver = BallSolver(X)
    offc = [
        [s for s in X.simplices[k] if not X.in_collar(s)] for k in range(n + 1)
    ]

    # Pbar: chains -> windowed cochains, degree k -> n-k
    pbar: dict[int, dict[Simplex, Chain]] = {0: {}}
    for (v,) in X.simplices[0]:
        pbar[0][(v,)] = _top_cocycle_at(X, v, orientation)
    for k in range(1, n + 1):
        level: dict[Simplex, Chain] = {}
        for tau in X.simplices[k]:
            rhs: Chain = {}
            for pos in range(len(tau)):
                f = tau[:pos] + tau[pos + 1 :]
                rhs = chain_add(rhs, pbar[k - 1][f], (-1) ** pos)
            level[tau] = solver.solve_coboundary(n - k, rhs, tau)
        pbar[k] = level

    # P: windowed cochains -> chains, cochain degree l -> chain degree n-l
    p: dict[int, dict[Simplex, Chain]] = {n: {}}
    for sigma in offc[n]:
        p[n][sigma] = {(min(sigma),): orientation[sigma]}
    for l in range(n - 1, -1, -1):
        level = {}
        for sigma in offc[l]:
            rhs: Chain = {}
            for t, sign in _delta_w(X, l, sigma).items():
                rhs = chain_add(rhs, p[l + 1][t], sign)
            level[sigma] = solver.solve_boundary(n - l, rhs, sigma)
        p[l] = level

    def apply_p(cochain: Chain) -> Chain:
        out: Chain = {}
        for s, v in cochain.items():
            img = p[len(s) - 1].get(s)
            if img:
                out = chain_add(out, img, v)
        return out

    def apply_pbar(chain: Chain) -> Chain:
        out: Chain = {}
        for s, v in chain.items():
            out = chain_add(out, pbar[len(s) - 1][s], v)
        return out

    # Phi: chains degree k -> k+1 with  P(Pbar(tau)) - tau = dPhi + Phi d
    phi: dict[int, dict[Simplex, Chain]] = {}
    failures: list = []
    for k in range(0, n + 1):
        level = {}
        for tau in X.simplices[k]:
            rhs = apply_p(pbar[k][tau])
            rhs = chain_add(rhs, {tau: 1}, -1)
            if k > 0:
                for pos in range(len(tau)):
                    f = tau[:pos] + tau[pos + 1 :]
                    rhs = chain_add(rhs, phi[k - 1][f], -((-1) ** pos))
            if k == n:
                if rhs:
                    failures.append(("Phi_top", tau, rhs))
                level[tau] = {}
            else:
                level[tau] = solver.solve_boundary(k + 1, rhs, tau)
        phi[k] = level

    # Phibar: cochains degree l -> l-1 with Pbar(P(sigma*)) - sigma* =
    # delta Phibar + Phibar delta
    phibar: dict[int, dict[Simplex, Chain]] = {}
    for l in range(n, -1, -1):
        level = {}
        for sigma in offc[l]:
            rhs = apply_pbar(p[l][sigma])
            rhs = chain_add(rhs, {sigma: 1}, -1)
            for t, sign in _delta_w(X, l, sigma).items():
                rhs = chain_add(rhs, phibar[l + 1][t], -sign)
            if l == 0:
                if rhs:
                    failures.append(("Phibar_bottom", sigma, rhs))
                level[sigma] = {}
            else:
                level[sigma] = solver.solve_coboundary(l - 1, rhs, sigma)
        phibar[l] = level

    P = ChainMapRecord("cochains->chains", p)
    Pbar = ChainMapRecord("chains->cochains", pbar)
    Phi = ChainMapRecord("chains->chains(+1)", phi)
    Phibar = ChainMapRecord("cochains->cochains(-1)", phibar)
    d0 = 0
    for rec in (P, Pbar, Phi, Phibar):
        disp, lip = _measure_spread(X, rec.tables)
        rec.displacement, rec.lipschitz = disp, lip
        d0 = max(d0, lip)

    cert = PDCertificate(
        X=X,
        n=n,
        orientation=orientation,
        P=P,
        Pbar=Pbar,
        Phi=Phi,
        Phibar=Phibar,
        D0=d0,
        identity_failures=failures,
    )
    failures.extend(_verify_certificate(cert))
    return cert


def _top_cocycle_at(
    X: SimplicialComplex, v: int, orientation: dict[Simplex, int]
) -> Chain:
    """Dual of one top simplex at v, signed to have augmentation 1."""
    tops = [s for s in X.maximal_simplices if len(s) - 1 == X.dim and v in s]
    if not tops:
        raise ComplexError(f"vertex {v} not in any top simplex")
    sigma = min(tops)
    return {sigma: orientation[sigma]}


def _verify_certificate(cert: PDCertificate) -> list:
    """Exact generator-level checks of the four defining identities."""
    X, n = cert.X, cert.n
    failures = []
    # chain-map identities
    for k in range(1, n + 1):
        for tau, img in cert.Pbar.tables[k].items():
            lhs = _cochain_delta_w(X, img)
            rhs: Chain = {}
            for pos in range(len(tau)):
                f = tau[:pos] + tau[pos + 1 :]
                rhs = chain_add(rhs, cert.Pbar.tables[k - 1][f], (-1) ** pos)
            if lhs != rhs:
                failures.append(("Pbar_chainmap", tau))
    for l in range(0, n):
        for sigma, img in cert.P.tables[l].items():
            lhs = boundary_chain(img)
            rhs = {}
            for t, sign in _delta_w(X, l, sigma).items():
                rhs = chain_add(rhs, cert.P.tables[l + 1][t], sign)
            if lhs != rhs:
                failures.append(("P_chainmap", sigma))
    # homotopy identities
    for k in range(0, n + 1):
        for tau in X.simplices[k]:
            want = cert.P.apply(n - k, cert.Pbar.tables[k][tau])
            want = chain_add(want, {tau: 1}, -1)
            got = boundary_chain(cert.Phi.tables[k][tau])
            if k > 0:
                for pos in range(len(tau)):
                    f = tau[:pos] + tau[pos + 1 :]
                    got = chain_add(got, cert.Phi.tables[k - 1][f], (-1) ** pos)
            if got != want:
                failures.append(("Phi_identity", tau))
    for l in range(0, n + 1):
        for sigma in cert.Phibar.tables[l]:
            want = cert.Pbar.apply(n - l, cert.P.tables[l][sigma])
            want = chain_add(want, {sigma: 1}, -1)
            got = _cochain_delta_w(X, cert.Phibar.tables[l][sigma])
            for t, sign in _delta_w(X, l, sigma).items():
                got = chain_add(got, cert.Phibar.tables[l + 1][t], sign)
            if got != want:
                failures.append(("Phibar_identity", sigma))
    return failures


def certificate_to_json(cert: PDCertificate) -> dict:
    return {
        "n": cert.n,
        "D0": cert.D0,
        "orientation": [[list(s), v] for s, v in sorted(cert.orientation.items())],
        "P": cert.P.to_json(),
        "Pbar": cert.Pbar.to_json(),
        "Phi": cert.Phi.to_json(),
        "Phibar": cert.Phibar.to_json(),
        "identity_failures": len(cert.identity_failures),
    }


# ---------------------------------------------------------------------------
# the radius-shifted comparison maps (four variants each way)


def _lift_vec(group: GradedGroup, i: int) -> Chain:
    return group.lifts[i]


def _coords_in(group: GradedGroup, chain: Chain) -> tuple[int, ...]:
    return group.coords(chain)


def coarse_pd_map(
    X: SimplicialComplex,
    K: Subcomplex,
    R: int,
    k: int,
    variant: str,
    cert: PDCertificate,
    leg: str = "P",
) -> GroupMap:
    """One leg of the radius-shifted duality comparison at radius R, degree k.

    Variants (P leg, then Pbar leg):
      e1: Hc^k(N_{R+D})    -> H_{n-k}(X, Y_R)   -> Hc^k(N_{R-D})
      e2: Hc^k(Y_R)        -> H_{n-k}(X, N_{R+D}) -> Hc^k(Y_{R+2D})
      e3: Hc^k(X, N_{R+D}) -> H_{n-k}(Y_R)      -> Hc^k(X, N_{R-D})
      e4: Hc^k(X, Y_R)     -> H_{n-k}(N_{R+D})  -> Hc^k(X, Y_{R+2D})
    """
    n, D = cert.n, cert.D
    if variant == "e1":
        if leg == "P":
            src = system_group(X, K, "N", "Hc", k, R + D)
            dstv = system_view(X, K, "Y", "Hrel", R)
            dst = graded_group(dstv, n - k)
            cols = []
            for lift in src.lifts:
                z = cert.apply_P(k, lift)
                cols.append(dst.coords(z))
            return GroupMap(src.pres, dst.pres, cols)
        srcv = system_view(X, K, "Y", "Hrel", R)
        src = graded_group(srcv, n - k)
        dst = system_group(X, K, "N", "Hc", k, R - D)
        cols = []
        for lift in src.lifts:
            phi = cert.apply_Pbar(n - k, lift)
            cols.append(dst.coords(_restrict_to_view(dst, phi)))
        return GroupMap(src.pres, dst.pres, cols)
    if variant == "e2":
        if leg == "P":
            src = system_group(X, K, "Y", "Hc", k, R)
            dst = system_group(X, K, "N", "Hrel", n - k, R + D)
            cols = [dst.coords(cert.apply_P(k, lift)) for lift in src.lifts]
            return GroupMap(src.pres, dst.pres, cols)
        src = system_group(X, K, "N", "Hrel", n - k, R + D)
        dst = system_group(X, K, "Y", "Hc", k, R + 2 * D)
        cols = []
        for lift in src.lifts:
            phi = cert.apply_Pbar(n - k, lift)
            cols.append(dst.coords(_restrict_to_view(dst, phi)))
        return GroupMap(src.pres, dst.pres, cols)
    if variant == "e3":
        if leg == "P":
            src = system_group(X, K, "N", "Hcrel", k, R + D)
            dst = graded_group(chain_view(complement_closure(K, R)), n - k)
            cols = [dst.coords(cert.apply_P(k, lift)) for lift in src.lifts]
            return GroupMap(src.pres, dst.pres, cols)
        src = graded_group(chain_view(complement_closure(K, R)), n - k)
        dst = system_group(X, K, "N", "Hcrel", k, R - D)
        cols = []
        for lift in src.lifts:
            phi = cert.apply_Pbar(n - k, lift)
            cols.append(dst.coords(_restrict_to_view(dst, phi)))
        return GroupMap(src.pres, dst.pres, cols)
    if variant == "e4":
        if leg == "P":
            src = system_group(X, K, "Y", "Hcrel", k, R)
            dst = graded_group(chain_view(neighborhood(K, R + D)), n - k)
            cols = [dst.coords(cert.apply_P(k, lift)) for lift in src.lifts]
            return GroupMap(src.pres, dst.pres, cols)
        src = graded_group(chain_view(neighborhood(K, R + D)), n - k)
        dst = system_group(X, K, "Y", "Hcrel", k, R + 2 * D)
        cols = []
        for lift in src.lifts:
            phi = cert.apply_Pbar(n - k, lift)
            cols.append(dst.coords(_restrict_to_view(dst, phi)))
        return GroupMap(src.pres, dst.pres, cols)
    raise ComplexError(f"unknown variant {variant!r}")


def _restrict_to_view(group: GradedGroup, cochain: Chain) -> Chain:
    """Restriction of an ambient cochain to the basis of the group's view."""
    view = group.view
    index = view.basis_index(group.degree)
    return {s: v for s, v in cochain.items() if s in index}


def _global_boundary_solve(X: SimplicialComplex, k: int, rhs: Chain) -> Chain:
    """tau with boundary(tau) = rhs inside the whole (acyclic) window."""
    key = ("global_dsolve", k)
    sf = X.cache.get(key)
    view = chain_view(Subcomplex.full(X))
    if sf is None:
        M = view._boundary(k)
        sf = smith_normal_form(M, transforms=("U", "V"))
        X.cache[key] = sf
    b = view.vec_of(rhs, k - 1)
    x = sf.solve(b)
    if x is None:
        raise ComplexError("boundary solve failed; window not acyclic?")
    return view.chain_of(x, k)


def alexander_map(
    X: SimplicialComplex,
    K: Subcomplex,
    R: int,
    k: int,
    variant: str,
    cert: PDCertificate,
) -> GroupMap:
    """The compositions with connecting maps of pairs:
      f1: Hc^k(N_{R+D}) -> H~_{n-k-1}(Y_R)
      f2: H~_{n-k-1}(Y_{R+D}) -> Hc^k(N_R)
      f3: Hc^k(Y_R) -> H~_{n-k-1}(N_{R+D})
      f4: H~_{n-k-1}(N_R) -> Hc^k(Y_{R+D})
    """
    n, D = cert.n, cert.D
    if variant == "f1":
        src = system_group(X, K, "N", "Hc", k, R + D)
        dst = graded_group(chain_view(complement_closure(K, R), reduced=True), n - k - 1)
        cols = []
        for lift in src.lifts:
            z = cert.apply_P(k, lift)
            cols.append(dst.coords(boundary_chain(z)))
        return GroupMap(src.pres, dst.pres, cols)
    if variant == "f2":
        src = graded_group(
            chain_view(complement_closure(K, R + D), reduced=True), n - k - 1
        )
        dst = system_group(X, K, "N", "Hc", k, R)
        cols = []
        for lift in src.lifts:
            z = {s: v for s, v in lift.items() if s != ()}
            tau = _global_boundary_solve(X, n - k, z)
            phi = cert.apply_Pbar(n - k, tau)
            cols.append(dst.coords(_restrict_to_view(dst, phi)))
        return GroupMap(src.pres, dst.pres, cols)
    if variant == "f3":
        src = system_group(X, K, "Y", "Hc", k, R)
        dst = graded_group(chain_view(neighborhood(K, R + D), reduced=True), n - k - 1)
        cols = []
        for lift in src.lifts:
            z = cert.apply_P(k, lift)
            cols.append(dst.coords(boundary_chain(z)))
        return GroupMap(src.pres, dst.pres, cols)
    if variant == "f4":
        src = graded_group(chain_view(neighborhood(K, R), reduced=True), n - k - 1)
        dst = system_group(X, K, "Y", "Hc", k, R + D)
        cols = []
        for lift in src.lifts:
            z = {s: v for s, v in lift.items() if s != ()}
            tau = _global_boundary_solve(X, n - k, z)
            phi = cert.apply_Pbar(n - k, tau)
            cols.append(dst.coords(_restrict_to_view(dst, phi)))
        return GroupMap(src.pres, dst.pres, cols)
    raise ComplexError(f"unknown variant {variant!r}")


def pd_morphism_towers(
    X: SimplicialComplex,
    K: Subcomplex,
    k: int,
    R_list: Sequence[int],
    variant: str,
    cert: PDCertificate,
) -> list[TowerMorphism]:
    """Both legs of a comparison variant packaged as tower morphisms.

    Towers are indexed by the complement radius R; the shifted radii R+-D of
    the sources and targets are baked into the stored groups.
    """
    n, D = cert.n, cert.D
    R_list = sorted(R_list)
    lim = valid_radius(K)

    def tower_of(kind: str, theory: str, deg: int, shift: int) -> Tower:
        T = build_tower(X, K, kind, theory, deg, [R + shift for R in R_list])
        return Tower(
            direction=T.direction,
            indices=list(R_list),
            groups=T.groups,
            maps=T.maps,
            theory=T.theory + f"(shift {shift:+d})",
            frontier_limit=(lim - shift) if lim is not None else None,
        )

    spec = {
        "e1": (("N", "Hc", k, D), ("Y", "Hrel", n - k, 0), ("N", "Hc", k, -D)),
        "e2": (("Y", "Hc", k, 0), ("N", "Hrel", n - k, D), ("Y", "Hc", k, 2 * D)),
        "e3": (("N", "Hcrel", k, D), ("Y", "H", n - k, 0), ("N", "Hcrel", k, -D)),
        "e4": (("Y", "Hcrel", k, 0), ("N", "H", n - k, D), ("Y", "Hcrel", k, 2 * D)),
    }[variant]
    A = tower_of(*spec[0])
    B = tower_of(*spec[1])
    C = tower_of(*spec[2])

    # the D-shifts live inside the stored groups, so both legs align levelwise
    ident = {i: i for i in range(len(R_list))}
    p_maps = {
        i: coarse_pd_map(X, K, R, k, variant, cert, leg="P")
        for i, R in enumerate(R_list)
    }
    morphA = TowerMorphism(A, B, ident, p_maps, name=f"{variant}:P")
    pb_maps = {
        i: coarse_pd_map(X, K, R, k, variant, cert, leg="Pbar")
        for i, R in enumerate(R_list)
    }
    morphB = TowerMorphism(B, C, ident, pb_maps, name=f"{variant}:Pbar")
    return [morphA, morphB]


# ---------------------------------------------------------------------------
# the constructive coarse Alexander duality route (appendix algorithm)


def subcomplex_inclusion_record(Y: Subcomplex) -> ChainMapRecord:
    """The inclusion of a subcomplex as an identity-on-simplices chain map."""
    tables: dict[int, dict[Simplex, Chain]] = {}
    for k in range(len(Y.levels)):
        tables[k] = {s: {s: 1} for s in Y.simplices_sorted(k)}
    rec = ChainMapRecord("chains->chains", tables)
    rec.displacement = 0
    rec.lipschitz = 1
    return rec


def support_of_record(X: SimplicialComplex, f: ChainMapRecord) -> Subcomplex:
    simplices: set[Simplex] = set()
    for table in f.tables.values():
        for img in table.values():
            simplices.update(img)
    return Subcomplex.from_simplices(X, sorted(simplices))


@dataclass
class Pushforward:
    """g : chains of X -> chains of Y, with the homotopy g.f ~ id."""

    g: ChainMapRecord
    homotopy: ChainMapRecord  # h with boundary h + h boundary = g.f - id on Y
    displacement: int
    vertex_projection: dict[int, int]  # X vertex -> chosen Y vertex


def pushforward_g(
    X: SimplicialComplex,
    Y: Subcomplex,
    f: ChainMapRecord,
    max_degree: int | None = None,
) -> Pushforward:
    """Build g degree by degree: vertices go to the nearest f-image, higher
    simplices are filled inside balls of Y; then the homotopy g.f ~ id on Y
    is built the same way.  Ties in the nearest-image choice break by least
    vertex id, so the construction is reproducible.
    """
    n = max_degree if max_degree is not None else X.dim
    # label every X vertex with the least Y vertex at minimal distance
    sources: dict[int, int] = {}
    for s, img in f.tables.get(0, {}).items():
        y = s[0]
        for t in img:
            for v in t:
                cur = sources.get(v)
                if cur is None or y < cur:
                    sources[v] = y
    from collections import deque

    dist: dict[int, int] = {v: 0 for v in sources}
    label: dict[int, int] = dict(sources)
    order = sorted(dist)
    dq = deque(order)
    adj = X.adjacency
    frontier_wave: list[int] = list(order)
    while dq:
        v = dq.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                dq.append(w)
    for w in sorted(dist, key=lambda u: (dist[u], u)):
        if w in label:
            continue
        label[w] = min(
            label[u] for u in adj[w] if u in dist and dist[u] == dist[w] - 1
        )

    solver = BallSolver(X, within=Y)
    tables: dict[int, dict[Simplex, Chain]] = {0: {}}
    for (v,) in X.simplices[0]:
        tables[0][(v,)] = {(label[v],): 1}
    for k in range(1, n + 1):
        level: dict[Simplex, Chain] = {}
        for s in X.simplices[k]:
            rhs: Chain = {}
            for pos in range(len(s)):
                fface = s[:pos] + s[pos + 1 :]
                rhs = chain_add(rhs, tables[k - 1][fface], (-1) ** pos)
            center = (label[min(s)],)
            level[s] = solver.solve_boundary(k, rhs, center)
        tables[k] = level
    g = ChainMapRecord("chains->chains", tables)

    # homotopy on Y: boundary h + h boundary = g(f(.)) - id
    def gf(k: int, s: Simplex) -> Chain:
        out: Chain = {}
        img = f.tables.get(k, {}).get(s, {})
        for t, v in img.items():
            out = chain_add(out, tables[k][t], v)
        return out

    htab: dict[int, dict[Simplex, Chain]] = {}
    dimY = Y.dim
    failures = []
    for k in range(0, dimY + 1):
        level = {}
        for s in Y.simplices_sorted(k):
            rhs = gf(k, s)
            rhs = chain_add(rhs, {s: 1}, -1)
            if k > 0:
                for pos in range(len(s)):
                    fface = s[:pos] + s[pos + 1 :]
                    rhs = chain_add(rhs, htab[k - 1][fface], -((-1) ** pos))
            if k == dimY:
                if rhs:
                    raise SolveInfeasible(
                        f"homotopy residual at top degree on {s}"
                    )
                level[s] = {}
            else:
                level[s] = solver.solve_boundary(k + 1, rhs, s)
        htab[k] = level
    h = ChainMapRecord("chains->chains(+1)", htab)
    for rec in (g, h):
        disp, lip = _measure_spread(X, rec.tables)
        rec.displacement, rec.lipschitz = disp, lip
    return Pushforward(
        g=g,
        homotopy=h,
        displacement=max(g.displacement, h.lipschitz),
        vertex_projection=label,
    )


def _pullback_cochain(f: ChainMapRecord, k: int, phi: Chain) -> Chain:
    """f^*(phi): evaluate phi on the f-image of each source generator."""
    out: Chain = {}
    for s, img in f.tables.get(k, {}).items():
        val = sum(v * phi.get(t, 0) for t, v in img.items())
        if val:
            out[s] = val
    return out


@dataclass
class CoarseADReport:
    epi: Verdict
    mono: Verdict
    r_prime: dict[int, int]
    degrees: int


def verify_coarse_ad(
    X: SimplicialComplex,
    Y: Subcomplex,
    f: ChainMapRecord,
    k: int,
    R_list: Sequence[int],
    cert: PDCertificate,
) -> CoarseADReport:
    """Check the two headline properties of the composition A_R.

    A_R sends a reduced (n-k-1)-cycle of the complement Y_R to a windowed
    k-cocycle of Y: lift, apply Pbar, restrict to N_R(K), pull back along f.
    Part 2: A_R is onto at every stored R.  Part 1: kernel classes die under
    the projection to a bounded smaller radius (the measured R'(R) table).
    """
    n, D = cert.n, cert.D
    K = support_of_record(X, f)
    target = cohomology_c(Y, k)
    R_list = sorted(R_list)

    def a_map(R: int) -> GroupMap:
        src = graded_group(
            chain_view(complement_closure(K, R + D), reduced=True), n - k - 1
        )
        cols = []
        ncol = target.pres.ngens
        for lift in src.lifts:
            z = {s: v for s, v in lift.items() if s != ()}
            tau = _global_boundary_solve(X, n - k, z)
            phi = cert.apply_Pbar(n - k, tau)
            nview = compactly_supported_view(neighborhood(K, R))
            restricted = {
                s: v for s, v in phi.items() if s in nview.basis_index(k)
            }
            pulled = _pullback_cochain(f, k, restricted)
            cols.append(target.coords(pulled))
        return GroupMap(src.pres, target.pres, cols)

    maps = {R: a_map(R) for R in R_list}

    epi_ok = all(image_is_full(target.pres, maps[R].image_gens()) for R in R_list)
    epi = Verdict(
        "verified" if epi_ok else "refuted",
        valid_range=(R_list[0], R_list[-1]),
    )

    r_prime: dict[int, int] = {}
    mono_status = "verified"
    for R in R_list:
        found = None
        for Rp in [r for r in R_list if r >= R]:
            ker = maps[Rp].kernel_gens()
            src_big = graded_group(
                chain_view(complement_closure(K, Rp + D), reduced=True), n - k - 1
            )
            src_small = graded_group(
                chain_view(complement_closure(K, R + D), reduced=True), n - k - 1
            )
            from .homology import push, transfer_matrix

            proj = push(
                src_big,
                src_small,
                transfer_matrix(
                    chain_view(complement_closure(K, Rp + D), reduced=True),
                    chain_view(complement_closure(K, R + D), reduced=True),
                    n - k - 1,
                ),
            )
            if all(proj.target.is_zero(proj.apply(g)) for g in ker):
                found = Rp
                break
        if found is None:
            mono_status = "inconclusive"
            break
        r_prime[R] = found
    mono = Verdict(mono_status, omega=r_prime or None,
                   valid_range=(R_list[0], R_list[-1]))
    return CoarseADReport(epi=epi, mono=mono, r_prime=r_prime, degrees=k)


@dataclass
class DeepCountReport:
    stable_count: int | None
    expected: int
    cohomology_rank: int
    counts_by_radius: dict[int, int]
    bilateral: dict | None
    ok: bool


def deep_count_vs_cohomology(
    X: SimplicialComplex,
    Y: Subcomplex,
    f: ChainMapRecord,
    R_list: Sequence[int],
    bilateral_expected: bool = False,
) -> DeepCountReport:
    """Stable deep components of the complement against 1 + rank Hc^{n-1}(Y).

    When the mapped complex is an (n-1)-manifold window the report also
    measures the bilateral proximity constant: the largest distance from a
    point of N_R(K) to either deep component.
    """
    n = X.dim
    K = support_of_record(X, f)
    rank = cohomology_c(Y, n - 1).free_rank
    expected = 1 + rank
    counts: dict[int, int] = {}
    comps_by_R: dict[int, list[Subcomplex]] = {}
    for R in sorted(R_list):
        deep, _ = deep_components(complement_closure(K, R))
        counts[R] = len(deep)
        comps_by_R[R] = deep
    stable = None
    values = [counts[R] for R in sorted(R_list)]
    if values and all(v == values[0] for v in values):
        stable = values[0]
    bilateral = None
    if bilateral_expected and stable == 2:
        R = sorted(R_list)[0]
        deep = comps_by_R[R]
        dists = [vertex_distances(X, c.vertex_set()) for c in deep]
        N = neighborhood(K, R)
        fv = X.frontier_vertices
        margin = 2
        fdist = vertex_distances(X, fv) if fv else {}
        worst = 0
        for (v,) in N.simplices_sorted(0):
            if fv and fdist.get(v, 0) < margin:
                continue
            worst = max(worst, max(d.get(v, 10**9) for d in dists))
        bilateral = {"R": R, "D": worst}
    return DeepCountReport(
        stable_count=stable,
        expected=expected,
        cohomology_rank=rank,
        counts_by_radius=counts,
        bilateral=bilateral,
        ok=stable == expected,
    )


# ---------------------------------------------------------------------------
# annuli


def annulus_homology(
    X: SimplicialComplex,
    K: Subcomplex,
    r: int,
    R: int,
    k: int,
) -> tuple[GradedGroup, GroupMap]:
    """Reduced H_k of the annulus between radii, with its widening map."""
    from .homology import push, transfer_matrix
    from .simplicial import annulus as annulus_sub

    A = annulus_sub(K, r, R)
    wide = annulus_sub(K, max(0, r - 1), R + 1)
    va, vw = chain_view(A, reduced=True), chain_view(wide, reduced=True)
    ga, gw = graded_group(va, k), graded_group(vw, k)
    widening = push(ga, gw, transfer_matrix(va, vw, k))
    return ga, widening


def annulus_conditions(
    X: SimplicialComplex,
    K: Subcomplex,
    radii: Sequence[int],
    degrees: Sequence[int],
) -> dict:
    """Zero/stability conditions on a candidate nested radius sequence.

    Checks, for consecutive radii: vanishing of reduced neighborhood homology
    steps, vanishing of windowed complement-cohomology steps, stability of the
    complement homology images, and per-component vanishing of reduced H_0.
    """
    from .homology import push, transfer_matrix

    radii = sorted(radii)
    out: dict = {"radii": list(radii), "A": [], "D": [], "B_rank": [], "F": []}
    for a, b in zip(radii, radii[1:]):
        okA = all(
            _system_step_is_zero(X, K, "N", "Hred", k, a, b) for k in degrees
        )
        out["A"].append(okA)
        okD = all(
            _system_step_is_zero(X, K, "Y", "Hc", k, a, b) for k in degrees
        )
        out["D"].append(okD)
        ranks = []
        for k in degrees:
            va = chain_view(complement_closure(K, a), reduced=True)
            vb = chain_view(complement_closure(K, b), reduced=True)
            m = push(
                graded_group(vb, k), graded_group(va, k),
                transfer_matrix(vb, va, k),
            )
            ranks.append(m.matrix_rank())
        out["B_rank"].append(ranks)
        deep_a, _ = deep_components(complement_closure(K, a))
        deep_b, _ = deep_components(complement_closure(K, b))
        okF = len(deep_a) == len(deep_b)
        out["F"].append(okF)
    out["ok"] = all(out["A"]) and all(out["D"]) and all(out["F"])
    return out


def _system_step_is_zero(
    X: SimplicialComplex, K: Subcomplex, kind: str, theory: str, k: int,
    a: int, b: int,
) -> bool:
    from .towers import _system_step

    return _system_step(X, K, kind, theory, k, a, b).is_zero()


def annulus_condition_search(
    X: SimplicialComplex,
    K: Subcomplex,
    count: int,
    degrees: Sequence[int],
    R_start: int = 1,
) -> list[int] | None:
    """Greedy search for a nested radius sequence satisfying the conditions."""
    lim = valid_radius(K)
    cap = (lim - 1) if lim is not None else R_start + 3 * count
    radii = [R_start]
    while len(radii) < count:
        cur = radii[-1]
        found = None
        for nxt in range(cur + 1, cap + 1):
            okA = all(
                _system_step_is_zero(X, K, "N", "Hred", k, cur, nxt)
                for k in degrees
            )
            okD = all(
                _system_step_is_zero(X, K, "Y", "Hc", k, cur, nxt)
                for k in degrees
            )
            if okA and okD:
                found = nxt
                break
        if found is None:
            return None
        radii.append(found)
    return radii


# ---------------------------------------------------------------------------
# cyclic ordering of book sheets


@dataclass
class CyclicOrderReport:
    order: list[int] | None
    adjacency: dict[int, tuple[int, int]]
    distances: dict[int, dict[int, int]]
    consistent: bool
    note: str = ""


def cyclic_order_experiment(
    X: SimplicialComplex,
    sheets: Sequence[Subcomplex],
    R: int,
    audit_margin: int = 2,
) -> CyclicOrderReport:
    """Recover the cyclic arrangement of sheets from deep complement pieces.

    Every deep component of the complement of the sheet union should hug
    exactly two sheets along its frontier; those adjacencies must close into
    a single cycle through all sheets.
    """
    W = sheets[0]
    for sh in sheets[1:]:
        W = W.union(sh)
    Y = complement_closure(W, R)
    deep, _ = deep_components(Y)
    if len(deep) != len(sheets):
        return CyclicOrderReport(
            order=None,
            adjacency={},
            distances={},
            consistent=False,
            note=f"expected {len(sheets)} deep components, found {len(deep)}",
        )
    sheet_dist = [vertex_distances(X, sh.vertex_set()) for sh in sheets]
    fv = X.frontier_vertices
    fdist = vertex_distances(X, fv) if fv else {}

    comp_vs = [c.vertex_set() for c in deep]
    adjacency: dict[int, tuple[int, int]] = {}
    distances: dict[int, dict[int, int]] = {}
    adj = X.adjacency
    for ci, c in enumerate(deep):
        vs = comp_vs[ci]
        boundary_vs = [
            v
            for v in sorted(vs)
            if any(w not in vs for w in adj[v])
            and (not fv or fdist.get(v, 0) >= audit_margin)
        ]
        if not boundary_vs:
            boundary_vs = sorted(vs)
        h: dict[int, int] = {}
        for si in range(len(sheets)):
            h[si] = max(sheet_dist[si].get(v, 10**9) for v in boundary_vs)
        distances[ci] = h
        ranked = sorted(h, key=lambda s: (h[s], s))
        adjacency[ci] = (min(ranked[0], ranked[1]), max(ranked[0], ranked[1]))

    # the sheet adjacency multigraph must be a single cycle
    degree: dict[int, int] = {i: 0 for i in range(len(sheets))}
    nbr: dict[int, list[int]] = {i: [] for i in range(len(sheets))}
    for a, b in adjacency.values():
        degree[a] += 1
        degree[b] += 1
        nbr[a].append(b)
        nbr[b].append(a)
    if any(d != 2 for d in degree.values()):
        return CyclicOrderReport(None, adjacency, distances, False,
                                 "adjacency degrees are not all 2")
    order = [0]
    prev = None
    cur = 0
    for _ in range(len(sheets) - 1):
        nxt = sorted(w for w in nbr[cur] if w != prev)[0] if prev is None else (
            nbr[cur][0] if nbr[cur][1] == prev else nbr[cur][1]
        )
        order.append(nxt)
        prev, cur = cur, nxt
    consistent = sorted(order) == list(range(len(sheets))) and (
        0 in nbr[order[-1]]
    )
    return CyclicOrderReport(
        order=order if consistent else None,
        adjacency=adjacency,
        distances=distances,
        consistent=consistent,
        note="" if consistent else "adjacency graph is not a single cycle",
    )
