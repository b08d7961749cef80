"""Example spaces: grid windows, hyperplane books, Cayley and BS complexes.

All generators are deterministic: vertex ids follow lexicographic coordinate
order (grids) or creation order (group-theoretic complexes), so repeated runs
produce byte-identical complexes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Sequence

from .simplicial import (
    ComplexError,
    SimplicialComplex,
    Simplex,
    Subcomplex,
    build_complex,
    frontier,
    neighborhood,
)

SIZE_CAP = 2_000_000  # total simplex budget for any generated window


# ---------------------------------------------------------------------------
# Euclidean grid windows (Kuhn triangulation)


def grid_window(n: int, W: int) -> SimplicialComplex:
    """Kuhn triangulation of the cube [-W, W]^n, frontier = boundary vertices.

    Each unit cube splits into n! simplices along monotone lattice paths, so
    windows in different dimensions share their combinatorial conventions.
    """
    if n not in (1, 2, 3):
        raise ComplexError("grid windows are built for n in {1, 2, 3}")
    if W < 1:
        raise ComplexError("window size must be at least 1")
    side = 2 * W + 1
    if (side**n) * (1 + 2 * n) > SIZE_CAP:
        raise ComplexError("window exceeds the size cap")

    def vid(pt: tuple[int, ...]) -> int:
        out = 0
        for x in pt:
            out = out * side + (x + W)
        return out

    coords = {}
    for pt in product(range(-W, W + 1), repeat=n):
        coords[vid(pt)] = pt

    maximal: list[tuple[int, ...]] = []
    for base in product(range(-W, W), repeat=n):
        for perm in permutations(range(n)):
            cur = list(base)
            pts = [tuple(cur)]
            for axis in perm:
                cur[axis] += 1
                pts.append(tuple(cur))
            maximal.append(tuple(sorted(vid(p) for p in pts)))
    # permutations of distinct axes can reproduce a simplex only in dim 1
    maximal = sorted(set(maximal))

    frontier_vs = {
        v for v, pt in coords.items() if any(abs(x) == W for x in pt)
    }
    return build_complex(maximal, frontier=frontier_vs, coords=coords)


def vertex_at(X: SimplicialComplex, point: Sequence[int] = ()) -> Subcomplex:
    """The subcomplex on a single vertex, defaulting to the origin."""
    if X.coords is None:
        raise ComplexError("complex carries no coordinates")
    pt = tuple(point) if point else tuple([0] * len(next(iter(X.coords.values()))))
    for v, c in X.coords.items():
        if c == pt:
            return Subcomplex.from_simplices(X, [(v,)])
    raise ComplexError(f"no vertex at {pt}")


def hyperplane(X: SimplicialComplex, axis: int, offset: int = 0) -> Subcomplex:
    """Full subcomplex on the vertices with coordinate[axis] == offset."""
    if X.coords is None:
        raise ComplexError("complex carries no coordinates")
    vs = [v for v, c in X.coords.items() if c[axis] == offset]
    if not vs:
        raise ComplexError(f"hyperplane axis={axis} offset={offset} misses the window")
    return Subcomplex.induced(X, vs)


# the six half-planes through the z-axis that are subcomplexes of the Kuhn
# 3-grid: coordinate half-planes plus the two halves of the diagonal x = y
_BOOK_SHEETS = (
    ("y=0,x>=0", lambda c: c[1] == 0 and c[0] >= 0),
    ("y=0,x<=0", lambda c: c[1] == 0 and c[0] <= 0),
    ("x=0,y>=0", lambda c: c[0] == 0 and c[1] >= 0),
    ("x=0,y<=0", lambda c: c[0] == 0 and c[1] <= 0),
    ("x=y>=0", lambda c: c[0] == c[1] and c[0] >= 0),
    ("x=y<=0", lambda c: c[0] == c[1] and c[0] <= 0),
)


def halfplane_book_sheets(X3: SimplicialComplex, k: int) -> list[Subcomplex]:
    """k half-plane sheets around the z-axis of a 3-grid window."""
    if X3.coords is None or len(next(iter(X3.coords.values()))) != 3:
        raise ComplexError("book sheets need a 3-grid window")
    if not (2 <= k <= 6):
        raise ComplexError("book supports 2..6 sheets")
    sheets = []
    for name, pred in _BOOK_SHEETS[:k]:
        vs = [v for v, c in X3.coords.items() if pred(c)]
        sheets.append(Subcomplex.induced(X3, vs))
    return sheets


def halfplane_book(X3: SimplicialComplex, k: int) -> Subcomplex:
    sheets = halfplane_book_sheets(X3, k)
    out = sheets[0]
    for sh in sheets[1:]:
        out = out.union(sh)
    return out


def ring(X2: SimplicialComplex, radius: int) -> Subcomplex:
    """Combinatorial circle: the frontier of the radius-ball at the origin."""
    return frontier(neighborhood(vertex_at(X2), radius))


def disk_net(X: SimplicialComplex, radius: int) -> Subcomplex:
    """Filled box net of the given sup-norm radius around the origin."""
    if X.coords is None:
        raise ComplexError("complex carries no coordinates")
    vs = [v for v, c in X.coords.items() if max(abs(x) for x in c) <= radius]
    return Subcomplex.induced(X, vs)


# ---------------------------------------------------------------------------
# presentations and Cayley 2-complex windows


def _parse_word(word: str, gen_index: dict[str, int]) -> tuple[int, ...]:
    """Word over generator letters; upper case means inverse.

    Returned as a tuple of directed-generator indices: 2*g for the generator,
    2*g + 1 for its inverse.
    """
    out = []
    for ch in word:
        low = ch.lower()
        if low not in gen_index:
            raise ComplexError(f"unknown generator letter {ch!r}")
        g = gen_index[low]
        out.append(2 * g + (1 if ch.isupper() else 0))
    return tuple(out)


def _is_freely_reduced(word: tuple[int, ...]) -> bool:
    if not word:
        return False
    for a, b in zip(word, word[1:]):
        if a ^ 1 == b:
            return False
    return len(word) == 1 or word[0] ^ 1 != word[-1]


@dataclass(frozen=True)
class Presentation:
    """Finite group presentation with single-letter generators.

    Relators are words where an upper-case letter denotes the inverse
    generator; they must be freely (and cyclically) reduced.
    """

    generators: tuple[str, ...]
    relators: tuple[str, ...]

    def __post_init__(self):
        idx = {g: i for i, g in enumerate(self.generators)}
        if len(idx) != len(self.generators):
            raise ComplexError("duplicate generators")
        for rel in self.relators:
            w = _parse_word(rel, idx)
            if not _is_freely_reduced(w):
                raise ComplexError(f"relator {rel!r} is not freely reduced")

    def gen_index(self) -> dict[str, int]:
        return {g: i for i, g in enumerate(self.generators)}

    def relator_words(self) -> list[tuple[int, ...]]:
        idx = self.gen_index()
        return [_parse_word(rel, idx) for rel in self.relators]


def bs_presentation(p: int, q: int) -> Presentation:
    return Presentation(("a", "b"), ("b" + "a" * p + "B" + "A" * q,))


class _CayleyEnumerator:
    """Bounded breadth-first enumeration with relator closure.

    Vertices are group elements discovered by expanding generator edges out
    to the requested radius; tracing relators deduces missing edges and merges
    vertices forced to coincide (a small HLT-style coset enumeration over the
    trivial subgroup).
    """

    def __init__(self, pres: Presentation, radius: int, budget: int = 60_000):
        self.pres = pres
        self.radius = radius
        self.budget = budget
        self.m = len(pres.generators)
        self.relators = pres.relator_words()
        self.nbr: list[dict[int, int]] = [dict()]  # vertex -> {dart: vertex}
        self.rep: list[int] = [0]
        self.truncated = False

    # union-find over vertices with edge-table merging

    def find(self, v: int) -> int:
        root = v
        while self.rep[root] != root:
            root = self.rep[root]
        while self.rep[v] != root:
            self.rep[v], v = root, self.rep[v]
        return root

    def _merge(self, a: int, b: int) -> None:
        queue = [(a, b)]
        while queue:
            x, y = queue.pop()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            if y < x:
                x, y = y, x
            self.rep[y] = x
            for dart, tgt in list(self.nbr[y].items()):
                tgt = self.find(tgt)
                cur = self.nbr[x].get(dart)
                if cur is None:
                    self._set_edge(x, dart, tgt)
                else:
                    queue.append((self.find(cur), tgt))
            self.nbr[y] = {}

    def _set_edge(self, v: int, dart: int, w: int) -> None:
        v, w = self.find(v), self.find(w)
        cur = self.nbr[v].get(dart)
        if cur is not None:
            if self.find(cur) != w:
                self._merge(cur, w)
            return
        self.nbr[v][dart] = w
        back = dart ^ 1
        cur = self.nbr[w].get(back)
        if cur is None:
            self.nbr[w][back] = v
        elif self.find(cur) != v:
            self._merge(cur, v)

    def _new_vertex(self) -> int:
        vid = len(self.nbr)
        self.nbr.append({})
        self.rep.append(vid)
        return vid

    def _distances(self) -> dict[int, int]:
        from collections import deque

        root = self.find(0)
        dist = {root: 0}
        dq = deque([root])
        while dq:
            v = dq.popleft()
            for w in self.nbr[v].values():
                w = self.find(w)
                if w not in dist:
                    dist[w] = dist[v] + 1
                    dq.append(w)
        return dist

    def _close_relators(self) -> bool:
        """One deduction/coincidence pass; True if anything changed."""
        changed = False
        for v in range(len(self.nbr)):
            if self.find(v) != v or not self.nbr[v] and v != 0:
                continue
            for rel in self.relators:
                for word in (rel, tuple(d ^ 1 for d in reversed(rel))):
                    cur = v
                    gap = None
                    ok = True
                    for pos, dart in enumerate(word):
                        nxt = self.nbr[self.find(cur)].get(dart)
                        if nxt is None:
                            if gap is not None:
                                ok = False
                                break
                            gap = (self.find(cur), dart, pos)
                            # walk the remainder backwards from v
                            back = v
                            for bdart in reversed(word[pos + 1 :]):
                                prev = self.nbr[self.find(back)].get(bdart ^ 1)
                                if prev is None:
                                    ok = False
                                    break
                                back = prev
                            if not ok:
                                break
                            self._set_edge(gap[0], gap[1], self.find(back))
                            changed = True
                            cur = back
                            gap = None
                            break
                        cur = nxt
                    else:
                        if self.find(cur) != self.find(v):
                            self._merge(cur, v)
                            changed = True
        return changed

    def run(self) -> None:
        for _ in range(200):
            dist = self._distances()
            grew = False
            for v in sorted(dist):
                if dist[v] >= self.radius:
                    continue
                v = self.find(v)
                for dart in range(2 * self.m):
                    if dart not in self.nbr[v]:
                        if len(self.nbr) >= self.budget:
                            self.truncated = True
                            return
                        w = self._new_vertex()
                        self._set_edge(v, dart, w)
                        grew = True
            while self._close_relators():
                pass
            if not grew:
                return
        self.truncated = True  # pragma: no cover


@dataclass
class CayleyWindow:
    complex: SimplicialComplex
    radius: int
    group_vertices: dict[int, int]  # complex vertex id -> BFS distance
    truncated: bool


def cayley_2complex(
    pres: Presentation, radius: int, budget: int = 60_000
) -> CayleyWindow:
    """Window of the universal cover of the presentation 2-complex.

    The 1-skeleton ball comes from bounded enumeration; each relator loop
    inside the ball is filled by a cell, subdivided simplicially (one midpoint
    per edge, one center per cell).  Presentations where the bounded
    enumeration is exact at this radius (free, abelian, Baumslag-Solitar and
    similar) yield the true ball; otherwise ``truncated`` is set.
    """
    enum = _CayleyEnumerator(pres, radius, budget)
    enum.run()
    dist = enum._distances()
    ball = {v for v, d in dist.items() if d <= radius}

    # undirected edges inside the ball, canonical dart representative
    edges: dict[tuple[int, int, int], tuple[int, int]] = {}
    for v in ball:
        for dart, w in enum.nbr[v].items():
            w = enum.find(w)
            if w not in ball:
                continue
            key = min((v, dart, w), (w, dart ^ 1, v))
            edges[key] = (key[0], key[2])

    has_cells = bool(pres.relators)
    next_id = 0
    vid_of: dict[tuple, int] = {}

    def vid(tag: tuple) -> int:
        nonlocal next_id
        if tag not in vid_of:
            vid_of[tag] = next_id
            next_id += 1
        return vid_of[tag]

    for v in sorted(ball):
        vid(("g", v))

    maximal: list[tuple[int, ...]] = []
    if not has_cells:
        for key in sorted(edges):
            a, b = edges[key]
            maximal.append(tuple(sorted((vid(("g", a)), vid(("g", b))))))
    else:
        for key in sorted(edges):
            vid(("m",) + key)
        # relator loops inside the ball
        loops: set[tuple] = set()
        for v in sorted(ball):
            for ri, rel in enumerate(enum.relators):
                trace = []
                cur = v
                ok = True
                for dart in rel:
                    nxt = enum.nbr[enum.find(cur)].get(dart)
                    if nxt is None or enum.find(nxt) not in ball:
                        ok = False
                        break
                    trace.append((enum.find(cur), dart, enum.find(nxt)))
                    cur = nxt
                if not ok or enum.find(cur) != enum.find(v):
                    continue
                rots = [tuple(trace[i:] + trace[:i]) for i in range(len(trace))]
                loops.add((ri, min(rots)))
        for ri, trace in sorted(loops):
            center = vid(("c", ri, trace))
            for (a, dart, b) in trace:
                key = min((a, dart, b), (b, dart ^ 1, a))
                mid = vid(("m",) + key)
                maximal.append(tuple(sorted((center, vid(("g", a)), mid))))
                maximal.append(tuple(sorted((center, mid, vid(("g", b))))))
        # edges not on any filled loop still need their subdivided halves
        covered: set[tuple] = set()
        for _, trace in loops:
            for (a, dart, b) in trace:
                covered.add(min((a, dart, b), (b, dart ^ 1, a)))
        for key in sorted(edges):
            if key not in covered:
                a, b = edges[key]
                mid = vid(("m",) + key)
                maximal.append(tuple(sorted((vid(("g", a)), mid))))
                maximal.append(tuple(sorted((mid, vid(("g", b))))))

    frontier_vs = {vid(("g", v)) for v in ball if dist[v] >= radius}
    for key in sorted(edges):
        a, b = edges[key]
        if dist[a] >= radius or dist[b] >= radius:
            tag = ("m",) + key
            if tag in vid_of:
                frontier_vs.add(vid_of[tag])

    X = build_complex(sorted(set(maximal)), frontier=frontier_vs)
    gverts = {vid_of[("g", v)]: dist[v] for v in ball}
    return CayleyWindow(X, radius, gverts, enum.truncated)


# ---------------------------------------------------------------------------
# Baumslag-Solitar: Bass-Serre tree window, Sigma, rays, R^3 embedding


@dataclass
class TreeEdge:
    eid: int
    tail: int  # outgoing end: rung spacing q, offset tail_slot
    head: int  # incoming end: rung spacing p, offset head_slot
    tail_slot: int
    head_slot: int


@dataclass
class BassSerreTreeWindow:
    """Window of the Bass-Serre tree of <a,b | b a^p B^q-type> presentations.

    The root carries its full p incoming and q outgoing edges; outgoing
    children expand recursively to the requested depth, incoming stubs stay
    leaves.  ``expanded`` vertices are exactly the interior ones (p incoming
    and q outgoing edges each).
    """

    p: int
    q: int
    depth: int
    n_vertices: int = 0
    edges: list[TreeEdge] = field(default_factory=list)
    depth_of: dict[int, int] = field(default_factory=dict)
    expanded: set[int] = field(default_factory=set)
    rotation: dict[int, list[tuple[int, str]]] = field(default_factory=dict)
    out_edge: dict[tuple[int, int], int] = field(default_factory=dict)

    def vertex_ids(self) -> list[int]:
        return list(range(self.n_vertices))

    def incident(self, v: int) -> list[tuple[int, str]]:
        return self.rotation[v]


def bs_tree_window(p: int, q: int, depth: int) -> BassSerreTreeWindow:
    if p < 1 or q < 1:
        raise ComplexError("p, q must be positive")
    T = BassSerreTreeWindow(p=p, q=q, depth=depth)

    def new_vertex(d: int) -> int:
        v = T.n_vertices
        T.n_vertices += 1
        T.depth_of[v] = d
        T.rotation[v] = []
        return v

    root = new_vertex(0)
    queue = [(root, None)]  # (vertex, slot of the incoming-from-parent edge)
    while queue:
        v, parent_edge = queue.pop(0)
        d = T.depth_of[v]
        if d >= depth:
            continue
        T.expanded.add(v)
        used_in = 1 if parent_edge == "head" else 0
        used_out = 1 if parent_edge == "tail" else 0
        # incoming stubs: this vertex is the head
        for slot in range(used_in, T.p):
            w = new_vertex(d + 1)
            e = TreeEdge(len(T.edges), tail=w, head=v, tail_slot=0, head_slot=slot)
            T.edges.append(e)
            T.rotation[v].append((e.eid, "head"))
            T.rotation[w].append((e.eid, "tail"))
        # outgoing children: this vertex is the tail
        for slot in range(used_out, T.q):
            w = new_vertex(d + 1)
            e = TreeEdge(len(T.edges), tail=v, head=w, tail_slot=slot, head_slot=0)
            T.edges.append(e)
            T.rotation[v].append((e.eid, "tail"))
            T.rotation[w].append((e.eid, "head"))
            T.out_edge[(v, slot)] = e.eid
            queue.append((w, "head"))
    return T


@dataclass
class SigmaComplex:
    """Window of the total space fibred over the Bass-Serre tree window."""

    complex: SimplicialComplex
    tree: BassSerreTreeWindow
    fiber_extent: int
    pi: dict[int, int]  # Sigma vertex -> tree vertex
    fiber_vertex: dict[tuple[int, int], int]  # (tree vertex, height) -> id
    strip_simplices: dict[int, list[Simplex]]  # tree edge -> its triangles
    fiber_edges: dict[int, list[Simplex]]  # tree vertex -> fiber edges


def _staircase(q_side: list[int], p_side: list[int]) -> list[tuple[int, int, int]]:
    """Monotone triangulation between two fiber paths, no same-side chords."""
    tris = []
    i = j = 0
    nq, np_ = len(q_side) - 1, len(p_side) - 1
    while i < nq or j < np_:
        if j == np_ or (i < nq and (i + 1) * np_ <= (j + 1) * nq):
            tris.append((q_side[i], q_side[i + 1], p_side[j]))
            i += 1
        else:
            tris.append((q_side[i], p_side[j], p_side[j + 1]))
            j += 1
    return tris


def bs_sigma(p: int, q: int, tree_depth: int, fiber_extent: int) -> SigmaComplex:
    """Strips over the tree window, glued along integer fibers.

    Over an edge the rungs join height ``tail_slot + k*q`` on the tail fiber
    to ``head_slot + k*p`` on the head fiber; the cell between consecutive
    rungs is triangulated by a monotone staircase so fibers stay unit lines.
    """
    T = bs_tree_window(p, q, tree_depth)
    E = fiber_extent
    fiber_vertex: dict[tuple[int, int], int] = {}
    nid = 0
    for v in T.vertex_ids():
        for m in range(-E, E + 1):
            fiber_vertex[(v, m)] = nid
            nid += 1

    maximal: list[Simplex] = []
    fiber_edges: dict[int, list[Simplex]] = {}
    for v in T.vertex_ids():
        fe = []
        for m in range(-E, E):
            fe.append(
                tuple(sorted((fiber_vertex[(v, m)], fiber_vertex[(v, m + 1)])))
            )
        fiber_edges[v] = fe
        maximal.extend(fe)

    def clamped(lo: int, hi: int) -> list[int]:
        lo2, hi2 = max(lo, -E), min(hi, E)
        if lo2 > hi2:
            return [-E] if hi < -E else [E]
        return list(range(lo2, hi2 + 1))

    strip_simplices: dict[int, list[Simplex]] = {}
    for e in T.edges:
        tris: list[Simplex] = []
        for kk in range(-(2 * E) - 2, 2 * E + 2):
            t_lo, t_hi = e.tail_slot + kk * q, e.tail_slot + (kk + 1) * q
            h_lo, h_hi = e.head_slot + kk * p, e.head_slot + (kk + 1) * p
            if max(t_lo, h_lo) > E or min(t_hi, h_hi) < -E:
                continue
            # cells crossing the fiber window are squashed onto its edge so
            # the strip covers every in-range fiber edge on both sides
            q_side = [("t", m) for m in clamped(t_lo, t_hi)]
            p_side = [("h", m) for m in clamped(h_lo, h_hi)]
            if len(q_side) + len(p_side) < 3:
                continue
            for tri in _staircase(q_side, p_side):
                ids = tuple(
                    sorted(
                        fiber_vertex[(e.tail if side == "t" else e.head, m)]
                        for (side, m) in tri
                    )
                )
                tris.append(ids)
        strip_simplices[e.eid] = sorted(set(tris))
        maximal.extend(strip_simplices[e.eid])

    # the staircase is ragged within max(p, q) of the fiber ends; that whole
    # band belongs to the truncation frontier
    margin = max(p, q)
    frontier_vs = set()
    for (v, m), vid_ in fiber_vertex.items():
        if abs(m) > E - margin or v not in T.expanded:
            frontier_vs.add(vid_)

    X = build_complex(sorted(set(maximal)), frontier=frontier_vs)
    pi = {vid_: v for (v, m), vid_ in fiber_vertex.items()}
    return SigmaComplex(
        complex=X,
        tree=T,
        fiber_extent=E,
        pi=pi,
        fiber_vertex=fiber_vertex,
        strip_simplices=strip_simplices,
        fiber_edges=fiber_edges,
    )


@dataclass
class RaysComplex:
    subcomplex: Subcomplex  # inside Sigma
    sheets: list[Subcomplex]
    ray_vertices: list[list[int]]  # tree vertices along each ray
    window: SimplicialComplex | None = None  # standalone metric-ball window
    window_radius: int = 0


def bs_rays_Y(sigma: SigmaComplex, rays: Sequence[Sequence[int]]) -> RaysComplex:
    """Union of strip preimages over descending rays from the root.

    Rays are sequences of outgoing-slot indices; they must be pairwise
    distinct inside the tree window.  Besides the subcomplex of Sigma, a
    standalone copy is returned whose frontier is a metric sphere about the
    base fiber point: the strips gear heights by p/q per step, so a
    constant-height frontier would misrepresent the ends, while a metric ball
    is faithful for every p, q.
    """
    T = sigma.tree
    paths: list[list[int]] = []
    edge_lists: list[list[int]] = []
    for ray in rays:
        v = 0
        path = [0]
        eids = []
        for slot in ray:
            eid = T.out_edge.get((v, slot))
            if eid is None:
                raise ComplexError(f"ray slot {slot} missing at vertex {v}")
            e = T.edges[eid]
            eids.append(eid)
            v = e.head
            path.append(v)
        paths.append(path)
        edge_lists.append(eids)
    seen = set()
    for path in paths:
        key = tuple(path)
        if key in seen:
            raise ComplexError("rays coincide within the window depth")
        seen.add(key)

    X = sigma.complex
    sheets = []
    for path, eids in zip(paths, edge_lists):
        simplices: list[Simplex] = []
        for v in path:
            simplices.extend(sigma.fiber_edges[v])
        for eid in eids:
            simplices.extend(sigma.strip_simplices[eid])
        sheets.append(Subcomplex.from_simplices(X, simplices))
    union = sheets[0]
    for sh in sheets[1:]:
        union = union.union(sh)

    # standalone window with a metric-sphere frontier
    from .simplicial import vertex_distances

    E = sigma.fiber_extent
    margin = max(sigma.tree.p, sigma.tree.q)
    height_of = {v: m for (tv, m), v in sigma.fiber_vertex.items()}
    ray_ends = {path[-1] for path in paths}
    artifacts = set()
    for v in union.vertex_set():
        tv = sigma.pi[v]
        if abs(height_of[v]) > E - margin or tv in ray_ends or tv not in sigma.tree.expanded:
            artifacts.add(v)
    base = sigma.fiber_vertex[(0, 0)]
    dist = vertex_distances(X, [base], within=union)
    reachable_artifacts = [dist[a] for a in artifacts if a in dist]
    rho = min(reachable_artifacts) if reachable_artifacts else 1
    if rho < 2:
        raise ComplexError("ray window too small: artifacts within distance 1 of base")
    frontier_vs = {v for v in union.vertex_set() if dist.get(v, 10**9) >= rho}
    all_simplices: list[Simplex] = []
    for level in union.levels:
        all_simplices.extend(sorted(level))
    window = build_complex(all_simplices, frontier=frontier_vs)
    return RaysComplex(
        subcomplex=union,
        sheets=sheets,
        ray_vertices=paths,
        window=window,
        window_radius=rho,
    )


@dataclass
class EmbeddedSigma:
    """Sigma thickened into a 3-complex window via half-slabs over edge sides."""

    complex: SimplicialComplex
    sigma: SigmaComplex
    slab_depth: int
    corner_of_wall: dict[int, tuple[int, int]]  # wall vertex -> (corner id, s)


def embed_sigma_r3(sigma: SigmaComplex, slab_depth: int) -> EmbeddedSigma:
    """Glue a half-slab strip x [0, S] onto each side of every edge strip.

    The planar structure is the rotation system of the tree window (trees are
    planar for any rotation system).  Adjacent edge sides at a vertex share
    the wall over that corner, so each corner wall is glued into exactly two
    slabs; the result is a PL 3-manifold window containing Sigma.
    """
    T = sigma.tree
    S = slab_depth
    E = sigma.fiber_extent
    X_sigma = sigma.complex

    # corners: angular sectors (vertex, i) between consecutive darts; a
    # degree-1 vertex gets two distinct corners so the slab ends in a free
    # boundary wall instead of folding onto itself
    corner_id: dict[tuple[int, int], int] = {}
    for v in T.vertex_ids():
        deg = max(2, len(T.rotation[v]))
        for i in range(deg):
            corner_id[(v, i)] = len(corner_id)

    def corner_after(v: int, eid: int) -> int:
        rot = T.rotation[v]
        pos = next(i for i, (e, _) in enumerate(rot) if e == eid)
        return corner_id[(v, pos)]

    def corner_before(v: int, eid: int) -> int:
        rot = T.rotation[v]
        if len(rot) == 1:
            return corner_id[(v, 1)]
        pos = next(i for i, (e, _) in enumerate(rot) if e == eid)
        return corner_id[(v, (pos - 1) % len(rot))]

    # wall vertices: (corner, height m, level s>=1); level 0 is the fiber
    next_id = len(X_sigma.vertices)
    wall_vertex: dict[tuple[int, int, int], int] = {}

    def wall(c: int, m: int, s: int, base_vertex: int) -> int:
        nonlocal next_id
        if s == 0:
            return base_vertex
        key = (c, m, s)
        if key not in wall_vertex:
            wall_vertex[key] = next_id
            next_id += 1
        return wall_vertex[key]

    height_of: dict[int, int] = {}
    for (v, m), vid_ in sigma.fiber_vertex.items():
        height_of[vid_] = m

    maximal: list[Simplex] = list(X_sigma.maximal_simplices)
    for e in T.edges:
        tail_fiber = {sigma.fiber_vertex[(e.tail, m)] for m in range(-E, E + 1)}
        for side in ("L", "R"):
            if side == "L":
                c_tail = corner_after(e.tail, e.eid)
                c_head = corner_before(e.head, e.eid)
            else:
                c_tail = corner_before(e.tail, e.eid)
                c_head = corner_after(e.head, e.eid)

            def lift(x: int, s: int) -> int:
                c = c_tail if x in tail_fiber else c_head
                return wall(c, height_of[x], s, x)

            for tri in sigma.strip_simplices[e.eid]:
                v0, v1, v2 = tri  # sorted Sigma ids
                for s in range(S):
                    a0, a1, a2 = (lift(v0, s), lift(v1, s), lift(v2, s))
                    b0, b1, b2 = (
                        lift(v0, s + 1),
                        lift(v1, s + 1),
                        lift(v2, s + 1),
                    )
                    maximal.append(tuple(sorted((a0, a1, a2, b2))))
                    maximal.append(tuple(sorted((a0, a1, b1, b2))))
                    maximal.append(tuple(sorted((a0, b0, b1, b2))))

    frontier_vs = set(X_sigma.frontier_vertices)
    leafish = {v for v in T.vertex_ids() if v not in T.expanded}
    margin = max(T.p, T.q)
    for (c, m, s), vid_ in wall_vertex.items():
        if s == S or abs(m) > E - margin:
            frontier_vs.add(vid_)
    # walls over leaf corners are frontier at every level
    leaf_corners = {
        corner_id[(v, i)] for v in leafish for i in range(max(2, len(T.rotation[v])))
    }
    for (c, m, s), vid_ in wall_vertex.items():
        if c in leaf_corners:
            frontier_vs.add(vid_)

    X = build_complex(sorted(set(maximal)), frontier=frontier_vs)
    corner_of_wall = {vid_: (c, s) for (c, m, s), vid_ in wall_vertex.items()}
    return EmbeddedSigma(
        complex=X, sigma=sigma, slab_depth=S, corner_of_wall=corner_of_wall
    )


def sheet_subcomplexes_in_embedding(
    emb: EmbeddedSigma, rays: RaysComplex
) -> list[Subcomplex]:
    """The ray sheets viewed inside the embedded 3-complex."""
    X = emb.complex
    out = []
    for sheet in rays.sheets:
        simplices = []
        for level in sheet.levels:
            simplices.extend(level)
        out.append(Subcomplex.from_simplices(X, simplices))
    return out
