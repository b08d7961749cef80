"""Finite windows of metric simplicial complexes and their combinatorial geometry.

A complex is immutable once built.  Vertices are integer ids, simplices are
strictly sorted vertex tuples stored per dimension, and a subset of vertices
may be marked as *frontier* vertices: they lie on the boundary of the finite
window that truncates an unbounded space.  Every operation that is only
meaningful on the unbounded space reports how far its result stays from the
frontier, so truncation effects stay auditable.

Conventions fixed here:

* the 1-skeleton carries the unit-edge path metric;
* ``N_r(K)`` is the r-fold iterated closed star of ``K`` (``N_0(K) = K``);
* the frontier of a subcomplex ``K`` consists of the simplices of ``K`` that
  are faces of at least one simplex outside ``K``;
* connectivity of a subcomplex is vertex-sharing connectivity.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

Simplex = tuple[int, ...]

INF = -1  # sentinel for "unreachable" in BFS distance tables


class ComplexError(ValueError):
    """A complex, subcomplex or operation input violates its contract."""


def _faces(simplex: Simplex) -> Iterator[Simplex]:
    """All nonempty faces of a sorted simplex, the simplex itself included."""
    for d in range(1, len(simplex) + 1):
        yield from combinations(simplex, d)


class SimplicialComplex:
    """A finite abstract simplicial complex closed under taking faces.

    ``simplices[k]`` lists the k-simplices as sorted vertex tuples in
    lexicographic order.  ``coords`` optionally maps vertex ids to integer
    coordinate tuples in a model space (grid generators fill this in; the
    local-solver caches key on it).
    """

    def __init__(
        self,
        simplices_by_dim: Sequence[Sequence[Simplex]],
        frontier_vertices: Iterable[int] = (),
        coords: Mapping[int, tuple[int, ...]] | None = None,
    ):
        self.simplices: list[list[Simplex]] = [
            sorted(level) for level in simplices_by_dim
        ]
        while self.simplices and not self.simplices[-1]:
            self.simplices.pop()
        self.dim = len(self.simplices) - 1
        self.index: list[dict[Simplex, int]] = [
            {s: i for i, s in enumerate(level)} for level in self.simplices
        ]
        self.vertices: list[int] = [s[0] for s in self.simplices[0]] if self.simplices else []
        self.frontier_vertices: frozenset[int] = frozenset(frontier_vertices)
        self.coords = dict(coords) if coords else None
        self._check()
        # lazy caches
        self._adj: dict[int, list[int]] | None = None
        self._maximal: list[Simplex] | None = None
        self._collar: tuple[frozenset[Simplex], ...] | None = None
        self._coface_index: dict[int, dict[Simplex, list[Simplex]]] = {}
        self.cache: dict = {}

    def _check(self) -> None:
        vset = set(self.vertices)
        for k, level in enumerate(self.simplices):
            seen = set()
            for s in level:
                if len(s) != k + 1 or list(s) != sorted(set(s)):
                    raise ComplexError(f"simplex {s} is not a strictly sorted {k}-tuple")
                if s in seen:
                    raise ComplexError(f"duplicate simplex {s}")
                seen.add(s)
                if k > 0:
                    for f in combinations(s, k):
                        if f not in self.index[k - 1]:
                            raise ComplexError(f"face {f} of {s} missing: not closed under faces")
                    if any(v not in vset for v in s):
                        raise ComplexError(f"simplex {s} uses unknown vertex")
        bad = self.frontier_vertices - vset
        if bad:
            raise ComplexError(f"frontier vertices {sorted(bad)} are not vertices of the complex")

    # -- basic queries ---------------------------------------------------

    def n_simplices(self, k: int) -> int:
        if 0 <= k <= self.dim:
            return len(self.simplices[k])
        return 0

    def has(self, s: Simplex) -> bool:
        k = len(s) - 1
        return 0 <= k <= self.dim and s in self.index[k]

    def total_simplices(self) -> int:
        return sum(len(level) for level in self.simplices)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(level) for k, level in enumerate(self.simplices))

    @property
    def adjacency(self) -> dict[int, list[int]]:
        """1-skeleton adjacency lists, sorted for determinism."""
        if self._adj is None:
            adj: dict[int, set[int]] = {v: set() for v in self.vertices}
            if self.dim >= 1:
                for a, b in self.simplices[1]:
                    adj[a].add(b)
                    adj[b].add(a)
            self._adj = {v: sorted(nb) for v, nb in adj.items()}
        return self._adj

    @property
    def maximal_simplices(self) -> list[Simplex]:
        """Simplices that are not proper faces of any other simplex."""
        if self._maximal is None:
            non_maximal: set[Simplex] = set()
            for k in range(1, self.dim + 1):
                for s in self.simplices[k]:
                    for f in combinations(s, k):
                        non_maximal.add(f)
            out: list[Simplex] = []
            for level in self.simplices:
                out.extend(s for s in level if s not in non_maximal)
            self._maximal = out
        return self._maximal

    def cofaces(self, k: int) -> dict[Simplex, list[Simplex]]:
        """Map from each k-simplex to the (k+1)-simplices containing it."""
        if k not in self._coface_index:
            table: dict[Simplex, list[Simplex]] = {s: [] for s in self.simplices[k]}
            if k + 1 <= self.dim:
                for s in self.simplices[k + 1]:
                    for f in combinations(s, k + 1):
                        table[f].append(s)
            self._coface_index[k] = table
        return self._coface_index[k]

    @property
    def frontier_collar(self) -> tuple[frozenset[Simplex], ...]:
        """Width-1 collar of the window frontier: the closed star of the
        frontier vertex set.  Empty when no vertices are marked."""
        if self._collar is None:
            if not self.frontier_vertices:
                self._collar = tuple(frozenset() for _ in range(self.dim + 1))
            else:
                fv = self.frontier_vertices
                levels: list[set[Simplex]] = [set() for _ in range(self.dim + 1)]
                for k in range(self.dim, -1, -1):
                    for s in self.simplices[k]:
                        if any(v in fv for v in s):
                            for f in _faces(s):
                                levels[len(f) - 1].add(f)
                self._collar = tuple(frozenset(lv) for lv in levels)
        return self._collar

    def in_collar(self, s: Simplex) -> bool:
        collar = self.frontier_collar
        k = len(s) - 1
        return k <= self.dim and s in collar[k]

    def __repr__(self) -> str:  # pragma: no cover
        counts = ",".join(str(len(lv)) for lv in self.simplices)
        return f"SimplicialComplex(dim={self.dim}, counts=[{counts}])"


class Subcomplex:
    """A face-closed subset of a parent complex."""

    def __init__(self, parent: SimplicialComplex, levels: Sequence[Iterable[Simplex]]):
        self.parent = parent
        lv = [frozenset(level) for level in levels]
        while len(lv) <= parent.dim:
            lv.append(frozenset())
        self.levels: tuple[frozenset[Simplex], ...] = tuple(lv[: parent.dim + 1])
        self._key: int | None = None
        self._validate()

    def _validate(self) -> None:
        for k, level in enumerate(self.levels):
            for s in level:
                if k > self.parent.dim or s not in self.parent.index[k]:
                    raise ComplexError(f"simplex {s} not in parent complex")
                if k > 0:
                    for f in combinations(s, k):
                        if f not in self.levels[k - 1]:
                            raise ComplexError(f"subcomplex not closed under faces at {s}")

    @classmethod
    def from_simplices(cls, parent: SimplicialComplex, simplices: Iterable[Simplex]) -> "Subcomplex":
        """Closure of the given simplices inside ``parent``."""
        levels: list[set[Simplex]] = [set() for _ in range(parent.dim + 1)]
        for s in simplices:
            for f in _faces(s):
                levels[len(f) - 1].add(f)
        return cls(parent, levels)

    @classmethod
    def full(cls, parent: SimplicialComplex) -> "Subcomplex":
        return cls(parent, [list(level) for level in parent.simplices])

    @classmethod
    def induced(cls, parent: SimplicialComplex, vertex_set: Iterable[int]) -> "Subcomplex":
        """Full subcomplex on a vertex set (all simplices with vertices inside)."""
        vs = set(vertex_set)
        levels = [
            [s for s in level if all(v in vs for v in s)] for level in parent.simplices
        ]
        return cls(parent, levels)

    @property
    def dim(self) -> int:
        for k in range(len(self.levels) - 1, -1, -1):
            if self.levels[k]:
                return k
        return -1

    @property
    def key(self) -> int:
        """Content hash; used to key caches of derived computations."""
        if self._key is None:
            self._key = hash(tuple(tuple(sorted(level)) for level in self.levels))
        return self._key

    def simplices_sorted(self, k: int) -> list[Simplex]:
        if 0 <= k < len(self.levels):
            return sorted(self.levels[k])
        return []

    def n_simplices(self, k: int) -> int:
        return len(self.levels[k]) if 0 <= k < len(self.levels) else 0

    def total_simplices(self) -> int:
        return sum(len(level) for level in self.levels)

    def contains(self, s: Simplex) -> bool:
        k = len(s) - 1
        return 0 <= k < len(self.levels) and s in self.levels[k]

    def vertex_set(self) -> set[int]:
        return {s[0] for s in self.levels[0]}

    def is_empty(self) -> bool:
        return not self.levels[0]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(level) for k, level in enumerate(self.levels))

    def touches_frontier(self) -> bool:
        fv = self.parent.frontier_vertices
        return any(s[0] in fv for s in self.levels[0])

    def union(self, other: "Subcomplex") -> "Subcomplex":
        if other.parent is not self.parent:
            raise ComplexError("subcomplexes of different parents")
        return Subcomplex(
            self.parent, [a | b for a, b in zip(self.levels, other.levels)]
        )

    def intersection(self, other: "Subcomplex") -> "Subcomplex":
        if other.parent is not self.parent:
            raise ComplexError("subcomplexes of different parents")
        return Subcomplex(
            self.parent, [a & b for a, b in zip(self.levels, other.levels)]
        )

    def issubset(self, other: "Subcomplex") -> bool:
        return all(a <= b for a, b in zip(self.levels, other.levels))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Subcomplex)
            and other.parent is self.parent
            and other.levels == self.levels
        )

    def __hash__(self) -> int:
        return self.key

    def __repr__(self) -> str:  # pragma: no cover
        counts = ",".join(str(len(lv)) for lv in self.levels)
        return f"Subcomplex(counts=[{counts}])"


@dataclass(frozen=True)
class GeometryStats:
    """Link-size summary certifying bounded geometry of a window."""

    max_link_simplices: int
    dim: int
    vertex_count: int


# ---------------------------------------------------------------------------
# construction


def build_complex(
    maximal_simplices: Iterable[Sequence[int]],
    frontier: Iterable[int] = (),
    coords: Mapping[int, tuple[int, ...]] | None = None,
) -> SimplicialComplex:
    """Close the given simplices under faces and return the complex.

    Rejects duplicate maximal simplices and frontier vertices that do not
    occur in any simplex.
    """
    seen: set[Simplex] = set()
    levels: list[set[Simplex]] = []
    for raw in maximal_simplices:
        if len(set(raw)) != len(raw):
            raise ComplexError(f"simplex {tuple(raw)} has repeated vertices")
        s = tuple(sorted(raw))
        if s in seen:
            raise ComplexError(f"duplicate maximal simplex {s}")
        seen.add(s)
        while len(levels) < len(s):
            levels.append(set())
        for f in _faces(s):
            levels[len(f) - 1].add(f)
    return SimplicialComplex(
        [sorted(level) for level in levels], frontier_vertices=frontier, coords=coords
    )


# ---------------------------------------------------------------------------
# distances


def vertex_distances(
    X: SimplicialComplex,
    sources: Iterable[int],
    within: Subcomplex | None = None,
) -> dict[int, int]:
    """BFS distances in the 1-skeleton from a set of source vertices.

    When ``within`` is given, both the sources and the walk are restricted to
    that subcomplex.  Unreachable vertices are absent from the result.
    """
    if within is None:
        adj = X.adjacency
        allowed = None
    else:
        adj = {}
        allowed = within.vertex_set()
        for a, b in within.simplices_sorted(1):
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
    dist: dict[int, int] = {}
    queue: deque[int] = deque()
    for v in sorted(set(sources)):
        if allowed is not None and v not in allowed:
            continue
        dist[v] = 0
        queue.append(v)
    while queue:
        v = queue.popleft()
        for w in adj.get(v, ()):  # type: ignore[union-attr]
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def edge_distance(X: SimplicialComplex, v: int, w: int) -> int:
    """Shortest edge-path length between two vertices; INF across components."""
    if (v,) not in X.index[0] or (w,) not in X.index[0]:
        raise ComplexError("both vertices must belong to the complex")
    if v == w:
        return 0
    adj = X.adjacency
    dist = {v: 0}
    queue = deque([v])
    while queue:
        a = queue.popleft()
        for b in adj[a]:
            if b not in dist:
                dist[b] = dist[a] + 1
                if b == w:
                    return dist[b]
                queue.append(b)
    return INF


def simplex_distance(X: SimplicialComplex, s: Simplex, t: Simplex) -> int:
    """Min vertex-to-vertex distance between two simplices."""
    dist = vertex_distances(X, s)
    best = None
    for v in t:
        d = dist.get(v)
        if d is not None and (best is None or d < best):
            best = d
    return INF if best is None else best


# ---------------------------------------------------------------------------
# neighborhoods, complements, frontiers


class _RadialIndex:
    """Per-(complex, K) tables from which N_r, Y_R and annuli are read off.

    ``vdist`` holds 1-skeleton distances from K's vertex set.  For a maximal
    simplex ``c`` let ``dmin(c)`` be the least vertex distance; then for
    ``r >= 1`` a simplex lies in N_r(K) iff it is in K or has a maximal
    coface with ``dmin <= r - 1``, and lies in Y_R = closure(X - N_R(K)) iff
    it has a maximal coface with ``dmin >= R`` (or, for R = 0, one outside K).
    """

    def __init__(self, X: SimplicialComplex, K: Subcomplex):
        self.X = X
        self.K = K
        self.vdist = vertex_distances(X, K.vertex_set())
        self.max_fdist = self._frontier_slack()

    def _frontier_slack(self) -> int | None:
        """Radius budget before truncation effects dominate.

        For K interior to the window this is the distance from K to the
        frontier.  For K that itself touches the frontier (the truncation of
        an unbounded subcomplex) it is the depth of the window transverse to
        K: the largest distance from a frontier vertex to K.
        """
        if not self.X.frontier_vertices:
            return None
        dists = [self.vdist[v] for v in self.X.frontier_vertices if v in self.vdist]
        if not dists:
            return None
        if self.K.touches_frontier():
            return max(dists)
        return min(dists)

    def _dmin(self, c: Simplex) -> int:
        vd = self.vdist
        best = None
        for v in c:
            d = vd.get(v)
            if d is not None and (best is None or d < best):
                best = d
        return INF if best is None else best

    def neighborhood(self, r: int) -> Subcomplex:
        if r < 0:
            raise ComplexError("radius must be nonnegative")
        if r == 0:
            return self.K
        levels: list[set[Simplex]] = [set() for _ in range(self.X.dim + 1)]
        for k, lv in enumerate(self.K.levels):
            levels[k] |= lv
        for c in self.X.maximal_simplices:
            d = self._dmin(c)
            if d != INF and d <= r - 1:
                for f in _faces(c):
                    levels[len(f) - 1].add(f)
        return Subcomplex(self.X, levels)

    def complement_closure(self, R: int) -> Subcomplex:
        levels: list[set[Simplex]] = [set() for _ in range(self.X.dim + 1)]
        for c in self.X.maximal_simplices:
            if R == 0:
                outside = not self.K.contains(c)
            else:
                d = self._dmin(c)
                outside = d == INF or d >= R
            if outside:
                for f in _faces(c):
                    levels[len(f) - 1].add(f)
        return Subcomplex(self.X, levels)

    def annulus(self, r: int, R: int) -> Subcomplex:
        if not (0 <= r < R):
            raise ComplexError("annulus needs 0 <= r < R")
        levels: list[set[Simplex]] = [set() for _ in range(self.X.dim + 1)]
        for c in self.X.maximal_simplices:
            d = self._dmin(c)
            in_NR = d != INF and d <= R - 1 or self.K.contains(c)
            if r == 0:
                in_Nr = self.K.contains(c)
            else:
                in_Nr = d != INF and d <= r - 1 or self.K.contains(c)
            if in_NR and not in_Nr:
                for f in _faces(c):
                    levels[len(f) - 1].add(f)
        return Subcomplex(self.X, levels)


def radial_index(X: SimplicialComplex, K: Subcomplex) -> _RadialIndex:
    cache = X.cache.setdefault("radial", {})
    idx = cache.get(K.key)
    if idx is None:
        idx = _RadialIndex(X, K)
        cache[K.key] = idx
    return idx


def neighborhood(K: Subcomplex, r: int) -> Subcomplex:
    """r-fold iterated closed star N_r(K); N_0(K) is K itself."""
    if K.is_empty():
        raise ComplexError("neighborhood of an empty subcomplex")
    return radial_index(K.parent, K).neighborhood(r)


def complement_closure(K: Subcomplex, R: int) -> Subcomplex:
    """Y_R: smallest subcomplex containing every simplex outside N_R(K)."""
    return radial_index(K.parent, K).complement_closure(R)


def annulus(K: Subcomplex, r: int, R: int) -> Subcomplex:
    """Closure of N_R(K) - N_r(K)."""
    return radial_index(K.parent, K).annulus(r, R)


def frontier(K: Subcomplex) -> Subcomplex:
    """Simplices of K that are faces of at least one simplex outside K."""
    X = K.parent
    levels: list[set[Simplex]] = [set() for _ in range(X.dim + 1)]
    for k in range(X.dim + 1):
        for s in X.simplices[k]:
            if not K.contains(s):
                for f in _faces(s):
                    if K.contains(f):
                        levels[len(f) - 1].add(f)
    return Subcomplex(X, levels)


def valid_radius(K: Subcomplex) -> int | None:
    """Radius budget of K inside its window; None when there is no frontier.

    Radii beyond this are dominated by truncation effects and results there
    carry no meaning for the unbounded space the window approximates.
    """
    return radial_index(K.parent, K).max_fdist


# ---------------------------------------------------------------------------
# components


def components(S: Subcomplex) -> list[Subcomplex]:
    """Vertex-sharing connected components, ordered by least vertex id."""
    parent_of: dict[int, int] = {}

    def find(a: int) -> int:
        root = a
        while parent_of[root] != root:
            root = parent_of[root]
        while parent_of[a] != root:
            parent_of[a], a = root, parent_of[a]
        return root

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            parent_of[rb] = ra

    for s in S.levels[0]:
        parent_of[s[0]] = s[0]
    for a, b in S.levels[1] if len(S.levels) > 1 else ():
        union(a, b)

    groups: dict[int, set[int]] = {}
    for v in parent_of:
        groups.setdefault(find(v), set()).add(v)

    out = []
    for root in sorted(groups):
        vs = groups[root]
        levels = [
            {s for s in level if s[0] in vs} for level in S.levels
        ]
        out.append(Subcomplex(S.parent, levels))
    return out


def deep_components(S: Subcomplex) -> tuple[list[Subcomplex], list[Subcomplex]]:
    """Split components into (deep, shallow) by window-frontier contact.

    On a finite window, "not contained in any finite neighborhood" is
    undecidable; touching the window frontier is the finite proxy.
    """
    deep, shallow = [], []
    for comp in components(S):
        (deep if comp.touches_frontier() else shallow).append(comp)
    return deep, shallow


# ---------------------------------------------------------------------------
# stats


def geometry_stats(X: SimplicialComplex) -> GeometryStats:
    """Max number of simplices in a vertex link, over all vertices."""
    counts: dict[int, int] = {v: 0 for v in X.vertices}
    for k in range(1, X.dim + 1):
        for s in X.simplices[k]:
            for v in s:
                counts[v] += 1
    max_link = max(counts.values(), default=0)
    return GeometryStats(
        max_link_simplices=max_link, dim=X.dim, vertex_count=len(X.vertices)
    )


# ---------------------------------------------------------------------------
# serialization: {dim, maximal_simplices, frontier} (+ optional coords)


def complex_to_json(X: SimplicialComplex) -> str:
    payload: dict = {
        "dim": X.dim,
        "maximal_simplices": [list(s) for s in sorted(X.maximal_simplices)],
        "frontier": sorted(X.frontier_vertices),
    }
    if X.coords is not None:
        payload["coords"] = {str(v): list(c) for v, c in sorted(X.coords.items())}
    return json.dumps(payload, indent=2, separators=(",", ": ")) + "\n"


def complex_from_json(text: str) -> SimplicialComplex:
    payload = json.loads(text)
    coords = None
    if "coords" in payload:
        coords = {int(v): tuple(c) for v, c in payload["coords"].items()}
    X = build_complex(
        [tuple(s) for s in payload["maximal_simplices"]],
        frontier=payload.get("frontier", ()),
        coords=coords,
    )
    if X.dim != payload["dim"]:
        raise ComplexError(
            f"declared dim {payload['dim']} != computed dim {X.dim}"
        )
    return X


def save_complex(X: SimplicialComplex, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(complex_to_json(X))


def load_complex(path: str) -> SimplicialComplex:
    with open(path) as fh:
        return complex_from_json(fh.read())
