"""Ball-restricted integer solves for boundary and coboundary equations.

Duality chain maps are built degree by degree: every step solves
``boundary(x) = c`` (chains) or ``coboundary(phi) = c`` (window-relative
cochains) with support confined to a combinatorial ball around the generator.
On coordinate grids the local systems repeat up to translation, so each
Smith factorization is computed once per translation class and reused;
without coordinates the cache keys on the exact system content.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .intlinalg import IntegerMatrix, SmithForm, smith_normal_form
from .simplicial import ComplexError, SimplicialComplex, Simplex, Subcomplex

Chain = dict[Simplex, int]


class SolveInfeasible(ComplexError):
    """The ball admits no solution: an acyclicity-profile violation."""


def chain_add(a: Chain, b: Chain, scale: int = 1) -> Chain:
    out = dict(a)
    for s, v in b.items():
        nv = out.get(s, 0) + scale * v
        if nv:
            out[s] = nv
        else:
            out.pop(s, None)
    return out


def chain_support_vertices(c: Chain) -> set[int]:
    out: set[int] = set()
    for s in c:
        out.update(s)
    return out


def boundary_chain(c: Chain) -> Chain:
    out: Chain = {}
    for s, v in c.items():
        if len(s) == 1:
            continue
        for pos in range(len(s)):
            f = s[:pos] + s[pos + 1 :]
            sign = -1 if pos % 2 else 1
            nv = out.get(f, 0) + sign * v
            if nv:
                out[f] = nv
            else:
                out.pop(f, None)
    return out


def augmentation(c: Chain) -> int:
    return sum(v for s, v in c.items() if len(s) == 1)


@dataclass
class _LocalSystem:
    variables: list[Simplex]
    rows: list[Simplex]
    row_index: dict[Simplex, int]
    sf: SmithForm


class BallSolver:
    """Solver bound to one complex (optionally restricted to a subcomplex)."""

    def __init__(self, X: SimplicialComplex, within: Subcomplex | None = None):
        self.X = X
        self.within = within
        self._cache: dict = {}
        self._incidence: dict[int, list[Simplex]] | None = None
        self._radius_cap = 3 * max(1, X.dim) + 4

    # -- geometry ----------------------------------------------------------

    def _maximal_pool(self) -> list[Simplex]:
        if self.within is None:
            return self.X.maximal_simplices
        S = self.within
        covered: set[Simplex] = set()
        for k in range(1, len(S.levels)):
            for s in S.levels[k]:
                for f in combinations(s, k):
                    covered.add(f)
        out: list[Simplex] = []
        for level in S.levels:
            out.extend(s for s in level if s not in covered)
        return sorted(out)

    def _vertex_incidence(self) -> dict[int, list[Simplex]]:
        if self._incidence is None:
            table: dict[int, list[Simplex]] = {}
            for s in self._maximal_pool():
                for v in s:
                    table.setdefault(v, []).append(s)
            self._incidence = table
        return self._incidence

    def _ball_vertices(self, centers: Iterable[int], rho: int) -> set[int]:
        from collections import deque

        allowed = None if self.within is None else self.within.vertex_set()
        adj = self.X.adjacency
        dist = {
            v: 0 for v in sorted(set(centers)) if allowed is None or v in allowed
        }
        dq = deque(sorted(dist))
        while dq:
            v = dq.popleft()
            if dist[v] == rho:
                continue
            for w in adj[v]:
                if allowed is not None:
                    if w not in allowed or not self.within.contains(
                        tuple(sorted((v, w)))
                    ):
                        continue
                if w not in dist:
                    dist[w] = dist[v] + 1
                    dq.append(w)
        return set(dist)

    def _ball_simplices(self, verts: set[int], k: int) -> list[Simplex]:
        if k < 0 or k > self.X.dim:
            return []
        inc = self._vertex_incidence()
        found: set[Simplex] = set()
        for v in sorted(verts):
            for m in inc.get(v, ()):
                if len(m) - 1 == k:
                    if all(u in verts for u in m):
                        found.add(m)
                elif len(m) - 1 > k:
                    for f in combinations(m, k + 1):
                        if v in f and all(u in verts for u in f):
                            found.add(f)
        return sorted(found)

    # -- canonical keys ------------------------------------------------------

    def _canon(self, simplices: list[Simplex], anchor: tuple[int, ...]):
        coords = self.X.coords
        return tuple(
            tuple(tuple(a - b for a, b in zip(coords[v], anchor)) for v in s)
            for s in simplices
        )

    # -- solving -------------------------------------------------------------

    def _solve(
        self,
        op: str,
        var_dim: int,
        rhs: Chain,
        center_vertices: Iterable[int],
        collar_free: bool,
    ) -> Chain:
        rhs = {s: v for s, v in rhs.items() if v}
        centers = sorted(set(center_vertices))
        for rho in range(1, self._radius_cap + 1):
            verts = self._ball_vertices(centers, rho)
            if rhs and not chain_support_vertices(rhs) <= verts:
                continue
            sol = self._try_ball(op, var_dim, rhs, verts, collar_free)
            if sol is not None:
                return sol
        raise SolveInfeasible(
            f"{op} solve infeasible within radius {self._radius_cap} "
            f"around {centers[:4]}"
        )

    def _try_ball(
        self,
        op: str,
        var_dim: int,
        rhs: Chain,
        verts: set[int],
        collar_free: bool,
    ) -> Chain | None:
        X = self.X
        variables = self._ball_simplices(verts, var_dim)
        if collar_free:
            variables = [s for s in variables if not X.in_collar(s)]
        if op == "boundary":
            rows = self._ball_simplices(verts, var_dim - 1) if var_dim > 0 else []
        else:
            rowset: set[Simplex] = set()
            cof = X.cofaces(var_dim)
            for s in variables:
                for t in cof.get(s, ()):
                    if self.within is not None and not self.within.contains(t):
                        continue
                    if not X.in_collar(t):
                        rowset.add(t)
            rows = sorted(rowset)
        if not variables:
            return {} if not rhs else None
        row_index = {s: i for i, s in enumerate(rows)}
        for s in rhs:
            if s not in row_index:
                return None  # rhs sticks out of this ball; grow

        system = self._system_for(op, variables, rows, row_index)
        b = {row_index[s]: v for s, v in rhs.items()}
        x = system.sf.solve(b)
        if x is None:
            return None
        return {variables[i]: v for i, v in x.items() if v}

    def _system_for(
        self,
        op: str,
        variables: list[Simplex],
        rows: list[Simplex],
        row_index: dict[Simplex, int],
    ) -> _LocalSystem:
        if self.X.coords is not None:
            anchor = min(self.X.coords[v] for s in variables for v in s)
            key = (op, self._canon(variables, anchor), self._canon(rows, anchor))
        else:
            key = (op, tuple(variables), tuple(rows))
        cached = self._cache.get(key)
        if cached is not None:
            # rebind the factorization to this ball's simplices
            return _LocalSystem(variables, rows, row_index, cached.sf)
        entries: dict[tuple[int, int], int] = {}
        if op == "boundary":
            for c, s in enumerate(variables):
                for pos in range(len(s)):
                    f = s[:pos] + s[pos + 1 :]
                    r = row_index.get(f)
                    if r is not None:
                        entries[(r, c)] = -1 if pos % 2 else 1
        else:
            var_index = {s: i for i, s in enumerate(variables)}
            for r, t in enumerate(rows):
                for pos in range(len(t)):
                    f = t[:pos] + t[pos + 1 :]
                    c = var_index.get(f)
                    if c is not None:
                        entries[(r, c)] = -1 if pos % 2 else 1
        M = IntegerMatrix(len(rows), len(variables), entries)
        sf = smith_normal_form(M, transforms=("U", "V"))
        system = _LocalSystem(variables, rows, row_index, sf)
        self._cache[key] = system
        return system

    def solve_boundary(self, var_dim: int, rhs: Chain, center: Simplex) -> Chain:
        """x with boundary(x) = rhs, supported near the center simplex."""
        centers = set(center) | chain_support_vertices(rhs)
        return self._solve("boundary", var_dim, rhs, centers, collar_free=False)

    def solve_coboundary(self, var_dim: int, rhs: Chain, center: Simplex) -> Chain:
        """phi with relative coboundary(phi) = rhs, supported near center.

        Variables and equation rows exclude the window-frontier collar: this
        is the compact-supports stand-in on a window, and it keeps the solve
        feasible next to the frontier (half-ball acyclicity).
        """
        centers = set(center) | chain_support_vertices(rhs)
        return self._solve("coboundary", var_dim, rhs, centers, collar_free=True)
