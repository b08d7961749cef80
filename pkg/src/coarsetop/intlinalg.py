"""Exact sparse integer linear algebra: Smith normal form, solves, lattices.

Everything runs over Python integers, so coefficient growth is handled by
arbitrary precision transparently.  Matrices are sparse maps (row, col) ->
nonzero int.  The Smith normal form tracks whichever unimodular transforms
are requested, together with their inverses, so results can be certified by
multiplying back (``U A V = D``, ``U Uinv = I``, ``V Vinv = I``).

Pivoting is deterministic: smallest nonzero magnitude first, ties broken by
(row, col).  Among magnitude-1 ties this is refined by a sparsity (Markowitz)
score before the positional tie-break, which keeps fill-in on boundary
matrices of grid-like complexes tolerable without affecting reproducibility.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping

Vec = dict[int, int]  # sparse integer vector


class LinAlgError(ValueError):
    pass


def vec_add(a: Vec, b: Vec, scale: int = 1) -> Vec:
    """a + scale * b as a fresh sparse vector."""
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + scale * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def vec_scale(a: Vec, s: int) -> Vec:
    if s == 0:
        return {}
    return {k: s * v for k, v in a.items()}


def vec_dot(a: Vec, b: Vec) -> int:
    if len(b) < len(a):
        a, b = b, a
    return sum(v * b.get(k, 0) for k, v in a.items())


class IntegerMatrix:
    """Sparse integer matrix with explicit shape; no zero entries stored."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], int] | None = None):
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], int] = {}
        if entries:
            for (r, c), v in entries.items():
                if v:
                    if not (0 <= r < rows and 0 <= c < cols):
                        raise LinAlgError(f"entry ({r},{c}) outside {rows}x{cols}")
                    self.entries[(r, c)] = v

    @classmethod
    def from_columns(cls, rows: int, cols: Iterable[Vec]) -> "IntegerMatrix":
        cols = list(cols)
        m = cls(rows, len(cols))
        for c, col in enumerate(cols):
            for r, v in col.items():
                if v:
                    m.entries[(r, c)] = v
        return m

    def column(self, c: int) -> Vec:
        return {r: v for (r, cc), v in self.entries.items() if cc == c}

    def columns(self) -> list[Vec]:
        out: list[Vec] = [dict() for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            out[c][r] = v
        return out

    def transpose(self) -> "IntegerMatrix":
        t = IntegerMatrix(self.cols, self.rows)
        t.entries = {(c, r): v for (r, c), v in self.entries.items()}
        return t

    def matvec(self, x: Vec) -> Vec:
        cols = self.columns()
        out: Vec = {}
        for c, s in x.items():
            if s:
                for r, v in cols[c].items():
                    nv = out.get(r, 0) + s * v
                    if nv:
                        out[r] = nv
                    else:
                        out.pop(r, None)
        return out

    def matmul(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise LinAlgError("shape mismatch")
        out = IntegerMatrix(self.rows, other.cols)
        by_row: dict[int, list[tuple[int, int]]] = {}
        for (r, c), v in self.entries.items():
            by_row.setdefault(r, []).append((c, v))
        ocols = other.columns()
        for c2 in range(other.cols):
            col = ocols[c2]
            if not col:
                continue
            for r, items in by_row.items():
                s = sum(v * col.get(c, 0) for c, v in items)
                if s:
                    out.entries[(r, c2)] = s
        return out

    def is_zero(self) -> bool:
        return not self.entries

    def nnz(self) -> int:
        return len(self.entries)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, IntegerMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __repr__(self) -> str:  # pragma: no cover
        return f"IntegerMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


@dataclass
class SmithForm:
    """Diagonalization U A V = D with d_1 | d_2 | ... and unimodular U, V.

    ``pivots`` lists (row, col, d) in diagonal order; transforms are sparse
    (row-major for U, Vinv; column-major for Uinv, V) and present only when
    requested from :func:`smith_normal_form`.
    """

    shape: tuple[int, int]
    pivots: list[tuple[int, int, int]]
    U: dict[int, Vec] | None = None
    Uinv: dict[int, Vec] | None = None
    V: dict[int, Vec] | None = None
    Vinv: dict[int, Vec] | None = None
    _ucols: dict[int, Vec] | None = field(default=None, repr=False)
    _vinv_cols: dict[int, Vec] | None = field(default=None, repr=False)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def diagonal(self) -> list[int]:
        return [d for (_, _, d) in self.pivots]

    @property
    def torsion(self) -> list[int]:
        return [d for d in self.diagonal if d > 1]

    def _u_cols(self) -> dict[int, Vec]:
        if self._ucols is None:
            if self.U is None:
                raise LinAlgError("U transform was not requested")
            cols: dict[int, Vec] = {}
            for r, row in self.U.items():
                for c, v in row.items():
                    cols.setdefault(c, {})[r] = v
            self._ucols = cols
        return self._ucols

    def vinv_cols(self) -> dict[int, Vec]:
        if self._vinv_cols is None:
            if self.Vinv is None:
                raise LinAlgError("Vinv transform was not requested")
            cols: dict[int, Vec] = {}
            for r, row in self.Vinv.items():
                for c, v in row.items():
                    cols.setdefault(c, {})[r] = v
            self._vinv_cols = cols
        return self._vinv_cols

    def apply_u(self, b: Vec) -> Vec:
        ucols = self._u_cols()
        out: Vec = {}
        for c, s in b.items():
            col = ucols.get(c)
            if not col:
                continue
            for r, v in col.items():
                nv = out.get(r, 0) + s * v
                if nv:
                    out[r] = nv
                else:
                    out.pop(r, None)
        return out

    def apply_vinv(self, z: Vec) -> Vec:
        vcols = self.vinv_cols()
        out: Vec = {}
        for c, s in z.items():
            col = vcols.get(c)
            if not col:
                continue
            for r, v in col.items():
                nv = out.get(r, 0) + s * v
                if nv:
                    out[r] = nv
                else:
                    out.pop(r, None)
        return out

    def solve(self, b: Vec) -> Vec | None:
        """A particular integer solution of A x = b, or None if none exists."""
        if self.U is None or self.V is None:
            raise LinAlgError("solve requires U and V transforms")
        y = self.apply_u(b)
        x: Vec = {}
        for (r, c, d) in self.pivots:
            num = y.pop(r, 0)
            if num % d:
                return None
            q = num // d
            if q:
                for rr, vv in self.V[c].items():
                    nv = x.get(rr, 0) + q * vv
                    if nv:
                        x[rr] = nv
                    else:
                        x.pop(rr, None)
        if y:
            return None  # residual outside the column space
        return x

    def kernel_columns(self) -> list[int]:
        """Column indices of V spanning ker(A)."""
        pivot_cols = {c for (_, c, _) in self.pivots}
        return [c for c in range(self.shape[1]) if c not in pivot_cols]

    def kernel_basis(self) -> list[Vec]:
        if self.V is None:
            raise LinAlgError("kernel basis requires V")
        return [dict(self.V[c]) for c in self.kernel_columns()]


def _rowdicts(A: IntegerMatrix) -> tuple[dict[int, Vec], dict[int, Vec]]:
    rows: dict[int, Vec] = {}
    cols: dict[int, Vec] = {}
    for (r, c), v in A.entries.items():
        rows.setdefault(r, {})[c] = v
        cols.setdefault(c, {})[r] = v
    return rows, cols


class _SmithWorker:
    def __init__(self, A: IntegerMatrix, want: tuple[str, ...]):
        self.nr, self.nc = A.rows, A.cols
        self.rows, self.cols = _rowdicts(A)
        self.want = set(want)
        self.U = {r: {r: 1} for r in range(self.nr)} if "U" in self.want else None
        self.Uinv = {c: {c: 1} for c in range(self.nr)} if "Uinv" in self.want else None
        self.V = {c: {c: 1} for c in range(self.nc)} if "V" in self.want else None
        self.Vinv = {r: {r: 1} for r in range(self.nc)} if "Vinv" in self.want else None
        self.done_rows: set[int] = set()
        self.done_cols: set[int] = set()
        self.heap: list[tuple[int, int, int, int]] = []
        for (r, row) in self.rows.items():
            rl = len(row)
            for c, v in row.items():
                self.heap.append((abs(v), rl, r, c))
        heapq.heapify(self.heap)

    # -- primitive operations (transforms kept in lock-step) --------------

    def _push(self, r: int, c: int, v: int) -> None:
        heapq.heappush(self.heap, (abs(v), len(self.rows.get(r, ())), r, c))

    def row_op(self, rdst: int, rsrc: int, q: int) -> None:
        """row rdst -= q * row rsrc."""
        if not q:
            return
        src = self.rows.get(rsrc, {})
        dst = self.rows.setdefault(rdst, {})
        for c, v in src.items():
            nv = dst.get(c, 0) - q * v
            colmap = self.cols[c]
            if nv:
                dst[c] = nv
                colmap[rdst] = nv
                self._push(rdst, c, nv)
            else:
                dst.pop(c, None)
                colmap.pop(rdst, None)
        if self.U is not None:
            self.U[rdst] = vec_add(self.U[rdst], self.U[rsrc], -q)
        if self.Uinv is not None:
            self.Uinv[rsrc] = vec_add(self.Uinv[rsrc], self.Uinv[rdst], q)

    def col_op(self, cdst: int, csrc: int, q: int) -> None:
        """col cdst -= q * col csrc."""
        if not q:
            return
        src = self.cols.get(csrc, {})
        dst = self.cols.setdefault(cdst, {})
        for r, v in src.items():
            nv = dst.get(r, 0) - q * v
            rowmap = self.rows[r]
            if nv:
                dst[r] = nv
                rowmap[cdst] = nv
                self._push(r, cdst, nv)
            else:
                dst.pop(r, None)
                rowmap.pop(cdst, None)
        if self.V is not None:
            self.V[cdst] = vec_add(self.V[cdst], self.V[csrc], -q)
        if self.Vinv is not None:
            self.Vinv[csrc] = vec_add(self.Vinv[csrc], self.Vinv[cdst], q)

    def negate_row(self, r: int) -> None:
        row = self.rows.get(r, {})
        for c in row:
            row[c] = -row[c]
            self.cols[c][r] = row[c]
        if self.U is not None:
            self.U[r] = vec_scale(self.U[r], -1)
        if self.Uinv is not None:
            self.Uinv[r] = vec_scale(self.Uinv[r], -1)

    # -- elimination -------------------------------------------------------

    def eliminate_at(self, r: int, c: int) -> tuple[int, int, int]:
        """Clear the row and column of a pivot starting at (r, c).

        The pivot may migrate (gcd reduction); returns its final position
        and positive value.
        """
        while True:
            v = self.rows[r][c]
            moved = False
            # clear the pivot column
            while True:
                others = [rr for rr in self.cols[c] if rr != r and rr not in self.done_rows]
                if not others:
                    break
                rr = min(others)
                q = self.cols[c][rr] // v
                self.row_op(rr, r, q)
                rem = self.rows.get(rr, {}).get(c, 0)
                if rem:
                    r, v = rr, rem
                    moved = True
            # clear the pivot row
            while True:
                others = [cc for cc in self.rows[r] if cc != c and cc not in self.done_cols]
                if not others:
                    break
                cc = min(others)
                q = self.rows[r][cc] // v
                self.col_op(cc, c, q)
                rem = self.rows.get(r, {}).get(cc, 0)
                if rem:
                    c, v = cc, rem
                    moved = True
                    break  # column may be dirty again
            if not moved:
                break
            # re-enter with pivot possibly relocated
        if self.rows[r][c] < 0:
            self.negate_row(r)
        return r, c, self.rows[r][c]

    def run(self) -> list[tuple[int, int, int]]:
        pivots: list[tuple[int, int, int]] = []
        while self.heap:
            a, _, r, c = heapq.heappop(self.heap)
            if r in self.done_rows or c in self.done_cols:
                continue
            v = self.rows.get(r, {}).get(c, 0)
            if not v or abs(v) != a:
                continue  # stale
            r, c, d = self.eliminate_at(r, c)
            pivots.append((r, c, d))
            self.done_rows.add(r)
            self.done_cols.add(c)
        pivots = self._fix_divisibility(pivots)
        return pivots

    def _fix_divisibility(self, pivots: list[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
        pivots.sort(key=lambda p: p[2])
        changed = True
        while changed:
            changed = False
            for i in range(len(pivots) - 1):
                r1, c1, d1 = pivots[i]
                r2, c2, d2 = pivots[i + 1]
                if d2 % d1 == 0:
                    continue
                changed = True
                self.done_rows.discard(r1)
                self.done_rows.discard(r2)
                self.done_cols.discard(c1)
                self.done_cols.discard(c2)
                self.col_op(c1, c2, -1)  # bring d2 into column c1
                ra, ca, g = self.eliminate_at(r1, c1)
                self.done_rows.add(ra)
                self.done_cols.add(ca)
                # the mate pivot is the single remaining entry in the block
                rb = r2 if ra == r1 else r1
                row = self.rows.get(rb, {})
                live = [(cc, vv) for cc, vv in row.items() if cc not in self.done_cols]
                if len(live) != 1:
                    raise LinAlgError("divisibility merge lost diagonal form")
                cb, vb = live[0]
                if vb < 0:
                    self.negate_row(rb)
                    vb = -vb
                self.done_rows.add(rb)
                self.done_cols.add(cb)
                pivots[i] = (ra, ca, g)
                pivots[i + 1] = (rb, cb, vb)
            pivots.sort(key=lambda p: p[2])
        return pivots


def smith_normal_form(
    A: IntegerMatrix, transforms: tuple[str, ...] = ("U", "Uinv", "V", "Vinv")
) -> SmithForm:
    """Deterministic SNF of a sparse integer matrix.

    ``transforms`` selects which of U, Uinv, V, Vinv to track; tracking
    fewer is cheaper.  The divisibility chain d_1 | d_2 | ... always holds.
    """
    worker = _SmithWorker(A, transforms)
    pivots = worker.run()
    return SmithForm(
        shape=(A.rows, A.cols),
        pivots=pivots,
        U=worker.U,
        Uinv=worker.Uinv,
        V=worker.V,
        Vinv=worker.Vinv,
    )


def verify_smith(A: IntegerMatrix, sf: SmithForm) -> bool:
    """Check U A V = D and that the tracked transforms invert each other."""
    if sf.U is None or sf.V is None:
        raise LinAlgError("verification needs U and V")
    n, m = sf.shape
    # U A V: compute column by column of V
    dmap = {(r, c): d for (r, c, d) in sf.pivots}
    for c in range(m):
        av = A.matvec(sf.V[c])
        uav = sf.apply_u(av) if sf.U else av
        expect = {r: d for (r, cc), d in dmap.items() if cc == c}
        if uav != expect:
            return False
    if sf.Uinv is not None:
        for j in range(n):
            if sf.apply_u(sf.Uinv[j]) != {j: 1}:
                return False
    if sf.Vinv is not None:
        for c in range(m):
            e = sf.apply_vinv(sf.V[c])
            if e != {c: 1}:
                return False
    return True


def _apply_cols(cols: dict[int, Vec], x: Vec) -> Vec:
    out: Vec = {}
    for c, s in x.items():
        col = cols.get(c)
        if not col:
            continue
        for r, v in col.items():
            nv = out.get(r, 0) + s * v
            if nv:
                out[r] = nv
            else:
                out.pop(r, None)
    return out


class LatticeSolver:
    """Membership and solves against a fixed lattice span(columns of M)."""

    def __init__(self, rows: int, generators: list[Vec]):
        self.rows = rows
        self.generators = generators
        self.M = IntegerMatrix.from_columns(rows, generators)
        self.sf = smith_normal_form(self.M, transforms=("U", "V"))

    def contains(self, x: Vec) -> bool:
        return self.sf.solve(x) is not None

    def coefficients(self, x: Vec) -> Vec | None:
        """Integer combination of the generators equal to x, if any."""
        return self.sf.solve(x)


def kernel_of_columns(rows: int, cols: list[Vec]) -> list[Vec]:
    """Basis of the integer kernel of the matrix with the given columns."""
    M = IntegerMatrix.from_columns(rows, cols)
    sf = smith_normal_form(M, transforms=("V",))
    return sf.kernel_basis()
