import pytest

from coarsetop.generators import (
    CayleyWindow,
    Presentation,
    bs_presentation,
    bs_rays_Y,
    bs_sigma,
    bs_tree_window,
    cayley_2complex,
    disk_net,
    embed_sigma_r3,
    grid_window,
    halfplane_book,
    halfplane_book_sheets,
    hyperplane,
    ring,
    vertex_at,
)
from coarsetop.homology import cohomology_c, homology
from coarsetop.simplicial import (
    ComplexError,
    Subcomplex,
    components,
    geometry_stats,
)


def test_grid_window_1d():
    X = grid_window(1, 2)
    assert X.n_simplices(0) == 5
    assert X.n_simplices(1) == 4
    assert X.dim == 1


def test_grid_window_2d_counts():
    X = grid_window(2, 1)
    assert X.n_simplices(0) == 9
    assert X.n_simplices(2) == 8


def test_grid_window_3d_counts():
    X = grid_window(3, 1)
    assert X.n_simplices(3) == 48  # 6 per unit cube, 8 cubes
    assert X.n_simplices(0) == 27


def test_grid_window_acyclic():
    for n, W in ((1, 3), (2, 2), (3, 1)):
        X = grid_window(n, W)
        S = Subcomplex.full(X)
        for k in range(0, X.dim + 1):
            assert homology(S, k, reduced=True).is_trivial()


def test_hyperplane_line_in_plane():
    X = grid_window(2, 3)
    L = hyperplane(X, axis=1, offset=0)
    assert L.dim == 1
    assert L.n_simplices(0) == 7
    assert len(components(L)) == 1


def test_book_two_sheets_is_full_plane():
    X = grid_window(3, 2)
    book = halfplane_book(X, 2)
    plane = hyperplane(X, axis=1, offset=0)
    assert book == plane


def test_book_three_sheets_tripod():
    X = grid_window(3, 2)
    sheets = halfplane_book_sheets(X, 3)
    assert len(sheets) == 3
    # the three sheets share exactly the z-axis line
    inter = sheets[0].intersection(sheets[2])
    axis_vs = {v for v, c in X.coords.items() if c[0] == c[1] == 0}
    assert inter.vertex_set() == axis_vs
    book = halfplane_book(X, 3)
    # contractible: tripod x line
    assert homology(book, 1, reduced=True).is_trivial()


def test_book_hc_rank_matches_sheet_count():
    # windowed top compact-support cohomology of a k-page book is Z^(k-1)
    X = grid_window(3, 3)
    for k in (2, 3, 4):
        book = halfplane_book(X, k)
        g = cohomology_c(book, 2)
        assert g.free_rank == k - 1, (k, g.describe())
        assert g.windowed


def test_ring_is_circle():
    X = grid_window(2, 6)
    C = ring(X, 3)
    assert homology(C, 1).free_rank == 1
    assert len(components(C)) == 1


def test_disk_net_contractible():
    X = grid_window(2, 6)
    N = disk_net(X, 2)
    assert homology(N, 0, reduced=True).is_trivial()
    assert homology(N, 1, reduced=True).is_trivial()


def test_free_group_ball_is_tree():
    P = Presentation(("a", "b"), ())
    win = cayley_2complex(P, 2)
    X = win.complex
    assert X.n_simplices(0) == 17  # 1 + 4 + 12
    assert X.n_simplices(1) == 16
    assert X.dim == 1
    assert not win.truncated


def test_z2_ball_is_grid_like():
    P = Presentation(("a", "b"), ("abAB",))
    win = cayley_2complex(P, 3)
    X = win.complex
    S = Subcomplex.full(X)
    assert homology(S, 0, reduced=True).is_trivial()
    assert homology(S, 1, reduced=True).is_trivial()
    assert not win.truncated
    # group vertices at distance <= 1 in Z^2: 1 + 4
    assert sum(1 for d in win.group_vertices.values() if d <= 1) == 5


def test_bs11_equals_z2_presentation_class():
    P = bs_presentation(1, 1)
    assert P.relators == ("baBA",)
    win = cayley_2complex(P, 2)
    S = Subcomplex.full(win.complex)
    assert homology(S, 1, reduced=True).is_trivial()


def test_presentation_rejects_unreduced_relator():
    with pytest.raises(ComplexError):
        Presentation(("a",), ("aA",))


def test_bs_tree_window_edge_counts():
    T = bs_tree_window(1, 2, 2)
    assert len(T.edges) == 7  # 1 + 2 + 4
    T23 = bs_tree_window(2, 3, 3)
    assert len(T23.edges) == 5 + 3 * 4 + 9 * 4
    # interior vertices have p incoming and q outgoing edges
    for v in T23.expanded:
        heads = sum(1 for (eid, role) in T23.rotation[v] if role == "head")
        tails = sum(1 for (eid, role) in T23.rotation[v] if role == "tail")
        assert (heads, tails) == (2, 3)


def test_bs_sigma_plane_like_for_1_1():
    sig = bs_sigma(1, 1, 2, 4)
    S = Subcomplex.full(sig.complex)
    assert homology(S, 0, reduced=True).is_trivial()
    assert homology(S, 1, reduced=True).is_trivial()


def test_bs_sigma_strip_and_fiber_counts():
    sig = bs_sigma(1, 2, 2, 5)
    assert len([e for e, tris in sig.strip_simplices.items() if tris]) == 7
    # fibers are lines with 2E+1 vertices
    E = sig.fiber_extent
    for v in sig.tree.vertex_ids():
        fiber = [w for w, tv in sig.pi.items() if tv == v]
        assert len(fiber) == 2 * E + 1
    assert geometry_stats(sig.complex).max_link_simplices < 60


def test_bs_rays_contractible_window():
    sig = bs_sigma(2, 3, 3, 6)
    rays = bs_rays_Y(sig, [(0, 0, 0), (1, 1, 1), (2, 2, 2)])
    Y = rays.subcomplex
    assert homology(Y, 0, reduced=True).is_trivial()
    assert homology(Y, 1, reduced=True).is_trivial()
    # pairwise sheet unions stay acyclic inside the window
    U = rays.sheets[0].union(rays.sheets[1])
    assert homology(U, 1, reduced=True).is_trivial()


def test_bs_rays_distinct_required():
    sig = bs_sigma(1, 2, 2, 4)
    with pytest.raises(ComplexError):
        bs_rays_Y(sig, [(0, 0), (0, 0)])


def test_bs_rays_hc_rank():
    sig = bs_sigma(1, 2, 3, 6)
    rays = bs_rays_Y(sig, [(0, 0, 0), (1, 1, 1), (0, 1, 1)])
    g = cohomology_c(Subcomplex.full(rays.window), 2)
    assert g.free_rank == 2  # k-1 sheets


def test_embed_sigma_r3_small_manifold():
    sig = bs_sigma(1, 2, 2, 4)
    emb = embed_sigma_r3(sig, 3)
    X = emb.complex
    assert X.dim == 3
    # every triangle borders at most two tetrahedra; interior ones exactly two
    cof = X.cofaces(2)
    fv = X.frontier_vertices
    for tri, tets in cof.items():
        assert len(tets) <= 2
        if not any(v in fv for v in tri):
            assert len(tets) == 2, tri
    # the window is contractible
    S = Subcomplex.full(X)
    for k in (0, 1, 2, 3):
        assert homology(S, k, reduced=True).is_trivial(), k
