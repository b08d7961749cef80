import pytest

from coarsetop.simplicial import (
    ComplexError,
    Subcomplex,
    build_complex,
    complement_closure,
    complex_from_json,
    complex_to_json,
    components,
    deep_components,
    edge_distance,
    frontier,
    geometry_stats,
    neighborhood,
    simplex_distance,
    vertex_distances,
)


def kuhn_square_grid(n):
    """Kuhn triangulation of [0,n]^2 with vertex ids (i,j) -> i*(n+1)+j."""
    def vid(i, j):
        return i * (n + 1) + j

    tris = []
    for i in range(n):
        for j in range(n):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i, j + 1), vid(i + 1, j + 1)
            tris.append((a, b, d))
            tris.append((a, c, d))
    boundary = {
        vid(i, j)
        for i in range(n + 1)
        for j in range(n + 1)
        if i in (0, n) or j in (0, n)
    }
    coords = {vid(i, j): (i, j) for i in range(n + 1) for j in range(n + 1)}
    return build_complex(tris, frontier=boundary, coords=coords)


def hollow_triangle():
    return build_complex([(0, 1), (1, 2), (0, 2)])


def test_single_simplex_closure():
    X = build_complex([(0, 1, 2)])
    assert X.n_simplices(0) == 3
    assert X.n_simplices(1) == 3
    assert X.n_simplices(2) == 1
    assert X.dim == 2


def test_hollow_triangle_dim():
    X = hollow_triangle()
    assert X.dim == 1
    assert X.n_simplices(1) == 3


def test_kuhn_3x3_counts():
    # 3x3 vertex grid = Kuhn triangulation of a 2x2 block of unit squares
    X = kuhn_square_grid(2)
    assert X.n_simplices(0) == 9
    assert X.n_simplices(1) == 16
    assert X.n_simplices(2) == 8


def test_duplicate_maximal_rejected():
    with pytest.raises(ComplexError):
        build_complex([(0, 1, 2), (2, 1, 0)])


def test_frontier_vertex_must_exist():
    with pytest.raises(ComplexError):
        build_complex([(0, 1)], frontier=[5])


def test_neighborhood_of_vertex_in_hollow_triangle():
    X = hollow_triangle()
    K = Subcomplex.from_simplices(X, [(0,)])
    N1 = neighborhood(K, 1)
    assert N1.n_simplices(1) == 2  # the two incident edges
    N2 = neighborhood(K, 2)
    assert N2.n_simplices(1) == 3  # full 1-skeleton


def test_neighborhood_zero_is_identity():
    X = hollow_triangle()
    K = Subcomplex.from_simplices(X, [(0, 1)])
    assert neighborhood(K, 0) == K


def test_kuhn_center_star_has_six_triangles():
    X = kuhn_square_grid(4)
    center = 2 * 5 + 2
    K = Subcomplex.from_simplices(X, [(center,)])
    N1 = neighborhood(K, 1)
    assert N1.n_simplices(2) == 6
    # monotone in r
    N2 = neighborhood(K, 2)
    assert N1.issubset(N2)


def test_neighborhood_composition_away_from_frontier():
    X = kuhn_square_grid(8)
    center = 4 * 9 + 4
    K = Subcomplex.from_simplices(X, [(center,)])
    lhs = neighborhood(neighborhood(K, 1), 2)
    rhs = neighborhood(K, 3)
    assert lhs == rhs


def test_frontier_of_full_complex_is_empty():
    X = hollow_triangle()
    assert frontier(Subcomplex.full(X)).is_empty()


def test_frontier_of_triangle_in_disk():
    X = kuhn_square_grid(2)
    tri = X.simplices[2][0]
    K = Subcomplex.from_simplices(X, [tri])
    dK = frontier(K)
    # every proper face touching the rest of the disk is in the frontier
    assert dK.n_simplices(0) == 3
    assert 2 <= dK.n_simplices(1) <= 3
    assert dK.n_simplices(2) == 0


def test_frontier_of_star_is_hexagon():
    X = kuhn_square_grid(6)
    center = 3 * 7 + 3
    K = neighborhood(Subcomplex.from_simplices(X, [(center,)]), 1)
    dK = frontier(K)
    assert dK.n_simplices(0) == 6
    assert dK.n_simplices(1) == 6
    assert dK.n_simplices(2) == 0


def test_complement_closure_of_full_is_empty():
    X = kuhn_square_grid(2)
    Y = complement_closure(Subcomplex.full(X), 1)
    assert Y.is_empty()


def test_complement_closure_is_closure_of_interior():
    # recompute Y_R as closure(X - N_R) twice: closure of its own interior
    X = kuhn_square_grid(8)
    center = 4 * 9 + 4
    K = Subcomplex.from_simplices(X, [(center,)])
    Y = complement_closure(K, 2)
    # interior = simplices all of whose cofaces lie in Y; its closure is Y
    inner = [
        c for c in X.maximal_simplices if Y.contains(c)
    ]
    again = Subcomplex.from_simplices(X, inner)
    assert again == Y


def test_edge_distance_basics():
    X = hollow_triangle()
    assert edge_distance(X, 0, 0) == 0
    assert edge_distance(X, 0, 1) == 1


def test_edge_distance_diagonal_of_grid():
    n = 5
    X = kuhn_square_grid(n)
    # opposite corners along the triangulation diagonal
    assert edge_distance(X, 0, n * (n + 1) + n) == n
    # anti-diagonal corners have no diagonal edges to ride
    assert edge_distance(X, n, n * (n + 1)) == 2 * n

    # triangle inequality on a sample of triples
    verts = X.vertices[:: max(1, len(X.vertices) // 8)]
    for a in verts[:4]:
        for b in verts[2:6]:
            for c in verts[4:8]:
                ab = edge_distance(X, a, b)
                bc = edge_distance(X, b, c)
                ac = edge_distance(X, a, c)
                assert ac <= ab + bc


def test_components_counts():
    X = hollow_triangle()
    assert len(components(Subcomplex.full(X))) == 1
    Y = build_complex([(0, 1), (2, 3)])
    assert len(components(Subcomplex.full(Y))) == 2


def test_components_partition_vertices():
    X = build_complex([(0, 1, 2), (3, 4), (5,)])
    comps = components(Subcomplex.full(X))
    union = set()
    total = 0
    for c in comps:
        vs = c.vertex_set()
        total += len(vs)
        union |= vs
    assert union == set(X.vertices)
    assert total == len(X.vertices)
    # deterministic order by least vertex id
    leads = [min(c.vertex_set()) for c in comps]
    assert leads == sorted(leads)


def test_grid_minus_hyperplane_has_two_components():
    X = kuhn_square_grid(8)
    row = [v for v, xy in X.coords.items() if xy[1] == 4]
    K = Subcomplex.induced(X, row)
    Y = complement_closure(K, 1)
    comps = components(Y)
    assert len(comps) == 2
    deep, shallow = deep_components(Y)
    assert len(deep) == 2 and not shallow


def test_geometry_stats():
    tri = build_complex([(0, 1, 2)])
    assert geometry_stats(tri).max_link_simplices == 3  # 2 vertices + 1 edge
    edge = build_complex([(0, 1)])
    assert geometry_stats(edge).max_link_simplices == 1
    X = kuhn_square_grid(4)
    assert geometry_stats(X).max_link_simplices == 12  # hexagon link: 6 + 6


def test_json_roundtrip_bit_exact():
    X = kuhn_square_grid(2)
    text = complex_to_json(X)
    Y = complex_from_json(text)
    assert complex_to_json(Y) == text
    assert Y.frontier_vertices == X.frontier_vertices


def test_vertex_distances_within_subcomplex():
    X = kuhn_square_grid(4)
    row = [v for v, xy in X.coords.items() if xy[1] == 2]
    S = Subcomplex.induced(X, row)
    d = vertex_distances(X, [row[0]], within=S)
    assert max(d.values()) == 4


def test_simplex_distance():
    X = kuhn_square_grid(4)
    s = (0,)
    t = (4 * 5 + 4,)
    assert simplex_distance(X, s, t) == 4
