import random
from fractions import Fraction

import pytest

from common import ex1_layers, random_vector, subsets, vec
from tropflag.core import DomainError, Subset, enumerate_subsets
from tropflag.geometry import (
    WeightedConfig,
    _lower_hull_edges,
    _regular_cells,
    cell_intersections_are_faces,
    covers_all_vertices,
    delta_edges,
    delta_vertices,
    edges_of_polytope,
    face_ST,
    hypersimplex_edges,
    hypersimplex_vertices,
    is_face,
    make_edge,
    pn_edge_profile,
    pn_transform,
    pn_vertices,
    skeleton_equal,
    skeleton_equal_single,
    subdivision_cells,
    subdivision_cells_single,
    subdivision_edges,
    subdivision_edges_single,
)
from tropflag.realization import random_flag_matrix
from tropflag.tropical import PluckerVector, check_flag, check_plucker

SQUARE = [(1, 0), (-1, 0), (0, 1), (0, -1)]


def edge_names(edges):
    return sorted((str(a), str(b)) for a, b in edges)


def test_delta_vertices():
    assert len(delta_vertices(2, 3, 4)) == 10
    assert len(delta_vertices(1, 2, 3)) == 6
    with pytest.raises(DomainError):
        delta_vertices(2, 2, 4)
    verts = delta_vertices(1, 2, 3)
    assert [v.subset.members for v in verts] == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3)]


def test_is_face_examples():
    assert is_face(SQUARE, [(1, 0)])
    assert is_face(SQUARE, [(1, 0), (0, 1)])
    assert not is_face(SQUARE, [(1, 0), (-1, 0)])
    with pytest.raises(DomainError):
        is_face(SQUARE, [])
    with pytest.raises(DomainError):
        is_face(SQUARE, [(2, 2)])


def test_edges_of_polytope_small():
    assert len(edges_of_polytope([(1, 0, 0), (0, 1, 0), (0, 0, 1)])) == 3
    assert len(edges_of_polytope(SQUARE)) == 4


def test_edges_of_conv_f2_f3():
    """The demonstration polytope on 7 vertices: its 13 ambient-skeleton
    segments plus two further genuine edges (24-123 and 34-123), 15 in all."""
    verts = subsets(4, [1, 2], [1, 3], [2, 4], [3, 4], [1, 2, 3], [1, 2, 4], [1, 3, 4])
    pairs = edges_of_polytope([s.indicator() for s in verts])
    names = {frozenset((str(verts[i]), str(verts[j]))) for i, j in pairs}
    ambient = sorted(
        [
            ("12", "13"),
            ("12", "24"),
            ("13", "34"),
            ("24", "34"),
            ("123", "124"),
            ("123", "134"),
            ("124", "134"),
            ("12", "123"),
            ("12", "124"),
            ("13", "123"),
            ("13", "134"),
            ("24", "124"),
            ("34", "134"),
        ]
    )
    extra = [("123", "24"), ("123", "34")]
    assert names == {frozenset(e) for e in ambient + extra}
    # hand-checkable certificate for one of the extra edges
    functional = (-1, 3, 1, 0)
    values = {str(s): sum(a * c for a, c in zip(functional, s.indicator())) for s in verts}
    assert values["24"] == values["123"] == max(values.values())
    assert sorted(v for k, v in values.items() if k not in ("24", "123"))[-1] < 3


def test_delta_edges_2_3_4():
    edges = delta_edges(2, 3, 4)
    mixed = [e for e in edges if e[0].card != e[1].card]
    layer2 = [e for e in edges if e[0].card == e[1].card == 2]
    assert len(mixed) == 12
    assert len(layer2) == 12
    e12, e134 = subsets(4, [1, 2], [1, 3, 4])
    assert make_edge(e12, e134) not in edges


def test_delta_edges_lemma3_cross_validation():
    # the containment rule is re-checked against the LP on every fresh call
    configs = [(p, q, n) for n in range(3, 6) for p in range(1, n) for q in range(p + 1, n)]
    for (p, q, n) in configs:
        edges = delta_edges(p, q, n)
        mixed = {e for e in edges if e[0].card != e[1].card}
        expected = {
            make_edge(i_sub, j_sub)
            for i_sub in enumerate_subsets(n, p)
            for j_sub in enumerate_subsets(n, q)
            if i_sub.issubset(j_sub)
        }
        assert mixed == expected


def test_hypersimplex_edges_exchange_pairs():
    for d, n in [(1, 3), (2, 4), (2, 5)]:
        edges = hypersimplex_edges(d, n)
        expected = {
            make_edge(a, b)
            for a in enumerate_subsets(n, d)
            for b in enumerate_subsets(n, d)
            if a.key < b.key and (a.mask ^ b.mask).bit_count() == 2
        }
        assert edges == expected


def test_octahedron_two_cells():
    p = vec(4, 2, ones=["12", "34"])
    sub = subdivision_cells_single(p)
    cells = [tuple(str(v) for v in c.vertices) for c in sub.cells]
    assert cells == [
        ("12", "13", "14", "23", "24"),
        ("13", "14", "23", "24", "34"),
    ]
    for cell in sub.cells:
        for vertex in hypersimplex_vertices(2, 4):
            value = cell.functional.value(vertex.coords)
            weight = p[vertex.subset]
            if vertex in cell.vertices:
                assert value == weight
            else:
                assert value < weight


def test_octahedron_subdivision_edges():
    p = vec(4, 2, ones=["12", "34"])
    edges = subdivision_edges_single(p)
    assert len(edges) == 12
    e12, e34 = subsets(4, [1, 2], [3, 4])
    e13, e24 = subsets(4, [1, 3], [2, 4])
    assert make_edge(e12, e34) not in edges  # lifted apexes separate
    assert make_edge(e13, e24) not in edges  # square diagonal never an edge
    assert edges == hypersimplex_edges(2, 4)  # no new edges: weights are valid


def test_generic_lift_octahedra_triangulate_into_four_tetrahedra():
    # both octahedral configurations: every vertex triangulation has 4 cells
    rng = random.Random(71)
    for _ in range(3):
        single = PluckerVector.from_values(4, 2, [rng.randint(-40, 40) for _ in range(6)])
        sub = subdivision_cells_single(single)
        if all(len(c.vertices) == 4 for c in sub.cells):
            assert len(sub.cells) == 4
        two = WeightedConfig(
            PluckerVector.from_values(3, 1, [rng.randint(-40, 40) for _ in range(3)]),
            PluckerVector.from_values(3, 2, [rng.randint(-40, 40) for _ in range(3)]),
        )
        sub2 = subdivision_cells(two)
        if all(len(c.vertices) == 4 for c in sub2.cells):
            assert len(sub2.cells) == 4


def test_trivial_subdivision():
    cfg = WeightedConfig(PluckerVector.zeros(4, 2), PluckerVector.zeros(4, 3))
    sub = subdivision_cells(cfg)
    assert len(sub.cells) == 1
    assert len(sub.cells[0].vertices) == 10
    assert sub.cells[0].functional.a == (0, 0, 0, 0)
    assert sub.cells[0].functional.b == 0
    assert subdivision_edges(cfg) == delta_edges(2, 3, 4)


def test_engines_agree_random():
    rng = random.Random(17)
    cases = []
    for _ in range(12):
        n = rng.choice([3, 4])
        pairs = [(p, q) for p in range(1, n) for q in range(p + 1, n)]
        cases.append((n, *rng.choice(pairs)))
    cases += [(5, 2, 3), (5, 2, 3)]  # above the brute-force threshold
    for n, p, q in cases:
        cfg = WeightedConfig(random_vector(n, p, rng), random_vector(n, q, rng))
        pts = [v.coords for v in cfg.vertices()]
        assert _regular_cells(pts, cfg.weights(), "brute") == _regular_cells(
            pts, cfg.weights(), "bfs"
        )


def test_subdivision_edges_match_union_of_cell_edges():
    rng = random.Random(23)
    for trial in range(8):
        n = rng.choice([4, 5])
        p, q = (2, 3) if n == 5 else rng.choice([(1, 2), (2, 3), (1, 3)])
        cfg = WeightedConfig(random_vector(n, p, rng), random_vector(n, q, rng))
        sub = subdivision_cells(cfg)
        assert subdivision_edges(cfg) == sub.edges()
        assert covers_all_vertices(sub, cfg.vertices())
        assert cell_intersections_are_faces(sub)
        if trial < 3:
            literal = set()
            for cell in sub.cells:
                pts = [v.coords for v in cell.vertices]
                for i, j in edges_of_polytope(pts):
                    literal.add(make_edge(cell.vertices[i].subset, cell.vertices[j].subset))
            assert frozenset(literal) == sub.edges()


def test_skeleton_examples():
    invalid, fixed_x23, _ = ex1_layers()
    report = skeleton_equal(WeightedConfig.from_flag(fixed_x23))
    assert report.equal and report.new_edges == ()
    bad = skeleton_equal(WeightedConfig.from_flag(invalid))
    e24, e123 = subsets(4, [2, 4], [1, 2, 3])
    assert not bad.equal
    assert make_edge(e24, e123) in bad.new_edges


def test_theorem2_cross_validation_sample():
    rng = random.Random(31)
    agreements = 0
    for _ in range(40):
        n = rng.choice([3, 4])
        pairs = [(p, q) for p in range(1, n) for q in range(p + 1, n)]
        p, q = rng.choice(pairs)
        x, y = random_vector(n, p, rng), random_vector(n, q, rng)
        cfg = WeightedConfig(x, y)
        relations_ok = check_flag(
            __import__("tropflag.tropical", fromlist=["FlagInstance"]).FlagInstance((x, y)),
            all_pairs=True,
        ).is_valid
        assert skeleton_equal(cfg).equal == relations_ok
        agreements += 1
    assert agreements == 40


def test_speyer_single_layer_sample():
    rng = random.Random(37)
    for _ in range(40):
        p = random_vector(4, 2, rng)
        assert skeleton_equal_single(p).equal == (not check_plucker(p))


def test_face_st_example():
    s, t = subsets(4, [2], [1, 2, 3, 4])
    face = face_ST(s, t, 2, 3, 4)
    assert [v.subset.members for v in face.vertices] == [
        (1, 2),
        (2, 3),
        (2, 4),
        (1, 2, 3),
        (1, 2, 4),
        (2, 3, 4),
    ]
    assert face.functional.a == (0, 1, 0, 0)
    assert face.tight_value == 1


def test_face_st_whole_polytope():
    n = 4
    s, t = subsets(n, [], [1, 2, 3, 4])
    face = face_ST(s, t, 1, n - 1, n)
    assert len(face.vertices) == len(delta_vertices(1, n - 1, n))
    assert face.tight_value == 0


def test_face_st_errors():
    s, t = subsets(4, [1, 2], [1, 2, 3, 4])
    with pytest.raises(DomainError):
        face_ST(s, t, 2, 3, 4)  # |S| != p-1
    s2, t2 = subsets(5, [5], [1, 2, 3, 4])
    with pytest.raises(DomainError):
        face_ST(s2, t2, 2, 3, 5)  # S not inside T: no certificate exists


def test_face_st_exhaustive_small():
    for (p, q, n) in [(1, 2, 3), (1, 2, 4), (2, 3, 4), (1, 3, 4)]:
        for s in enumerate_subsets(n, p - 1):
            for t in enumerate_subsets(n, q + 1):
                if s.issubset(t):
                    face = face_ST(s, t, p, q, n)  # raises on any certificate failure
                    assert len(face.vertices) == 2 * (t.card - s.card)


def test_pn_transform_model_map_values():
    s, t = subsets(3, [], [1, 2, 3])
    transform = pn_transform(s, t)
    e1 = Subset.from_members(3, [1])
    e23 = Subset.from_members(3, [2, 3])
    assert transform.apply(e1.indicator()) == (1, 0, 0)
    assert transform.apply(e23.indicator()) == (-1, 0, 0)
    assert transform.mapping[e1] == (1, 1)
    assert transform.mapping[e23] == (1, -1)


def test_pn_transform_bijection_234():
    s, t = subsets(4, [2], [1, 2, 3, 4])
    transform = pn_transform(s, t)
    assert transform.m == 3
    images = sorted(transform.mapping.values())
    assert images == [(1, -1), (1, 1), (2, -1), (2, 1), (3, -1), (3, 1)]
    # containment pairing lands antipodally
    for i in t.difference(s):
        lo = transform.mapping[s.with_element(i)]
        hi = transform.mapping[t.without(i)]
        assert lo[0] == hi[0] and lo[1] == -hi[1]


def test_pn_transform_m2():
    s, t = subsets(4, [1], [1, 2, 3])
    transform = pn_transform(s, t)
    assert transform.m == 2
    with pytest.raises(DomainError):
        transform.apply((0, 0, 0, 0))
    with pytest.raises(DomainError):
        pn_transform(*subsets(3, [1, 2], [1, 2, 3]))  # |T\S| = 1


def test_pn_edge_profile_examples():
    assert pn_edge_profile([0, 0], [0, 1]) == frozenset({1})
    assert pn_edge_profile([0, 0, 0], [0, 0, 0]) == frozenset()
    assert pn_edge_profile([2, 0, 1], [0, 0, 0]) == frozenset({2})


def test_pn_edge_profile_matches_lp_subdivision():
    rng = random.Random(41)
    for _ in range(25):
        m = rng.choice([2, 3, 4])
        psi_plus = [Fraction(rng.randint(-2, 2)) for _ in range(m)]
        psi_minus = [Fraction(rng.randint(-2, 2)) for _ in range(m)]
        pts = pn_vertices(m)
        hull_edges = _lower_hull_edges(pts, psi_plus + psi_minus)
        antipodal = {i + 1 for i in range(m) if (i, i + m) in hull_edges}
        assert antipodal == set(pn_edge_profile(psi_plus, psi_minus))


def test_pn_chain_pullback_to_delta_st():
    """Weights pulled back through the vertex bijection induce the same
    antipodal-edge answer on Delta_{S,T} as pn_edge_profile gives on P_m."""
    rng = random.Random(43)
    cases = [subsets(4, [2], [1, 2, 3, 4]), subsets(5, [1], [1, 2, 3, 4]), subsets(5, [], [2, 3, 4])]
    for s, t in cases:
        transform = pn_transform(s, t)
        m = transform.m
        for _ in range(6):
            psi_plus = [Fraction(rng.randint(-2, 2)) for _ in range(m)]
            psi_minus = [Fraction(rng.randint(-2, 2)) for _ in range(m)]
            vertices = sorted(transform.mapping, key=lambda v: v.key)
            weights = []
            for v in vertices:
                index, sign = transform.mapping[v]
                weights.append(psi_plus[index - 1] if sign > 0 else psi_minus[index - 1])
            hull_edges = _lower_hull_edges([v.indicator() for v in vertices], weights)
            antipodal_found = set()
            for i, j in hull_edges:
                vi, vj = transform.mapping[vertices[i]], transform.mapping[vertices[j]]
                if vi[0] == vj[0] and vi[1] == -vj[1]:
                    antipodal_found.add(vi[0])
            assert antipodal_found == set(pn_edge_profile(psi_plus, psi_minus))


def test_single_layer_and_realizable_consistency():
    flag = random_flag_matrix(5, (2, 3), 3).tropicalized_layers()
    cfg = WeightedConfig.from_flag(flag)
    report = skeleton_equal(cfg)
    assert report.equal  # valid instances introduce no new edges
    sub = subdivision_cells(cfg)
    assert covers_all_vertices(sub, cfg.vertices())
    assert subdivision_edges(cfg) == sub.edges()
