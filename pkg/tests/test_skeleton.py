import itertools
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orientcalc.errors import PurityError, RangeError, ShapeError
from orientcalc.skeleton import (
    LIBRARY,
    SimplicialComplex,
    SubcomplexSelection,
    barycentric_subdivision,
    disjoint,
    dual_cell_counts,
    dual_cells,
    dual_skeleton,
    embed_in_subdivision,
    end_restriction,
    expected_subdivision_top_cells,
    format_complex,
    library_complex,
    parse_complex,
    prism_ends,
    prism_triangulation,
    read_complex,
    relative_skeleton,
    restrict_to,
    retracts_onto,
    write_complex,
)

EULER_CHI = {"triangle": 1, "octahedron": 2, "icosahedron": 2, "torus18": 0, "edge": 1, "simplex4_boundary": 0}


def _split(k, d):
    n = k.dimension
    sd = barycentric_subdivision(k)
    y = embed_in_subdivision(relative_skeleton(k, n - d), sd)
    return sd, y, dual_skeleton(k, d, subdivision=sd)


@pytest.mark.parametrize("name", LIBRARY)
def test_library_complexes_are_well_formed(name):
    k = library_complex(name)
    assert k.is_pure
    assert k.euler_characteristic() == EULER_CHI[name]


@pytest.mark.parametrize("name", LIBRARY)
def test_dual_and_skeleton_split_the_subdivision(name):
    k = library_complex(name)
    for d in range(1, k.dimension + 1):
        sd, y, c = _split(k, d)
        assert disjoint(y, c)
        assert y.is_closed() and c.is_closed()
        assert c.dimension == d - 1
        assert retracts_onto(sd, y, c)


def test_icosahedron_dual_is_dodecahedron():
    k = library_complex("icosahedron")
    assert k.f_vector() == (12, 30, 20)
    counts = dual_cell_counts(dual_skeleton(k, 2), 2)
    assert counts == {0: 20, 1: 30}


def test_dual_cells_are_grouped_by_face():
    k = library_complex("octahedron")
    cells = dual_cells(dual_skeleton(k, 2))
    for start, chains in cells.items():
        assert all(start in c for c in chains)
        if len(start) == 2:
            # a dual edge: the edge barycenter plus its two half-edges
            assert len(chains) == 3


@pytest.mark.parametrize("name", LIBRARY)
def test_subdivision_counts(name):
    k = library_complex(name)
    sd = barycentric_subdivision(k)
    assert len(sd.top_cells()) == expected_subdivision_top_cells(k)
    assert len(sd.top_cells()) == len(k.top_cells()) * factorial(k.dimension + 1)
    assert sd.euler_characteristic() == k.euler_characteristic()
    assert len(sd.vertices) == len(k.faces())


def test_octahedron_subdivision():
    assert len(barycentric_subdivision(library_complex("octahedron")).top_cells()) == 48


def test_triangle_examples():
    k = library_complex("triangle")
    sk = relative_skeleton(k, 1)
    assert sk.count(0) == 3 and sk.count(1) == 3 and sk.count(2) == 0
    dual = dual_skeleton(k, 1)
    assert dual.faces == frozenset({(((0, 1, 2)),)})


def test_simplex_boundary_one_skeleton():
    sk = relative_skeleton(library_complex("simplex4_boundary"), 1)
    assert (sk.count(0), sk.count(1)) == (5, 10)


def test_relative_skeleton_drops_boundary_faces():
    k = library_complex("triangle")
    boundary = SimplicialComplex.from_simplices([(0, 1)])
    sk = relative_skeleton(k, 1, boundary)
    assert (0, 1) not in sk.faces
    assert (0,) in sk.faces and (1,) in sk.faces
    assert relative_skeleton(k, 1).faces - sk.faces == {(0, 1)}


@pytest.mark.parametrize("name", ["edge", "triangle", "octahedron", "torus18"])
def test_prism_relative_checks(name):
    k = library_complex(name)
    prism = prism_triangulation(k)
    ends = prism_ends(k)
    n = prism.dimension
    assert n == k.dimension + 1 and prism.is_pure
    assert len(prism.top_cells()) == len(k.top_cells()) * (k.dimension + 1)
    for e in (0, 1):
        assert end_restriction(prism, e) == k
    sd = barycentric_subdivision(prism)
    sd_k = barycentric_subdivision(k)
    for d in range(1, n + 1):
        y = embed_in_subdivision(relative_skeleton(prism, n - d, ends), sd)
        c = dual_skeleton(prism, d, ends, sd)
        assert disjoint(y, c)
        assert y.is_closed() and c.is_closed()
        assert retracts_onto(sd, y, c)
        if d <= k.dimension:
            own = dual_skeleton(k, d, subdivision=sd_k)
            for e in (0, 1):
                piece = SimplicialComplex.from_simplices(((v, e) for v in s) for s in k.maximal)
                got = restrict_to(c, barycentric_subdivision(piece))
                relabelled = {tuple(tuple(v for v, _ in f) for f in chain) for chain in got}
                assert relabelled == set(own.faces)


def test_errors():
    k = library_complex("triangle")
    with pytest.raises(RangeError):
        relative_skeleton(k, 3)
    with pytest.raises(RangeError):
        dual_skeleton(k, 0)
    with pytest.raises(RangeError):
        dual_skeleton(k, 3)
    impure = SimplicialComplex.from_simplices([(0, 1, 2), (2, 3)])
    with pytest.raises(PurityError):
        dual_skeleton(impure, 1)
    with pytest.raises(ShapeError):
        SubcomplexSelection(k, frozenset({(0, 5)}))
    with pytest.raises(ShapeError):
        library_complex("klein")
    with pytest.raises(ShapeError):
        parse_complex("0 0 1\n")
    with pytest.raises(ShapeError):
        parse_complex("# nothing\n")
    with pytest.raises(RangeError):
        end_restriction(prism_triangulation(k), 2)
    other = library_complex("octahedron")
    with pytest.raises(ShapeError):
        disjoint(relative_skeleton(k, 0), relative_skeleton(other, 0))


def test_text_round_trip(tmp_path):
    for name in LIBRARY:
        k = library_complex(name)
        assert parse_complex(format_complex(k)) == k
        p = tmp_path / f"{name}.txt"
        write_complex(k, p)
        assert read_complex(p) == k


def test_contained_simplices_are_dropped():
    k = SimplicialComplex.from_simplices([(0, 1, 2), (1, 0), ("a",), (2, 1, 0)])
    assert k.maximal == ((0, 1, 2), ("a",))
    assert not k.is_pure


@settings(max_examples=40, deadline=None)
@given(st.sets(st.tuples(*(st.integers(0, 5),) * 3).filter(lambda t: len(set(t)) == 3), min_size=1, max_size=6))
def test_random_surface_patches(triangles):
    k = SimplicialComplex.from_simplices(triangles)
    sd = barycentric_subdivision(k)
    assert sd.euler_characteristic() == k.euler_characteristic()
    for d in (1, 2):
        _, y, c = _split(k, d)
        assert disjoint(y, c)
        assert retracts_onto(sd, y, c)
        assert dual_cell_counts(c, 2) == {i: len(k.faces(2 - i)) for i in range(d)}
