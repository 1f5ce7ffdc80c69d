"""Abstract simplicial complexes and the skeleton constructions used for excision.

A complex is stored by its maximal simplices; faces are derived on demand.
Vertices of a barycentric subdivision are the faces of the original complex
(a face stands for its barycenter), so a subdivision simplex is a chain of
strictly nested faces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cache, cached_property
from importlib import resources
from math import factorial
from pathlib import Path
from typing import Hashable, Iterable

from .errors import PurityError, RangeError, ShapeError

Face = tuple


def _subfaces(s: Face):
    for r in range(1, len(s) + 1):
        yield from itertools.combinations(s, r)


@cache
def label_key(v: Hashable):
    """Total order on mixed labels: ints, then strings, then tuples (recursively)."""
    if isinstance(v, bool) or not isinstance(v, (int, str, tuple)):
        return (3, repr(v))
    if isinstance(v, int):
        return (0, v)
    if isinstance(v, str):
        return (1, v)
    return (2, tuple(label_key(x) for x in v))


def _sorted_face(vertices: Iterable[Hashable]) -> Face:
    return tuple(sorted(set(vertices), key=label_key))


@dataclass(frozen=True)
class SimplicialComplex:
    maximal: tuple[Face, ...]

    def __post_init__(self):
        faces = {_sorted_face(s) for s in self.maximal}
        if () in faces:
            raise ShapeError("empty simplex is not allowed as a maximal simplex")
        # drop anything contained in a larger listed simplex
        kept = [s for s in faces if not any(len(t) > len(s) and set(s) <= set(t) for t in faces)]
        object.__setattr__(self, "maximal", tuple(sorted(kept, key=label_key)))

    @classmethod
    def from_simplices(cls, simplices: Iterable[Iterable[Hashable]]) -> SimplicialComplex:
        return cls(tuple(tuple(s) for s in simplices))

    @cached_property
    def vertices(self) -> tuple:
        return _sorted_face(v for s in self.maximal for v in s)

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.maximal), default=-1)

    @property
    def is_pure(self) -> bool:
        n = self.dimension
        return all(len(s) - 1 == n for s in self.maximal)

    @cached_property
    def _faces(self) -> frozenset[Face]:
        return frozenset(f for s in self.maximal for f in _subfaces(s))

    @cached_property
    def _sorted_faces(self) -> tuple[Face, ...]:
        return tuple(sorted(self._faces, key=lambda f: (len(f), label_key(f))))

    def faces(self, dim: int | None = None) -> list[Face]:
        if dim is None:
            return list(self._sorted_faces)
        return [f for f in self._sorted_faces if len(f) == dim + 1]

    def contains(self, face: Iterable[Hashable]) -> bool:
        return _sorted_face(face) in self._faces

    def f_vector(self) -> tuple[int, ...]:
        counts = [0] * (self.dimension + 1)
        for f in self._faces:
            counts[len(f) - 1] += 1
        return tuple(counts)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * c for i, c in enumerate(self.f_vector()))

    def top_cells(self) -> list[Face]:
        n = self.dimension
        return [s for s in self.maximal if len(s) - 1 == n]


@dataclass(frozen=True)
class SubcomplexSelection:
    owner: SimplicialComplex
    faces: frozenset[Face]

    def __post_init__(self):
        known = self.owner._faces
        fs = frozenset(f if f in known else _sorted_face(f) for f in self.faces)
        stray = [f for f in fs if f not in known]
        if stray:
            raise ShapeError(f"{len(stray)} selected faces are not faces of the owner, e.g. {stray[0]!r}")
        object.__setattr__(self, "faces", fs)

    @property
    def dimension(self) -> int:
        return max((len(f) - 1 for f in self.faces), default=-1)

    @property
    def vertices(self) -> frozenset:
        return frozenset(f[0] for f in self.faces if len(f) == 1)

    def count(self, dim: int) -> int:
        return sum(1 for f in self.faces if len(f) == dim + 1)

    def is_closed(self) -> bool:
        return all(g in self.faces for f in self.faces for g in itertools.combinations(f, len(f) - 1) if g)

    def as_complex(self) -> SimplicialComplex:
        return SimplicialComplex.from_simplices(self.faces)


def barycentric_subdivision(k: SimplicialComplex) -> SimplicialComplex:
    """Vertices are faces of ``k``; top cells are full flags inside each maximal simplex."""
    chains = set()
    for s in k.maximal:
        for perm in itertools.permutations(s):
            chains.add(tuple(_sorted_face(perm[: i + 1]) for i in range(len(perm))))
    return SimplicialComplex(tuple(chains))


def barycenter_dimension(vertex: Face) -> int:
    """Dimension of the face whose barycenter a subdivision vertex is."""
    return len(vertex) - 1


def _in_boundary(face: Face, boundary: SimplicialComplex | None) -> bool:
    return boundary is not None and boundary.contains(face)


def relative_skeleton(
    k: SimplicialComplex, dim: int, boundary: SimplicialComplex | None = None
) -> SubcomplexSelection:
    """Faces of dimension < ``dim``, plus ``dim``-faces.

    With a ``boundary`` subcomplex, the ``dim``-faces lying wholly inside it
    are dropped; without one this is the ordinary ``dim``-skeleton.
    """
    n = k.dimension
    if not 0 <= dim <= n:
        raise RangeError(f"skeleton dimension {dim} outside [0, {n}]")
    faces = [f for f in k._faces if len(f) - 1 < dim or (len(f) - 1 == dim and not _in_boundary(f, boundary))]
    return SubcomplexSelection(k, frozenset(faces))


def dual_skeleton(
    k: SimplicialComplex,
    d: int,
    boundary: SimplicialComplex | None = None,
    subdivision: SimplicialComplex | None = None,
) -> SubcomplexSelection:
    """The (d-1)-skeleton of the dual complex inside the barycentric subdivision.

    Selected: chains of faces all of dimension >= n-d+1. In relative mode
    also chains lying wholly in ``boundary`` with all dimensions >= n-d, so
    that the result restricted to each boundary piece is that piece's own
    dual (d-1)-skeleton (the boundary has dimension n-1).
    """
    if not k.is_pure:
        raise PurityError("dual skeleton needs a pure complex")
    n = k.dimension
    if not 1 <= d <= n:
        raise RangeError(f"codimension parameter {d} outside [1, {n}]")
    sd = subdivision if subdivision is not None else barycentric_subdivision(k)
    low = n - d + 1

    def keep(chain: Face) -> bool:
        if all(len(f) - 1 >= low for f in chain):
            return True
        return boundary is not None and all(len(f) - 1 >= low - 1 and boundary.contains(f) for f in chain)

    return SubcomplexSelection(sd, frozenset(c for c in sd._faces if keep(c)))


def embed_in_subdivision(sel: SubcomplexSelection, subdivision: SimplicialComplex) -> SubcomplexSelection:
    """Subdivision of a subcomplex: chains made only of selected faces."""
    return SubcomplexSelection(subdivision, frozenset(c for c in subdivision._faces if all(f in sel.faces for f in c)))


def dual_cells(dual: SubcomplexSelection) -> dict[Face, list[Face]]:
    """Group the chains of a dual skeleton by their smallest face.

    The chains starting at a face of dimension n-i make up its i-dimensional
    dual cell.
    """
    cells: dict[Face, list[Face]] = {}
    for chain in dual.faces:
        cells.setdefault(min(chain, key=len), []).append(chain)
    return {f: sorted(cells[f], key=label_key) for f in sorted(cells, key=label_key)}


def dual_cell_counts(dual: SubcomplexSelection, n: int) -> dict[int, int]:
    """Number of dual cells by cell dimension."""
    out: dict[int, int] = {}
    for start in dual_cells(dual):
        i = n - (len(start) - 1)
        out[i] = out.get(i, 0) + 1
    return dict(sorted(out.items()))


def disjoint(a: SubcomplexSelection, b: SubcomplexSelection) -> bool:
    if a.owner != b.owner:
        raise ShapeError("selections live in different complexes")
    return not (a.faces & b.faces) and not (a.vertices & b.vertices)


def retracts_onto(subdivision: SimplicialComplex, y: SubcomplexSelection, c: SubcomplexSelection) -> bool:
    """Every subdivision simplex outside ``y`` has a nonempty face in ``c``."""
    for chain in subdivision._faces:
        if chain in y.faces:
            continue
        if not any(sub in c.faces for sub in _subfaces(chain)):
            return False
    return True


def prism_triangulation(k: SimplicialComplex) -> SimplicialComplex:
    """Staircase triangulation of k x [0,1] with vertices ``(v, 0)`` and ``(v, 1)``.

    A simplex v_0 < ... < v_m gives m+1 simplices
    (v_0,0)...(v_i,0)(v_i,1)...(v_m,1); ordering by the global vertex order
    makes the pieces agree on shared walls.
    """
    out = []
    for s in k.maximal:
        for i in range(len(s)):
            out.append(tuple((v, 0) for v in s[: i + 1]) + tuple((v, 1) for v in s[i:]))
    return SimplicialComplex(tuple(out))


def prism_ends(k: SimplicialComplex) -> SimplicialComplex:
    """The subcomplex k x {0, 1} of the prism."""
    return SimplicialComplex(tuple(tuple((v, t) for v in s) for s in k.maximal for t in (0, 1)))


def end_restriction(prism: SimplicialComplex, end: int) -> SimplicialComplex:
    """Faces of the prism inside the ``end`` copy, with the level tag dropped."""
    if end not in (0, 1):
        raise RangeError(f"prism end must be 0 or 1, got {end}")
    faces = [tuple(v for v, _ in f) for f in prism._faces if all(t == end for _, t in f)]
    return SimplicialComplex.from_simplices(faces)


def restrict_to(sel: SubcomplexSelection, piece: SimplicialComplex) -> frozenset[Face]:
    """Selected faces lying wholly inside ``piece``."""
    return frozenset(f for f in sel.faces if piece.contains(f))


def _parse_label(token: str) -> Hashable:
    try:
        return int(token)
    except ValueError:
        return token


def parse_complex(text: str) -> SimplicialComplex:
    simplices = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(set(tokens)) != len(tokens):
            raise ShapeError(f"line {lineno}: repeated vertex in simplex")
        simplices.append(tuple(_parse_label(t) for t in tokens))
    if not simplices:
        raise ShapeError("complex has no simplices")
    return SimplicialComplex.from_simplices(simplices)


def format_complex(k: SimplicialComplex) -> str:
    return "".join(" ".join(str(v) for v in s) + "\n" for s in k.maximal)


def read_complex(path: str | Path) -> SimplicialComplex:
    return parse_complex(Path(path).read_text())


def write_complex(k: SimplicialComplex, path: str | Path) -> None:
    Path(path).write_text(format_complex(k))


LIBRARY = ("edge", "triangle", "octahedron", "icosahedron", "simplex4_boundary", "torus18")


def library_complex(name: str) -> SimplicialComplex:
    if name not in LIBRARY:
        raise ShapeError(f"unknown library complex {name!r}; known: {', '.join(LIBRARY)}")
    return parse_complex(resources.files("orientcalc").joinpath("data").joinpath(f"{name}.txt").read_text())


def expected_subdivision_top_cells(k: SimplicialComplex) -> int:
    return sum(factorial(len(s)) for s in k.maximal)
