"""Finite lattice builders with labeled boundary segments.

Four families are supported:

* ``rectangle(n)`` -- bond percolation on a square-lattice rectangle with
  vertex grid {0..n+1} x {0..n}; segments "12"/"34" are the left/right
  columns, "14"/"23" the bottom/top rows.
* ``rhombus(m)`` -- site percolation on an m x m patch of the triangular
  lattice (diagonal neighbor offsets (+1,-1)/(-1,+1)); segments "12"/"34"
  are the i=0 / i=m-1 rows, "14"/"23" the j=0 / j=m-1 columns.
* ``hexagon(l)`` -- site percolation on the hex-ball of side l on the
  triangular lattice (3l^2+3l+1 sites); six segments "12".."61" in cyclic
  order, each corner site belonging to both incident segments.
* ``cubic(L)`` -- bond or site percolation on the {0..L-1}^3 box with
  6-neighbor adjacency; segment "shell" is the set of boundary vertices,
  plus a distinguished center vertex.

All builders are deterministic: indexing is row-major over coordinates, and
edges are ordered all-horizontal-by-row first, then all-vertical-by-column,
so element indices (and therefore seeded runs) reproduce exactly.
Lattices are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class Lattice:
    """Immutable lattice geometry.

    ``mode`` is "bond" or "site".  In bond mode the percolation elements are
    the edges (``edges`` maps element -> endpoint pair); in site mode the
    elements are the sites themselves and ``indptr``/``indices`` give the
    CSR adjacency.  ``boundary`` maps a segment label to a sorted array of
    vertex (site) indices.
    """

    mode: str
    geometry: str
    num_vertices: int
    num_elements: int
    edges: np.ndarray  # (E, 2) int32; empty in site mode
    indptr: np.ndarray  # CSR adjacency over vertices/sites
    indices: np.ndarray
    boundary: dict = field(default_factory=dict)
    center: int = -1

    def segment(self, label: str) -> np.ndarray:
        try:
            return self.boundary[label]
        except KeyError:
            raise KeyError(f"lattice {self.geometry!r} has no boundary segment {label!r}")

    def to_json(self) -> str:
        """Debug/test dump of the full geometry."""
        payload = {
            "mode": self.mode,
            "geometry": self.geometry,
            "num_vertices": self.num_vertices,
            "num_elements": self.num_elements,
            "boundary": {k: v.tolist() for k, v in self.boundary.items()},
        }
        if self.mode == "bond":
            payload["edges"] = self.edges.tolist()
        else:
            payload["neighbors"] = [
                self.indices[self.indptr[s]:self.indptr[s + 1]].tolist()
                for s in range(self.num_vertices)
            ]
        if self.center >= 0:
            payload["center"] = self.center
        return json.dumps(payload, sort_keys=True)


def _csr_from_edges(num_vertices: int, pairs: list[tuple[int, int]]):
    """Symmetric CSR adjacency from an undirected edge list."""
    deg = np.zeros(num_vertices + 1, dtype=np.int64)
    for a, b in pairs:
        deg[a + 1] += 1
        deg[b + 1] += 1
    indptr = np.cumsum(deg)
    indices = np.empty(indptr[-1], dtype=np.int32)
    fill = indptr[:-1].copy()
    for a, b in pairs:
        indices[fill[a]] = b
        fill[a] += 1
        indices[fill[b]] = a
        fill[b] += 1
    for s in range(num_vertices):
        indices[indptr[s]:indptr[s + 1]].sort()
    return indptr.astype(np.int64), indices


_EMPTY_EDGES = np.empty((0, 2), dtype=np.int32)
_EMPTY_I64 = np.zeros(1, dtype=np.int64)
_EMPTY_I32 = np.empty(0, dtype=np.int32)


def build_rectangle(n: int) -> Lattice:
    """Bond-mode square-lattice rectangle; vertex grid {0..n+1} x {0..n}.

    Left-right crossing "12" <-> "34" at p=1/2 has probability exactly 1/2
    by self-duality of this aspect ratio.
    """
    if n < 1:
        raise ValueError(f"rectangle requires n >= 1, got {n}")
    width, height = n + 2, n + 1  # vertices per row, number of rows

    def vid(x, y):
        return y * width + x

    num_vertices = width * height
    pairs = []
    # horizontal edges, by row
    for y in range(height):
        for x in range(width - 1):
            pairs.append((vid(x, y), vid(x + 1, y)))
    # vertical edges, by column
    for x in range(width):
        for y in range(height - 1):
            pairs.append((vid(x, y), vid(x, y + 1)))
    edges = np.array(pairs, dtype=np.int32)
    boundary = {
        "12": np.array([vid(0, y) for y in range(height)], dtype=np.int32),
        "34": np.array([vid(width - 1, y) for y in range(height)], dtype=np.int32),
        "14": np.array([vid(x, 0) for x in range(width)], dtype=np.int32),
        "23": np.array([vid(x, height - 1) for x in range(width)], dtype=np.int32),
    }
    return Lattice(
        mode="bond",
        geometry=f"rectangle({n})",
        num_vertices=num_vertices,
        num_elements=len(pairs),
        edges=edges,
        indptr=_EMPTY_I64,
        indices=_EMPTY_I32,
        boundary=boundary,
    )


_TRI_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


def build_rhombus(m: int) -> Lattice:
    """Site-mode m x m rhombus on the triangular lattice.

    Diagonal orientation (+1,-1)/(-1,+1) is the one for which, in every
    configuration, exactly one of {open "12"<->"34" crossing, closed
    "14"<->"23" crossing} holds (verified exhaustively in the test suite).
    """
    if m < 1:
        raise ValueError(f"rhombus requires m >= 1, got {m}")

    def sid(i, j):
        return i * m + j

    pairs = []
    for i in range(m):
        for j in range(m):
            for di, dj in _TRI_OFFSETS:
                ii, jj = i + di, j + dj
                if 0 <= ii < m and 0 <= jj < m and sid(ii, jj) > sid(i, j):
                    pairs.append((sid(i, j), sid(ii, jj)))
    indptr, indices = _csr_from_edges(m * m, pairs)
    boundary = {
        "12": np.array([sid(0, j) for j in range(m)], dtype=np.int32),
        "34": np.array([sid(m - 1, j) for j in range(m)], dtype=np.int32),
        "14": np.array([sid(i, 0) for i in range(m)], dtype=np.int32),
        "23": np.array([sid(i, m - 1) for i in range(m)], dtype=np.int32),
    }
    return Lattice(
        mode="site",
        geometry=f"rhombus({m})",
        num_vertices=m * m,
        num_elements=m * m,
        edges=_EMPTY_EDGES,
        indptr=indptr,
        indices=indices,
        boundary=boundary,
    )


def build_hexagon(l: int) -> Lattice:
    """Site-mode hexagon of side l on the triangular lattice (3l^2+3l+1 sites).

    Axial coordinates (q, r) with |q|, |r|, |q+r| <= l.  The six sides, in
    cyclic order, are q=l ("12"), q+r=l ("23"), r=l ("34"), q=-l ("45"),
    q+r=-l ("56"), r=-l ("61"); corner sites satisfy two of these and belong
    to both incident segments.  Segments "12", "34", "56" are alternating.
    """
    if l < 1:
        raise ValueError(f"hexagon requires l >= 1, got {l}")
    coords = []
    for q in range(-l, l + 1):
        for r in range(-l, l + 1):
            if abs(q + r) <= l:
                coords.append((q, r))
    index = {c: i for i, c in enumerate(coords)}
    num_sites = len(coords)
    pairs = []
    for (q, r), i in index.items():
        for dq, dr in _TRI_OFFSETS:
            nb = (q + dq, r + dr)
            j = index.get(nb)
            if j is not None and j > i:
                pairs.append((i, j))
    indptr, indices = _csr_from_edges(num_sites, pairs)

    sides = {
        "12": lambda q, r: q == l,
        "23": lambda q, r: q + r == l,
        "34": lambda q, r: r == l,
        "45": lambda q, r: q == -l,
        "56": lambda q, r: q + r == -l,
        "61": lambda q, r: r == -l,
    }
    boundary = {
        label: np.array(
            sorted(index[(q, r)] for (q, r) in coords if pred(q, r)), dtype=np.int32
        )
        for label, pred in sides.items()
    }
    return Lattice(
        mode="site",
        geometry=f"hexagon({l})",
        num_vertices=num_sites,
        num_elements=num_sites,
        edges=_EMPTY_EDGES,
        indptr=indptr,
        indices=indices,
        boundary=boundary,
        center=index[(0, 0)],
    )


def build_cubic(L: int, mode: str = "site") -> Lattice:
    """{0..L-1}^3 box with 6-neighbor adjacency, bond or site mode.

    Segment "shell" holds every boundary vertex; the distinguished center is
    the vertex at ((L-1)//2,)*3 for center <-> shell connectivity.
    """
    if L < 2:
        raise ValueError(f"cubic requires L >= 2, got {L}")
    if mode not in ("bond", "site"):
        raise ValueError(f"mode must be 'bond' or 'site', got {mode!r}")

    def vid(x, y, z):
        return (x * L + y) * L + z

    num_vertices = L ** 3
    pairs = []
    for x in range(L):
        for y in range(L):
            for z in range(L):
                if x + 1 < L:
                    pairs.append((vid(x, y, z), vid(x + 1, y, z)))
                if y + 1 < L:
                    pairs.append((vid(x, y, z), vid(x, y + 1, z)))
                if z + 1 < L:
                    pairs.append((vid(x, y, z), vid(x, y, z + 1)))
    shell = np.array(
        sorted(
            vid(x, y, z)
            for x in range(L)
            for y in range(L)
            for z in range(L)
            if 0 in (x, y, z) or L - 1 in (x, y, z)
        ),
        dtype=np.int32,
    )
    c = (L - 1) // 2
    center = vid(c, c, c)
    if mode == "bond":
        return Lattice(
            mode="bond",
            geometry=f"cubic({L})",
            num_vertices=num_vertices,
            num_elements=len(pairs),
            edges=np.array(pairs, dtype=np.int32),
            indptr=_EMPTY_I64,
            indices=_EMPTY_I32,
            boundary={"shell": shell},
            center=center,
        )
    indptr, indices = _csr_from_edges(num_vertices, pairs)
    return Lattice(
        mode="site",
        geometry=f"cubic({L})",
        num_vertices=num_vertices,
        num_elements=num_vertices,
        edges=_EMPTY_EDGES,
        indptr=indptr,
        indices=indices,
        boundary={"shell": shell},
        center=center,
    )


def build_triangular_box(L: int, mode: str = "site") -> Lattice:
    """L x L triangular-lattice box for center <-> shell sweeps.

    Site mode reuses the rhombus adjacency; bond mode places an element on
    each triangular-lattice edge of the same patch.  Segment "shell" is the
    set of boundary sites, the center is site ((L//2), (L//2)).
    """
    if L < 2:
        raise ValueError(f"triangular box requires L >= 2, got {L}")

    def sid(i, j):
        return i * L + j

    shell = np.array(
        sorted(
            sid(i, j)
            for i in range(L)
            for j in range(L)
            if i in (0, L - 1) or j in (0, L - 1)
        ),
        dtype=np.int32,
    )
    center = sid(L // 2, L // 2)
    base = build_rhombus(L)
    if mode == "site":
        boundary = dict(base.boundary)
        boundary["shell"] = shell
        return Lattice(
            mode="site",
            geometry=f"tri_box({L})",
            num_vertices=L * L,
            num_elements=L * L,
            edges=_EMPTY_EDGES,
            indptr=base.indptr,
            indices=base.indices,
            boundary=boundary,
            center=center,
        )
    if mode != "bond":
        raise ValueError(f"mode must be 'bond' or 'site', got {mode!r}")
    pairs = []
    for s in range(L * L):
        for t in base.indices[base.indptr[s]:base.indptr[s + 1]]:
            if t > s:
                pairs.append((s, int(t)))
    return Lattice(
        mode="bond",
        geometry=f"tri_box({L})",
        num_vertices=L * L,
        num_elements=len(pairs),
        edges=np.array(pairs, dtype=np.int32),
        indptr=_EMPTY_I64,
        indices=_EMPTY_I32,
        boundary={"shell": shell},
        center=center,
    )
