"""Subdivision template for one tetrahedral cell: 17 vertices, 20 sub-tets.

Decorating a tetrahedron with its 4 corners, 12 edge-third points and the
cell center supports a partition into exactly 20 smaller tetrahedra whose
boundary restriction triangulates each face into 7 triangles (3 corner
triangles plus a 4-triangle fan over the central hexagon) and which uses
26 interior faces and 8 interior edges.  Those counts are forced by the
level-to-level vertex/cell bookkeeping of the iterated meshes, and the
partition is found here by exact-cover search over candidate tetrahedra
with integer coordinates, so volume bookkeeping is exact.

Local vertex ids: corners 0..3, edge thirds 4..15 (THIRD_IDS[(i, j)] is the
point at one third from corner i toward corner j), center 16.  Anchoring
every face's hexagon fan at the third-point leading from the face's
smallest corner toward its second smallest makes the local pattern
identical for every cell once corners are sorted by global id, while the
two cells sharing a face still derive the same triangulation.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

CORNERS = ((3, 3, 3), (3, -3, -3), (-3, 3, -3), (-3, -3, 3))
THIRD_IDS: dict[tuple[int, int], int] = {}
_verts = [np.array(c, dtype=np.int64) for c in CORNERS]
for _i, _j in itertools.permutations(range(4), 2):
    THIRD_IDS[(_i, _j)] = len(_verts)
    _verts.append((2 * np.array(CORNERS[_i]) + np.array(CORNERS[_j])) // 3)
CENTER_ID = len(_verts)
_verts.append(np.zeros(3, dtype=np.int64))
VERTS = np.array(_verts, dtype=np.int64)
N_VERTS = len(VERTS)  # 17

FACES = tuple(itertools.combinations(range(4), 3))

#: barycentric weights of each local vertex over the 4 corners.
BARYCENTRIC = np.zeros((N_VERTS, 4))
for _i in range(4):
    BARYCENTRIC[_i, _i] = 1.0
for (_i, _j), _id in THIRD_IDS.items():
    BARYCENTRIC[_id, _i] = 2.0 / 3.0
    BARYCENTRIC[_id, _j] = 1.0 / 3.0
BARYCENTRIC[CENTER_ID] = 0.25


def _det3(a, b, c) -> int:
    return int(
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def _vol6(t) -> int:
    a, b, c, d = (VERTS[i] for i in t)
    return _det3(b - a, c - a, d - a)


TOTAL_VOL6 = abs(_vol6((0, 1, 2, 3)))


def hexagon_ring(face) -> list[int]:
    """Hexagon vertex ids of a face, in traversal order around the face."""
    f = list(face)
    ring = []
    for k in range(3):
        a, b = f[k], f[(k + 1) % 3]
        ring.append(THIRD_IDS[(a, b)])
        ring.append(THIRD_IDS[(b, a)])
    return ring


def canonical_anchors() -> dict[tuple[int, int, int], int]:
    """Fan anchor per face: third-point from smallest corner toward second."""
    return {f: THIRD_IDS[(f[0], f[1])] for f in FACES}


def face_triangulation(face, anchor: int) -> list[tuple[int, int, int]]:
    """The 7 boundary triangles of a face: 3 corner cuts plus the fan."""
    f = list(face)
    tris = []
    for c in f:
        o = [x for x in f if x != c]
        tris.append(tuple(sorted((c, THIRD_IDS[(c, o[0])], THIRD_IDS[(c, o[1])]))))
    ring = hexagon_ring(face)
    k0 = ring.index(anchor)
    r = ring[k0:] + ring[:k0]
    for k in range(1, 5):
        tris.append(tuple(sorted((r[0], r[k], r[k + 1]))))
    return tris


# -- candidate tetrahedra ------------------------------------------------------

_PLANES = []
for _face in FACES:
    _a, _b, _c = (VERTS[i] for i in _face)
    _n = np.cross(_b - _a, _c - _a)
    _PLANES.append((_n, int(_n @ _a)))


def _on_boundary_plane(vids) -> bool:
    return any(all(int(n @ VERTS[v]) == k for v in vids) for n, k in _PLANES)


def _contains_other_vertex(t) -> bool:
    base = _vol6(t)
    s = 1 if base > 0 else -1
    a, b, c, d = t
    orients = ((a, b, c, d), (a, b, d, c), (a, c, d, b), (b, c, d, a))
    for v in range(N_VERTS):
        if v in t:
            continue
        inside = True
        for p, q, r, w in orients:
            sg = s * _det3(VERTS[q] - VERTS[p], VERTS[r] - VERTS[p], VERTS[w] - VERTS[p])
            sv = s * _det3(VERTS[q] - VERTS[p], VERTS[r] - VERTS[p], VERTS[v] - VERTS[p])
            if (sg > 0 > sv) or (sg < 0 < sv):
                inside = False
                break
        if inside:
            return True
    return False


def _candidate_pool():
    """All empty tetrahedra with their in-plane faces/edges precomputed."""
    pool = []
    for t in itertools.combinations(range(N_VERTS), 4):
        if _vol6(t) == 0 or _contains_other_vertex(t):
            continue
        ipf = [f for f in itertools.combinations(t, 3) if _on_boundary_plane(f)]
        ipe = [e for e in itertools.combinations(t, 2) if _on_boundary_plane(e)]
        faces = [tuple(sorted(f)) for f in itertools.combinations(t, 3)]
        pool.append((t, tuple(ipf), tuple(ipe), abs(_vol6(t)), tuple(faces)))
    return pool


_POOL = None


def _pool():
    global _POOL
    if _POOL is None:
        _POOL = _candidate_pool()
    return _POOL


@dataclass(frozen=True)
class CellTemplate:
    """A validated 20-tetrahedron partition of the decorated cell."""

    anchors: tuple[int, int, int, int]  # fan anchor per face, in FACES order
    tets: tuple[tuple[int, int, int, int], ...]
    boundary_triangles: tuple[tuple[int, int, int], ...]
    interior_faces: tuple[tuple[int, int, int], ...]
    interior_edges: tuple[tuple[int, int], ...]

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        es = set()
        for t in self.tets:
            es.update(itertools.combinations(t, 2))
        return tuple(sorted(es))

    def face_fans(self) -> dict[tuple[int, int, int], list[tuple[int, int, int]]]:
        return {
            f: face_triangulation(f, a) for f, a in zip(FACES, self.anchors)
        }


def solve_pattern(anchors, deadline: float = 30.0):
    """Exact-cover search for a 20-tet partition under the given fan anchors.

    ``anchors`` maps each face (or lists, in FACES order) to the hexagon
    vertex anchoring its fan.  Returns a CellTemplate or None.  The search
    is deterministic: branches explore candidate tetrahedra in sorted order
    on the face with the fewest remaining candidates.
    """
    if not isinstance(anchors, dict):
        anchors = dict(zip(FACES, anchors))
    bset: set = set()
    for face in FACES:
        bset.update(face_triangulation(face, anchors[face]))
    bedges = set()
    for tr in bset:
        bedges.update(itertools.combinations(tr, 2))

    cands = []
    cand_faces = {}
    cand_vol = {}
    for t, ipf, ipe, v6, faces in _pool():
        if all(tuple(sorted(f)) in bset for f in ipf) and all(e in bedges for e in ipe):
            cands.append(t)
            cand_faces[t] = faces
            cand_vol[t] = v6
    by_face: dict = {}
    for t in cands:
        for f in cand_faces[t]:
            by_face.setdefault(f, []).append(t)

    t0 = time.time()
    best: list = [None]
    face_count: dict = {}
    used: set = set()

    def available(t) -> bool:
        if t in used:
            return False
        for g in cand_faces[t]:
            cnt = face_count.get(g, 0)
            if (g in bset and cnt >= 1) or (g not in bset and cnt >= 2):
                return False
        return True

    def search(open_faces, chosen, vol_acc):
        if best[0] is not None or time.time() - t0 > deadline:
            return
        if not open_faces:
            if (
                vol_acc == TOTAL_VOL6
                and len(chosen) == 20
                and any(CENTER_ID in t for t in chosen)
            ):
                best[0] = list(chosen)
            return
        if len(chosen) >= 20:
            return
        cand_list = None
        for g in open_faces:
            al = [t for t in by_face.get(g, []) if available(t)]
            if cand_list is None or len(al) < len(cand_list):
                cand_list = al
                if len(al) <= 1:
                    break
        for t in sorted(cand_list):
            if vol_acc + cand_vol[t] > TOTAL_VOL6:
                continue
            used.add(t)
            chosen.append(t)
            opens2 = set(open_faces)
            for g in cand_faces[t]:
                face_count[g] = face_count.get(g, 0) + 1
                if g in bset:
                    opens2.discard(g)
                elif face_count[g] == 1:
                    opens2.add(g)
                else:
                    opens2.discard(g)
            search(opens2, chosen, vol_acc + cand_vol[t])
            for g in cand_faces[t]:
                face_count[g] -= 1
            used.discard(t)
            chosen.pop()
            if best[0] is not None:
                return

    search(set(bset), [], 0)
    if best[0] is None:
        return None

    tets = tuple(sorted(tuple(t) for t in best[0]))
    count: dict = {}
    for t in tets:
        for f in itertools.combinations(t, 3):
            count[f] = count.get(f, 0) + 1
    interior_faces = tuple(sorted(f for f, c in count.items() if f not in bset))
    edges = set()
    for t in tets:
        edges.update(itertools.combinations(t, 2))
    interior_edges = tuple(sorted(e for e in edges if e not in bedges))
    return CellTemplate(
        anchors=tuple(anchors[f] for f in FACES),
        tets=tets,
        boundary_triangles=tuple(sorted(bset)),
        interior_faces=interior_faces,
        interior_edges=interior_edges,
    )


def validate(template: CellTemplate) -> None:
    """Check the derived constraint set; raises AssertionError on failure."""
    assert len(template.tets) == 20, f"{len(template.tets)} sub-tets"
    assert len(template.boundary_triangles) == 28
    assert len(template.interior_faces) == 26, f"{len(template.interior_faces)} interior faces"
    assert len(template.interior_edges) == 8, f"{len(template.interior_edges)} interior edges"
    vol = sum(abs(_vol6(t)) for t in template.tets)
    assert vol == TOTAL_VOL6, f"volume {vol} != {TOTAL_VOL6}"
    count: dict = {}
    for t in template.tets:
        for f in itertools.combinations(t, 3):
            count[f] = count.get(f, 0) + 1
    bset = set(template.boundary_triangles)
    for f, c in count.items():
        expected = 1 if f in bset else 2
        assert c == expected, f"face {f} used {c} times"
    assert any(CENTER_ID in t for t in template.tets)


_TEMPLATE: CellTemplate | None = None


def derive_cell_template() -> CellTemplate:
    """The canonical validated template (memoized; search runs once)."""
    global _TEMPLATE
    if _TEMPLATE is None:
        anchors = canonical_anchors()
        template = solve_pattern(anchors)
        if template is None:
            raise RuntimeError(
                "no 20-tetrahedron partition satisfies the derived constraints"
            )
        validate(template)
        _TEMPLATE = template
    return _TEMPLATE
