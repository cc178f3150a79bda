import itertools

import numpy as np
import pytest

from fibonav import cell_template as ct


@pytest.fixture(scope="module")
def template():
    return ct.derive_cell_template()


def test_counts(template):
    assert len(template.tets) == 20
    assert len(template.boundary_triangles) == 28
    assert len(template.interior_faces) == 26
    assert len(template.interior_edges) == 8


def test_validate_passes(template):
    ct.validate(template)


def test_volume_partition_exact(template):
    total = sum(abs(ct._vol6(t)) for t in template.tets)
    assert total == ct.TOTAL_VOL6  # integer arithmetic: exactly zero residual


def test_seven_triangles_per_face(template):
    fans = template.face_fans()
    for face, tris in fans.items():
        assert len(tris) == 7
        used = set(v for tr in tris for v in tr)
        # a face uses its 3 corners and the 6 thirds of its own edges
        assert len(used) == 9


def test_faces_matched_pairwise(template):
    count = {}
    for t in template.tets:
        for f in itertools.combinations(t, 3):
            count[f] = count.get(f, 0) + 1
    b = set(template.boundary_triangles)
    for f, c in count.items():
        assert c == (1 if f in b else 2)


def test_center_vertex_used(template):
    assert any(ct.CENTER_ID in t for t in template.tets)


def test_every_vertex_used(template):
    used = set(v for t in template.tets for v in t)
    assert used == set(range(ct.N_VERTS))


def test_global_bookkeeping():
    # face slots: 600 cells x 26 interior + 1200 faces x 7 shared triangles
    assert 600 * 26 + 1200 * 7 == 24000
    # edges: 3 per old edge, 6 inside each old face, 8 inside each cell
    assert 3 * 720 + 6 * 1200 + 8 * 600 == 14160


def test_partition_covers_points_once(template):
    rng = np.random.default_rng(3)
    verts = ct.VERTS.astype(float)
    corners = verts[:4]

    def inside(t, p):
        a, b, c, d = (verts[i] for i in t)
        m = np.array([b - a, c - a, d - a]).T
        try:
            lam = np.linalg.solve(m, p - a)
        except np.linalg.LinAlgError:
            return False
        return bool(np.all(lam >= -1e-9) and lam.sum() <= 1 + 1e-9)

    for _ in range(200):
        w = rng.dirichlet(np.ones(4))
        p = w @ corners
        hits = sum(1 for t in template.tets if inside(t, p))
        assert hits >= 1
        # interior points (away from internal faces) are covered exactly once
        if hits > 1:
            margins = []
            for t in template.tets:
                a, b, c, d = (verts[i] for i in t)
                m = np.array([b - a, c - a, d - a]).T
                lam = np.linalg.solve(m, p - a)
                margins.append(min(lam.min(), 1 - lam.sum()))
            assert max(margins) < 1e-6  # only boundary-of-subtet points double count


def test_other_anchor_patterns_solve():
    rings = {f: ct.hexagon_ring(f) for f in ct.FACES}
    # a couple of non-canonical but solvable patterns
    for shift in (1, 3):
        anchors = {f: rings[f][shift] for f in ct.FACES}
        tpl = ct.solve_pattern(anchors)
        assert tpl is not None
        ct.validate(tpl)


def test_unsolvable_pattern_returns_none():
    # anchoring by these hexagon vertices admits no 20-tet completion
    anchors = dict(zip(ct.FACES, (5, 6, 13, 15)))
    assert ct.solve_pattern(anchors) is None
