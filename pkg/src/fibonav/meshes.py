"""Geodesic hyperdome meshes on S3 and the 2D dome validation case.

The level-0 mesh is the braid-realized 600-cell itself.  Level 1 decorates
every tetrahedral cell with its corners, edge-third points (at one third of
the arc length from each endpoint) and the cell center; the cell template
partitions each decorated cell into 20 sub-tetrahedra, giving the level-1
complex whose own cells and edges feed level 2.  The Q meshes put one
generic point per fundamental-domain-like sub-tetrahedron: the orbit of the
orthoscheme centroid (level 0, one seed) or of the 20 sub-tetrahedron
centroids of the template-subdivided orthoscheme (level 1, twenty seeds).
Every materialized point carries a braid word assembled from a dictionary
core and the symmetry operation that reduces the point, with its error
recomputed from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fibonav import cell_template as ct
from fibonav.anyon import YTilde, braid_for_op
from fibonav.braids import Word, evaluate_padded, format_word, parse_word
from fibonav.navigator import Dictionary
from fibonav.quaternions import canonical_sign, distance, quat_normalize, random_unit, slerp


def combinatorics(level: int) -> dict[str, int]:
    """Vertex/edge/face/cell counts of the level-i hyperdome (exact ints)."""
    if level < 0:
        raise ValueError("level must be >= 0")
    v, e, f, c = 120, 720, 1200, 600
    for _ in range(level):
        v2 = v + c + 2 * e
        c2 = 20 * c
        f2 = 2 * c2
        e2 = v2 + f2 - c2
        v, e, f, c = v2, e2, f2, c2
    return {"V": v, "E": e, "F": f, "C": c}


def q_count(level: int) -> int:
    """Number of Q-mesh sites at a level: one per orthoscheme-like cell."""
    return 24 * combinatorics(level)["C"]


# -- 2D geodesic dome ------------------------------------------------------------


def dome2d() -> dict:
    """92-vertex geodesic dome from three seeds in one icosahedral wedge.

    Returns the point set and the orbit sizes of the three seed classes:
    a vertex (12 images), a face center (20) and a one-third edge point (60).
    """
    from fibonav.symmetry import PHI, closure, standard_generators

    y = closure(standard_generators("Y"))
    # five-fold axes: imaginary parts of the order-10 elements
    caps = y[np.abs(y[:, 0] - PHI / 2.0) < 1e-9]
    verts = caps[:, 1:] / np.linalg.norm(caps[:, 1:], axis=1, keepdims=True)
    assert len(verts) == 12

    # rotations v -> q v conj(q) realized as 3x3 matrices, plus the inversion
    mats = []
    for q in y:
        w, x, yy, z = q
        r = np.array(
            [
                [1 - 2 * (yy * yy + z * z), 2 * (x * yy - w * z), 2 * (x * z + w * yy)],
                [2 * (x * yy + w * z), 1 - 2 * (x * x + z * z), 2 * (yy * z - w * x)],
                [2 * (x * z - w * yy), 2 * (yy * z + w * x), 1 - 2 * (x * x + yy * yy)],
            ]
        )
        mats.append(r)
    mats = np.unique(np.round(np.array(mats), 12), axis=0)
    assert len(mats) == 60
    group = np.concatenate([mats, -mats])

    def orbit(p):
        img = group @ p
        _, keep = np.unique(np.round(img, 9), axis=0, return_index=True)
        return img[np.sort(keep)]

    d = verts @ verts.T
    cosedge = np.max(d[~np.eye(12, dtype=bool)])
    adj = (np.abs(d - cosedge) < 1e-9)
    a = 0
    b = int(np.flatnonzero(adj[a])[0])
    c = int(np.flatnonzero(adj[a] & adj[b])[0])
    seed_v = verts[a]
    seed_f = (verts[a] + verts[b] + verts[c])
    seed_f = seed_f / np.linalg.norm(seed_f)
    ang = np.arccos(np.clip(verts[a] @ verts[b], -1, 1))
    seed_d = (np.sin(2 * ang / 3) * verts[a] + np.sin(ang / 3) * verts[b]) / np.sin(ang)

    orb_v, orb_f, orb_d = orbit(seed_v), orbit(seed_f), orbit(seed_d)
    points = np.concatenate([orb_v, orb_f, orb_d])
    return {
        "points": points,
        "orbit_sizes": (len(orb_v), len(orb_f), len(orb_d)),
    }


# -- meshes -----------------------------------------------------------------------


#: per-seed braid error budget; measured values are reported on the mesh.
SEED_ERR_BUDGET = 5e-3


class SeedBudgetError(RuntimeError):
    """No braid within the error budget was found for some seed class."""


@dataclass
class Seed:
    point: np.ndarray
    word: Word
    err: float


@dataclass
class Mesh:
    """Leveled point set with braid words and recomputed errors."""

    kind: str  # "P" or "Q"
    level: int
    points: np.ndarray  # (n, 4) exact geometric positions
    codes: np.ndarray  # (n, L) int8 braid letters, zero padded
    lengths: np.ndarray  # (n,)
    errs: np.ndarray  # (n,) distance(evaluate(braid), point)
    seeds: list[Seed]

    def __len__(self) -> int:
        return len(self.points)

    def word(self, i: int) -> Word:
        return tuple(int(x) for x in self.codes[i, : self.lengths[i]])

    @property
    def words(self):
        return _WordView(self)

    @property
    def max_err(self) -> float:
        return float(np.max(self.errs))


class _WordView:
    def __init__(self, mesh: Mesh):
        self._mesh = mesh

    def __getitem__(self, i: int) -> Word:
        return self._mesh.word(int(i))

    def __len__(self) -> int:
        return len(self._mesh)


def _pack_words(words: list[Word]) -> tuple[np.ndarray, np.ndarray]:
    maxlen = max((len(w) for w in words), default=0)
    codes = np.zeros((len(words), maxlen), dtype=np.int8)
    lengths = np.empty(len(words), dtype=np.int32)
    for i, w in enumerate(words):
        codes[i, : len(w)] = w
        lengths[i] = len(w)
    return codes, lengths


def _braids_from_dictionary(group, dictionary: Dictionary, points: np.ndarray):
    """Assemble a braid for every point via its reduction and a nearby core.

    Points are reduced; each distinct reduced representative (a seed class)
    is matched to its nearest dictionary core, and each point's word splices
    that core into the operation returned by its own reduction composed with
    the inverse of the core's.  Returns (codes, lengths, seed list).
    """
    yt = dictionary.ytilde
    op, q0 = group.reduce(points)
    keys = [k.tobytes() for k in np.round(q0 / 1e-9).astype(np.int64)]
    classes: dict = {}
    for i, k in enumerate(keys):
        classes.setdefault(k, []).append(i)

    ycodes = [np.asarray(w, dtype=np.int8) for w in yt.words]
    maxw = max((len(c) for c in ycodes), default=0)
    width = 2 * maxw + dictionary.max_core_len
    codes = np.zeros((len(points), width), dtype=np.int8)
    lengths = np.empty(len(points), dtype=np.int32)
    seeds: list[Seed] = []

    def assemble(row, l, r, conj, core):
        body = core[::-1] * np.int8(-1) if conj else core
        n = 0
        for part in (ycodes[r], body, ycodes[l]):
            codes[row, n : n + len(part)] = part
            n += len(part)
        lengths[row] = n

    for members in classes.values():
        rep = members[0]
        d = distance(dictionary.q0, q0[rep])
        e = int(np.argmin(d))
        core = dictionary.codes[e, : dictionary.lengths[e]]
        op_e_inv = group.inverse_op(dictionary.op(e))
        m = np.asarray(members)
        cl, cr, cc = group.compose((op[0][m], op[1][m], op[2][m]), op_e_inv)
        for k, i in enumerate(members):
            assemble(i, int(cl[k]), int(cr[k]), bool(cc[k]), core)
        # the seed's own word: the core un-reduced through the seed's reduction
        sl, sr, sc = group.compose(group.reduce(q0[rep])[0], op_e_inv)
        seed_word = braid_for_op(
            yt, (int(sl), int(sr), bool(sc)), tuple(int(x) for x in core)
        )
        seeds.append(Seed(point=q0[rep].copy(), word=seed_word, err=float("nan")))
    return codes, lengths, seeds


def _finish_mesh(kind, level, points, codes, lengths, seeds, budget=SEED_ERR_BUDGET) -> Mesh:
    vals = evaluate_padded(codes)
    errs = distance(vals, points)
    for s in seeds:
        v = evaluate_padded(_pack_words([s.word])[0])[0]
        s.err = float(distance(v, s.point))
    over = [s for s in seeds if s.err > budget]
    if over:
        detail = "; ".join(f"{s.point} err {s.err:.3e}" for s in over[:5])
        raise SeedBudgetError(
            f"{len(over)} seed braid(s) exceed the {budget:g} budget "
            f"(use a deeper dictionary): {detail}"
        )
    return Mesh(
        kind=kind,
        level=level,
        points=points,
        codes=codes,
        lengths=lengths,
        errs=errs,
        seeds=seeds,
    )


def _orbit_points(group, seed) -> np.ndarray:
    img = group.apply_all_ops(seed)
    _, keep = np.unique(np.round(img, 9), axis=0, return_index=True)
    return img[np.sort(keep)]


class Level1Complex:
    """Vertices, 12000 cells and 14160 edges of the level-1 hyperdome."""

    def __init__(self, group):
        self.group = group
        template = ct.derive_cell_template()
        cells600 = group.combinatorics()["cells"]
        registry: dict = {}
        points: list[np.ndarray] = []

        def vid(p: np.ndarray) -> int:
            k = np.round(p / 1e-9).astype(np.int64).tobytes()
            i = registry.get(k)
            if i is None:
                i = len(points)
                registry[k] = i
                points.append(p)
            return i

        cells = []
        edges = set()
        for cell in cells600:
            corners = sorted(cell)  # global element order fixes the labeling
            pos = {i: group.elements[corners[i]] for i in range(4)}
            local = {}
            for i in range(4):
                local[i] = vid(pos[i])
            for (i, j), tid in ct.THIRD_IDS.items():
                local[tid] = vid(slerp(pos[i], pos[j], 1.0 / 3.0))
            local[ct.CENTER_ID] = vid(quat_normalize(sum(pos.values())))
            for tet in template.tets:
                g = tuple(sorted(local[v] for v in tet))
                cells.append(g)
                for a in range(4):
                    for b in range(a + 1, 4):
                        edges.add((g[a], g[b]))

        self.points = np.array(points)
        self.cells = sorted(set(cells))
        self.edges = sorted(edges)
        if len(self.cells) != len(cells):
            raise RuntimeError("level-1 cells are not distinct across the mesh")


def build_p(level: int, ytilde: YTilde, dictionary: Dictionary | None = None) -> Mesh:
    """P-mesh of a level; levels >= 1 need a dictionary for seed braids."""
    group = ytilde.group
    if level == 0:
        codes, lengths = _pack_words(ytilde.words)
        return _finish_mesh(
            "P",
            0,
            group.elements.copy(),
            codes,
            lengths,
            [Seed(point=np.array([1.0, 0, 0, 0]), word=(), err=0.0)],
        )
    if dictionary is None:
        raise ValueError("levels >= 1 need a dictionary for seed braids")
    if level == 1:
        o = group.orthoscheme()
        v0, a, _, _ = group.reference_cell()
        third = slerp(group.elements[v0], group.elements[a], 1.0 / 3.0)
        parts = [
            group.elements.copy(),
            _orbit_points(group, o.vertices[3]),
            _orbit_points(group, third),
        ]
        points = np.concatenate(parts)
    elif level == 2:
        cx = Level1Complex(group)
        centers = quat_normalize(
            sum(cx.points[np.array([c[k] for c in cx.cells])] for k in range(4))
        )
        e = np.array(cx.edges)
        pa, pb = cx.points[e[:, 0]], cx.points[e[:, 1]]
        thirds = np.concatenate([slerp(pa, pb, 1.0 / 3.0), slerp(pa, pb, 2.0 / 3.0)])
        points = np.concatenate([cx.points, centers, thirds])
    else:
        raise ValueError("P meshes are materialized for levels 0..2 only")

    uniq = np.unique(np.round(points, 9), axis=0)
    if len(uniq) != len(points):
        raise RuntimeError(f"P{level} points collide: {len(uniq)} of {len(points)}")
    codes, lengths, seeds = _braids_from_dictionary(group, dictionary, points)
    return _finish_mesh("P", level, points, codes, lengths, seeds)


def q_seeds(group, level: int) -> np.ndarray:
    """Seed points of the Q mesh inside the orthoscheme.

    Level 0 uses the normalized orthoscheme centroid; level 1 the normalized
    centroids of the 20 template sub-tetrahedra of the orthoscheme itself.
    """
    o = group.orthoscheme()
    if level == 0:
        return quat_normalize(o.vertices.mean(axis=0))[None]
    if level == 1:
        template = ct.derive_cell_template()
        local = quat_normalize(ct.BARYCENTRIC @ o.vertices)
        seeds = [quat_normalize(local[list(t)].mean(axis=0)) for t in template.tets]
        return np.array(seeds)
    raise ValueError("Q meshes are materialized for levels 0..1 only")


def build_q(level: int, ytilde: YTilde, dictionary: Dictionary) -> Mesh:
    """Q-mesh of a level: full symmetry orbit of the generic seed points."""
    group = ytilde.group
    o = group.orthoscheme()
    seeds = q_seeds(group, level)
    if not np.all(o.contains(seeds)):
        raise RuntimeError("Q seed fell outside the orthoscheme")
    orbits = [_orbit_points(group, s) for s in seeds]
    for orb in orbits:
        if len(orb) != group.n_ops:
            raise RuntimeError(f"Q seed is not generic: orbit size {len(orb)}")
    points = np.concatenate(orbits)
    codes, lengths, seed_list = _braids_from_dictionary(group, dictionary, points)
    if len(seed_list) != len(seeds):
        raise RuntimeError(
            f"expected {len(seeds)} seed classes, found {len(seed_list)}"
        )
    return _finish_mesh("Q", level, points, codes, lengths, seed_list)


def covering_radius(points: np.ndarray, samples: int = 2000, seed: int = 7) -> float:
    """Monte-Carlo covering radius of S3 by the point set (fixed seed)."""
    rng = np.random.default_rng(seed)
    probes = random_unit(rng, samples)
    worst = 0.0
    chunk = max(1, 8_000_000 // max(len(points), 1))
    for lo in range(0, samples, chunk):
        dots = np.abs(probes[lo : lo + chunk] @ points.T)
        nearest = np.minimum(dots.max(axis=1), 1.0)
        worst = max(worst, float(np.max(np.sqrt(np.maximum(0.0, 2.0 - 2.0 * nearest)))))
    return worst


# -- persistence ------------------------------------------------------------------


def save_mesh(mesh: Mesh, path) -> None:
    """Write `mesh <kind> <level> <count>` plus per-point CSV rows.

    Rows are (w, x, y, z, braid text, err) at 17 significant digits, sorted
    by the canonical quaternion key (canonical-sign components, then raw).
    """
    canon = canonical_sign(mesh.points)
    order = np.lexsort(np.concatenate([canon, mesh.points], axis=1).T[::-1])
    with open(path, "w") as fh:
        fh.write(f"mesh {mesh.kind} {mesh.level} {len(mesh)}\n")
        for i in order.tolist():
            fh.write(
                ",".join(f"{x:.17g}" for x in mesh.points[i])
                + f",{format_word(mesh.word(i))},{mesh.errs[i]:.17g}\n"
            )


def load_mesh(path) -> Mesh:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != "mesh":
            raise ValueError(f"not a mesh file: {path}")
        kind, level, count = header[1], int(header[2]), int(header[3])
        points = []
        words = []
        errs = []
        for line in fh:
            parts = line.rstrip("\n").split(",")
            points.append([float(x) for x in parts[:4]])
            words.append(parse_word(parts[4]))
            errs.append(float(parts[5]))
    if len(points) != count:
        raise ValueError(f"expected {count} rows, found {len(points)}")
    codes, lengths = _pack_words(words)
    return Mesh(
        kind=kind,
        level=level,
        points=np.array(points),
        codes=codes,
        lengths=lengths,
        errs=np.array(errs),
        seeds=[],
    )
