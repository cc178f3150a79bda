"""Binary polyhedral groups, the 600-cell symmetry group, and its orthoscheme.

The binary tetrahedral, octahedral and icosahedral groups are produced by
breadth-first closure of quaternion generator pairs.  From any icosahedral
120-element set Y this module builds the full 14400-element symmetry group
G of the corresponding 600-cell: 7200 direct operations q -> l q r with
(l, r) in Y x Y modulo (l, r) ~ (-l, -r), plus 7200 indirect operations
q -> l conj(q) r.  A tetrahedral orthoscheme (vertex, mid-edge, face center,
cell center) serves as the fundamental domain, and points are reduced into
it with a two-stage search: nearest vertex first (120 dot products), then
one of the 120 vertex-stabilizer images (membership tests), instead of a
scan over all 14400 operations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from fibonav.quaternions import (
    CONJ_MATRIX,
    ONE,
    canonical_sign,
    inner,
    left_mul_matrix,
    quat_conj,
    quat_mul,
    quat_normalize,
    right_mul_matrix,
)

PHI = (np.sqrt(5.0) + 1.0) / 2.0
TAU = (np.sqrt(5.0) - 1.0) / 2.0

#: dedup tolerance for group elements and orbit points.
DEDUP_TOL = 1e-9
#: membership slack for the orthoscheme facet tests.
MEMBERSHIP_TOL = 1e-10


def standard_generators(name: str) -> tuple[np.ndarray, np.ndarray]:
    """Quaternion generator pair (s, t) of the binary group T, O or Y."""
    s = np.array([1.0, 1.0, 1.0, 1.0]) / 2.0
    if name == "T":
        t = np.array([1.0, 1.0, 1.0, -1.0]) / 2.0
    elif name == "O":
        t = np.array([1.0, 1.0, 0.0, 0.0]) / np.sqrt(2.0)
    elif name == "Y":
        t = np.array([1.0 / TAU, TAU, 1.0, 0.0]) / 2.0
    else:
        raise ValueError(f"unknown group {name!r}; expected 'T', 'O' or 'Y'")
    return s, t


def closure(generators, cap: int = 200) -> np.ndarray:
    """Breadth-first multiplicative closure of unit quaternion generators.

    Elements closer than DEDUP_TOL are identified.  Raises RuntimeError when
    more than ``cap`` elements appear (not a finite group at this tolerance).
    """
    gens = [quat_normalize(np.asarray(g, dtype=float)) for g in generators]
    elements = [ONE.copy()]
    frontier = [ONE.copy()]
    while frontier:
        fresh = []
        for e in frontier:
            for g in gens:
                p = quat_normalize(quat_mul(e, g))
                arr = np.array(elements + fresh)
                if np.min(np.linalg.norm(arr - p, axis=1)) > DEDUP_TOL:
                    fresh.append(p)
                    if len(elements) + len(fresh) > cap:
                        raise RuntimeError(
                            f"closure exceeded {cap} elements; "
                            "not a finite group at this tolerance"
                        )
        elements.extend(fresh)
        frontier = fresh
    return np.array(sorted(elements, key=tuple))


def presentation_residual(s, t, n: int) -> float:
    """Max deviation of s**3, t**n and (s t)**2 from -1."""

    def power(q, k):
        out = ONE
        for _ in range(k):
            out = quat_mul(out, q)
        return out

    minus_one = -ONE
    devs = [
        np.max(np.abs(power(s, 3) - minus_one)),
        np.max(np.abs(power(t, n) - minus_one)),
        np.max(np.abs(power(quat_mul(s, t), 2) - minus_one)),
    ]
    return float(max(devs))


def _cross4(u, v, w):
    """Generalized cross product: 4-vector orthogonal to u, v and w."""
    m = np.array([u, v, w], dtype=float)
    n = np.empty(4)
    cols = [0, 1, 2, 3]
    sign = 1.0
    for k in range(4):
        sub = m[:, [c for c in cols if c != k]]
        n[k] = sign * np.linalg.det(sub)
        sign = -sign
    return n


@dataclass(frozen=True)
class Orthoscheme:
    """Spherical-tetrahedron fundamental domain with a membership test.

    ``vertices`` rows are V (a group element), E (mid-edge), F (face center)
    and C (cell center), all normalized to S3.  ``normals`` are inward unit
    normals of the four facet hyperplanes through the origin.
    """

    vertices: np.ndarray
    normals: np.ndarray

    def contains(self, q, tol: float = MEMBERSHIP_TOL):
        """Boundary-inclusive membership of point(s) on S3."""
        q = np.asarray(q, dtype=float)
        return np.all(q @ self.normals.T >= -tol, axis=-1)

    @property
    def interior_point(self) -> np.ndarray:
        return quat_normalize(self.vertices.sum(axis=0))


class SymmetryGroup:
    """Full symmetry group of the 600-cell spanned by a 120-element set Y.

    Operations are labelled (l_index, r_index, conjugate) with l restricted
    to the 60 canonical-sign elements, which quotients out the central
    identification (l, r) ~ (-l, -r).  Tables for products, inverses and
    negations let operations compose by integer lookups.
    """

    def __init__(self, elements: np.ndarray):
        elements = np.asarray(elements, dtype=float)
        if elements.shape != (120, 4):
            raise ValueError(f"expected 120 elements, got {elements.shape}")
        order = np.lexsort(elements.T[::-1])
        self.elements = elements[order]

        e = self.elements
        self.identity_index = int(np.argmin(np.linalg.norm(e - ONE, axis=1)))
        self.neg_index = self._match(-e)
        self.inv_index = self._match(quat_conj(e))
        # mul_table[i, j] = index of elements[i] * elements[j]
        prod = quat_mul(e[:, None, :], e[None, :, :])
        self.mul_table = self._match(prod.reshape(-1, 4)).reshape(120, 120)

        canonical = canonical_sign(e)
        is_canon = np.linalg.norm(canonical - e, axis=1) < 1e-12
        self.canonical_indices = np.flatnonzero(is_canon)  # 60 entries
        if len(self.canonical_indices) != 60:
            raise ValueError("element set is not closed under negation")
        self.canonical_pos = np.full(120, -1, dtype=np.int64)
        self.canonical_pos[self.canonical_indices] = np.arange(60)

        self._orthoscheme: Orthoscheme | None = None
        self._stabilizer_cache: tuple | None = None

    # -- element bookkeeping -------------------------------------------------

    def _match(self, quats) -> np.ndarray:
        """Indices of the nearest group elements (must be within DEDUP_TOL)."""
        quats = np.atleast_2d(np.asarray(quats, dtype=float))
        idx = np.empty(len(quats), dtype=np.int64)
        chunk = 65536
        for lo in range(0, len(quats), chunk):
            d = np.linalg.norm(quats[lo : lo + chunk, None, :] - self.elements[None], axis=2)
            idx[lo : lo + chunk] = np.argmin(d, axis=1)
            if np.max(np.min(d, axis=1)) > DEDUP_TOL:
                raise ValueError("quaternion does not belong to the group")
        return idx

    def element_index(self, q) -> int:
        return int(self._match(np.asarray(q, dtype=float)[None])[0])

    # -- operations ----------------------------------------------------------

    def canonicalize_op(self, l, r, conj):
        """Map (l, r, c) to the representative with canonical-sign l."""
        l = np.asarray(l, dtype=np.int64)
        r = np.asarray(r, dtype=np.int64)
        flip = self.canonical_pos[l] < 0
        l = np.where(flip, self.neg_index[l], l)
        r = np.where(flip, self.neg_index[r], r)
        return l, r, np.asarray(conj, dtype=bool)

    def op_id(self, l, r, conj):
        """Canonical enumeration id in [0, 14400): (conj, l-class, r)."""
        l, r, conj = self.canonicalize_op(l, r, conj)
        return (np.asarray(conj, dtype=np.int64) * 7200 + self.canonical_pos[l] * 120 + r)

    def op_from_id(self, op_id):
        op_id = np.asarray(op_id, dtype=np.int64)
        conj = op_id >= 7200
        rem = op_id % 7200
        l = self.canonical_indices[rem // 120]
        return l, rem % 120, conj

    @property
    def n_direct_ops(self) -> int:
        return 7200

    @property
    def n_ops(self) -> int:
        return 14400

    def apply(self, l, r, conj, q):
        """Apply q -> l q r (direct) or l conj(q) r (indirect), broadcasting."""
        q = np.asarray(q, dtype=float)
        qc = np.where(np.asarray(conj)[..., None], quat_conj(q), q)
        return quat_mul(quat_mul(self.elements[l], qc), self.elements[r])

    def compose(self, op1, op2):
        """Operation performing op1 after op2 (op1 o op2), canonicalized."""
        l1, r1, c1 = op1
        l2, r2, c2 = op2
        l1 = np.asarray(l1, dtype=np.int64)
        r1 = np.asarray(r1, dtype=np.int64)
        c1 = np.asarray(c1, dtype=bool)
        l2 = np.asarray(l2, dtype=np.int64)
        r2 = np.asarray(r2, dtype=np.int64)
        c2 = np.asarray(c2, dtype=bool)
        l = np.where(c1, self.mul_table[l1, self.inv_index[r2]], self.mul_table[l1, l2])
        r = np.where(c1, self.mul_table[self.inv_index[l2], r1], self.mul_table[r2, r1])
        return self.canonicalize_op(l, r, c1 ^ c2)

    def inverse_op(self, op):
        l, r, c = op
        l = np.asarray(l, dtype=np.int64)
        r = np.asarray(r, dtype=np.int64)
        c = np.asarray(c, dtype=bool)
        li = np.where(c, r, self.inv_index[l])
        ri = np.where(c, l, self.inv_index[r])
        return self.canonicalize_op(li, ri, c)

    def apply_all_ops(self, q) -> np.ndarray:
        """Images of one point under all 14400 operations, in op_id order."""
        q = np.asarray(q, dtype=float)
        lq = quat_mul(self.elements[self.canonical_indices], q)  # (60, 4)
        direct = quat_mul(lq[:, None, :], self.elements[None, :, :])
        lqc = quat_mul(self.elements[self.canonical_indices], quat_conj(q))
        indirect = quat_mul(lqc[:, None, :], self.elements[None, :, :])
        return np.concatenate([direct.reshape(-1, 4), indirect.reshape(-1, 4)])

    def orbit(self, q, decimals: int = 6) -> np.ndarray:
        """Distinct images of a point under G (dedup on rounded coordinates)."""
        img = self.apply_all_ops(q)
        _, keep = np.unique(np.round(img, decimals), axis=0, return_index=True)
        return img[np.sort(keep)]

    # -- 600-cell combinatorics ----------------------------------------------

    def neighbor_pairs(self) -> np.ndarray:
        """Edge list of the 600-cell: pairs at inner product phi/2."""
        g = inner(self.elements[:, None, :], self.elements[None, :, :])
        iu, ju = np.triu_indices(120, k=1)
        mask = np.abs(g[iu, ju] - PHI / 2.0) <= DEDUP_TOL
        return np.stack([iu[mask], ju[mask]], axis=1)

    def combinatorics(self):
        """Vertices, edges, triangles and tetrahedral cells of the 600-cell."""
        edges = self.neighbor_pairs()
        adj = [set() for _ in range(120)]
        for a, b in edges:
            adj[a].add(int(b))
            adj[b].add(int(a))
        triangles = []
        for a, b in edges:
            for c in sorted(adj[a] & adj[b]):
                if c > b:
                    triangles.append((int(a), int(b), int(c)))
        cells = []
        for a, b, c in triangles:
            for d in sorted(adj[a] & adj[b] & adj[c]):
                if d > c:
                    cells.append((a, b, c, int(d)))
        return {
            "vertices": 120,
            "edges": edges,
            "triangles": triangles,
            "cells": cells,
        }

    # -- orthoscheme ---------------------------------------------------------

    def reference_cell(self) -> tuple[int, int, int, int]:
        """Cell at the identity vertex: identity plus the first 3-clique
        (lexicographic element order) among its phi/2 neighbors."""
        v0 = self.identity_index
        g = inner(self.elements, self.elements[v0])
        nbrs = np.flatnonzero(np.abs(g - PHI / 2.0) <= DEDUP_TOL)
        for a, b, c in itertools.combinations(sorted(nbrs), 3):
            gab = inner(self.elements[a], self.elements[b])
            gac = inner(self.elements[a], self.elements[c])
            gbc = inner(self.elements[b], self.elements[c])
            if all(abs(x - PHI / 2.0) <= DEDUP_TOL for x in (gab, gac, gbc)):
                return (v0, int(a), int(b), int(c))
        raise RuntimeError("no tetrahedral cell found at the identity vertex")

    def orthoscheme(self) -> Orthoscheme:
        if self._orthoscheme is None:
            v0, a, b, c = self.reference_cell()
            e = self.elements
            verts = np.stack(
                [
                    e[v0],
                    quat_normalize(e[v0] + e[a]),
                    quat_normalize(e[v0] + e[a] + e[b]),
                    quat_normalize(e[v0] + e[a] + e[b] + e[c]),
                ]
            )
            normals = np.empty((4, 4))
            for k in range(4):
                others = [verts[i] for i in range(4) if i != k]
                n = _cross4(*others)
                if n @ verts[k] < 0:
                    n = -n
                normals[k] = n / np.linalg.norm(n)
            self._orthoscheme = Orthoscheme(vertices=verts, normals=normals)
        return self._orthoscheme

    # -- reduction into the fundamental domain --------------------------------

    def _stabilizer(self):
        """Vertex-stabilizer transforms in canonical order.

        Returns (mats, u_idx, conj): mats[j] is the 4x4 action q -> u^-1 f(q) u
        for u the j-th canonical element, f = conj for the second block of 60.
        """
        if self._stabilizer_cache is None:
            mats = np.empty((120, 4, 4))
            u_idx = np.empty(120, dtype=np.int64)
            conj = np.zeros(120, dtype=bool)
            for pos, ui in enumerate(self.canonical_indices):
                u = self.elements[ui]
                base = left_mul_matrix(quat_conj(u)) @ right_mul_matrix(u)
                mats[pos] = base
                mats[60 + pos] = base @ CONJ_MATRIX
                u_idx[pos] = ui
                u_idx[60 + pos] = ui
                conj[60 + pos] = True
            self._stabilizer_cache = (mats, u_idx, conj)
        return self._stabilizer_cache

    def reduce(self, q, chunk: int = 32768):
        """Send point(s) into the orthoscheme.

        Returns ((l, r, conj), q0) with apply(l, r, conj, q0) == q up to
        floating point noise and q0 in the closed orthoscheme.  Ties on
        domain boundaries are broken by the canonical enumeration order.
        """
        q = np.asarray(q, dtype=float)
        single = q.ndim == 1
        qs = np.atleast_2d(q)
        o = self.orthoscheme()
        mats, u_idx, st_conj = self._stabilizer()
        # planes[b, 4*j + f] = (mats[j].T @ normals.T)[b, f] so that
        # (q1 @ planes) holds the four facet dots of every stabilizer image
        planes = np.einsum("jba,fb->ajf", mats, o.normals).reshape(4, 480)

        n = len(qs)
        j_all = np.empty(n, dtype=np.int64)
        ri_all = np.empty(n, dtype=np.int64)
        q0_all = np.empty((n, 4))
        for lo in range(0, n, chunk):
            qc = qs[lo : lo + chunk]
            # stage 1: nearest vertex, i.e. r maximizing <q, r>
            ri = np.argmax(qc @ self.elements.T, axis=1)
            q1 = quat_mul(qc, quat_conj(self.elements[ri]))
            # stage 2: first stabilizer image inside the orthoscheme
            dots = (q1 @ planes).reshape(len(qc), 120, 4)
            ok = np.all(dots >= -MEMBERSHIP_TOL, axis=2)
            hit = np.any(ok, axis=1)
            if not np.all(hit):
                bad = int(np.flatnonzero(~hit)[0])
                raise RuntimeError(f"reduction failed for point {qc[bad]}")
            j = np.argmax(ok, axis=1)
            q0_all[lo : lo + chunk] = np.einsum(
                "nab,nb->na", mats[j], q1
            )
            j_all[lo : lo + chunk] = j
            ri_all[lo : lo + chunk] = ri

        # un-reducing operation: q = u f(q0) (u^-1 r)
        u = u_idx[j_all]
        r = self.mul_table[self.inv_index[u], ri_all]
        op = self.canonicalize_op(u, r, st_conj[j_all])
        if single:
            return (int(op[0][0]), int(op[1][0]), bool(op[2][0])), q0_all[0]
        return op, q0_all

    def reduce_exhaustive(self, q):
        """Reference reduction scanning all 14400 operations in op_id order."""
        q = np.asarray(q, dtype=float)
        o = self.orthoscheme()
        img = self.apply_all_ops(q)
        ok = np.all(img @ o.normals.T >= -MEMBERSHIP_TOL, axis=1)
        gid = int(np.flatnonzero(ok)[0])
        q0 = img[gid]
        g = self.op_from_id(gid)
        l, r, c = self.inverse_op((g[0], g[1], g[2]))
        return (int(l), int(r), bool(c)), q0


def export_group_csv(elements: np.ndarray, path) -> None:
    """Write one element per row at 17 significant digits, sorted."""
    order = np.lexsort(np.asarray(elements).T[::-1])
    with open(path, "w") as fh:
        for row in np.asarray(elements)[order]:
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")
