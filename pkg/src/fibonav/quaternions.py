"""Quaternion arithmetic, the SU(2) identification, and the Hopf map.

Quaternions are stored as numpy arrays of shape (..., 4) holding the
components (w, x, y, z) of w + x*i + y*j + z*k.  All functions broadcast,
are pure, and never mutate their inputs.  A unit quaternion q corresponds
to the SU(2) matrix

    [[w + i*x,  y + i*z],
     [-y + i*z, w - i*x]]

and two unit quaternions denote the same projective gate iff they differ
by a global sign, which is what :func:`distance` quotients out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ONE = np.array([1.0, 0.0, 0.0, 0.0])
QI = np.array([0.0, 1.0, 0.0, 0.0])
QJ = np.array([0.0, 0.0, 1.0, 0.0])
QK = np.array([0.0, 0.0, 0.0, 1.0])

#: |norm - 1| accepted when validating unit quaternions.
UNIT_TOL = 1e-12
#: deviation from the SU(2) form accepted by quat_from_su2.
SU2_FORM_TOL = 1e-9


def quat_mul(p, q):
    """Hamilton product of two quaternions (broadcasting over leading axes)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    w1, x1, y1, z1 = np.moveaxis(p, -1, 0)
    w2, x2, y2, z2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        axis=-1,
    )


def quat_conj(q):
    """Quaternion conjugate; the inverse for unit quaternions."""
    return np.asarray(q, dtype=float) * np.array([1.0, -1.0, -1.0, -1.0])


def quat_norm(q):
    return np.linalg.norm(np.asarray(q, dtype=float), axis=-1)


def quat_normalize(q):
    q = np.asarray(q, dtype=float)
    return q / quat_norm(q)[..., None]


def is_unit(q, tol: float = UNIT_TOL) -> bool:
    return bool(np.all(np.abs(quat_norm(q) - 1.0) <= tol))


def canonical_sign(q):
    """Flip signs so the first component with |c| > 1e-9 is positive.

    Gives a deterministic representative of each antipodal pair {q, -q};
    used for hashing and deduplication only.
    """
    q = np.asarray(q, dtype=float)
    single = q.ndim == 1
    qs = np.atleast_2d(q)
    big = np.abs(qs) > 1e-9
    # index of first significant component; all-zero rows keep sign +1
    first = np.argmax(big, axis=-1)
    lead = np.take_along_axis(qs, first[..., None], axis=-1)[..., 0]
    sign = np.where(lead < 0, -1.0, 1.0)
    out = qs * sign[..., None]
    return out[0] if single else out


def quat_axis_angle(axis, angle: float):
    """Unit quaternion cos(angle) + sin(angle) * (unit axis . (i,j,k))."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return np.concatenate([[np.cos(angle)], np.sin(angle) * axis])


def left_mul_matrix(q):
    """4x4 matrix L with L @ p == quat_mul(q, p)."""
    w, x, y, z = np.asarray(q, dtype=float)
    return np.array(
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    )


def right_mul_matrix(q):
    """4x4 matrix R with R @ p == quat_mul(p, q)."""
    w, x, y, z = np.asarray(q, dtype=float)
    return np.array(
        [
            [w, -x, -y, -z],
            [x, w, z, -y],
            [y, -z, w, x],
            [z, y, -x, w],
        ]
    )


CONJ_MATRIX = np.diag([1.0, -1.0, -1.0, -1.0])


def su2_from_quat(q) -> np.ndarray:
    """2x2 complex SU(2) matrix of a unit quaternion."""
    w, x, y, z = np.asarray(q, dtype=float)
    return np.array(
        [
            [w + 1j * x, y + 1j * z],
            [-y + 1j * z, w - 1j * x],
        ]
    )


def quat_from_su2(m, tol: float = SU2_FORM_TOL):
    """Unit quaternion of an SU(2) matrix; inverse of :func:`su2_from_quat`.

    Raises ValueError when the matrix deviates from the SU(2) form
    (unitarity with unit determinant) by more than ``tol``.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    q = np.array([m[0, 0].real, m[0, 0].imag, m[0, 1].real, m[0, 1].imag])
    dev = np.max(np.abs(su2_from_quat(q) - m))
    nrm = np.linalg.norm(q)
    if dev > tol or abs(nrm - 1.0) > tol:
        raise ValueError(
            f"matrix is not SU(2) within {tol:g} (form deviation {dev:.3e}, norm {nrm:.17g})"
        )
    return q / nrm


def inner(p, q):
    """Euclidean 4-vector inner product <p, q>, broadcasting."""
    return np.sum(np.asarray(p, dtype=float) * np.asarray(q, dtype=float), axis=-1)


def distance(p, q):
    """Projective chordal distance sqrt(2 - 2|<p,q>|) on S3 with q ~ -q.

    Symmetric, zero iff p == +-q, and invariant under left and right
    multiplication by unit quaternions.  Matches |tr(Up^dag Uq)| / 2 = |<p,q>|
    for the corresponding SU(2) matrices.
    """
    a = np.minimum(np.abs(inner(p, q)), 1.0)
    return np.sqrt(np.maximum(0.0, 2.0 - 2.0 * a))


@dataclass(frozen=True)
class HopfPoint:
    """Image of a unit quaternion under the Hopf map.

    ``c`` is the base-plane coordinate alpha/beta, or None for the point at
    infinity (|beta| below 1e-14).  ``sphere`` is the inverse-stereographic
    image on S2 (the north pole for the point at infinity).
    """

    c: complex | None
    sphere: tuple[float, float, float]

    @property
    def at_infinity(self) -> bool:
        return self.c is None


def _inverse_stereographic(c: complex) -> tuple[float, float, float]:
    s = abs(c) ** 2
    return (2.0 * c.real / (1.0 + s), 2.0 * c.imag / (1.0 + s), (s - 1.0) / (1.0 + s))


def hopf_map(q) -> HopfPoint:
    """Hopf map S3 -> C + {inf}: (alpha, beta) -> alpha / beta.

    The pair-of-complex-numbers form is alpha = w + i x, beta = y + i z, so
    the whole phase fibre (alpha e^{i w}, beta e^{i w}) collapses to one base
    point; in particular q and -q have the same image.
    """
    w, x, y, z = np.asarray(q, dtype=float)
    alpha = complex(w, x)
    beta = complex(y, z)
    if abs(beta) <= 1e-14:
        return HopfPoint(c=None, sphere=(0.0, 0.0, 1.0))
    c = alpha / beta
    return HopfPoint(c=c, sphere=_inverse_stereographic(c))


def hopf_map_many(qs):
    """Vectorized Hopf base coordinates.

    Returns (c, finite): complex array (junk where not finite) and a boolean
    mask of points with |beta| > 1e-14.
    """
    qs = np.asarray(qs, dtype=float)
    alpha = qs[..., 0] + 1j * qs[..., 1]
    beta = qs[..., 2] + 1j * qs[..., 3]
    finite = np.abs(beta) > 1e-14
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(finite, alpha / np.where(finite, beta, 1.0), 0.0)
    return c, finite


def slerp(p, q, t: float):
    """Point at arc fraction t of the geodesic from p to q (broadcasting).

    p and q must not be antipodal.  t = 1/3 places a point at one third of
    the total arc length from p.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    cosang = np.clip(inner(p, q), -1.0, 1.0)
    ang = np.arccos(cosang)[..., None]
    small = ang[..., 0] < 1e-9
    sin_ang = np.where(small[..., None], 1.0, np.sin(ang))
    out = (np.sin((1.0 - t) * ang) * p + np.sin(t * ang) * q) / sin_ang
    lerp = (1.0 - t) * p + t * q
    out = np.where(small[..., None], lerp, out)
    return quat_normalize(out)


def random_unit(rng: np.random.Generator, n: int | None = None):
    """Uniform random point(s) on S3."""
    shape = (4,) if n is None else (n, 4)
    v = rng.standard_normal(shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)
