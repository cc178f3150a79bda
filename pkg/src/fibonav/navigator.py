"""Word enumeration, the orthoscheme dictionary, and target compilation.

Every freely reduced braid word, reduced into the fundamental domain, lands
at a point of the orthoscheme; collecting those points over all words up to
a core length gives a dictionary that covers the domain densely.  Compiling
an SU(2) target then reduces the target, looks up nearby cores, and splices
the symmetry operation back in as braid prefix/suffix words, so the search
length is halved relative to raw brute force and no Solovay-Kitaev stage is
needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fibonav import braids
from fibonav.anyon import YTilde, braid_for_op
from fibonav.braids import Word, evaluate_quat, evaluate_quat_many, format_word
from fibonav.quaternions import distance, quat_from_su2, quat_mul, su2_from_quat

#: hard cap on enumeration length (about 86 million words).
MAX_ENUM_LEN = 16


def level_count(length: int) -> int:
    """Number of freely reduced words of exactly this length."""
    return 1 if length == 0 else 4 * 3 ** (length - 1)


def total_count(max_len: int) -> int:
    return 1 + sum(level_count(k) for k in range(1, max_len + 1))


#: position of letter code c in the (1, -1, 2, -2) table, indexed by c + 2.
_LETTER_POS = np.zeros(5, dtype=np.int64)
_LETTER_POS[1 + 2] = 0
_LETTER_POS[-1 + 2] = 1
_LETTER_POS[2 + 2] = 2
_LETTER_POS[-2 + 2] = 3


def iter_word_levels(max_len: int):
    """Yield (codes, quats) per length 1..max_len, in deterministic order.

    codes is an int8 array (n, length) of letters, quats the matching
    (n, 4) evaluations.  Children extend parents by every letter except the
    canceling one, parents in order, letters in the fixed order 1, -1, 2, -2.
    """
    if max_len > MAX_ENUM_LEN:
        raise ValueError(
            f"enumeration of words beyond length {MAX_ENUM_LEN} refused "
            f"({total_count(max_len)} words)"
        )
    letters = np.array([1, -1, 2, -2], dtype=np.int8)
    letter_quats = np.array([braids.SIGMA_QUAT[int(l)] for l in letters])
    codes = letters[:, None].copy()
    quats = letter_quats.copy()
    yield codes, quats
    for length in range(2, max_len + 1):
        last = codes[:, -1]
        keep = letters[None, :] != -last[:, None]  # (n, 4), three True per row
        parent_idx = np.repeat(np.arange(len(codes)), 3)
        child_letters = letters[None, :].repeat(len(codes), axis=0)[keep]
        new_codes = np.empty((len(parent_idx), length), dtype=np.int8)
        new_codes[:, :-1] = codes[parent_idx]
        new_codes[:, -1] = child_letters
        new_quats = quat_mul(
            letter_quats[_LETTER_POS[child_letters.astype(np.int64) + 2]],
            quats[parent_idx],
        )
        codes, quats = new_codes, new_quats
        yield codes, quats


def enumerate_words(max_len: int, visitor) -> int:
    """Visit every freely reduced word of length <= max_len exactly once.

    The empty word is visited first.  Returns the number of visits.
    """
    visitor(())
    n = 1
    for codes, _ in iter_word_levels(max_len):
        for row in codes:
            visitor(tuple(int(x) for x in row))
            n += 1
    return n


# -- dictionary ----------------------------------------------------------------

#: quantization used to deduplicate reduced points.
DEDUP_CELL = 1e-6


def _dedup_keys(q0: np.ndarray, cell: float = DEDUP_CELL) -> np.ndarray:
    """Pack quantized (x, y, z) of reduced points into one int64 per point."""
    k = np.floor(q0[:, 1:] / cell).astype(np.int64) + (1 << 20)
    return (k[:, 0] << 42) | (k[:, 1] << 21) | k[:, 2]


@dataclass
class Dictionary:
    """Reduced-point dictionary: cores indexed by orthoscheme position."""

    ytilde: YTilde
    max_core_len: int
    q0: np.ndarray  # (n, 4) reduced points, all inside the orthoscheme
    codes: np.ndarray  # (n, max_core_len) int8, zero padded
    lengths: np.ndarray  # (n,) uint8
    op_l: np.ndarray  # (n,) int16 indices into the group elements
    op_r: np.ndarray
    op_conj: np.ndarray  # (n,) bool

    def __len__(self) -> int:
        return len(self.q0)

    def word(self, i: int) -> Word:
        return tuple(int(x) for x in self.codes[i, : self.lengths[i]])

    def op(self, i: int):
        return (int(self.op_l[i]), int(self.op_r[i]), bool(self.op_conj[i]))

    @property
    def group(self):
        return self.ytilde.group


def _iter_distinct_value_levels(max_len: int):
    """Like iter_word_levels, but expands only one word per distinct value.

    Words mapping to an already-seen projective value cannot first reach a
    new value with fewer letters than a kept representative, so expanding
    representatives only yields the same value set per length at a fraction
    of the cost (the braid relation and torsion collapse most free words).
    """
    from fibonav.quaternions import canonical_sign

    def value_keys(quats):
        c = canonical_sign(quats)
        k = np.round(c / 1e-8).astype(np.int64)
        return [kk.tobytes() for kk in k]

    letters = np.array([1, -1, 2, -2], dtype=np.int8)
    letter_quats = np.array([braids.SIGMA_QUAT[int(l)] for l in letters])
    seen = set(value_keys(np.array([[1.0, 0.0, 0.0, 0.0]])))
    codes = letters[:, None].copy()
    quats = letter_quats.copy()
    for length in range(1, max_len + 1):
        keys = value_keys(quats)
        fresh = np.fromiter(
            (k not in seen and not seen.add(k) for k in keys),
            dtype=bool,
            count=len(keys),
        )
        idx = np.flatnonzero(fresh)
        codes, quats = codes[idx], quats[idx]
        yield codes, quats
        if length == max_len:
            break
        parent_idx = np.repeat(np.arange(len(codes)), 4)
        child_letters = np.tile(letters, len(codes))
        new_codes = np.empty((len(parent_idx), length + 1), dtype=np.int8)
        new_codes[:, :-1] = codes[parent_idx]
        new_codes[:, -1] = child_letters
        new_quats = quat_mul(
            letter_quats[_LETTER_POS[child_letters.astype(np.int64) + 2]],
            quats[parent_idx],
        )
        codes, quats = new_codes, new_quats


def build_dictionary(
    ytilde: YTilde, max_core_len: int, distinct_values: bool = True, progress: bool = False
) -> Dictionary:
    """Reduce every freely reduced word into the orthoscheme and deduplicate.

    Near-duplicate reduced points (same 1e-6 quantization cell) keep the
    shorter core; levels arrive in increasing length, so first kept wins.
    With ``distinct_values`` (default) words are pre-deduplicated by their
    projective value before reduction, which changes nothing but the cost.
    """
    group = ytilde.group
    seen: set = set()
    parts_q0 = []
    parts_codes = []
    parts_len = []
    parts_l = []
    parts_r = []
    parts_c = []

    def absorb(codes, quats, length):
        if len(quats) == 0:
            return
        op, q0 = group.reduce(quats)
        keys = _dedup_keys(q0)
        fresh = np.fromiter(
            (k not in seen and not seen.add(k) for k in keys.tolist()),
            dtype=bool,
            count=len(keys),
        )
        idx = np.flatnonzero(fresh)
        if len(idx) == 0:
            return
        parts_q0.append(q0[idx])
        pc = np.zeros((len(idx), max_core_len), dtype=np.int8)
        if length:
            pc[:, :length] = codes[idx]
        parts_codes.append(pc)
        parts_len.append(np.full(len(idx), length, dtype=np.uint8))
        parts_l.append(op[0][idx].astype(np.int16))
        parts_r.append(op[1][idx].astype(np.int16))
        parts_c.append(op[2][idx])

    absorb(np.zeros((1, 0), dtype=np.int8), np.array([[1.0, 0.0, 0.0, 0.0]]), 0)
    levels = (
        _iter_distinct_value_levels(max_core_len)
        if distinct_values
        else iter_word_levels(max_core_len)
    )
    for length, (codes, quats) in enumerate(levels, start=1):
        absorb(codes, quats, length)
        if progress:
            print(f"  dictionary level {length}: {sum(map(len, parts_q0))} entries")

    return Dictionary(
        ytilde=ytilde,
        max_core_len=max_core_len,
        q0=np.concatenate(parts_q0),
        codes=np.concatenate(parts_codes),
        lengths=np.concatenate(parts_len),
        op_l=np.concatenate(parts_l),
        op_r=np.concatenate(parts_r),
        op_conj=np.concatenate(parts_c),
    )


# -- neighbor index --------------------------------------------------------------


class NeighborIndex:
    """Quantized-grid index over points near the identity vertex.

    Buckets quantize the imaginary components; query(q, r) returns a superset
    of all stored points within chordal distance r of q, because the chordal
    distance dominates every per-axis coordinate difference.
    """

    def __init__(self, points: np.ndarray, cell: float):
        self.points = np.asarray(points, dtype=float)
        self.cell = float(cell)
        keys = np.floor(self.points[:, 1:] / self.cell).astype(np.int64)
        order = np.lexsort(keys.T[::-1])
        skeys = keys[order]
        boundaries = np.flatnonzero(np.any(np.diff(skeys, axis=0) != 0, axis=1)) + 1
        starts = np.concatenate([[0], boundaries])
        ends = np.concatenate([boundaries, [len(skeys)]])
        self._buckets = {
            tuple(skeys[s]): order[s:e] for s, e in zip(starts.tolist(), ends.tolist())
        }

    def query(self, q, radius: float) -> np.ndarray:
        """Indices of a superset of all points within ``radius`` of q."""
        q = np.asarray(q, dtype=float)
        span = int(np.ceil(radius / self.cell)) + 1
        base = np.floor(q[1:] / self.cell).astype(np.int64)
        out = []
        for dx in range(-span, span + 1):
            for dy in range(-span, span + 1):
                for dz in range(-span, span + 1):
                    b = self._buckets.get((base[0] + dx, base[1] + dy, base[2] + dz))
                    if b is not None:
                        out.append(b)
        if not out:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(out)

    def nearest(self, q) -> tuple[int, float]:
        """Index and distance of the nearest stored point (projective)."""
        q = np.asarray(q, dtype=float)
        radius = 2.0 * self.cell
        while True:
            cand = self.query(q, radius)
            if len(cand):
                d = distance(self.points[cand], q)
                best = int(np.argmin(d))
                if d[best] <= radius:
                    return int(cand[best]), float(d[best])
                radius = max(2.0 * radius, float(d[best]))
            else:
                radius *= 2.0
            if radius > 4.0:
                d = distance(self.points, q)
                i = int(np.argmin(d))
                return i, float(d[i])


# -- compilation -----------------------------------------------------------------


@dataclass
class CompileResult:
    word: Word
    achieved: np.ndarray  # SU(2) matrix actually realized
    err: float  # distance(evaluate(word), target), recomputed
    core_len: int
    total_len: int
    source: str  # "dictionary", "mesh" or "hybrid"
    eps_met: bool

    @property
    def text(self) -> str:
        return format_word(self.word)


def _as_target_quat(target) -> np.ndarray:
    target = np.asarray(target)
    if target.shape == (4,):
        return np.asarray(target, dtype=float)
    return quat_from_su2(target)


def compile_target(
    target,
    eps: float,
    dictionary: Dictionary | None = None,
    meshes=(),
    top_k: int = 64,
) -> CompileResult:
    """Best braid word for an SU(2) target from the loaded resources.

    The target (2x2 SU(2) matrix or unit quaternion) is reduced into the
    orthoscheme; dictionary candidates are ranked by the provable bound
    nearest-distance + prefix/suffix word errors, and the best ``top_k``
    are re-evaluated exactly.  Mesh resources contribute their points by
    direct nearest-neighbor lookup.  The reported err is always recomputed
    from the returned word; if it exceeds eps the result is flagged.
    """
    tq = _as_target_quat(target)
    best: tuple[float, Word, str, int] | None = None  # (err, word, source, core_len)

    if dictionary is not None:
        yt = dictionary.ytilde
        group = yt.group
        op_t, t0 = group.reduce(tq)
        d = distance(dictionary.q0, t0)
        errs = yt.errs
        dmin = float(np.min(d))
        # entries beyond this distance cannot beat the best predicted bound
        cap = dmin + 2.0 * float(np.max(errs)) + 1e-12
        cand = np.flatnonzero(d <= cap)
        cl, cr, cc = group.compose(
            (np.full(len(cand), op_t[0]), np.full(len(cand), op_t[1]),
             np.full(len(cand), op_t[2])),
            group.inverse_op(
                (dictionary.op_l[cand].astype(np.int64),
                 dictionary.op_r[cand].astype(np.int64),
                 dictionary.op_conj[cand])
            ),
        )
        predicted = d[cand] + errs[cl] + errs[cr]
        order = np.argsort(predicted, kind="stable")[:top_k]
        words = [
            braid_for_op(yt, (int(cl[i]), int(cr[i]), bool(cc[i])), dictionary.word(int(cand[i])))
            for i in order
        ]
        vals = evaluate_quat_many(words)
        true_err = distance(vals, tq)
        k = int(np.argmin(true_err))
        best = (
            float(true_err[k]),
            words[k],
            "dictionary",
            int(dictionary.lengths[cand[order[k]]]),
        )

    for mesh in meshes:
        d = distance(mesh.points, tq)
        i = int(np.argmin(d))
        w = tuple(mesh.words[i])
        err = float(distance(evaluate_quat(w), tq))
        if best is None or err < best[0]:
            best = (err, w, "mesh", len(w))

    if best is None:
        raise ValueError("no resources supplied")

    err, word, source, core_len = best
    return CompileResult(
        word=word,
        achieved=su2_from_quat(evaluate_quat(word)),
        err=err,
        core_len=core_len,
        total_len=len(word),
        source=source,
        eps_met=err <= eps,
    )


def best_in_orbit(group, target, candidates):
    """Minimize distance(target, op(candidate)) over all 14400 operations.

    Returns (op, candidate_index, dist).  The equivalent computation on
    reduced representatives (reduce both sides, scan the orbit of the
    reduced candidate) gives the same minimum.
    """
    tq = np.asarray(target, dtype=float)
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    best = None
    for ci, c in enumerate(candidates):
        img = group.apply_all_ops(c)
        d = distance(img, tq)
        k = int(np.argmin(d))
        if best is None or d[k] < best[2]:
            l, r, conj = group.op_from_id(k)
            best = ((int(l), int(r), bool(conj)), ci, float(d[k]))
    return best


def best_in_orbit_reduced(group, target, candidates):
    """Same minimum as best_in_orbit, computed on reduced representatives."""
    _, t0 = group.reduce(np.asarray(target, dtype=float))
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    _, c0 = group.reduce(candidates)
    best = None
    for ci in range(len(candidates)):
        img = group.apply_all_ops(c0[ci])
        d = distance(img, t0)
        k = int(np.argmin(d))
        if best is None or d[k] < best[1]:
            best = (ci, float(d[k]))
    return best


# -- covering quality ------------------------------------------------------------


def covering_radius_of_domain(group, points, samples: int = 2000, seed: int = 7) -> float:
    """Monte-Carlo covering radius of the orthoscheme by the given points."""
    from fibonav.quaternions import random_unit

    rng = np.random.default_rng(seed)
    probes = random_unit(rng, samples)
    _, reduced = group.reduce(probes)
    worst = 0.0
    chunk = 512
    for lo in range(0, samples, chunk):
        d = distance(reduced[lo : lo + chunk, None, :], points[None, :, :])
        worst = max(worst, float(np.max(np.min(d, axis=1))))
    return worst


# -- persistence -----------------------------------------------------------------


def save_dictionary(dictionary: Dictionary, path) -> None:
    """Write `dict <max_core_len> <count>` header plus mesh-style CSV rows."""
    group = dictionary.group
    order = np.lexsort(dictionary.q0.T[::-1])
    vals = braids.evaluate_padded(dictionary.codes[order])
    realized = group.apply(
        dictionary.op_l[order].astype(np.int64),
        dictionary.op_r[order].astype(np.int64),
        dictionary.op_conj[order],
        dictionary.q0[order],
    )
    resid = distance(vals, realized)
    with open(path, "w") as fh:
        fh.write(f"dict {dictionary.max_core_len} {len(dictionary)}\n")
        for k, i in enumerate(order.tolist()):
            fh.write(
                ",".join(f"{x:.17g}" for x in dictionary.q0[i])
                + f",{format_word(dictionary.word(i))},{resid[k]:.17g}\n"
            )


def load_dictionary(path, ytilde: YTilde) -> Dictionary:
    """Read a dictionary file; reduced points come from the file verbatim
    and the un-reducing operations are recovered by re-reducing the word
    evaluations."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != "dict":
            raise ValueError(f"not a dictionary file: {path}")
        max_core_len = int(header[1])
        count = int(header[2])
        words = []
        q0 = []
        for line in fh:
            parts = line.rstrip("\n").split(",")
            q0.append([float(x) for x in parts[:4]])
            words.append(braids.parse_word(parts[4]))
    if len(words) != count:
        raise ValueError(f"expected {count} rows, found {len(words)}")
    vals = evaluate_quat_many(words)
    op, _ = ytilde.group.reduce(vals)
    codes = np.zeros((len(words), max_core_len), dtype=np.int8)
    lengths = np.empty(len(words), dtype=np.uint8)
    for i, w in enumerate(words):
        codes[i, : len(w)] = w
        lengths[i] = len(w)
    return Dictionary(
        ytilde=ytilde,
        max_core_len=max_core_len,
        q0=np.array(q0),
        codes=codes,
        lengths=lengths,
        op_l=op[0].astype(np.int16),
        op_r=op[1].astype(np.int16),
        op_conj=op[2],
    )


def write_hopf_csv(points: np.ndarray, path, decimals: int = 9) -> tuple[int, int]:
    """Write deduplicated Hopf base points as `re,im` rows plus `inf <n>`.

    Returns (finite_count, infinite_count) of distinct base points.
    """
    from fibonav.quaternions import hopf_map_many

    c, finite = hopf_map_many(np.asarray(points, dtype=float))
    uniq = sorted(
        {(round(float(z.real), decimals), round(float(z.imag), decimals)) for z in c[finite]}
    )
    n_inf = 1 if np.any(~finite) else 0
    with open(path, "w") as fh:
        for re, im in uniq:
            fh.write(f"{re:.17g},{im:.17g}\n")
        fh.write(f"inf {n_inf}\n")
    return len(uniq), n_inf
