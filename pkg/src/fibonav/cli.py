"""Command-line front end: verify, gen, compile, hopf.

Every command is deterministic: identical inputs produce byte-identical
output files.  Exit code 0 means all checks or tolerance targets were met.
The FIBONAV_THREADS environment variable caps the BLAS thread count
(default: all cores).
"""

from __future__ import annotations

import argparse
import os
import re
import sys


def _setup_threads():
    n = os.environ.get("FIBONAV_THREADS")
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


def _parse_target(spec: str):
    """Resolve a target spec: named gate, 4 reals, or 8 reals (2x2 matrix)."""
    import numpy as np

    from fibonav.quaternions import quat_from_su2

    named = {
        "id": np.array([1.0, 0.0, 0.0, 0.0]),
        "ix": np.array([0.0, 0.0, 0.0, 1.0]),
        "iy": np.array([0.0, 0.0, 1.0, 0.0]),
        "iz": np.array([0.0, 1.0, 0.0, 0.0]),
    }
    if spec in named:
        return named[spec]
    vals = [float(tok) for tok in spec.replace(",", " ").split()]
    if len(vals) == 4:
        q = np.array(vals)
        nrm = np.linalg.norm(q)
        if abs(nrm - 1.0) > 1e-9:
            raise ValueError(f"quaternion target must be unit norm, got |q| = {nrm:.17g}")
        return q
    if len(vals) == 8:
        m = np.array(
            [
                [vals[0] + 1j * vals[1], vals[2] + 1j * vals[3]],
                [vals[4] + 1j * vals[5], vals[6] + 1j * vals[7]],
            ]
        )
        return quat_from_su2(m)  # raises with the violated constraint
    raise ValueError(
        "target must be one of id/ix/iy/iz, four reals (unit quaternion), "
        "or eight reals (SU(2) matrix, row major, re/im interleaved)"
    )


def cmd_verify(args) -> int:
    import numpy as np

    from fibonav import anyon, braids, symmetry

    failures = 0

    def check(name: str, residual: float, tol: float):
        nonlocal failures
        ok = residual <= tol
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'}  {name}: residual {residual:.3e} (tol {tol:g})")

    s1 = braids.sigma(1)
    s2 = braids.sigma(2)
    check("braid relation s1 s2 s1 = s2 s1 s2", float(np.max(np.abs(s1 @ s2 @ s1 - s2 @ s1 @ s2))), 1e-12)
    check(
        "order ten: s1^10 = s2^10 = -1",
        max(
            float(np.max(np.abs(np.linalg.matrix_power(s, 10) + np.eye(2))))
            for s in (s1, s2)
        ),
        1e-12,
    )
    for name, n, size in (("T", 3, 24), ("O", 4, 48), ("Y", 5, 120)):
        s, t = symmetry.standard_generators(name)
        elements = symmetry.closure([s, t])
        check(f"binary group {name}: order {size}", abs(len(elements) - size), 0.5)
        check(
            f"binary group {name}: s^3 = t^{n} = (st)^2 = -1",
            symmetry.presentation_residual(s, t, n),
            1e-12,
        )
    sg, tg = anyon.canonical_pseudo_generators()
    for gen, label in ((sg, "s~^3"), (tg, "t~^5")):
        p = anyon._quat_power(gen.quat, gen.order)
        check(
            f"pseudo-generator {label} = -1",
            float(np.max(np.abs(p + np.array([1.0, 0, 0, 0])))),
            1e-12,
        )
    defect = anyon.relation_defect(sg.quat, tg.quat)
    ok = 2.5e-3 <= defect <= 3.5e-3
    failures += 0 if ok else 1
    print(f"{'PASS' if ok else 'FAIL'}  (s~ t~)^2 + 1 max entry: {defect:.6e} (expected about 3.1e-3)")
    print("verify:", "all checks passed" if failures == 0 else f"{failures} check(s) failed")
    return 0 if failures == 0 else 1


def _resources(tokens, ytilde):
    """Resolve --use tokens into (dictionary, meshes)."""
    from fibonav import meshes, navigator

    dictionary = None
    mesh_list = []
    for tok in tokens:
        m = re.fullmatch(r"dict(\d+)", tok)
        if tok == "ytilde":
            mesh_list.append(meshes.build_p(0, ytilde))
        elif m:
            dictionary = navigator.build_dictionary(ytilde, int(m.group(1)))
        elif os.path.exists(tok):
            with open(tok) as fh:
                head = fh.readline().split()
            if head and head[0] == "mesh":
                mesh_list.append(meshes.load_mesh(tok))
            elif head and head[0] == "dict":
                dictionary = navigator.load_dictionary(tok, ytilde)
            else:
                raise ValueError(f"unrecognized resource file {tok}")
        else:
            raise ValueError(f"unknown resource {tok!r}")
    return dictionary, mesh_list


def cmd_compile(args) -> int:
    from fibonav import anyon, navigator
    from fibonav.braids import format_word

    target = _parse_target(args.target)
    ytilde = anyon.build_y_tilde()
    dictionary, mesh_list = _resources(args.use, ytilde)
    result = navigator.compile_target(target, args.eps, dictionary=dictionary, meshes=mesh_list)
    print(f"word: {format_word(result.word)}")
    print(f"core length: {result.core_len}")
    print(f"total length: {result.total_len}")
    print(f"err: {result.err:.6e}")
    print(f"source: {result.source}")
    print(f"eps {args.eps:g}: {'met' if result.eps_met else 'NOT met (best effort result)'}")
    return 0 if result.eps_met else 1


def cmd_gen(args) -> int:
    from fibonav import anyon, meshes, navigator, symmetry
    from fibonav.braids import format_word

    what = args.what
    out = args.out
    if what.startswith("group:"):
        name = what.split(":", 1)[1]
        s, t = symmetry.standard_generators(name)
        elements = symmetry.closure([s, t])
        symmetry.export_group_csv(elements, out)
        print(f"wrote {len(elements)} rows to {out}")
        return 0

    ytilde = anyon.build_y_tilde()
    if what == "ytilde":
        with open(out, "w") as fh:
            for i in range(len(ytilde.targets)):
                fh.write(
                    ",".join(f"{x:.17g}" for x in ytilde.targets[i])
                    + f",{format_word(ytilde.words[i])},{ytilde.errs[i]:.17g}\n"
                )
        print(f"wrote 120 rows to {out}; max error {ytilde.max_err:.6e}")
        return 0
    m = re.fullmatch(r"mesh:([PQ])(\d)", what)
    if m:
        kind, level = m.group(1), int(m.group(2))
        needs_seeds = kind == "Q" or level >= 1
        dictionary = (
            navigator.build_dictionary(ytilde, args.seed_core_len) if needs_seeds else None
        )
        mesh = (
            meshes.build_p(level, ytilde, dictionary)
            if kind == "P"
            else meshes.build_q(level, ytilde, dictionary)
        )
        meshes.save_mesh(mesh, out)
        print(f"wrote {len(mesh)} rows to {out}; max error {mesh.max_err:.6e}")
        return 0
    m = re.fullmatch(r"dict:(\d+)", what)
    if m:
        dictionary = navigator.build_dictionary(ytilde, int(m.group(1)))
        navigator.save_dictionary(dictionary, out)
        print(f"wrote {len(dictionary)} rows to {out}")
        return 0
    raise ValueError(f"unknown gen target {what!r}")


def cmd_hopf(args) -> int:
    import numpy as np

    from fibonav import navigator

    with open(args.infile) as fh:
        first = fh.readline()
        rows = [] if first.split() and first.split()[0] in ("mesh", "dict") else [first]
        rows += fh.readlines()
    points = []
    for line in rows:
        line = line.strip()
        if not line or line.startswith("inf "):
            continue
        parts = line.split(",")
        points.append([float(x) for x in parts[:4]])
    points = np.array(points)
    finite, inf = navigator.write_hopf_csv(points, args.out)
    print(f"{len(points)} points -> {finite} distinct finite base points, {inf} at infinity")
    if args.svg:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        from fibonav.quaternions import hopf_map_many

        c, mask = hopf_map_many(points)
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.scatter(c[mask].real, c[mask].imag, s=4, marker=".")
        ax.set_xlabel("Re C")
        ax.set_ylabel("Im C")
        ax.set_aspect("equal")
        fig.savefig(args.svg, format="svg")
        print(f"scatter written to {args.svg}")
    return 0


def main(argv=None) -> int:
    _setup_threads()
    parser = argparse.ArgumentParser(
        prog="fibonav",
        description="Compile SU(2) unitaries into Fibonacci-anyon braid words.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify", help="run the relation suite and report PASS/FAIL")

    p_gen = sub.add_parser("gen", help="generate groups, meshes and dictionaries")
    p_gen.add_argument(
        "--what",
        required=True,
        help="group:T|O|Y, ytilde, mesh:P0..P2|Q0..Q1, or dict:L",
    )
    p_gen.add_argument("--out", required=True, help="output path")
    p_gen.add_argument(
        "--seed-core-len",
        type=int,
        default=16,
        help="core length of the dictionary used for mesh seed braids",
    )

    p_comp = sub.add_parser("compile", help="compile a target unitary to a braid word")
    p_comp.add_argument("--target", required=True, help="id/ix/iy/iz, 4 reals, or 8 reals")
    p_comp.add_argument("--eps", type=float, required=True, help="target accuracy")
    p_comp.add_argument(
        "--use",
        nargs="+",
        required=True,
        help="resources: ytilde, dictN, or mesh/dict file paths",
    )

    p_hopf = sub.add_parser("hopf", help="Hopf-map a point file to base-plane CSV")
    p_hopf.add_argument("--in", dest="infile", required=True)
    p_hopf.add_argument("--out", required=True)
    p_hopf.add_argument("--svg", help="also write an SVG scatter")

    args = parser.parse_args(argv)
    handlers = {
        "verify": cmd_verify,
        "gen": cmd_gen,
        "compile": cmd_compile,
        "hopf": cmd_hopf,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
