import numpy as np
import pytest

from fibonav import navigator as nav
from fibonav.braids import evaluate_quat
from fibonav.navigator import (
    NeighborIndex,
    best_in_orbit,
    best_in_orbit_reduced,
    build_dictionary,
    compile_target,
    covering_radius_of_domain,
    enumerate_words,
    level_count,
    load_dictionary,
    save_dictionary,
    total_count,
    write_hopf_csv,
)
from fibonav.quaternions import distance, random_unit, su2_from_quat


class TestEnumeration:
    def test_level_counts(self):
        assert level_count(1) == 4
        assert [level_count(k) for k in range(1, 5)] == [4, 12, 36, 108]
        assert total_count(7) == 1 + 4 * (3**7 - 1) // 2

    def test_enumerate_matches_formula(self):
        seen = []
        n = enumerate_words(5, seen.append)
        assert n == total_count(5) == len(seen)

    def test_no_duplicates_and_freely_reduced(self):
        seen = set()
        enumerate_words(7, seen.add)
        assert len(seen) == total_count(7)
        for w in seen:
            assert all(w[i] != -w[i + 1] for i in range(len(w) - 1))

    def test_budget_refused(self):
        with pytest.raises(ValueError):
            list(nav.iter_word_levels(17))


class TestDictionary:
    def test_entries_inside_domain(self, dict7, group):
        o = group.orthoscheme()
        assert bool(np.all(o.contains(dict7.q0)))

    def test_dedup_loss_positive(self, dict7):
        assert 0 < len(dict7) <= total_count(7)

    def test_entry_consistency(self, dict7, group):
        for i in range(0, len(dict7), 37):
            v = evaluate_quat(dict7.word(i))
            assert distance(v, group.apply(*dict7.op(i), dict7.q0[i])) < 1e-7

    def test_value_and_word_builds_agree(self, ytilde):
        dw = build_dictionary(ytilde, 8, distinct_values=False)
        dv = build_dictionary(ytilde, 8, distinct_values=True)
        # same reduced point set up to quantization-boundary duplicates
        for a, b in ((dw, dv), (dv, dw)):
            d = np.abs(a.q0 @ b.q0.T)
            nearest = np.sqrt(np.maximum(0, 2 - 2 * np.minimum(d.max(axis=1), 1)))
            assert np.max(nearest) < 2e-6
        assert abs(len(dw) - len(dv)) <= 0.02 * len(dw)

    def test_covering_radius_non_increasing(self, ytilde, group):
        cov = []
        for max_len in (5, 6, 7):
            d = build_dictionary(ytilde, max_len)
            cov.append(covering_radius_of_domain(group, d.q0, samples=400))
        assert cov[0] >= cov[1] >= cov[2]


class TestNeighborIndex:
    def test_query_superset(self, dict7, rng):
        idx = NeighborIndex(dict7.q0, cell=2e-3)
        for q in dict7.q0[rng.integers(0, len(dict7), 20)]:
            got = set(idx.query(q, 5e-3).tolist())
            d = distance(dict7.q0, q)
            need = set(np.flatnonzero(d <= 5e-3).tolist())
            assert need <= got

    def test_nearest_matches_linear_scan(self, dict7, group, rng):
        idx = NeighborIndex(dict7.q0, cell=2e-3)
        _, q0s = group.reduce(random_unit(rng, 100))
        for q in q0s:
            i, di = idx.nearest(q)
            d = distance(dict7.q0, q)
            assert abs(di - d.min()) < 1e-12


class TestCompile:
    def test_identity(self, dict7):
        r = compile_target(np.array([1.0, 0, 0, 0]), 1e-9, dictionary=dict7)
        assert r.word == () and r.err == 0.0 and r.eps_met

    def test_known_dictionary_word(self, dict7):
        target = evaluate_quat(dict7.word(101))
        r = compile_target(target, 1e-6, dictionary=dict7)
        # the chordal metric amplifies fp noise to sqrt scale; 1e-7 is the floor
        assert r.err <= 1e-7
        assert r.source == "dictionary"

    def test_reported_err_is_recomputed(self, dict14, rng):
        q = random_unit(rng)
        r = compile_target(q, 1e-2, dictionary=dict14)
        assert abs(r.err - distance(evaluate_quat(r.word), q)) < 1e-14

    def test_matrix_targets_accepted(self, dict7):
        m = su2_from_quat(np.array([0.0, 0.0, 0.0, 1.0]))
        r = compile_target(m, 1.0, dictionary=dict7)
        assert r.eps_met

    def test_monotone_in_core_length(self, ytilde, rng):
        targets = random_unit(rng, 15)
        errs = {}
        for max_len in (10, 12, 14):
            d = build_dictionary(ytilde, max_len)
            errs[max_len] = [
                compile_target(t, 1e-9, dictionary=d).err for t in targets
            ]
        for a, b in ((10, 12), (12, 14)):
            assert np.mean(errs[b]) <= np.mean(errs[a]) + 1e-12
            assert np.max(errs[b]) <= np.max(errs[a]) + 1e-12

    def test_symmetry_soundness(self, dict14, ytilde, rng):
        g = ytilde.group
        u = random_unit(rng)
        base = compile_target(u, 1e-9, dictionary=dict14).err
        for _ in range(5):
            op = (int(rng.integers(120)), int(rng.integers(120)), bool(rng.integers(2)))
            moved = compile_target(g.apply(*op, u), 1e-9, dictionary=dict14).err
            assert moved <= base + 2 * ytilde.max_err + 1e-12

    def test_mesh_resource(self, dict7, mesh_q0, rng):
        t = random_unit(rng)
        r = compile_target(t, 1.0, meshes=[mesh_q0])
        assert r.source == "mesh"
        assert r.err <= 0.25  # inside the Q0 covering radius

    def test_flagged_when_eps_unmet(self, dict7, rng):
        r = compile_target(random_unit(rng), 1e-9, dictionary=dict7)
        assert not r.eps_met and r.err > 1e-9


class TestBestInOrbit:
    def test_candidate_equals_target(self, group, rng):
        t = random_unit(rng)
        op, ci, d = best_in_orbit(group, t, [t])
        assert d < 1e-12 and ci == 0

    def test_paths_agree(self, group, rng):
        for _ in range(20):
            t, c = random_unit(rng, 2)
            _, _, d1 = best_in_orbit(group, t, [c])
            _, d2 = best_in_orbit_reduced(group, t, [c])
            assert abs(d1 - d2) < 1e-12

    def test_aligned_element_hits_ytilde(self, ytilde):
        target = ytilde.targets[33]
        _, _, d = best_in_orbit(ytilde.group, target, [ytilde.achieved[33]])
        assert d <= ytilde.max_err + 1e-12


class TestPersistence:
    def test_dictionary_round_trip(self, tmp_path, dict7, ytilde):
        p = tmp_path / "d7.dict"
        save_dictionary(dict7, p)
        loaded = load_dictionary(p, ytilde)
        assert len(loaded) == len(dict7)
        # loaded entries carry the same reduced points (file order is sorted)
        a = np.sort(np.round(dict7.q0, 9), axis=0)
        b = np.sort(np.round(loaded.q0, 9), axis=0)
        assert np.allclose(a, b, atol=1e-8)
        p2 = tmp_path / "again.dict"
        save_dictionary(loaded, p2)
        assert p.read_bytes() == p2.read_bytes()

    def test_hopf_csv(self, tmp_path, ytilde):
        p = tmp_path / "hopf.csv"
        finite, inf = write_hopf_csv(ytilde.achieved, p)
        assert finite == 59 and inf == 1
        lines = p.read_text().splitlines()
        assert len(lines) == 60 and lines[-1] == "inf 1"
