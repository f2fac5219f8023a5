import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hopflift.errors import CoincidentPoints, SingularBase, ValidationError
from hopflift.geometry import Configuration, hopf_map, random_rotation
from hopflift.lift import (fiber_energy, fibre_decomposition, hopf_lift, lifted_log_energy, log_energy,
                           pairwise_log_energy)
from hopflift.sampling import SeededStream, antipodal_augment, sample_uniform_s2, sample_uniform_s3

LOG2 = math.log(2)


def single(p=(0.36, 0.48, 0.8)):
    return Configuration(np.array([p], dtype=float))


def test_equilateral_triangle():
    cfg = hopf_lift(single(), 3, SeededStream(1))
    X = cfg.points
    d = [np.linalg.norm(X[i] - X[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
    np.testing.assert_allclose(d, math.sqrt(3), atol=1e-14)


def test_lift_round_trip():
    base = sample_uniform_s2(200, SeededStream(2))
    cfg = hopf_lift(base, 5, SeededStream(3))
    assert len(cfg) == 1000
    np.testing.assert_allclose(hopf_map(cfg.points), np.repeat(base.points, 5, axis=0), atol=1e-10)


def test_seeds_only_rotate_fibres():
    base = sample_uniform_s2(4, SeededStream(4))
    a = hopf_lift(base, 6, SeededStream(5)).points.reshape(4, 6, 4)
    b = hopf_lift(base, 6, SeededStream(6)).points.reshape(4, 6, 4)
    for i in range(4):
        da = np.linalg.norm(a[i][:, None] - a[i][None], axis=-1)
        db = np.linalg.norm(b[i][:, None] - b[i][None], axis=-1)
        np.testing.assert_allclose(da, db, atol=1e-14)
    assert not np.allclose(a, b)


def test_energy_examples():
    two = np.array([[1.0, 0, 0, 0], [-1.0, 0, 0, 0]])
    assert log_energy(two) == pytest.approx(-2 * LOG2, abs=1e-15)
    assert log_energy(single()) == 0.0
    with pytest.raises(CoincidentPoints):
        log_energy(np.array([[1.0, 0, 0], [1.0, 0, 0]]))


def test_fiber_energy():
    assert fiber_energy(1) == 0
    assert fiber_energy(2) == pytest.approx(-2 * LOG2)
    for k in range(1, 65):
        cfg = hopf_lift(single(), k, SeededStream(k))
        assert log_energy(cfg, method="pairwise") == pytest.approx(fiber_energy(k), abs=1e-9)
    with pytest.raises(ValidationError):
        fiber_energy(0)


@pytest.mark.parametrize("m, k", [(1, 5), (2, 1), (7, 3), (40, 4), (25, 9)])
def test_fast_path_matches_pairwise(m, k):
    cfg = hopf_lift(sample_uniform_s2(m, SeededStream(m)), k, SeededStream(m, k))
    fast = log_energy(cfg)
    slow = log_energy(cfg, method="pairwise")
    assert fast == pytest.approx(slow, abs=1e-9 * max(1, abs(slow)))


def test_fast_path_hard_geometry():
    # antipodal and nearly coincident base points
    base = antipodal_augment(sample_uniform_s2(10, SeededStream(7)))
    p = base.points[0]
    q = p + 1e-5 * np.array([p[1], -p[0], 0.0])
    pts = np.vstack([base.points, q / np.linalg.norm(q)])
    cfg = hopf_lift(Configuration(pts), 6, SeededStream(8))
    assert log_energy(cfg) == pytest.approx(log_energy(cfg, method="pairwise"), rel=1e-12)


def test_chunk_sizes_agree():
    cfg = sample_uniform_s3(300, SeededStream(9))
    ref = pairwise_log_energy(cfg.points, chunk=1000)
    for chunk in (1, 7, 64, 299):
        assert pairwise_log_energy(cfg.points, chunk=chunk) == pytest.approx(ref, abs=1e-9)
    lifted = hopf_lift(sample_uniform_s2(50, SeededStream(10)), 4, SeededStream(11))
    f = lifted.fibres
    assert lifted_log_energy(f["base"], f["phases"], 4, chunk=7) == pytest.approx(log_energy(lifted), abs=1e-9)


def test_rotation_invariance():
    rng = np.random.default_rng(12)
    cfg = hopf_lift(sample_uniform_s2(30, SeededStream(12)), 3, SeededStream(13))
    R = random_rotation(rng, 4)
    assert log_energy(cfg.rotated(R)) == pytest.approx(log_energy(cfg), abs=1e-9)


def test_decomposition():
    k = 5
    cfg = hopf_lift(sample_uniform_s2(20, SeededStream(14)), k, SeededStream(15))
    same, cross = fibre_decomposition(cfg)
    assert same == pytest.approx(20 * fiber_energy(k), abs=1e-9)
    assert same + cross == pytest.approx(log_energy(cfg), abs=1e-9)


def test_determinism():
    cfg = hopf_lift(sample_uniform_s2(64, SeededStream(16)), 4, SeededStream(17))
    assert log_energy(cfg) == log_energy(cfg)
    again = hopf_lift(sample_uniform_s2(64, SeededStream(16)), 4, SeededStream(17))
    assert log_energy(again, method="pairwise") == log_energy(cfg, method="pairwise")


def test_antipodal_fibre_pair():
    k = 6
    for i in range(20):
        p = sample_uniform_s2(1, SeededStream(18, i))
        cfg = hopf_lift(antipodal_augment(p), k, SeededStream(19, i))
        same, cross = fibre_decomposition(cfg)
        # both orders of the k^2 pairs, each pair term -(log 2)/2
        assert cross / 2 == pytest.approx(-LOG2 / 2 * k * k, abs=1e-10)


def test_singular_base():
    with pytest.raises(SingularBase):
        hopf_lift(single((-1.0, 0.0, 0.0)), 3, SeededStream(20))
    with pytest.raises(ValidationError):
        hopf_lift(sample_uniform_s3(3, SeededStream(21)), 2, SeededStream(22))
    with pytest.raises(ValidationError):
        log_energy(sample_uniform_s3(3, SeededStream(21)), method="fibre")
    with pytest.raises(ValidationError):
        log_energy(sample_uniform_s3(3, SeededStream(21)), method="fast")


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(1, 8), st.integers(0, 2 ** 32))
def test_fast_path_property(m, k, seed):
    cfg = hopf_lift(sample_uniform_s2(m, SeededStream(seed)), k, SeededStream(seed, 1))
    slow = log_energy(cfg, method="pairwise")
    assert log_energy(cfg) == pytest.approx(slow, abs=1e-9 * max(1.0, abs(slow)))
