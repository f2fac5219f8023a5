import math

import numpy as np
import pytest

from hopflift.diamond import (POLE_ROTATION, DiamondSpec, build_diamond, diamond_expected_energy_s2,
                              diamond_heights, diamond_rj_ansatz, read_rj_file, rotate_south_pole_to_minus_x,
                              round_half_away)
from hopflift.errors import ValidationError
from hopflift.geometry import Configuration
from hopflift.lift import _sq_dists, hopf_lift, log_energy
from hopflift.sampling import SeededStream

LOG2 = math.log(2)


def test_round_half_away():
    np.testing.assert_array_equal(round_half_away([0.5, 1.5, 2.5, -0.5, 2.4999]), [1, 2, 3, -1, 2])


def test_ansatz():
    assert diamond_rj_ansatz(1) == [4]
    for p in range(1, 201):
        r = diamond_rj_ansatz(p)
        assert r == r[::-1]
        assert min(r) >= 1
    with pytest.raises(ValidationError):
        diamond_rj_ansatz(0)


def test_heights():
    assert diamond_heights([6])[0] == pytest.approx(0.0, abs=1e-15)
    for p in (2, 5, 40):
        z = diamond_heights(diamond_rj_ansatz(p))
        assert np.all(np.diff(z) < 0)
        assert np.all(np.abs(z) < 1)
        assert np.max(np.abs(z + z[::-1])) < 1e-12
    with pytest.raises(ValidationError):
        diamond_heights([3, 0])


def test_build_four_point_case():
    cfg = build_diamond(DiamondSpec.from_rj([2]), SeededStream(1))
    assert len(cfg) == 4
    np.testing.assert_allclose(cfg.points[0], [0, 0, 1])
    np.testing.assert_allclose(cfg.points[-1], [0, 0, -1])
    np.testing.assert_allclose(cfg.points[1], -cfg.points[2], atol=1e-15)


def test_build_structure():
    spec = DiamondSpec.ansatz(6)
    cfg = build_diamond(spec, SeededStream(2))
    assert len(cfg) == spec.n
    assert np.max(np.abs(np.linalg.norm(cfg.points, axis=1) - 1)) < 1e-14
    start = 1
    for rj in spec.rj:
        lon = np.unwrap(np.arctan2(cfg.points[start:start + rj, 1], cfg.points[start:start + rj, 0]))
        np.testing.assert_allclose(np.diff(lon), 2 * np.pi / rj, atol=1e-12)
        start += rj


def test_expected_energy_examples():
    assert diamond_expected_energy_s2(DiamondSpec.from_rj([2])) == pytest.approx(-8 * LOG2, abs=1e-12)
    spec = DiamondSpec.ansatz(4)
    assert diamond_expected_energy_s2(spec) == diamond_expected_energy_s2(DiamondSpec.ansatz(4))


def test_expected_energy_mc_p1_r4():
    spec = DiamondSpec.from_rj([4])
    e = np.array([log_energy(build_diamond(spec, SeededStream(3, i))) for i in range(100_000)])
    se = e.std(ddof=1) / math.sqrt(len(e))
    target = diamond_expected_energy_s2(spec)
    # energy does not depend on the phase here, so only rounding separates the values
    assert abs(e.mean() - target) <= 3 * se + 1e-10 * abs(target)


def test_expected_energy_asymptotics():
    for p in range(4, 60, 3):
        spec = DiamondSpec.ansatz(p)
        N = spec.n
        if not 50 <= N <= 5000:
            continue
        E = diamond_expected_energy_s2(spec)
        rest = E - ((0.5 - LOG2) * N * N - 0.5 * N * math.log(N))
        assert -0.3 <= rest / N <= 0.3


def test_rotation_and_pole_removal():
    np.testing.assert_allclose(POLE_ROTATION @ [0, 0, -1], [-1, 0, 0])
    spec = DiamondSpec.ansatz(5)
    cfg = build_diamond(spec, SeededStream(4))
    full = rotate_south_pole_to_minus_x(cfg, drop_poles=False)
    assert np.max(np.abs(_sq_dists(full.points, full.points) - _sq_dists(cfg.points, cfg.points))) < 1e-12
    lifted_base = rotate_south_pole_to_minus_x(cfg)
    assert len(lifted_base) == spec.n - 2
    assert np.min(1 + lifted_base.points[:, 0]) > 1e-3
    hopf_lift(lifted_base, 3, SeededStream(5))


def test_rj_file(tmp_path):
    path = tmp_path / "rj.txt"
    path.write_text("3\n5\n\n3\n")
    assert read_rj_file(path) == [3, 5, 3]
    path.write_text("3\n0\n")
    with pytest.raises(ValidationError):
        read_rj_file(path)
    assert DiamondSpec.from_rj([3, 5, 3]).n == 13
