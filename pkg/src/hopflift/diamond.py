"""The Diamond ensemble on S^2: roots of unity on parallels plus the two poles."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .geometry import Configuration
from .sampling import _rng


def round_half_away(x):
    x = np.asarray(x, dtype=float)
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(int)


def diamond_rj_ansatz(p: int) -> list[int]:
    """Points per parallel from the continuous ansatz with K0 = 3/pi.

    r_j = 3 sin(j pi / (p+1)) / sin(pi / (2(p+1))), rounded half away from
    zero and clamped to >= 1.
    """
    if p < 1:
        raise ValidationError("need at least one parallel")
    j = np.arange(1, p + 1)
    cont = 3.0 * np.sin(j * np.pi / (p + 1)) / np.sin(np.pi / (2 * (p + 1)))
    r = np.maximum(1, round_half_away(cont))
    # sin(j pi/(p+1)) and sin((p+1-j) pi/(p+1)) can differ in the last ulp
    r = np.maximum(r, r[::-1])
    return [int(v) for v in r]


def diamond_heights(rj) -> np.ndarray:
    """Energy-optimal heights z_l = 1 - (1 + r_l + 2 sum_{j<l} r_j) / (N - 1)."""
    r = np.asarray(rj, dtype=float)
    if r.ndim != 1 or r.size == 0 or np.any(r < 1):
        raise ValidationError("r_j must be a nonempty list of positive integers")
    N = 2.0 + r.sum()
    before = np.concatenate([[0.0], np.cumsum(r)[:-1]])
    return 1.0 - (1.0 + r + 2.0 * before) / (N - 1.0)


@dataclass(frozen=True)
class DiamondSpec:
    rj: tuple
    z: tuple

    @classmethod
    def from_rj(cls, rj):
        rj = tuple(int(v) for v in rj)
        if any(int(v) < 1 for v in rj):
            raise ValidationError("r_j must be >= 1")
        return cls(rj, tuple(float(v) for v in diamond_heights(rj)))

    @classmethod
    def ansatz(cls, p):
        return cls.from_rj(diamond_rj_ansatz(p))

    @property
    def p(self):
        return len(self.rj)

    @property
    def n(self):
        """Total number of points, poles included."""
        return 2 + sum(self.rj)


def read_rj_file(path) -> list[int]:
    with open(path) as fh:
        rj = [int(line) for line in (s.strip() for s in fh) if line]
    if not rj or min(rj) < 1:
        raise ValidationError(f"{path}: expected one positive integer per line")
    return rj


def build_diamond(spec: DiamondSpec, stream, poles=True) -> Configuration:
    """Diamond configuration: r_j equispaced points on parallel j, rotated by theta_j ~ U[0, 2pi).

    Order: north pole, parallels from north to south, south pole.
    """
    rng = _rng(stream)
    theta = rng.uniform(0.0, 2.0 * np.pi, spec.p)
    rows = [np.array([[0.0, 0.0, 1.0]])] if poles else []
    for rj, zj, th in zip(spec.rj, spec.z, theta):
        ang = 2.0 * np.pi * np.arange(rj) / rj + th
        s = math.sqrt(max(0.0, 1.0 - zj * zj))
        rows.append(np.stack([s * np.cos(ang), s * np.sin(ang), np.full(rj, zj)], axis=1))
    if poles:
        rows.append(np.array([[0.0, 0.0, -1.0]]))
    params = {"p": spec.p, "rj": list(spec.rj), "poles": poles}
    return Configuration(np.concatenate(rows), "diamond", params, getattr(stream, "seed", None))


def diamond_expected_energy_s2(spec: DiamondSpec) -> float:
    """Expected S^2 energy over the parallel phases (closed form, poles included).

        -2 log 2 - sum_j r_j [log 4 + log(1 - z_j^2)/2 + log r_j]
                 - sum_{j,k} r_j r_k log(1 - z_j z_k + |z_j - z_k|) / 2

    Between parallels j and k there are r_j r_k ordered point pairs, each
    with expected -log|x - y| = -log(1 - z_j z_k + |z_j - z_k|) / 2.
    """
    r = np.asarray(spec.rj, dtype=float)
    z = np.asarray(spec.z, dtype=float)
    single = np.sum(r * (math.log(4.0) + 0.5 * np.log1p(-z * z) + np.log(r)))
    zz = z[:, None] * z[None, :]
    cross = 0.5 * np.sum(r[:, None] * r[None, :] * np.log(1.0 - zz + np.abs(z[:, None] - z[None, :])))
    return -2.0 * math.log(2.0) - single - cross


# (x, y, z) -> (z, x, y): sends the south pole (0, 0, -1) to (-1, 0, 0)
POLE_ROTATION = np.array([[0.0, 0.0, 1.0],
                          [1.0, 0.0, 0.0],
                          [0.0, 1.0, 0.0]])


def rotate_south_pole_to_minus_x(cfg: Configuration, drop_poles=True) -> Configuration:
    """Prepare a Diamond configuration for lifting.

    Removes the two poles (if present) and applies (x, y, z) -> (z, x, y), so
    parallel j becomes the circle with first coordinate z_j and no point sits
    on the singular fibre base (-1, 0, 0).
    """
    pts = cfg.points
    if drop_poles:
        keep = np.abs(np.abs(pts[:, 2]) - 1.0) > 1e-15
        pts = pts[keep]
    params = dict(cfg.params, poles=False if drop_poles else cfg.params.get("poles"))
    return Configuration(pts @ POLE_ROTATION.T, cfg.family, params, cfg.seed)
