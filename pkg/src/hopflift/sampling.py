"""Seeded random streams and the uniform families on S^2 and S^3."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Configuration
from .errors import ValidationError


@dataclass(frozen=True)
class SeededStream:
    """Reproducible substream keyed by (master seed, stream index).

    Backed by the counter-based Philox generator; the key is derived with
    ``numpy.random.SeedSequence(seed, spawn_key=(index,))`` so different
    indices give independent streams and the same pair always replays the
    same sequence.
    """

    seed: int = 0
    index: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.index < 0:
            raise ValidationError("stream index must be nonnegative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.index,))
        return np.random.Generator(np.random.Philox(ss))


def _rng(stream):
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, SeededStream):
        return stream.generator()
    return SeededStream(int(stream)).generator()


def _normalized_gaussian(rng, n, dim):
    g = rng.standard_normal((n, dim))
    nrm = np.linalg.norm(g, axis=1)
    # a zero Gaussian vector has probability zero; redraw defensively
    while np.any(nrm == 0):
        bad = nrm == 0
        g[bad] = rng.standard_normal((int(bad.sum()), dim))
        nrm = np.linalg.norm(g, axis=1)
    return g / nrm[:, None]


def sample_v_density(rng, n):
    """Draw v on [-1, 1] with density (2/pi) sqrt(1 - v^2).

    v = cos(theta) with theta having density (2/pi) sin^2(theta) on [0, pi];
    theta solves (theta - sin(theta) cos(theta)) / pi = U, found by bisection
    (the CDF is monotone, its derivative vanishes at both ends).
    """
    target = np.pi * rng.random(n)
    lo = np.zeros(n)
    hi = np.full(n, np.pi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = mid - np.sin(mid) * np.cos(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    theta = 0.5 * (lo + hi)
    return np.cos(theta)


def sample_uniform_s3(n, stream, parametric=False) -> Configuration:
    """n i.i.d. uniform points on S^3.

    Default: normalized 4-d Gaussian vectors.  ``parametric=True`` uses the
    (phi, u, v) parametrization with v drawn by inverse CDF instead; both give
    the same law.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    rng = _rng(stream)
    if parametric:
        phi = rng.uniform(0.0, 2.0 * np.pi, n)
        u = rng.uniform(-1.0, 1.0, n)
        v = sample_v_density(rng, n)
        sv, su = np.sqrt(1 - v * v), np.sqrt(1 - u * u)
        pts = np.stack([sv * su * np.cos(phi), sv * su * np.sin(phi), sv * u, v], axis=1)
        pts /= np.linalg.norm(pts, axis=1)[:, None]
    else:
        pts = _normalized_gaussian(rng, n, 4)
    return Configuration(pts, "uniform-s3", {"n": n}, getattr(stream, "seed", None))


def sample_uniform_s2(n, stream, parametric=False) -> Configuration:
    if n < 1:
        raise ValidationError("n must be >= 1")
    rng = _rng(stream)
    if parametric:
        phi = rng.uniform(0.0, 2.0 * np.pi, n)
        u = rng.uniform(-1.0, 1.0, n)
        s = np.sqrt(1 - u * u)
        pts = np.stack([s * np.cos(phi), s * np.sin(phi), u], axis=1)
    else:
        pts = _normalized_gaussian(rng, n, 3)
    return Configuration(pts, "uniform-s2", {"n": n}, getattr(stream, "seed", None))


def antipodal_augment(cfg: Configuration) -> Configuration:
    """Originals followed by their antipodes (size doubles)."""
    pts = np.concatenate([cfg.points, -cfg.points])
    return Configuration(pts, cfg.family + "+antipodal", dict(cfg.params), cfg.seed)
