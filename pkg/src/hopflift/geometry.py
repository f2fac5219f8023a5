"""Points on S^2, S^3 and CP^1, and the Hopf fibration between them.

Conventions
-----------
An S^3 point is stored as a real 4-vector (a, b, c, d).  Its complex form is
``(z1, z2) = (a + ib, c + id)``.  The Hopf map

    h(a, b, c, d) = (a^2 + b^2 - c^2 - d^2, 2(ad + bc), 2(bd - ac))

equals (|z1|^2 - |z2|^2, 2 Im(z1 z2), -2 Re(z1 z2)), so its fibres are the
orbits of (z1, z2) -> (e^{it} z1, e^{-it} z2).  In the "fibre frame"
``w = (z1, conj(z2))`` this is the diagonal circle action, and the fibre
over a base point is ``{e^{it} w0}``.  Euclidean distances in R^4 and in the
fibre frame agree.

CP^1 points are unit-norm homogeneous pairs ``p = (p1, p2)``, identified with
S^2 by x = (2 Re(conj(p1) p2), 2 Im(conj(p1) p2), |p1|^2 - |p2|^2).  The north
pole (0, 0, 1) is [1:0] and the south pole is [0:1].  With this identification
|<p, q>|^2 = (1 + <x, y>) / 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularBase, ValidationError

UNIT_TOL = 1e-12
SINGULAR_EPS = 1e-12


def _check_unit(v, tol=UNIT_TOL):
    n = float(np.dot(v, v))
    if abs(n - 1.0) > tol:
        raise ValidationError(f"point is not unit norm (|x|^2 = {n!r})")


@dataclass(frozen=True)
class SurfacePoint2:
    x: float
    y: float
    z: float

    def __post_init__(self):
        _check_unit(np.array([self.x, self.y, self.z]))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y, self.z], dtype=dtype)


@dataclass(frozen=True)
class SurfacePoint3:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        _check_unit(np.array([self.a, self.b, self.c, self.d]))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.a, self.b, self.c, self.d], dtype=dtype)

    @property
    def complex_pair(self):
        return complex(self.a, self.b), complex(self.c, self.d)

    @classmethod
    def from_complex(cls, z1, z2):
        return cls(z1.real, z1.imag, z2.real, z2.imag)


@dataclass(frozen=True, eq=False)
class Cp1Point:
    """A point [p1 : p2] of CP^1, held with |p1|^2 + |p2|^2 = 1."""

    p1: complex
    p2: complex

    def __post_init__(self):
        n = abs(self.p1) ** 2 + abs(self.p2) ** 2
        if abs(n - 1.0) > UNIT_TOL:
            raise ValidationError(f"homogeneous pair is not unit norm ({n!r})")

    @classmethod
    def from_homogeneous(cls, p1, p2):
        s = np.sqrt(abs(p1) ** 2 + abs(p2) ** 2)
        if s == 0:
            raise ValidationError("(0, 0) is not a point of CP^1")
        return cls(complex(p1) / s, complex(p2) / s)

    def __array__(self, dtype=None, copy=None):
        return np.array([self.p1, self.p2], dtype=dtype or complex)

    def __eq__(self, other):
        if not isinstance(other, Cp1Point):
            return NotImplemented
        return abs(cp1_abs_inner(self, other) - 1.0) < 1e-10


def hopf_map(X):
    """Hopf map S^3 -> S^2 on an array of shape (..., 4)."""
    X = np.asarray(X, dtype=float)
    a, b, c, d = X[..., 0], X[..., 1], X[..., 2], X[..., 3]
    return np.stack([a * a + b * b - c * c - d * d,
                     2.0 * (a * d + b * c),
                     2.0 * (b * d - a * c)], axis=-1)


def fiber_point(p, t):
    """Point of the fibre over ``p`` at fibre parameter ``t``.

    Broadcasts over leading axes of ``p`` (shape (..., 3)) and ``t``.
    Raises SingularBase near p = (-1, 0, 0).
    """
    p = np.asarray(p, dtype=float)
    t = np.asarray(t, dtype=float)
    one_plus = 1.0 + p[..., 0]
    if np.any(one_plus < SINGULAR_EPS):
        raise SingularBase("base point at (-1, 0, 0); rotate the configuration first")
    s = np.sqrt(2.0 * one_plus)
    p2, p3 = p[..., 1], p[..., 2]
    ct, st = np.cos(t), np.sin(t)
    return np.stack([one_plus * ct, one_plus * st,
                     p2 * st - p3 * ct, p2 * ct + p3 * st], axis=-1) / s[..., None]


def to_complex(X):
    """(a, b, c, d) -> (a + ib, c + id), shape (..., 2)."""
    X = np.asarray(X, dtype=float)
    return np.stack([X[..., 0] + 1j * X[..., 1], X[..., 2] + 1j * X[..., 3]], axis=-1)


def from_complex(Z):
    Z = np.asarray(Z, dtype=complex)
    return np.stack([Z[..., 0].real, Z[..., 0].imag, Z[..., 1].real, Z[..., 1].imag], axis=-1)


def fibre_frame(X):
    """(z1, conj z2): the complex form in which fibres are diagonal circle orbits."""
    Z = to_complex(X)
    Z[..., 1] = np.conj(Z[..., 1])
    return Z


def cp1_abs_inner(p, q):
    """|p1 conj(q1) + p2 conj(q2)| for unit-norm representatives, clipped to [0, 1]."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    v = np.abs(np.sum(p * np.conj(q), axis=-1))
    return np.minimum(v, 1.0)


def s2_to_cp1(x):
    """Unit homogeneous representative of the CP^1 point over ``x`` (shape (..., 3) -> (..., 2)).

    Uses (1 + z, x + iy) / sqrt(2(1 + z)) on the northern hemisphere and
    (x - iy, 1 - z) / sqrt(2(1 - z)) on the southern one, so no chart
    ever divides by a small number.
    """
    x = np.asarray(x, dtype=float)
    X, Y, Z = x[..., 0], x[..., 1], x[..., 2]
    north = Z >= 0
    out = np.empty(x.shape[:-1] + (2,), dtype=complex)
    sn = np.sqrt(2.0 * (1.0 + np.where(north, Z, 0.0)))
    ss = np.sqrt(2.0 * (1.0 - np.where(north, 0.0, Z)))
    out[..., 0] = np.where(north, (1.0 + Z) / sn, (X - 1j * Y) / ss)
    out[..., 1] = np.where(north, (X + 1j * Y) / sn, (1.0 - Z) / ss)
    return out


def cp1_to_s2(p):
    """Inverse of :func:`s2_to_cp1`; normalizes the pair, never divides by a coordinate."""
    p = np.asarray(p, dtype=complex)
    nrm = np.sum(np.abs(p) ** 2, axis=-1)
    w = np.conj(p[..., 0]) * p[..., 1]
    return np.stack([2.0 * w.real, 2.0 * w.imag,
                     np.abs(p[..., 0]) ** 2 - np.abs(p[..., 1]) ** 2], axis=-1) / nrm[..., None]


def random_rotation(rng, dim=4):
    """Haar-distributed rotation in SO(dim)."""
    g = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_rotation4(rng):
    return random_rotation(rng, 4)


@dataclass
class Configuration:
    """An ordered point set on S^2 (n, 3) or S^3 (n, 4) with provenance metadata.

    Lifted configurations also carry ``fibres``: a dict with the base points,
    per-fibre phases and ``k``, which :func:`hopflift.lift.log_energy` uses
    for its exact fast path.
    """

    points: np.ndarray
    family: str = "custom"
    params: dict = field(default_factory=dict)
    seed: int | None = None
    fibres: dict | None = None

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[-1] not in (3, 4):
            raise ValidationError(f"points must have 3 or 4 coordinates, got shape {self.points.shape}")
        if self.points.size:
            nrm = np.einsum("ij,ij->i", self.points, self.points)
            if np.max(np.abs(nrm - 1.0)) > 1e-10:
                raise ValidationError("configuration contains non-unit points")

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        """Ambient dimension: 3 for S^2, 4 for S^3."""
        return self.points.shape[1]

    def rotated(self, R):
        """Apply an orthogonal matrix; fibre metadata is dropped since the frame changes."""
        return Configuration(self.points @ np.asarray(R).T, self.family,
                             dict(self.params, rotated=True), self.seed)
