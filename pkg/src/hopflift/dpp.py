"""Homogeneous projection DPPs on S^2 / CP^1: Spherical and Harmonic ensembles.

Both kernels are rotation invariant, so |K(x, y)|^2 = K(x, x)^2 f(s) with
s = |<p, q>| = sqrt((1 + <x, y>) / 2) the CP^1 inner product of the
representatives.  ``RadialProfile`` carries f; ``ProjectionKernel`` carries
an explicit orthonormal basis and drives the sequential sampler.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import RejectionStall, ValidationError
from .geometry import Configuration, s2_to_cp1
from .sampling import _normalized_gaussian, _rng
from .specfun import jacobi_p10

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class RadialProfile:
    family: str  # "spherical", "harmonic" or "constant-one"
    param: int  # r for spherical, L for harmonic
    rank: int
    f: Callable

    def __call__(self, s):
        return self.f(np.asarray(s, dtype=float))

    def of_inner(self, u):
        """f evaluated at the S^2 inner product u = <x, y>."""
        u = np.asarray(u, dtype=float)
        return self.f(np.sqrt(np.clip((1.0 + u) / 2.0, 0.0, 1.0)))


def spherical_profile(r: int) -> RadialProfile:
    if r < 1:
        raise ValidationError("spherical ensemble needs r >= 1")
    return RadialProfile("spherical", r, r, lambda s: s ** (2 * (r - 1)))


def harmonic_profile(L: int) -> RadialProfile:
    if L < 0:
        raise ValidationError("harmonic ensemble needs L >= 0")
    return RadialProfile("harmonic", L, (L + 1) ** 2,
                         lambda s: (jacobi_p10(L, 2.0 * s * s - 1.0) / (L + 1)) ** 2)


def constant_profile(rank: int = 1) -> RadialProfile:
    return RadialProfile("constant-one", rank, rank, lambda s: np.ones_like(s))


def spherical_kernel_abs(r, u):
    """|K(x, y)| of the rank-r Spherical ensemble w.r.t. surface measure.

    Modulus-squared convention: |K|^2 = (r / 4 pi)^2 ((1 + u) / 2)^(r - 1).
    """
    u = np.asarray(u, dtype=float)
    return (r / FOUR_PI) * np.clip((1.0 + u) / 2.0, 0.0, 1.0) ** ((r - 1) / 2.0)


def spherical_pair_intensity(r, u):
    """Two-point intensity rho_2 = K(x,x)^2 - |K(x,y)|^2 at <x, y> = u."""
    u = np.asarray(u, dtype=float)
    return (r / FOUR_PI) ** 2 * (1.0 - np.clip((1.0 + u) / 2.0, 0.0, 1.0) ** (r - 1))


def harmonic_kernel(L, u):
    """K(x, y) = ((L + 1) / 4 pi) P_L^(1,0)(<x, y>)."""
    return (L + 1) * jacobi_p10(L, u) / FOUR_PI


def pair_intensity(profile: RadialProfile, u):
    d = profile.rank / FOUR_PI
    return d * d * (1.0 - profile.of_inner(u))


# --- orthonormal bases -------------------------------------------------------

def real_spherical_harmonics(L: int, X):
    """Real spherical harmonics of degree <= L at points X (n, 3), shape (n, (L+1)^2).

    Orthonormal for the surface measure (total area 4 pi).  Columns are
    ordered by degree; within degree l: m = 0, then (cos, sin) pairs for
    m = 1..l.  Normalized associated Legendre functions come from the
    standard stable column recurrence in m.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    z = np.clip(X[:, 2], -1.0, 1.0)
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = np.arctan2(X[:, 1], X[:, 0])
    n = X.shape[0]
    P = {}
    pmm = np.full(n, 1.0 / math.sqrt(FOUR_PI))
    for m in range(L + 1):
        if m > 0:
            pmm = pmm * math.sqrt((2 * m + 1) / (2.0 * m)) * sin_t
        P[m, m] = pmm
        if m + 1 <= L:
            P[m + 1, m] = math.sqrt(2 * m + 3) * z * pmm
        for ell in range(m + 2, L + 1):
            a = math.sqrt((4 * ell * ell - 1) / (ell * ell - m * m))
            b = math.sqrt(((ell - 1) ** 2 - m * m) / (4 * (ell - 1) ** 2 - 1))
            P[ell, m] = a * (z * P[ell - 1, m] - b * P[ell - 2, m])
    cols = []
    root2 = math.sqrt(2.0)
    for ell in range(L + 1):
        cols.append(P[ell, 0])
        for m in range(1, ell + 1):
            cols.append(root2 * P[ell, m] * np.cos(m * phi))
            cols.append(root2 * P[ell, m] * np.sin(m * phi))
    return np.stack(cols, axis=1)


def _log_binom(n, k):
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def spherical_unit_features(r: int, X):
    """Unit vectors v(x) in C^r with |<v(x), v(y)>| = |<p, q>|^(r-1).

    v_j = sqrt(C(r-1, j)) p1^(r-1-j) p2^j for the CP^1 representative
    (p1, p2) of x, evaluated in log space so large r does not overflow.
    """
    p = s2_to_cp1(np.atleast_2d(X))
    j = np.arange(r)
    logc = np.array([0.5 * _log_binom(r - 1, jj) for jj in j])
    with np.errstate(divide="ignore"):
        la, lb = np.log(np.abs(p[:, 0])), np.log(np.abs(p[:, 1]))
    aa, ab = np.angle(p[:, 0]), np.angle(p[:, 1])
    e1 = (r - 1 - j)[None, :]
    e2 = j[None, :]
    with np.errstate(invalid="ignore"):
        logmod = logc[None, :] + np.where(e1 > 0, e1 * la[:, None], 0.0) + np.where(e2 > 0, e2 * lb[:, None], 0.0)
    return np.exp(logmod) * np.exp(1j * (e1 * aa[:, None] + e2 * ab[:, None]))


def spherical_chart_basis(r: int, z):
    """phi_j(z) = sqrt(r C(r-1, j) / pi) z^j (1 + |z|^2)^(-(r+1)/2), orthonormal for Lebesgue measure on C."""
    z = np.asarray(z, dtype=complex)
    j = np.arange(r)
    coef = np.sqrt(r / math.pi * np.exp([_log_binom(r - 1, jj) for jj in j]))
    return coef * z[..., None] ** j * (1.0 + np.abs(z[..., None]) ** 2) ** (-(r + 1) / 2.0)


def chart_coordinate(X):
    """Affine chart z = p2 / p1 of the CP^1 representative (north pole -> 0)."""
    p = s2_to_cp1(np.atleast_2d(X))
    return p[:, 1] / p[:, 0]


@dataclass(frozen=True)
class ProjectionKernel:
    """Rank-r projection kernel on S^2 given by an orthonormal basis.

    ``features(X)`` returns the basis at points X (n, 3), orthonormal for the
    surface measure, so K(x, y) = sum_j phi_j(x) conj(phi_j(y)) and the
    diagonal is the constant rank / (4 pi).  ``diag_bound`` bounds the
    diagonal relative to the uniform density 1 / (4 pi).
    """

    family: str
    param: int
    rank: int
    features: Callable

    @property
    def diag_bound(self):
        return float(self.rank)

    def unit_features(self, X):
        return self.features(X) / math.sqrt(self.rank / FOUR_PI)

    def kernel(self, X, Y):
        return self.features(X) @ np.conj(self.features(Y)).T

    def diagonal(self, X):
        F = self.features(X)
        return np.sum(np.abs(F) ** 2, axis=1)

    def profile(self) -> RadialProfile:
        if self.family == "spherical":
            return spherical_profile(self.param)
        return harmonic_profile(self.param)


def build_projection_kernel(family: str, param: int) -> ProjectionKernel:
    if family == "spherical":
        r = int(param)
        if r < 1:
            raise ValidationError("spherical ensemble needs r >= 1")
        scale = math.sqrt(r / FOUR_PI)
        return ProjectionKernel("spherical", r, r, lambda X: scale * spherical_unit_features(r, X))
    if family == "harmonic":
        L = int(param)
        if L < 0:
            raise ValidationError("harmonic ensemble needs L >= 0")
        return ProjectionKernel("harmonic", L, (L + 1) ** 2, lambda X: real_spherical_harmonics(L, X))
    raise ValidationError(f"unknown DPP family {family!r}")


def hkpv_sample(kernel: ProjectionKernel, stream, batch=64, min_acceptance=1e-6,
                stall_check_after=10 ** 6) -> Configuration:
    """Exact sample of a projection DPP by the sequential chain-rule algorithm.

    Point i is drawn from ||P_i phi(x)||^2 / (r - i), P_i the projector onto
    the orthogonal complement of the features already chosen.  Proposals
    are uniform on S^2 (the diagonal is constant, so this is the envelope)
    and are accepted with probability ||P_i v(x)||^2 for the unit feature
    v(x); the expected acceptance for point i is (r - i) / r.
    """
    rng = _rng(stream)
    r = kernel.rank
    points = np.empty((r, 3))
    basis = None  # orthonormal rows spanning the chosen features
    for i in range(r):
        trials = 0
        while True:
            X = _normalized_gaussian(rng, batch, 3)
            U = rng.random(batch)
            V = kernel.unit_features(X)
            if basis is None:
                resid2 = np.sum(np.abs(V) ** 2, axis=1)
            else:
                coef = V @ np.conj(basis).T
                resid2 = np.sum(np.abs(V) ** 2, axis=1) - np.sum(np.abs(coef) ** 2, axis=1)
            hits = np.flatnonzero(U < resid2)
            if hits.size:
                idx = hits[0]
                trials += idx + 1
                break
            trials += batch
            if trials >= stall_check_after and 1.0 / trials < min_acceptance:
                raise RejectionStall(f"no acceptance in {trials} proposals at point {i}")
        points[i] = X[idx]
        v = V[idx]
        if basis is None:
            e = v / np.linalg.norm(v)
            basis = e[None, :]
        else:
            e = v.copy()
            for _ in range(2):  # classical Gram-Schmidt, applied twice
                e = e - (np.conj(basis) @ e) @ basis
            e = e / np.linalg.norm(e)
            basis = np.vstack([basis, e])
    fam = f"{kernel.family}-dpp"
    return Configuration(points, fam, {"family": kernel.family, "param": kernel.param, "rank": r},
                         getattr(stream, "seed", None))
