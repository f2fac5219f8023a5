"""Hopf lifting of S^2 configurations and exact logarithmic energy.

Energy convention: E0 = sum over ordered pairs i != j of log(1/|x_i - x_j|),
so every unordered pair is counted twice and k equally spaced points on a
great circle have energy -k log k.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import CoincidentPoints, ValidationError
from .geometry import Configuration, fiber_point, fibre_frame
from .sampling import _rng

DEFAULT_CHUNK = 512
COINCIDENT_D2 = 1e-24


def fiber_energy(k: int) -> float:
    if k < 1:
        raise ValidationError("k must be >= 1")
    return -k * math.log(k)


def hopf_lift(cfg_s2: Configuration, k: int, stream) -> Configuration:
    """Replace each base point by k equally spaced points on its fibre.

    Fibre i gets parameters theta_i + 2 pi l / k, l = 0..k-1, with one
    uniform phase theta_i per fibre.  Output is fibre-major: rows
    i*k .. i*k + k - 1 lie over base point i.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    base = np.asarray(cfg_s2.points, dtype=float)
    if base.shape[1] != 3:
        raise ValidationError("hopf_lift needs an S^2 configuration")
    rng = _rng(stream)
    phases = rng.uniform(0.0, 2.0 * np.pi, len(base))
    t = phases[:, None] + 2.0 * np.pi * np.arange(k)[None, :] / k
    pts = fiber_point(base[:, None, :], t).reshape(-1, 4)
    params = dict(cfg_s2.params, k=k, base_family=cfg_s2.family)
    return Configuration(pts, "lifted-" + cfg_s2.family, params, cfg_s2.seed,
                         fibres={"base": base.copy(), "phases": phases, "k": k})


def _sq_dists(A, B):
    d2 = np.zeros((A.shape[0], B.shape[0]))
    for c in range(A.shape[1]):
        diff = A[:, c][:, None] - B[:, c][None, :]
        d2 += diff * diff
    return d2


def pairwise_log_energy(points, chunk=DEFAULT_CHUNK) -> float:
    """Generic O(N^2) ordered-pair energy, summed block by block in a fixed order."""
    X = np.asarray(points, dtype=float)
    n = X.shape[0]
    partial = []
    for s in range(0, n, chunk):
        A = X[s:s + chunk]
        d2 = _sq_dists(A, A)
        iu = np.triu_indices(A.shape[0], 1)
        blocks = [d2[iu]]
        if s + chunk < n:
            blocks.append(_sq_dists(A, X[s + chunk:]).ravel())
        for d in blocks:
            if d.size == 0:
                continue
            if d.min() < COINCIDENT_D2:
                raise CoincidentPoints("configuration has coincident points")
            partial.append(float(np.sum(np.log(d))))
    # -1/2 log d^2 per ordered pair, two orders per unordered pair
    return -math.fsum(partial)


def _fibre_pair_terms(w, base, phases, k, rows, cols):
    """Exact sum of log d^2 over the k*k point pairs between fibres rows[i] and cols[j]."""
    c = np.sum(w[rows][:, None, :] * np.conj(w[cols])[None, :, :], axis=-1)
    # 1 - |<p,q>|^2 = |x - y|^2 / 4, exact for nearby bases
    one_m_rho2 = _sq_dists(base[rows], base[cols]) / 4.0
    one_m_rho2 = np.clip(one_m_rho2, 0.0, 1.0)
    sq = np.sqrt(1.0 - one_m_rho2)  # rho
    root = np.sqrt(one_m_rho2)
    log_mu = np.log(np.maximum(sq, 1e-300)) - np.log1p(root)
    mu_k = np.exp(k * log_mu)
    beta = phases[rows][:, None] - phases[cols][None, :] + np.angle(c)
    inner = (-np.expm1(k * log_mu)) ** 2 + 4.0 * mu_k * np.sin(0.5 * k * beta) ** 2
    if rows is cols:
        np.fill_diagonal(inner, 1.0)  # a fibre paired with itself is not a cross term
    if np.any(inner < COINCIDENT_D2):
        raise CoincidentPoints("two fibres share a point")
    return k * (k * np.log1p(root) + np.log(inner))


def lifted_log_energy(base, phases, k, chunk=DEFAULT_CHUNK) -> float:
    """Exact energy of a lifted configuration in O(M^2) for M base points.

    For fibres over p and q with c = <w_p, w_q> = rho e^{i gamma}, the k*k
    squared distances are 2 - 2 rho cos(beta + 2 pi m / k) (each m k times),
    beta = theta_p - theta_q + gamma, and
        prod_m (2 - 2 rho cos(beta + 2 pi m/k))
            = (1 + sqrt(1 - rho^2))^k * |1 - mu^k e^{i k beta}|^2,
    mu = rho / (1 + sqrt(1 - rho^2)).
    """
    base = np.asarray(base, dtype=float)
    phases = np.asarray(phases, dtype=float)
    M = base.shape[0]
    w = fibre_frame(fiber_point(base, 0.0))
    partial = [M * fiber_energy(k)]
    for s in range(0, M, chunk):
        rows = np.arange(s, min(s + chunk, M))
        terms = _fibre_pair_terms(w, base, phases, k, rows, rows)
        partial.append(-float(np.sum(terms[np.triu_indices(len(rows), 1)])))
        if s + chunk < M:
            cols = np.arange(s + chunk, M)
            partial.append(-float(np.sum(_fibre_pair_terms(w, base, phases, k, rows, cols))))
    return math.fsum(partial)


def log_energy(cfg, method="auto", chunk=DEFAULT_CHUNK) -> float:
    """Discrete logarithmic energy (ordered pairs) of a configuration or point array.

    ``method="auto"`` uses the exact fibre-pair formula when ``cfg`` carries
    lift metadata and the generic pairwise sum otherwise.
    """
    fibres = getattr(cfg, "fibres", None)
    if method not in ("auto", "pairwise", "fibre"):
        raise ValidationError(f"unknown energy method {method!r}")
    if method == "fibre" or (method == "auto" and fibres is not None):
        if fibres is None:
            raise ValidationError("configuration has no fibre metadata")
        return lifted_log_energy(fibres["base"], fibres["phases"], fibres["k"], chunk)
    points = cfg.points if isinstance(cfg, Configuration) else cfg
    return pairwise_log_energy(points, chunk)


def fibre_decomposition(cfg: Configuration):
    """Split the pairwise energy into (same-fibre part, cross-fibre part)."""
    k = cfg.fibres["k"]
    X = cfg.points
    M = len(X) // k
    same = math.fsum(pairwise_log_energy(X[i * k:(i + 1) * k]) for i in range(M))
    return same, pairwise_log_energy(X) - same
