"""Expected logarithmic energies of lifted and unlifted families on S^3.

All energies use the ordered-pair convention of :mod:`hopflift.lift`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diamond import DiamondSpec
from .dpp import RadialProfile, constant_profile, harmonic_profile, spherical_profile
from .errors import KTooSmall, OddM, OddN, SingularPair, ValidationError
from .specfun import QuadratureSpec, digamma, gamma_ratio, integrate

LOG2 = math.log(2.0)
K_S = 9.0 * math.pi / 64.0
C_DIAMOND_S2 = -0.049222  # reference value for the optimal S^2 Diamond selection

TIGHT = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-13, max_subdivisions=4000)


def _check_pos(name, v):
    if v < 1 or int(v) != v:
        raise ValidationError(f"{name} must be a positive integer, got {v}")


# --- uniform families -----------------------------------------------------

def expected_uniform_s3(N) -> float:
    _check_pos("N", N)
    return -N * N / 4.0 + N / 4.0


def expected_uniform_s3_antipodal(N) -> float:
    _check_pos("N", N)
    if N % 2:
        raise OddN(f"antipodal family needs even N, got {N}")
    return -N * N / 4.0 + (0.5 - LOG2) * N


def expected_lifted_uniform(M, k) -> float:
    _check_pos("M", M)
    _check_pos("k", k)
    N = M * k
    return -N * N / 4.0 + N * k / 4.0 - N * math.log(k)


def expected_lifted_antipodal(M, k) -> float:
    _check_pos("M", M)
    _check_pos("k", k)
    if M % 2:
        raise OddM(f"antipodal base needs even M, got {M}")
    N = M * k
    return -N * N / 4.0 + N * k / 2.0 * (1.0 - LOG2) - N * math.log(k)


def lifted_uniform_linear_coefficient(k) -> float:
    return k / 4.0 - math.log(k)


def lifted_antipodal_linear_coefficient(k) -> float:
    return k / 2.0 * (1.0 - LOG2) - math.log(k)


def best_integer_k(coefficient, kmax=20) -> int:
    """Integer k in [1, kmax] minimizing a linear-term coefficient."""
    return min(range(1, kmax + 1), key=coefficient)


# --- lifted DPPs ----------------------------------------------------------

def _cross_integrand_t(profile):
    def g(t):
        t = np.asarray(t, dtype=float)
        q = 1.0 + t * t
        # sqrt(1 - 1/(1+t^2)) = t / sqrt(1+t^2)
        return np.log1p(t / np.sqrt(q)) * profile(1.0 / np.sqrt(q)) * t / (q * q)
    return g


def _cross_integrand_theta(profile):
    def g(th):
        th = np.asarray(th, dtype=float)
        return 0.25 * np.log1p(np.sin(th / 2.0)) * profile(np.cos(th / 2.0)) * np.sin(th)
    return g


def lifted_dpp_integral(profile: RadialProfile, form="t", spec: QuadratureSpec = TIGHT) -> float:
    """Q = int_0^inf log(1 + sqrt(1 - 1/(1+t^2))) f(1/sqrt(1+t^2)) t / (1+t^2)^2 dt.

    ``form="theta"`` integrates the same quantity after t = tan(theta/2):
    (1/4) int_0^pi log(1 + sin(theta/2)) f(cos(theta/2)) sin(theta) d theta.
    """
    if form == "t":
        return integrate(_cross_integrand_t(profile), (0.0, math.inf), spec)
    if form == "theta":
        return integrate(_cross_integrand_theta(profile), (0.0, math.pi), spec)
    raise ValidationError(f"unknown integral form {form!r}")


def expected_lifted_dpp(profile: RadialProfile, r=None, k=1, form=None,
                        spec: QuadratureSpec = TIGHT) -> float:
    """E = -r k log k - k^2 r^2 / 4 + k^2 r^2 Q for a homogeneous DPP of rank r lifted with k points per fibre.

    The harmonic profile defaults to the finite theta-form of Q.
    """
    r = profile.rank if r is None else r
    _check_pos("r", r)
    _check_pos("k", k)
    if form is None:
        form = "theta" if profile.family == "harmonic" else "t"
    Q = lifted_dpp_integral(profile, form, spec)
    return -r * k * math.log(k) - (k * r) ** 2 / 4.0 + (k * r) ** 2 * Q


def spherical_cross_integral(r) -> float:
    """Closed form of Q for the spherical profile: (sqrt(pi) Gamma(r+1) - Gamma(r+1/2)) / (4 r^2 Gamma(r+1/2))."""
    return (gamma_ratio(r) - 1.0) / (4.0 * r * r)


def expected_lifted_spherical_closed(r, k) -> float:
    _check_pos("r", r)
    _check_pos("k", k)
    return -(k * r) ** 2 / 4.0 - r * k * math.log(k) + k * k * gamma_ratio(r) / 4.0 - k * k / 4.0


def harmonic_integral(L, spec: QuadratureSpec = TIGHT) -> float:
    """I_L, the cross-fibre integral of the harmonic profile (theta form)."""
    return lifted_dpp_integral(harmonic_profile(L), "theta", spec)


def harmonic_integral_leading(L) -> float:
    return math.log(L + 1) / (2.0 * math.pi * (L + 1) ** 3)


# --- coefficients and k rules ---------------------------------------------

def spherical_linear_coefficient(A, B) -> float:
    """Linear coefficient (sqrt(pi)/4) (B/A)^(1/2) - log((B/A)^(1/3)) of the lifted Spherical ensemble."""
    if A <= 0 or B <= 0:
        raise ValidationError("A and B must be positive")
    ratio = B / A
    return math.sqrt(math.pi) / 4.0 * math.sqrt(ratio) - math.log(ratio) / 3.0


def constants() -> dict:
    return {
        "C_S": (2.0 + math.log(K_S)) / 3.0,
        "C_H": math.log(1.0 / 3.0) / 3.0 + LOG2 + digamma(1.5) + 1.0 / 3.0,
        "K_S": K_S,
        "c_diamond_s2": C_DIAMOND_S2,
    }


def rational_approx_sequence(i: int):
    """(A_i, B_i, k_i, r_i, n_i) with B_i = k_i = 10^i, A_i = floor(K_S 10^i), r_i = A_i k_i^2 / B_i, n_i = A_i k_i^2."""
    _check_pos("i", i)
    B = 10 ** i
    A = math.floor(K_S * B)
    k = 10 ** i
    r = A * k * k // B
    return A, B, k, r, A * k * k


def optimal_k_spherical(N) -> float:
    """Real-valued optimal fibre size (4 / (3^(2/3) pi^(1/3))) N^(1/3)."""
    if N < 1:
        raise ValidationError("N must be >= 1")
    return 4.0 / (3.0 ** (2.0 / 3.0) * math.pi ** (1.0 / 3.0)) * N ** (1.0 / 3.0)


def spherical_bracket(N, alpha, C=1.0) -> float:
    """Bracketed linear term -log(C N^a) + (sqrt(pi)/4) C^(3/2) N^((3a-1)/2) - C^2 N^(2a-1) / 4 for k = C N^a."""
    return (-math.log(C) - alpha * math.log(N) + math.sqrt(math.pi) / 4.0 * C ** 1.5 * N ** ((3 * alpha - 1) / 2.0)
            - C * C * N ** (2 * alpha - 1) / 4.0)


def harmonic_k_rule(r) -> int:
    if r < 2:
        raise KTooSmall(f"harmonic k rule undefined for r = {r}")
    k = math.floor(math.sqrt(r) / math.log(r))
    if k < 1:
        raise KTooSmall(f"harmonic k rule gives k = {k} < 1 for r = {r}")
    return k


@dataclass(frozen=True)
class ExpansionCoefficients:
    """E ~ c2 N^2 + c_nlogn N log N + c_linear N for one family."""

    family: str
    c2: float
    c_nlogn: float
    c_linear: float

    def linear_gap(self, other: "ExpansionCoefficients") -> float:
        if other.family != self.family:
            raise ValidationError(f"cannot compare {self.family} with {other.family}")
        return self.c_linear - other.c_linear


def expansion_coefficients(family: str) -> ExpansionCoefficients:
    c = constants()
    table = {
        "uniform-s3": (0.0, 0.25),
        "antipodal-s3": (0.0, 0.5 - LOG2),
        "lifted-uniform": (0.0, lifted_uniform_linear_coefficient(4)),
        "lifted-antipodal": (0.0, lifted_antipodal_linear_coefficient(7)),
        "lifted-spherical": (-1.0 / 3.0, c["C_S"]),
    }
    if family not in table:
        raise ValidationError(f"no linear expansion for family {family!r}")
    nlogn, lin = table[family]
    return ExpansionCoefficients(family, -0.25, nlogn, lin)


# --- lifted Diamond -------------------------------------------------------

def _pair_term_from_inner(u):
    """Expected -log|y1 - y2| for points on two fibres with independent phases, base inner product u."""
    return -0.5 * np.log1p(np.sqrt(np.clip((1.0 - u) / 2.0, 0.0, 1.0)))


def diamond_same_parallel_term(z, r) -> float:
    """Sum over ordered pairs of distinct points on one parallel of the per-pair fibre-averaged term.

    For offset delta = 2 pi d / r the two cosines combine to amplitude R,
    R^2 = (1+z)^2 + (1-z)^2 + 2 (1 - z^2) cos(delta), and the phase
    average is -(1/2) log((2 + sqrt(4 - R^2)) / 2).
    """
    if r < 2:
        return 0.0
    d = np.arange(1, r)
    R2 = (1 + z) ** 2 + (1 - z) ** 2 + 2.0 * (1 - z * z) * np.cos(2.0 * np.pi * d / r)
    gap = 4.0 - R2
    if np.any(gap <= 0.0):
        raise SingularPair("two fibres on one parallel coincide")
    per_point = np.sum(-0.5 * np.log((2.0 + np.sqrt(gap)) / 2.0))
    return r * per_point


def diamond_cross_parallel_term(zi, zj, spec: QuadratureSpec = TIGHT, method="elliptic") -> float:
    """Expected -log distance for one ordered pair of points on different parallels (fibre phases averaged).

    ``method="elliptic"`` integrates the one-dimensional fibre-phase integral
    -(1/4pi) int_0^2pi log((a + sqrt(a^2 - b^2)) / 2) d psi,
    a = 2 - sqrt((1+zi)(1+zj)) cos psi, b = sqrt((1-zi)(1-zj)).
    ``method="phase"`` instead averages the closed-form fibre term over the
    relative parallel phase; both compute the same number.
    """
    c1 = math.sqrt((1 + zi) * (1 + zj))
    b = math.sqrt((1 - zi) * (1 - zj))
    if method == "elliptic":
        def g(psi):
            a = 2.0 - c1 * np.cos(psi)
            return np.log((a + np.sqrt(np.maximum(a * a - b * b, 0.0))) / 2.0)
        # integrand is even in psi
        return -integrate(g, (0.0, math.pi), spec) / (2.0 * math.pi)
    if method == "phase":
        s = math.sqrt((1 - zi * zi) * (1 - zj * zj))
        return integrate(lambda ph: _pair_term_from_inner(zi * zj + s * np.cos(ph)),
                         (0.0, math.pi), spec) / math.pi
    raise ValidationError(f"unknown method {method!r}")


def expected_lifted_diamond_semianalytic(spec: DiamondSpec, k, quad: QuadratureSpec = TIGHT,
                                         method="elliptic") -> float:
    """Expected S^3 energy of the pole-free Diamond ensemble lifted with k points per fibre.

    Same-fibre pairs give -N log k.  Pairs on distinct fibres of one
    parallel have fixed longitude offsets (closed form); pairs on different
    parallels use the one-dimensional integral.
    """
    _check_pos("k", k)
    r = list(spec.rj)
    z = list(spec.z)
    M = sum(r)
    N = M * k
    same = math.fsum(diamond_same_parallel_term(zj, rj) for zj, rj in zip(z, r))
    cross = []
    for a in range(len(r)):
        for b in range(a + 1, len(r)):
            cross.append(2.0 * r[a] * r[b] * diamond_cross_parallel_term(z[a], z[b], quad, method))
    return -N * math.log(k) + k * k * (same + math.fsum(cross))


def normalized_series(E, N):
    """(n1, n2) = ((E + N^2/4) / (N log N), (E + N^2/4 + N log N / 3) / N)."""
    if N < 2:
        raise ValidationError("normalized series needs N >= 2")
    shifted = E + N * N / 4.0
    nlogn = N * math.log(N)
    return shifted / nlogn, (shifted + nlogn / 3.0) / N


def closed_form(family: str, **params):
    """Predicted expected energy for a CLI family name, or None when no prediction exists."""
    if family == "uniform-s3":
        return expected_uniform_s3(params["n"])
    if family == "antipodal-s3":
        return expected_uniform_s3_antipodal(params["n"])
    if family == "lifted-uniform":
        return expected_lifted_uniform(params["m"], params["k"])
    if family == "lifted-antipodal":
        return expected_lifted_antipodal(params["m"], params["k"])
    if family == "lifted-spherical":
        return expected_lifted_spherical_closed(params["r"], params["k"])
    if family == "lifted-harmonic":
        return expected_lifted_dpp(harmonic_profile(params["L"]), k=params["k"])
    if family == "lifted-diamond":
        return expected_lifted_diamond_semianalytic(params["spec"], params["k"])
    if family == "diamond-s2":
        from .diamond import diamond_expected_energy_s2
        return diamond_expected_energy_s2(params["spec"])
    return None

