"""Seeded Monte Carlo estimation, parameter sweeps and flat-file persistence."""
from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import expectations as ex
from .diamond import DiamondSpec, build_diamond, round_half_away, rotate_south_pole_to_minus_x
from .dpp import build_projection_kernel, hkpv_sample
from .errors import ValidationError
from .geometry import Configuration
from .lift import hopf_lift, log_energy
from .sampling import SeededStream, antipodal_augment, sample_uniform_s2, sample_uniform_s3

log = logging.getLogger(__name__)

THREADS_ENV = "HOPFLIFT_THREADS"

FAMILIES = ("uniform-s3", "antipodal-s3", "uniform-s2", "spherical-dpp", "harmonic-dpp", "diamond-s2",
            "lifted-uniform", "lifted-antipodal", "lifted-spherical", "lifted-harmonic", "lifted-diamond")
K_RULES = ("explicit", "alpha", "spherical", "harmonic")


@dataclass
class ExperimentConfig:
    """One Monte Carlo experiment.

    ``params`` keys by family: ``n`` (uniform/antipodal), ``m`` (lifted
    uniform/antipodal base size), ``r`` (spherical), ``L`` (harmonic),
    ``p`` or ``rj`` (diamond), and ``k`` when ``k_rule == "explicit"``.
    """

    family: str
    params: dict = field(default_factory=dict)
    runs: int = 1
    seed: int = 0
    k_rule: str = "explicit"
    alpha: float = 1.2
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.runs < 1:
            raise ValidationError("runs must be >= 1")
        if self.k_rule not in K_RULES:
            raise ValidationError(f"unknown k rule {self.k_rule!r}")
        if self.alpha <= 0:
            raise ValidationError("alpha must be positive")
        if self.format not in ("csv", "json"):
            raise ValidationError(f"unknown format {self.format!r}")
        self.params = dict(self.params)
        if self.family.startswith("lifted-"):
            self.params["k"] = self.resolve_k()
        self.diamond_spec()  # validates diamond parameters early

    @property
    def lifted(self):
        return self.family.startswith("lifted-")

    def diamond_spec(self):
        if "diamond" not in self.family:
            return None
        if self.params.get("rj"):
            return DiamondSpec.from_rj(self.params["rj"])
        if "p" not in self.params:
            raise ValidationError("diamond families need p (parallels) or an r_j list")
        return DiamondSpec.ansatz(int(self.params["p"]))

    def resolve_k(self) -> int:
        rule = self.k_rule
        if rule == "explicit":
            k = self.params.get("k")
            if k is None:
                raise ValidationError(f"{self.family} needs k")
            k = int(k)
        elif rule == "alpha":
            spec = self.diamond_spec()
            if spec is None:
                raise ValidationError("the alpha k rule applies to diamond families")
            k = max(1, int(round_half_away(spec.p ** self.alpha)))
        elif rule == "spherical":
            if self.family != "lifted-spherical":
                raise ValidationError("the spherical k rule applies to lifted-spherical")
            # k = C N^(1/3) with N = r k gives k = C^(3/2) r^(1/2)
            c = ex.optimal_k_spherical(1.0)
            k = max(1, int(round_half_away(c ** 1.5 * math.sqrt(self.params["r"]))))
        else:
            if self.family != "lifted-harmonic":
                raise ValidationError("the harmonic k rule applies to lifted-harmonic")
            k = ex.harmonic_k_rule((int(self.params["L"]) + 1) ** 2)
        if k < 1:
            raise ValidationError("k must be >= 1")
        return k

    def sweep_param(self):
        """The value reported in the ``param`` column."""
        for key in ("p", "r", "L", "m", "n"):
            if key in self.params:
                return self.params[key]
        if "rj" in self.params:
            return len(self.params["rj"])
        return None


def _base_configuration(cfg: ExperimentConfig, rng) -> Configuration:
    fam = cfg.family.removeprefix("lifted-")
    P = cfg.params
    if fam == "uniform-s3":
        return sample_uniform_s3(int(P["n"]), rng)
    if fam == "antipodal-s3":
        n = int(P["n"])
        if n % 2:
            raise ValidationError(f"antipodal family needs even n, got {n}")
        return antipodal_augment(sample_uniform_s3(n // 2, rng))
    if fam == "uniform-s2":
        return sample_uniform_s2(int(P["n"]), rng)
    if fam == "uniform":
        return sample_uniform_s2(int(P["m"]), rng)
    if fam == "antipodal":
        m = int(P["m"])
        if m % 2:
            raise ValidationError(f"antipodal base needs even m, got {m}")
        return antipodal_augment(sample_uniform_s2(m // 2, rng))
    if fam in ("spherical", "spherical-dpp"):
        return hkpv_sample(_kernel("spherical", int(P["r"])), rng)
    if fam in ("harmonic", "harmonic-dpp"):
        return hkpv_sample(_kernel("harmonic", int(P["L"])), rng)
    if fam == "diamond-s2":
        return build_diamond(cfg.diamond_spec(), rng)
    if fam == "diamond":
        return rotate_south_pole_to_minus_x(build_diamond(cfg.diamond_spec(), rng))
    raise ValidationError(f"unknown family {cfg.family!r}")


_KERNELS = {}


def _kernel(family, param):
    key = (family, param)
    if key not in _KERNELS:
        _KERNELS[key] = build_projection_kernel(family, param)
    return _KERNELS[key]


def generate(cfg: ExperimentConfig, run: int = 0) -> Configuration:
    """Configuration for run ``run``, drawn from substream (seed, run)."""
    stream = SeededStream(cfg.seed, run)
    rng = stream.generator()
    base = _base_configuration(cfg, rng)
    out = hopf_lift(base, cfg.params["k"], rng) if cfg.lifted else base
    out.seed = cfg.seed
    out.family = cfg.family
    return out


def run_energy(cfg: ExperimentConfig, run: int) -> float:
    return log_energy(generate(cfg, run))


def predicted_energy(cfg: ExperimentConfig):
    P = cfg.params
    fam = cfg.family
    try:
        if fam in ("uniform-s3", "antipodal-s3"):
            return ex.closed_form(fam, n=int(P["n"]))
        if fam in ("lifted-uniform", "lifted-antipodal"):
            return ex.closed_form(fam, m=int(P["m"]), k=P["k"])
        if fam == "lifted-spherical":
            return ex.expected_lifted_spherical_closed(int(P["r"]), P["k"])
        if fam == "lifted-harmonic":
            return ex.closed_form(fam, L=int(P["L"]), k=P["k"])
        if fam in ("lifted-diamond", "diamond-s2"):
            return ex.closed_form(fam, spec=cfg.diamond_spec(), k=P.get("k"))
    except KeyError as e:
        raise ValidationError(f"{fam} is missing parameter {e.args[0]}") from None
    return None


def expected_size(cfg: ExperimentConfig) -> int:
    P = cfg.params
    fam = cfg.family.removeprefix("lifted-")
    if fam in ("uniform-s3", "antipodal-s3", "uniform-s2"):
        base = int(P["n"])
    elif fam in ("uniform", "antipodal"):
        base = int(P["m"])
    elif fam in ("spherical", "spherical-dpp"):
        base = int(P["r"])
    elif fam in ("harmonic", "harmonic-dpp"):
        base = (int(P["L"]) + 1) ** 2
    elif fam == "diamond-s2":
        base = cfg.diamond_spec().n
    else:
        base = cfg.diamond_spec().n - 2
    return base * P["k"] if cfg.lifted else base


@dataclass
class ResultRow:
    N: int
    k: int | None
    param: float | None
    energy_mean: float
    energy_se: float
    closed_form: float | None
    n1: float
    n2: float
    wall_time_s: float


HEADER = [f.name for f in fields(ResultRow)]


def _row_from_energies(cfg, energies, t0, N=None) -> ResultRow:
    e = np.asarray(energies, dtype=float)
    mean = math.fsum(e) / e.size
    se = float(np.std(e, ddof=1) / math.sqrt(e.size)) if e.size > 1 else 0.0
    N = expected_size(cfg) if N is None else N
    n1, n2 = ex.normalized_series(mean, N) if N >= 2 else (math.nan, math.nan)
    return ResultRow(N, cfg.params.get("k"), cfg.sweep_param(), mean, se, predicted_energy(cfg),
                     n1, n2, time.perf_counter() - t0)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def mc_energies(cfg: ExperimentConfig, workers=None) -> list[float]:
    """Per-run energies in run-index order; run i always uses substream (seed, i)."""
    workers = worker_count() if workers is None else workers
    if workers > 1 and cfg.runs > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(run_energy, [cfg] * cfg.runs, range(cfg.runs)))
    return [run_energy(cfg, i) for i in range(cfg.runs)]


def mc_estimate(cfg: ExperimentConfig, workers=None) -> ResultRow:
    """Mean and standard error of the energy over ``cfg.runs`` seeded runs.

    On KeyboardInterrupt in the serial path the row is built from the runs
    already finished (at least one), so a long estimate still yields data.
    """
    t0 = time.perf_counter()
    workers = worker_count() if workers is None else workers
    if workers > 1:
        return _row_from_energies(cfg, mc_energies(cfg, workers), t0)
    energies = []
    try:
        for i in range(cfg.runs):
            energies.append(run_energy(cfg, i))
    except KeyboardInterrupt:
        if not energies:
            raise
        log.warning("interrupted after %d of %d runs; returning partial estimate", len(energies), cfg.runs)
    return _row_from_energies(cfg, energies, t0)


def sweep(cfg: ExperimentConfig, key: str, values, workers=None) -> list[ResultRow]:
    rows = []
    for v in values:
        params = dict(cfg.params, **{key: v})
        if cfg.k_rule != "explicit":
            params.pop("k", None)
        sub = replace(cfg, params=params)
        rows.append(mc_estimate(sub, workers))
    return rows


def sweep_diamond_alpha(p_list, alpha=1.2, runs=5, seed=0, workers=None) -> list[ResultRow]:
    """Lifted pole-free Diamond with ansatz r_j and k = max(1, round(p^alpha)), one row per p."""
    if alpha <= 0:
        raise ValidationError("alpha must be positive")
    cfg = ExperimentConfig("lifted-diamond", {"p": int(p_list[0])}, runs, seed, "alpha", alpha)
    return sweep(cfg, "p", [int(p) for p in p_list], workers)


def figure_series(p_list, alpha=1.2, runs=5, seed=0, workers=None):
    """Data behind the two normalized-energy figures: N against n1 and n2, Monte Carlo and semianalytic."""
    out = []
    for row in sweep_diamond_alpha(p_list, alpha, runs, seed, workers):
        s1, s2 = ex.normalized_series(row.closed_form, row.N)
        out.append({"N": row.N, "k": row.k, "p": row.param, "n1": row.n1, "n2": row.n2,
                    "n1_semianalytic": s1, "n2_semianalytic": s2})
    return out


# --- persistence ----------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _parse(v):
    if v == "":
        return None
    try:
        return int(v)
    except ValueError:
        return float(v)


def _open(path, mode):
    try:
        return open(path, mode, newline="")
    except OSError as e:
        raise OSError(e.errno, f"{e.strerror}: {path}") from e


def emit(rows, fmt="csv", path=None):
    """Write result rows (dicts or ResultRow) as CSV or JSON; returns the text when ``path`` is None."""
    dicts = [asdict(r) if isinstance(r, ResultRow) else dict(r) for r in rows]
    header = list(dicts[0]) if dicts else HEADER
    if fmt == "csv":
        lines = [",".join(header)] + [",".join(_fmt(d.get(h)) for h in header) for d in dicts]
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        text = json.dumps(dicts, indent=1) + "\n"
    else:
        raise ValidationError(f"unknown format {fmt!r}")
    if path is None:
        return text
    with _open(path, "w") as fh:
        fh.write(text)
    return text


def read_rows(path, fmt="csv") -> list[ResultRow]:
    with _open(path, "r") as fh:
        if fmt == "json":
            dicts = json.load(fh)
        else:
            dicts = [{k: _parse(v) for k, v in d.items()} for d in csv.DictReader(fh)]
    return [ResultRow(**d) for d in dicts]


def write_points(cfg: Configuration, fmt="csv", path=None):
    cols = "x,y,z" if cfg.dim == 3 else "a,b,c,d"
    if fmt == "csv":
        text = cols + "\n" + "".join(",".join(format(v, ".17g") for v in row) + "\n" for row in cfg.points)
    elif fmt == "json":
        doc = {"family": cfg.family, "params": cfg.params, "seed": cfg.seed, "dim": cfg.dim,
               "points": cfg.points.tolist()}
        text = json.dumps(doc, default=_json_default) + "\n"
    else:
        raise ValidationError(f"unknown format {fmt!r}")
    if path is None:
        return text
    with _open(path, "w") as fh:
        fh.write(text)
    return text


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def read_points(path, fmt=None, dim=None) -> Configuration:
    fmt = fmt or ("json" if str(path).endswith(".json") else "csv")
    with _open(path, "r") as fh:
        if fmt == "json":
            doc = json.load(fh)
            pts = doc["points"] if isinstance(doc, dict) else doc
        else:
            rows = [r for r in csv.reader(fh) if r]
            if rows and not _numeric(rows[0][0]):
                rows = rows[1:]
            pts = [[float(v) for v in r] for r in rows]
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValidationError(f"{path}: no points found")
    if dim is not None and pts.shape[1] != dim:
        raise ValidationError(f"{path}: expected {dim} coordinates per point, found {pts.shape[1]}")
    return Configuration(pts, "file", {"path": str(path)})


def _numeric(s):
    try:
        float(s)
        return True
    except ValueError:
        return False
