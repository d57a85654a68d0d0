"""Distance to stationarity: exact TV curves, l2 curves and the lower bound."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .configs import (CircleConfig, first_excited, ground_state, orbit_labels,
                      second_excited, xi)
from .kernels import ChainModel
from .spectral import Spectrum, gap, lambda_I2, mixture_eigenvalue
from .symmetric import schur, schur_at_ground

WORST = "worst"
GROUND = "ground"
# columns x states propagated at once for worst-case curves
WORST_BUDGET = 50_000_000


def tv_distance(a, b) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    for v in (a, b):
        if abs(v.sum() - 1.0) > 1e-10:
            raise ValueError("inputs must be probability vectors")
    return 0.5 * float(np.abs(a - b).sum())


@dataclass
class MixingCurve:
    times: np.ndarray
    tv: np.ndarray
    l2_sq: np.ndarray
    lower_bound: np.ndarray
    start: CircleConfig | None  # None: worst case over orbit representatives
    meta: dict = field(default_factory=dict)

    def rows(self) -> list[list]:
        return [[int(t), float(a), float(b), float(c)] for t, a, b, c in
                zip(self.times, self.tv, self.l2_sq, self.lower_bound)]

    header = ("t", "tv", "l2_sq", "lower_bound")


def _start_matrix(model: ChainModel, start) -> tuple[np.ndarray, CircleConfig | None]:
    space = model.space
    if start is None or start == GROUND:
        idx, cfg = [model.ground_index], ground_state(model.n, model.k)
    elif start == WORST:
        reps = orbit_labels(space)[0]
        if len(reps) * space.size > WORST_BUDGET:
            raise ValueError(
                f"worst-case start needs {len(reps)} x {space.size} propagation; use start='ground'")
        idx, cfg = list(reps), None
    elif isinstance(start, CircleConfig):
        idx, cfg = [space.index(start)], start
    else:
        raise ValueError(f"unknown start {start!r}")
    X = np.zeros((space.size, len(idx)))
    X[idx, range(len(idx))] = 1.0
    return X, cfg


def distribution_iter(model: ChainModel, start=GROUND):
    """Yield (t, X_t) where the columns of X_t are the laws at time t."""
    X, _ = _start_matrix(model, start)
    PT = model.P.T.tocsr()
    t = 0
    while True:
        yield t, X
        X = PT @ X
        t += 1


def tv_curve(model: ChainModel, t_max: int, start=GROUND) -> np.ndarray:
    mu = model.mu
    out = np.empty(t_max + 1)
    for t, X in distribution_iter(model, start):
        out[t] = 0.5 * np.abs(X - mu[:, None]).sum(axis=0).max()
        if t == t_max:
            break
    return out


def l2_curve(model: ChainModel, t_max: int, spectrum: Spectrum | None = None) -> np.ndarray:
    """D_2^2(t) = sum_{J != I0} d(J)^2 |lambda_J|^{2t}, from the ground state."""
    sp = spectrum or Spectrum(model)
    a = np.abs(sp.lambdas)
    w = sp.d ** 2
    mask = np.ones(len(a), bool)
    mask[model.ground_index] = False
    a, w = a[mask], w[mask]
    t = np.arange(t_max + 1)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        loga = np.log(a)
        terms = np.where(a[None, :] > 0, np.exp(2 * t * loga[None, :]), 0.0)
    terms[0] = 1.0
    return terms @ w


def l2_curve_direct(model: ChainModel, t_max: int) -> np.ndarray:
    mu = model.mu
    out = np.empty(t_max + 1)
    for t, X in distribution_iter(model, GROUND):
        out[t] = float(np.sum(mu * (X[:, 0] / mu - 1.0) ** 2))
        if t == t_max:
            break
    return out


@dataclass(frozen=True)
class LowerBoundData:
    lam1: complex
    lam2: float
    S1: float
    S2: float

    def curve(self, t_max: int) -> np.ndarray:
        t = np.arange(t_max + 1, dtype=float)
        num = np.abs(self.lam1) ** (2 * t)
        var_t = (self.lam2 ** t * self.S2 + 1.0) / self.S1 ** 2 - num
        var_mu = 1.0 / self.S1 ** 2
        return num / (2 * var_t + 2 * var_mu + num)


def lower_bound_data(model: ChainModel) -> LowerBoundData:
    n, k = model.n, model.k
    if k < 2:
        raise ValueError("lower bound uses I2 and needs k >= 2")
    lam1 = mixture_eigenvalue(first_excited(n, k), model.p)
    lam2 = lambda_I2(model)[1]
    return LowerBoundData(lam1, lam2, schur_at_ground(first_excited(n, k)),
                          schur_at_ground(second_excited(n, k)))


def lower_bound_curve(model: ChainModel, t_max: int) -> np.ndarray:
    """Paley-Zygmund bound with Phi the normalized I1 eigenfunction, start I0."""
    return lower_bound_data(model).curve(t_max)


def lower_bound_direct(model: ChainModel, t_max: int) -> np.ndarray:
    """Same bound with every moment taken from the exact law of X_t (oracle)."""
    x1 = xi(first_excited(model.n, model.k))
    phi_vals = np.array([np.conj(schur(I, x1)) for I in model.space.configs()])
    Phi = phi_vals / model.phi
    mu = model.mu
    var_mu = float(np.sum(mu * np.abs(Phi - np.dot(mu, Phi)) ** 2))
    mean_mu = np.dot(mu, Phi)
    out = np.empty(t_max + 1)
    for t, X in distribution_iter(model, GROUND):
        q = X[:, 0]
        m = np.dot(q, Phi)
        var_t = float(np.dot(q, np.abs(Phi - m) ** 2))
        num = abs(m - mean_mu) ** 2
        out[t] = num / (2 * var_t + 2 * var_mu + num)
        if t == t_max:
            break
    return out


def exact_tv_curve(model: ChainModel, t_max: int, start=WORST) -> MixingCurve:
    _, cfg = _start_matrix(model, start)
    tv = tv_curve(model, t_max, start)
    return MixingCurve(np.arange(t_max + 1), tv, l2_curve(model, t_max),
                       lower_bound_curve(model, t_max) if model.k >= 2 else np.zeros(t_max + 1),
                       cfg, {"start": "worst" if cfg is None else list(cfg.positions)})


def domination_check(model: ChainModel, t_max: int, start=WORST) -> float:
    """max_t 4 D(t)^2 - D_2^2(t); non-positive up to rounding."""
    tv = tv_curve(model, t_max, start)
    return float(np.max(4 * tv ** 2 - l2_curve(model, t_max)))


@dataclass(frozen=True)
class MixingTime:
    t: int | None          # None when not reached
    reached: bool
    achieved: float        # D at t (or at t_max when unreachable)
    t_max: int


def _first_crossing_bisect(curve: np.ndarray, eps: float) -> int:
    lo, hi = 0, len(curve) - 1  # curve[hi] <= eps guaranteed by caller
    while lo < hi:
        mid = (lo + hi) // 2
        if curve[mid] <= eps:
            hi = mid
        else:
            lo = mid + 1
    return lo


def mixing_time(model: ChainModel, eps: float, t_max: int = 100_000, start=GROUND,
                curve: np.ndarray | None = None) -> MixingTime:
    if eps >= 1:
        return MixingTime(0, True, float(tv_curve(model, 0, start)[0]), t_max)
    if curve is None:
        vals: list[float] = []
        mu = model.mu
        for t, X in distribution_iter(model, start):
            vals.append(float(0.5 * np.abs(X - mu[:, None]).sum(axis=0).max()))
            if vals[-1] <= eps or t >= t_max:
                break
            # a frozen law never gets closer
            if t > 0 and vals[-1] == vals[-2] and model.p.support_gcd == 0:
                break
        curve = np.asarray(vals)
    if curve[-1] > eps:
        return MixingTime(None, False, float(curve[-1]), len(curve) - 1)
    t = _first_crossing_bisect(curve, eps)
    return MixingTime(t, True, float(curve[t]), len(curve) - 1)


def mixing_time_scan(curve: np.ndarray, eps: float) -> int | None:
    hits = np.nonzero(curve <= eps)[0]
    return int(hits[0]) if len(hits) else None


@dataclass
class CutoffSweep:
    family: str
    profile_rows: list[list]
    teps_rows: list[list]

    profile_header = ("n", "k", "gamma", "centering", "s", "t", "t_floor", "t_ceil",
                      "profile_value", "profile_floor", "profile_ceil")
    teps_header = ("n", "k", "gamma", "eps", "t_eps", "t_eps_gamma_over_log_n",
                   "t_eps_gamma_over_log_k")

    def profile(self, n: int, centering: str = "log_n") -> tuple[np.ndarray, np.ndarray]:
        rows = [r for r in self.profile_rows if r[0] == n and r[3] == centering]
        return np.array([r[4] for r in rows]), np.array([r[8] for r in rows])


def cutoff_sweep(models: Iterable[ChainModel], s_grid: Sequence[float],
                 eps_grid: Sequence[float], family: str = "", start=GROUND) -> CutoffSweep:
    prof, teps = [], []
    for model in models:
        n, k = model.n, model.k
        g = gap(model).gamma_exact
        centers = {"log_n": math.log(n), "log_k": math.log(k)}
        t_need = max(math.ceil((c + max(s_grid)) / g) + 1 for c in centers.values())
        curve = tv_curve(model, t_need, start)
        for eps in eps_grid:
            mt = mixing_time(model, eps, start=start, t_max=100_000)
            tt = mt.t if mt.reached else float("nan")
            teps.append([n, k, g, eps, tt, tt * g / math.log(n), tt * g / math.log(k)])
        for name, c in centers.items():
            for s in s_grid:
                x = max((c + s) / g, 0.0)
                t, lo, hi = int(round(x)), math.floor(x), math.ceil(x)
                prof.append([n, k, g, name, s, t, lo, hi, float(curve[t]), float(curve[lo]),
                             float(curve[hi])])
    return CutoffSweep(family, prof, teps)


def gamma_envelope_report(models: Iterable[ChainModel], s_grid: Sequence[float]):
    """Rows (n, k, s, t, D2(t), Gamma(2s - c0)) with c0 fitted per n on log scale."""
    from scipy.optimize import minimize_scalar

    from .configs import gamma_product

    rows, fits = [], {}
    s_arr = np.asarray(s_grid, float)
    for model in models:
        n, k = model.n, model.k
        g = gap(model).gamma_exact
        ts = np.maximum(np.rint((math.log(n) + s_arr) / g).astype(int), 0)
        l2 = l2_curve(model, int(ts.max()))
        d2 = np.sqrt(l2[ts])
        c_hi = 2 * s_arr.min() - 0.05

        def loss(c0):
            gam = np.array([gamma_product(2 * s - c0) for s in s_arr])
            return float(np.mean((np.log(d2) - np.log(gam)) ** 2))

        c0 = minimize_scalar(loss, bounds=(c_hi - 20.0, c_hi), method="bounded").x
        fits[n] = float(c0)
        for s, t, v in zip(s_arr, ts, d2):
            rows.append([n, k, float(s), int(t), float(v), gamma_product(2 * s - c0)])
    return rows, fits
