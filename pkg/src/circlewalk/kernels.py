"""Collision-free moves, adjacency operators and their Doob transforms.

Kernels are stored as ``scipy.sparse.csr_matrix`` indexed by the lexicographic
state order of ``StateSpace``.  The Perron eigenvector of every adjacency
operator is the positive sine product ``phi = schur_at_ground`` and its
eigenvalue is ``e_|ell|(xi(I0))``, so

    Q^(ell)(I, J) = phi(J) A^(ell)(I, J) / (e_|ell|(xi(I0)) phi(I)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Mapping

import numpy as np
import scipy.sparse as sps

from .configs import DEFAULT_CAP, CircleConfig, StateSpace, ground_state
from .symmetric import elementary_ground, sine_product_weights, stationary_weights

ROW_SUM_TOL = 1e-8
NEG_CLAMP = -1e-14


class PerronViolation(RuntimeError):
    """A Doob-transformed row does not sum to one."""


class FullCircle(ValueError):
    pass


# -- moves -------------------------------------------------------------------

def blocks(config: CircleConfig) -> list[tuple[int, int]]:
    """Maximal cyclic runs of occupied sites as (lowest site, length)."""
    n, k = config.n, config.k
    if k == n:
        raise FullCircle("every site is occupied; there are no blocks")
    occ = np.zeros(n, dtype=bool)
    occ[list(config.positions)] = True
    out = []
    for s in range(n):
        if occ[s] and not occ[s - 1]:
            length = 1
            while occ[(s + length) % n]:
                length += 1
            out.append((s, length))
    return sorted(out, reverse=True)


def enumerate_moves(config: CircleConfig, ell: int, direction: int = 1) -> list[CircleConfig]:
    """Targets reached by moving exactly ell particles one step in `direction`.

    Inside a block only the particles next to the leading gap can move, so a
    move is a choice of m_b in [0, L_b] per block with sum m_b = ell.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if not 0 <= ell <= config.k:
        raise ValueError(f"ell must be in [0, {config.k}]")
    if ell == 0:
        return [config]
    n = config.n
    bl = blocks(config)
    lengths = [L for _, L in bl]
    out = []
    for ms in _compositions(ell, lengths):
        sites = set(config.positions)
        moved = []
        for (start, L), m in zip(bl, ms):
            if direction == 1:
                movers = [(start + L - 1 - i) % n for i in range(m)]
            else:
                movers = [(start + i) % n for i in range(m)]
            moved.extend(movers)
        sites.difference_update(moved)
        sites.update((s + direction) % n for s in moved)
        out.append(CircleConfig.from_sites(n, sites))
    return sorted(out)


def _compositions(total: int, caps: list[int]):
    if not caps:
        if total == 0:
            yield ()
        return
    head, rest = caps[0], caps[1:]
    room = sum(rest)
    for m in range(max(0, total - room), min(head, total) + 1):
        for tail in _compositions(total - m, rest):
            yield (m,) + tail


def move_count(config: CircleConfig, ell: int) -> int:
    """Coefficient of z^ell in prod_b (1 + z + ... + z^{L_b})."""
    poly = np.array([1], dtype=np.int64)
    for _, L in blocks(config):
        poly = np.convolve(poly, np.ones(L + 1, dtype=np.int64))
    return int(poly[ell]) if ell < len(poly) else 0


# -- adjacency and Doob kernels ----------------------------------------------

def _single_moves(space: StateSpace, direction: int) -> tuple[np.ndarray, np.ndarray]:
    """(rows, cols) of the one-particle adjacency, vectorized over occupancies."""
    occ = space.occupancy()
    ahead = np.roll(occ, -direction, axis=1)  # ahead[:, s] = occ[:, s + direction]
    can = occ & ~ahead
    rows, sites = np.nonzero(can)
    new = occ[rows].copy()
    new[np.arange(len(rows)), sites] = False
    new[np.arange(len(rows)), (sites + direction) % space.n] = True
    cols = space.index_of_occupancy(new)
    return rows, cols


def _general_moves(space: StateSpace, ell: int) -> tuple[np.ndarray, np.ndarray]:
    rows, targets = [], []
    for i, cfg in enumerate(space.configs()):
        for tgt in enumerate_moves(cfg, ell, 1):
            rows.append(i)
            targets.append(tgt.positions)
    if not rows:
        return np.zeros(0, int), np.zeros(0, int)
    return np.asarray(rows), space.index_of(np.asarray(targets))


def adjacency(space: StateSpace, ell: int) -> sps.csr_matrix:
    """0/1 matrix of A^(ell); for ell < 0 built from clockwise moves directly."""
    n, k, N = space.n, space.k, space.size
    if abs(ell) > k:
        raise ValueError(f"|ell| must be <= k = {k}")
    if ell == 0:
        return sps.identity(N, format="csr")
    if k == n:
        raise FullCircle("no collision-free moves on a full circle")
    direction = 1 if ell > 0 else -1
    if abs(ell) == 1:
        rows, cols = _single_moves(space, direction)
    elif ell > 0:
        rows, cols = _general_moves(space, ell)
    else:
        rows, cols = [], []
        for i, cfg in enumerate(space.configs()):
            for tgt in enumerate_moves(cfg, -ell, -1):
                rows.append(i)
                cols.append(space.index(tgt))
        rows, cols = np.asarray(rows, int), np.asarray(cols, int)
    data = np.ones(len(rows))
    return sps.csr_matrix((data, (rows, cols)), shape=(N, N))


def perron_vector(space: StateSpace) -> np.ndarray:
    return sine_product_weights(space.n, space.positions)


def doob_kernel(space: StateSpace, ell: int, phi: np.ndarray | None = None,
                A: sps.csr_matrix | None = None) -> sps.csr_matrix:
    if ell == 0:
        return sps.identity(space.size, format="csr")
    phi = perron_vector(space) if phi is None else phi
    A = adjacency(space, ell) if A is None else A
    alpha = elementary_ground(space.n, space.k, abs(ell))
    if alpha <= 0:
        raise PerronViolation(f"Perron eigenvalue e_{abs(ell)}(xi(I0)) = {alpha} is not positive")
    Q = sps.diags(1.0 / (alpha * phi)) @ A @ sps.diags(phi)
    Q = sps.csr_matrix(Q)
    _check_stochastic(Q, f"Q^({ell})")
    return Q


def _check_stochastic(K: sps.csr_matrix, label: str):
    if K.nnz and K.data.min() < NEG_CLAMP:
        raise PerronViolation(f"{label} has entry {K.data.min():.3e} < 0")
    K.data[K.data < 0] = 0.0
    resid = np.abs(np.asarray(K.sum(axis=1)).ravel() - 1.0).max()
    if resid > ROW_SUM_TOL:
        raise PerronViolation(f"{label} row sums off by {resid:.3e}")


# -- step distributions and models --------------------------------------------

@dataclass(frozen=True)
class StepDistribution:
    """Probability vector p over ell in [-k, k]."""

    weights: Mapping[int, float]

    def __post_init__(self):
        w = {int(l): float(v) for l, v in dict(self.weights).items() if float(v) != 0.0}
        if any(v < 0 for v in w.values()):
            raise ValueError("step probabilities must be nonnegative")
        total = sum(w.values())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"step probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "weights", dict(sorted(w.items())))

    @classmethod
    def parse(cls, text: str) -> "StepDistribution":
        """Parse "-1:0.25,0:0.5,1:0.25"."""
        w: dict[int, float] = {}
        for item in text.split(","):
            if not item.strip():
                continue
            l, v = item.split(":")
            w[int(l)] = w.get(int(l), 0.0) + float(v)
        return cls(w)

    @property
    def support(self) -> list[int]:
        return list(self.weights)

    @property
    def max_abs(self) -> int:
        return max(abs(l) for l in self.weights)

    @property
    def mean_abs(self) -> float:
        return sum(abs(l) * v for l, v in self.weights.items())

    @property
    def mean(self) -> float:
        return sum(l * v for l, v in self.weights.items())

    @property
    def variance(self) -> float:
        m = self.mean
        return sum((l - m) ** 2 * v for l, v in self.weights.items())

    @property
    def support_gcd(self) -> int:
        nz = [abs(l) for l in self.weights if l != 0]
        return reduce(math.gcd, nz) if nz else 0

    def get(self, ell: int) -> float:
        return self.weights.get(ell, 0.0)

    def fourier(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return sum(v * np.exp(1j * l * theta) for l, v in self.weights.items())

    def key(self) -> str:
        return ",".join(f"{l}:{v!r}" for l, v in self.weights.items())


@dataclass(frozen=True)
class AssumptionAudit:
    eta_hat: float
    mean_abs: float
    delta_hat: tuple[float, float]
    Kg_hat: float
    Ka_hat: float
    gcd: int
    gcd_ok: bool
    reducible: bool
    warnings: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "eta_hat": self.eta_hat, "mean_abs": self.mean_abs,
            "delta_hat": list(self.delta_hat), "Kg_hat": self.Kg_hat,
            "Ka_hat": self.Ka_hat, "gcd": self.gcd, "gcd_ok": self.gcd_ok,
            "reducible": self.reducible, "warnings": list(self.warnings),
        }


def subgaussian_parameter(values, probs, scale: float = 1.0, tol: float = 1e-12) -> float:
    """Smallest K with E exp(Y^2 / (2 K^2 scale)) <= 2 for centered Y, by bisection."""
    values = np.asarray(values, float)
    probs = np.asarray(probs, float)
    y2 = (values - np.dot(values, probs)) ** 2
    if np.dot(y2, probs) <= 1e-300 or scale <= 0:
        return 0.0

    def ok(K):
        with np.errstate(over="ignore"):
            return np.dot(probs, np.exp(y2 / (2 * K * K * scale))) <= 2.0

    lo, hi = 0.0, 1.0
    while not ok(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


def audit_assumptions(p: StepDistribution, n: int, k: int, grid: int = 512) -> AssumptionAudit:
    m = p.mean_abs
    warnings = []
    reducible = p.support_gcd == 0
    if reducible:
        warnings.append("p is a point mass at 0: the chain is reducible")
    ells = np.array(p.support, float)
    probs = np.array([p.weights[l] for l in p.support])
    Kg = subgaussian_parameter(np.abs(ells), probs, scale=m) if m > 0 else 0.0
    theta = np.linspace(-np.pi, np.pi, grid + 1)
    theta = theta[np.abs(theta) > 1e-15]
    den = np.minimum(m * theta ** 2, 1.0)
    if m > 0:
        Ka = float(np.min((1.0 - np.abs(p.fourier(theta))) / den))
    else:
        Ka = 0.0
    if Ka <= 1e-12:
        warnings.append("|Phi_p| reaches 1 away from 0: aperiodicity constant vanishes")
    gcd = p.support_gcd
    return AssumptionAudit(
        eta_hat=min(k / n, 1 - k / n), mean_abs=m, delta_hat=(m, m / k),
        Kg_hat=Kg, Ka_hat=max(Ka, 0.0), gcd=gcd, gcd_ok=gcd == 1,
        reducible=reducible, warnings=tuple(warnings))


class ChainModel:
    """(n, k, p) with lazily built kernels.  Immutable: use ``with_p`` to vary p."""

    def __init__(self, n: int, k: int, p: StepDistribution, cap: int = DEFAULT_CAP,
                 meta: dict | None = None):
        if not 1 <= k < n:
            raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
        if p.max_abs > k:
            raise ValueError(f"p is supported on |ell| <= {p.max_abs} > k = {k}")
        self.n, self.k, self.p, self.cap = n, k, p, cap
        self.meta = dict(meta or {})

    def with_p(self, p: StepDistribution) -> "ChainModel":
        return ChainModel(self.n, self.k, p, self.cap)

    def __repr__(self):
        return f"ChainModel(n={self.n}, k={self.k}, p={{{self.p.key()}}})"

    @cached_property
    def space(self) -> StateSpace:
        return StateSpace(self.n, self.k, self.cap)

    @cached_property
    def phi(self) -> np.ndarray:
        return perron_vector(self.space)

    @cached_property
    def mu(self) -> np.ndarray:
        return stationary_weights(self.n, self.space.positions)

    @cached_property
    def ground_index(self) -> int:
        return self.space.index(ground_state(self.n, self.k))

    @cached_property
    def _kernels(self) -> dict[int, sps.csr_matrix]:
        return {}

    def adjacency(self, ell: int) -> sps.csr_matrix:
        return adjacency(self.space, ell)

    def doob(self, ell: int) -> sps.csr_matrix:
        if ell not in self._kernels:
            self._kernels[ell] = doob_kernel(self.space, ell, self.phi)
        return self._kernels[ell]

    @cached_property
    def P(self) -> sps.csr_matrix:
        return mixture_kernel(self)

    @cached_property
    def audit(self) -> AssumptionAudit:
        return audit_assumptions(self.p, self.n, self.k)


def mixture_kernel(model: ChainModel) -> sps.csr_matrix:
    N = model.space.size
    P = sps.csr_matrix((N, N))
    for ell, w in model.p.weights.items():
        P = P + w * model.doob(ell)
    P = sps.csr_matrix(P)
    P.sum_duplicates()
    _check_stochastic(P, "P")
    return P


# -- sampling ----------------------------------------------------------------

def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Independent reproducible streams from one 64-bit seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def transition_row(config: CircleConfig, ell: int) -> tuple[list[CircleConfig], np.ndarray]:
    """Targets and probabilities of Q^(ell) from `config`, built without a kernel."""
    n, k = config.n, config.k
    if ell == 0:
        return [config], np.ones(1)
    targets = enumerate_moves(config, abs(ell), 1 if ell > 0 else -1)
    phi_t = sine_product_weights(n, np.asarray([t.positions for t in targets]))
    phi_i = sine_product_weights(n, np.asarray([config.positions]))[0]
    alpha = elementary_ground(n, k, abs(ell))
    total = phi_t.sum()
    if abs(total - alpha * phi_i) > ROW_SUM_TOL * alpha * phi_i:
        raise PerronViolation(
            f"row normalization {total:.12g} != alpha*phi = {alpha * phi_i:.12g}")
    return targets, phi_t / total


def step_sample(rng: np.random.Generator, config: CircleConfig, p: StepDistribution) -> CircleConfig:
    ells = p.support
    ell = ells[rng.choice(len(ells), p=[p.weights[l] for l in ells])]
    targets, probs = transition_row(config, ell)
    if len(targets) == 1:
        return targets[0]
    return targets[rng.choice(len(targets), p=probs)]


def simulate(rng: np.random.Generator, start: CircleConfig, p: StepDistribution,
             steps: int) -> list[CircleConfig]:
    """Trajectory of length steps + 1 starting at `start`."""
    traj = [start]
    for _ in range(steps):
        traj.append(step_sample(rng, traj[-1], p))
    return traj


def simulate_indices(rng: np.random.Generator, model: ChainModel, start: int, steps: int) -> np.ndarray:
    """Trajectory of state indices using the assembled kernel P (fast path)."""
    P = model.P
    cdfs = [np.cumsum(P.data[P.indptr[i]:P.indptr[i + 1]]) for i in range(P.shape[0])]
    u = rng.random(steps)
    out = np.empty(steps + 1, dtype=np.int64)
    out[0] = cur = start
    for t in range(steps):
        lo = P.indptr[cur]
        j = int(np.searchsorted(cdfs[cur], u[t] * cdfs[cur][-1], side="right"))
        cur = int(P.indices[lo + min(j, len(cdfs[cur]) - 1)])
        out[t + 1] = cur
    return out


def sample_stationary(rng: np.random.Generator, n: int, k: int, size: int | None = None,
                      cap: int = DEFAULT_CAP):
    """Exact draws from mu by inverse CDF over the enumerated state space."""
    try:
        space = StateSpace(n, k, cap)
    except ValueError as exc:
        raise type(exc)(f"{exc}; use a long trajectory (burn-in) instead") from None
    cdf = np.cumsum(stationary_weights(n, space.positions))
    u = rng.random(1 if size is None else size) * cdf[-1]
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), space.size - 1)
    if size is None:
        return space.config(int(idx[0]))
    return [space.config(int(i)) for i in idx]


def kernel_to_csv(K: sps.csr_matrix) -> list[tuple[int, int, float]]:
    K = K.tocoo()
    order = np.lexsort((K.col, K.row))
    return [(int(K.row[i]), int(K.col[i]), float(K.data[i])) for i in order]
