"""Particle configurations on the discrete circle Z/n.

A configuration is a strictly decreasing tuple of k sites.  ``StateSpace``
materializes the full set of C(n, k) configurations as an integer array in
lexicographic order, which coincides with the combinatorial number system:
the rank of (I1 > ... > Ik) is sum_j C(I_j, k - j + 1).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

DEFAULT_CAP = 200_000


class StateSpaceTooLarge(ValueError):
    """Raised when C(n, k) exceeds the caller-supplied cap."""


@dataclass(frozen=True, order=True)
class CircleConfig:
    n: int
    positions: tuple[int, ...]

    def __post_init__(self):
        pos = tuple(int(p) for p in self.positions)
        object.__setattr__(self, "positions", pos)
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 1 <= len(pos) <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={len(pos)}, n={self.n}")
        if any(a <= b for a, b in zip(pos, pos[1:])):
            raise ValueError(f"positions must be strictly decreasing: {pos}")
        if pos[0] >= self.n or pos[-1] < 0:
            raise ValueError(f"positions must lie in [0, {self.n - 1}]: {pos}")

    @property
    def k(self) -> int:
        return len(self.positions)

    @classmethod
    def from_sites(cls, n: int, sites) -> "CircleConfig":
        """Build from any iterable of distinct sites (taken mod n)."""
        s = sorted({int(x) % n for x in sites}, reverse=True)
        if len(s) != len(list(sites)):
            raise ValueError("sites collide modulo n")
        return cls(n, tuple(s))

    def __len__(self):
        return len(self.positions)

    def __iter__(self):
        return iter(self.positions)

    def __repr__(self):
        return f"CircleConfig(n={self.n}, {self.positions})"


def ground_state(n: int, k: int) -> CircleConfig:
    """I0 = (k-1, ..., 1, 0)."""
    return CircleConfig(n, tuple(range(k - 1, -1, -1)))


def first_excited(n: int, k: int) -> CircleConfig:
    """I1 = I0 + (1, 0, ..., 0): the top particle of I0 moved out one step."""
    if k >= n:
        raise ValueError("I1 needs an empty site (k < n)")
    return CircleConfig(n, (k,) + tuple(range(k - 2, -1, -1)))


def second_excited(n: int, k: int) -> CircleConfig:
    """I2: top particle of I0 one step up, bottom particle one step down (mod n)."""
    if k < 2 or k + 2 > n:
        raise ValueError("I2 needs k >= 2 and two empty sites")
    return CircleConfig.from_sites(n, [k] + list(range(k - 2, 0, -1)) + [n - 1])


def conjugate_first_excited(n: int, k: int) -> CircleConfig:
    """I1' = I0 + (0, ..., 0, -1): the bottom particle moved one step down."""
    if k >= n:
        raise ValueError("needs k < n")
    return CircleConfig.from_sites(n, list(range(k - 1, 0, -1)) + [n - 1])


def xi(config: CircleConfig) -> np.ndarray:
    """Centered embedding exp(i*pi*(2*I_j - (k-1))/n) of the particle positions."""
    pos = np.asarray(config.positions, dtype=float)
    return np.exp(1j * np.pi * (2.0 * pos - (config.k - 1)) / config.n)


def xi_array(n: int, k: int, positions: np.ndarray) -> np.ndarray:
    """Row-wise xi for an (N, k) array of configurations."""
    return np.exp(1j * np.pi * (2.0 * np.asarray(positions, float) - (k - 1)) / n)


def shift(config: CircleConfig, t: int) -> CircleConfig:
    return CircleConfig.from_sites(config.n, [p + t for p in config.positions])


def rank(config: CircleConfig) -> int:
    k = config.k
    return sum(math.comb(p, k - j) for j, p in enumerate(config.positions))


class StateSpace:
    """All of B_{k,n} as an (N, k) array, lexicographically ordered."""

    def __init__(self, n: int, k: int, cap: int = DEFAULT_CAP):
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
        size = math.comb(n, k)
        if size > cap:
            raise StateSpaceTooLarge(
                f"state space too large: C({n},{k}) = {size} exceeds cap {cap}")
        self.n, self.k, self.size = n, k, size
        combos = np.fromiter(
            itertools.chain.from_iterable(itertools.combinations(range(n), k)),
            dtype=np.int64, count=size * k).reshape(size, k)
        pos = combos[:, ::-1]
        order = np.argsort(self._ranks(pos), kind="stable")
        self.positions = np.ascontiguousarray(pos[order])
        self.positions.setflags(write=False)

    @cached_property
    def _binom(self) -> np.ndarray:
        # _binom[m, r] = C(m, r) for m < n, r <= k
        t = np.zeros((self.n + 1, self.k + 1), dtype=np.int64)
        for m in range(self.n + 1):
            for r in range(self.k + 1):
                t[m, r] = math.comb(m, r)
        return t

    def _ranks(self, pos: np.ndarray) -> np.ndarray:
        k = self.k
        rows = np.arange(k, 0, -1)
        return self._binom[pos, rows[None, :]].sum(axis=1)

    def index_of(self, positions: np.ndarray) -> np.ndarray:
        """Ranks of an (M, k) array of decreasing rows."""
        return self._ranks(np.asarray(positions, dtype=np.int64))

    def index_of_occupancy(self, occ: np.ndarray) -> np.ndarray:
        """Ranks from an (M, n) boolean occupancy array."""
        occ = np.asarray(occ, dtype=np.int64)
        below = np.cumsum(occ, axis=1)
        sites = np.arange(self.n)
        return (occ * self._binom[sites[None, :], below]).sum(axis=1)

    def occupancy(self) -> np.ndarray:
        occ = np.zeros((self.size, self.n), dtype=bool)
        np.put_along_axis(occ, self.positions, True, axis=1)
        return occ

    def index(self, config: CircleConfig) -> int:
        if config.n != self.n or config.k != self.k:
            raise ValueError("configuration does not belong to this state space")
        return rank(config)

    def config(self, i: int) -> CircleConfig:
        return CircleConfig(self.n, tuple(self.positions[i]))

    def configs(self) -> list[CircleConfig]:
        return [CircleConfig(self.n, tuple(r)) for r in self.positions.tolist()]

    def xi(self) -> np.ndarray:
        return xi_array(self.n, self.k, self.positions)

    def shift_indices(self, t: int) -> np.ndarray:
        """Index map i -> index(shift(config_i, t))."""
        occ = self.occupancy()
        return self.index_of_occupancy(np.roll(occ, t, axis=1))

    def __len__(self):
        return self.size


def enumerate_configs(n: int, k: int, cap: int = DEFAULT_CAP) -> list[CircleConfig]:
    return StateSpace(n, k, cap).configs()


@dataclass(frozen=True)
class OrbitClass:
    representative: CircleConfig
    size: int
    members: tuple[CircleConfig, ...] = field(default=(), compare=False, repr=False)

    def member_list(self) -> list[CircleConfig]:
        if self.members:
            return list(self.members)
        return [shift(self.representative, t) for t in range(self.size)]


def orbit_labels(space: StateSpace) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Label every state by its shift orbit.

    Returns (rep_index, orbit_id, orbit_size, offset): rep_index[o] is the
    state index of the lexicographically smallest member of orbit o,
    orbit_id[i] the orbit of state i, orbit_size[o] its size, and state i
    equals shift(representative, offset[i]).
    """
    n, N = space.n, space.size
    occ = space.occupancy()
    best = np.arange(N)
    back = np.zeros(N, dtype=np.int64)  # shift taking state i to best[i]
    period = np.full(N, n)
    ids = np.arange(N)
    for t in range(1, n):
        idx = space.index_of_occupancy(np.roll(occ, t, axis=1))
        better = idx < best
        best[better] = idx[better]
        back[better] = t
        hit = (idx == ids) & (period == n)
        period[hit] = t
    reps, orbit_id = np.unique(best, return_inverse=True)
    offset = (-back) % period
    return reps, orbit_id, period[reps], offset


def orbit_decompose(n: int, k: int, cap: int = DEFAULT_CAP) -> list[OrbitClass]:
    space = StateSpace(n, k, cap)
    reps, _, sizes, _ = orbit_labels(space)
    return [OrbitClass(space.config(int(r)), int(s)) for r, s in zip(reps, sizes)]


# -- partition-pair coding of near-ground configurations ------------------------

@dataclass(frozen=True)
class PartitionPair:
    mu: tuple[int, ...] = ()
    nu: tuple[int, ...] = ()

    def __post_init__(self):
        for name in ("mu", "nu"):
            parts = tuple(int(x) for x in getattr(self, name) if int(x) != 0)
            if any(x < 0 for x in parts) or any(a < b for a, b in zip(parts, parts[1:])):
                raise ValueError(f"{name} must be weakly decreasing positive parts: {parts}")
            object.__setattr__(self, name, parts)

    @property
    def weight(self) -> int:
        return sum(self.mu) + sum(self.nu)


def _half_counts(k: int) -> tuple[int, int]:
    # atoms with nonnegative centered index are "positive"; the zero atom (k odd)
    # counts as positive, giving ceil(k/2) positive atoms
    return (k + 1) // 2, k // 2


def max_displacement(n: int, k: int) -> tuple[int, int]:
    """Largest admissible outward displacement of a positive / negative atom.

    Positive atoms must stay in ]0, pi] (index <= n/2), negative atoms in
    ]-pi, 0[ (index > -n/2); atoms exactly at pi are placed at +pi.
    """
    # twice the centered index of the outermost I0 atom is k-1
    pos_max = (n - (k - 1)) // 2
    neg_max = (n - (k - 1) - 1) // 2
    return pos_max, neg_max


def config_from_partition_pair(n: int, k: int, tau: PartitionPair,
                               box: tuple[float, float] | None = None) -> CircleConfig:
    """Displace the j-th positive atom of I0 outward by mu_j, the j-th negative by nu_j."""
    npos, nneg = _half_counts(k)
    pmax, nmax = max_displacement(n, k)
    mu, nu = tau.mu, tau.nu
    if len(mu) > npos or len(nu) > nneg:
        raise ValueError(f"partition lengths exceed ({npos}, {nneg}) atoms")
    if (mu and mu[0] > pmax) or (nu and nu[0] > nmax):
        raise ValueError(f"parts exceed the box ({pmax}, {nmax}) for n={n}, k={k}")
    if box is not None and not _fits_box(tau, box):
        raise ValueError(f"{tau} does not fit the box {box}")
    mu = mu + (0,) * (npos - len(mu))
    nu = nu + (0,) * (nneg - len(nu))
    sites = [k - 1 - j + mu[j] for j in range(npos)]
    sites += [(j - nu[j]) % n for j in range(nneg)]
    return CircleConfig.from_sites(n, sites)


def _fits_box(tau: PartitionPair, box: tuple[float, float]) -> bool:
    max_part, max_len = box
    parts = (tau.mu[:1] + tau.nu[:1]) or (0,)
    return max(parts) <= max_part and max(len(tau.mu), len(tau.nu)) <= max_len


def centered_indices(config: CircleConfig) -> np.ndarray:
    """Twice the centered atom index 2*I_j - (k-1), reduced into ]-n, n]."""
    n, k = config.n, config.k
    a = (2 * np.asarray(config.positions) - (k - 1)) % (2 * n)
    return np.where(a > n, a - 2 * n, a)


def partition_pair_from_config(config: CircleConfig,
                               box: tuple[float, float] | None = None) -> PartitionPair | None:
    """Inverse of config_from_partition_pair; None if the config is not balanced
    (ceil(k/2) nonnegative atoms) or its displacements leave the box."""
    k = config.k
    npos, nneg = _half_counts(k)
    a2 = centered_indices(config)
    pos = np.sort(a2[a2 >= 0])[::-1]
    neg = np.sort(a2[a2 < 0])
    if len(pos) != npos or len(neg) != nneg:
        return None
    # reference atoms of I0, in doubled units
    ref_pos = np.array([k - 1 - 2 * j for j in range(npos)])
    ref_neg = np.array([-(k - 1) + 2 * j for j in range(nneg)])
    mu = (pos - ref_pos) // 2
    nu = (ref_neg - neg) // 2
    tau = PartitionPair(tuple(int(x) for x in mu), tuple(int(x) for x in nu))
    if box is not None and not _fits_box(tau, box):
        return None
    return tau


def partition_counts(max_weight: int) -> list[int]:
    """p(0), ..., p(max_weight) by the standard coin-change recursion."""
    counts = [1] + [0] * max_weight
    for part in range(1, max_weight + 1):
        for w in range(part, max_weight + 1):
            counts[w] += counts[w - part]
    return counts


def enumerate_partitions(max_weight: int) -> list[list[tuple[int, ...]]]:
    """All partitions of 0..max_weight, grouped by weight, parts decreasing."""
    def gen(w, largest):
        if w == 0:
            yield ()
            return
        for first in range(min(w, largest), 0, -1):
            for rest in gen(w - first, first):
                yield (first,) + rest

    return [list(gen(w, w)) for w in range(max_weight + 1)]


def gamma_series(s: float, truncation: int = 200) -> float:
    """Truncated partition generating function sum_{|lambda| <= W} e^{-s|lambda|}."""
    if s <= 0:
        raise ValueError("the partition series diverges for s <= 0")
    counts = partition_counts(truncation)
    w = np.arange(truncation + 1)
    return float(np.dot(counts, np.exp(-s * w)))


def gamma_product(s: float, truncation: int = 200) -> float:
    """Euler product prod_{j <= W} (1 - e^{-sj})^{-1}."""
    if s <= 0:
        raise ValueError("the partition series diverges for s <= 0")
    j = np.arange(1, truncation + 1)
    return float(np.exp(-np.sum(np.log1p(-np.exp(-s * j)))))
