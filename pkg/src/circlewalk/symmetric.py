"""Symmetric-function evaluations at points of the unit circle.

Everything here works on plain complex arrays.  ``elementary_all`` expands
prod_j (1 + z x_j) and is the workhorse for eigenvalues; Newton's identities
and the bialternant give independent routes used as cross-checks.
"""
from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .configs import CircleConfig, ground_state, xi

UNIT_TOL = 1e-12
DEGENERATE_TOL = 1e-10


class DegenerateEvaluation(ValueError):
    """Schur bialternant with (numerically) confluent evaluation points."""


def check_unit(x, tol: float = UNIT_TOL) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if np.any(np.abs(np.abs(x) - 1.0) > tol):
        raise ValueError("points must have modulus 1")
    return x


def leja_order(x2: np.ndarray) -> np.ndarray:
    """Reorder each row greedily so every point maximizes its distance product to
    the ones before it.  Expanding prod (1 + z x_j) in this order keeps the
    intermediate coefficients small when the points nearly fill the circle."""
    N, k = x2.shape
    rows = np.arange(N)
    out = np.empty_like(x2)
    score = np.zeros((N, k))
    j = np.zeros(N, dtype=np.int64)
    for m in range(k):
        if m:
            j = np.argmax(score, axis=1)
        pick = x2[rows, j]
        out[:, m] = pick
        # clamp so repeated points keep a finite (very low) score
        score += np.log(np.maximum(np.abs(x2 - pick[:, None]), 1e-300))
        score[rows, j] = -np.inf
    return out


def elementary_all(x) -> np.ndarray:
    """Coefficients e_0..e_k of prod_j (1 + z x_j).

    Accepts a (k,) vector or an (N, k) batch; returns (k+1,) or (N, k+1).
    """
    x = np.asarray(x, dtype=complex)
    batch = x.ndim == 2
    x2 = x if batch else x[None, :]
    N, k = x2.shape
    x2 = leja_order(x2)
    e = np.zeros((N, k + 1), dtype=complex)
    e[:, 0] = 1.0
    for j in range(k):
        # multiply by (1 + z x_j); update high degrees first
        e[:, 1:j + 2] = e[:, 1:j + 2] + x2[:, j:j + 1] * e[:, 0:j + 1]
    return e if batch else e[0]


def elementary(x, ell: int) -> complex:
    x = np.asarray(x, dtype=complex)
    if not 0 <= ell <= len(x):
        raise ValueError(f"ell must be in [0, {len(x)}], got {ell}")
    return complex(elementary_all(x)[ell])


def power_sum(x, s: int) -> complex:
    if s < 1:
        raise ValueError("power sums are defined here for s >= 1")
    x = np.asarray(x, dtype=complex)
    return complex(np.sum(x ** s))


def elementary_via_newton(x, ell: int) -> complex:
    """e_ell from ell*e_ell = sum_{i=1}^{ell} (-1)^{i-1} e_{ell-i} p_i."""
    x = np.asarray(x, dtype=complex)
    if not 0 <= ell <= len(x):
        raise ValueError(f"ell must be in [0, {len(x)}], got {ell}")
    p = [0j] + [power_sum(x, s) for s in range(1, ell + 1)]
    e = [1 + 0j]
    for m in range(1, ell + 1):
        acc = sum((-1) ** (i - 1) * e[m - i] * p[i] for i in range(1, m + 1))
        e.append(acc / m)
    return e[ell]


def elementary_ground(n: int, k: int, ell: int) -> float:
    """e_ell(xi(I0)) = prod_{j=1}^{ell} sin((k-j+1) pi/n) / sin(j pi/n)."""
    j = np.arange(1, ell + 1)
    return float(np.prod(np.sin((k - j + 1) * np.pi / n) / np.sin(j * np.pi / n)))


def schur(config: CircleConfig, x) -> complex:
    """Bialternant det(x_i^{I_j}) / det(x_i^{j-1}) via LU with partial pivoting."""
    x = np.asarray(x, dtype=complex)
    k = config.k
    if len(x) != k:
        raise ValueError(f"need {k} evaluation points, got {len(x)}")
    exps = np.asarray(config.positions)
    num = _det(x[:, None] ** exps[None, :])
    den = _det(x[:, None] ** np.arange(k - 1, -1, -1)[None, :])
    if abs(den) < DEGENERATE_TOL:
        raise DegenerateEvaluation(f"Vandermonde determinant {abs(den):.3e} too small")
    return complex(num / den)


def _det(m: np.ndarray) -> complex:
    if m.shape[0] == 0:
        return 1.0
    with warnings.catch_warnings():
        # exact singularity is reported by the caller's degeneracy check
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    sign = (-1) ** np.count_nonzero(piv != np.arange(len(piv)))
    return complex(sign * np.prod(np.diag(lu)))


def schur_at_ground(config: CircleConfig) -> float:
    """S_I(xi(I0)) as the positive sine product prod_{i<j} sin(pi(I_i-I_j)/n) / sin(pi(j-i)/n)."""
    return float(sine_product_weights(config.n, np.asarray([config.positions]))[0])


def sine_product_weights(n: int, positions: np.ndarray) -> np.ndarray:
    """Row-wise schur_at_ground for an (N, k) array, in log space.

    Only the histogram of cyclic pair distances enters, summed in a fixed
    order, so rotated configurations get bit-identical weights.
    """
    positions = np.asarray(positions)
    k = positions.shape[1]
    iu, ju = np.triu_indices(k, 1)
    dist = (positions[:, iu] - positions[:, ju]) % n
    dist = np.minimum(dist, n - dist)
    half = n // 2
    table = np.log(np.sin(np.pi * np.arange(1, half + 1) / n))
    logs = np.zeros(len(positions))
    for d in range(1, half + 1):
        logs += np.count_nonzero(dist == d, axis=1) * table[d - 1]
    ref = np.log(np.sin(np.pi * (ju - iu) / n)).sum()
    return np.exp(logs - ref)


def vandermonde_abs_sq(config: CircleConfig) -> float:
    """|V(xi(I))|^2 = prod_{i<j} 4 sin^2(pi (I_i - I_j)/n)."""
    pos = np.asarray(config.positions)
    iu, ju = np.triu_indices(config.k, 1)
    return float(np.prod(4.0 * np.sin(np.pi * (pos[iu] - pos[ju]) / config.n) ** 2))


def stationary_weight(config: CircleConfig) -> float:
    return vandermonde_abs_sq(config) / float(config.n) ** config.k


def stationary_weights(n: int, positions: np.ndarray) -> np.ndarray:
    """mu over an (N, k) array: mu(I) = mu(I0) * schur_at_ground(I)^2."""
    k = np.asarray(positions).shape[1]
    mu0 = vandermonde_abs_sq(ground_state(n, k)) / float(n) ** k
    return mu0 * sine_product_weights(n, positions) ** 2


def q_binomial_check(n: int, k: int, ell: int) -> float:
    """|e_ell(1, q, ..., q^{k-1}) - q^{ell(ell-1)/2} [k choose ell]_q| at q = e^{2 pi i/n}."""
    q = np.exp(2j * np.pi / n)
    lhs = elementary(q ** np.arange(k), ell)
    j = np.arange(1, ell + 1)
    rhs = q ** (ell * (ell - 1) / 2) * np.prod((1 - q ** (k - j + 1)) / (1 - q ** j))
    return float(abs(lhs - rhs))


def pieri_check(n: int, k: int, space=None) -> float:
    """max_I |S_{I1} S_{I1'} - S_{I2} - 1| over B_{k,n}, evaluated at xi(I)."""
    from .configs import (StateSpace, conjugate_first_excited, first_excited,
                          second_excited)
    if k < 2:
        raise ValueError("Pieri check needs k >= 2")
    space = space or StateSpace(n, k)
    i1, i1c, i2 = first_excited(n, k), conjugate_first_excited(n, k), second_excited(n, k)
    worst = 0.0
    for cfg in space.configs():
        x = xi(cfg)
        r = schur(i1, x) * schur(i1c, x) - schur(i2, x) - 1.0
        worst = max(worst, abs(r))
    return worst


def cycle_type_coefficients(ell: int) -> dict[tuple[int, ...], float]:
    """Brute-force e_ell = (1/ell!) sum_sigma sgn(sigma) p_{cycle type(sigma)}.

    Returns {cycle type (sorted descending): signed count} by enumerating S_ell.
    """
    from itertools import permutations

    out: dict[tuple[int, ...], float] = {}
    for perm in permutations(range(ell)):
        seen, cycles = [False] * ell, []
        for s in range(ell):
            if not seen[s]:
                c, j = 0, s
                while not seen[j]:
                    seen[j], j, c = True, perm[j], c + 1
                cycles.append(c)
        key = tuple(sorted(cycles, reverse=True))
        sign = (-1) ** (ell - len(cycles))
        out[key] = out.get(key, 0) + sign
    return out


def newton_head(ell: int) -> dict[tuple[int, ...], int]:
    """Signed coefficients (times ell!) of the four leading cycle types.

    p1^ell, p1^{ell-2} p2, p1^{ell-3} p3 and p1^{ell-4} p2^2 carry
    1, -ell(ell-1)/2, +ell(ell-1)(ell-2)/3 and +ell(ell-1)(ell-2)(ell-3)/8.
    """
    head = {(1,) * ell: 1}
    if ell >= 2:
        head[(2,) + (1,) * (ell - 2)] = -ell * (ell - 1) // 2
    if ell >= 3:
        head[(3,) + (1,) * (ell - 3)] = ell * (ell - 1) * (ell - 2) // 3
    if ell >= 4:
        head[(2, 2) + (1,) * (ell - 4)] = ell * (ell - 1) * (ell - 2) * (ell - 3) // 8
    return head


