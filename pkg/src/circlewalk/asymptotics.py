"""Saddle-point and transport laboratory for the eigenvalue estimates.

Contour integrals of prod (1 + z x_j), the saddle of g(z) = (1/k) sum log(1 + z xi_j(I0)),
optimal transport of atom measures on ]-pi, pi], the three-way orbit classification and
two auxiliary bounds (Newton truncation, power sums on subgroups).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .configs import (CircleConfig, OrbitClass, PartitionPair, StateSpace,
                      centered_indices, ground_state,
                      orbit_labels, partition_pair_from_config, shift, xi)
from .spectral import gamma_ell_exact, lambda_I1_closed_form
from .symmetric import (elementary, elementary_all, elementary_ground,
                        newton_head, power_sum)

BRANCH_TOL = 1e-10
DEFAULT_C1 = 1.0
DEFAULT_C2 = 10.0


class BranchProximity(ValueError):
    """A quadrature node sits on a zero of 1 + z xi_j."""


def g_of(J: CircleConfig, z: complex) -> complex:
    return complex(np.mean(np.log(1 + z * xi(J))))


def contour_alpha(J: CircleConfig, ell: int, r: float, N: int = 4096) -> complex:
    """(1/2pi) int prod_j (1 + r e^{it} xi_j) r^{-l} e^{-ilt} dt by the N-point trapezoid rule."""
    if r <= 0:
        raise ValueError("radius must be positive")
    x = xi(J)
    theta = 2 * np.pi * np.arange(N) / N - np.pi
    z = r * np.exp(1j * theta)
    fac = 1 + z[:, None] * x[None, :]
    closest = float(np.abs(fac).min())
    if closest <= BRANCH_TOL:
        raise BranchProximity(f"|1 + z xi_j| = {closest:.2e} on the contour r={r}")
    # product form: no logarithm, hence no branch choice
    vals = np.prod(fac, axis=1) * np.exp(-1j * ell * theta) * r ** (-ell)
    return complex(vals.mean())


def _ground_x(n: int, k: int) -> np.ndarray:
    return xi(ground_state(n, k))


def m_of(n: int, k: int, z: float) -> float:
    x = _ground_x(n, k)
    return float(np.mean(z * x / (1 + z * x)).real)


def m_prime(n: int, k: int, z: float) -> float:
    x = _ground_x(n, k)
    return float(np.mean(x / (1 + z * x) ** 2).real)


@dataclass(frozen=True)
class SaddleData:
    n: int
    k: int
    ell: int
    r: float
    f0: float
    curvature: float
    approx_alpha_ell: float
    r_closed_form: float

    @property
    def r_gap(self) -> float:
        return abs(self.r - self.r_closed_form)


def solve_r(n: int, k: int, ell: int) -> SaddleData:
    if not 1 <= ell <= k / 2:
        raise ValueError("need 1 <= ell <= k/2")
    target = ell / k
    hi = 2.0
    while m_of(n, k, hi) < target:  # not expected, m(2) > 1/2 for desk sizes
        hi *= 2
        if hi > 1e6:
            raise RuntimeError("failed to bracket the stationary point")
    r = brentq(lambda z: m_of(n, k, z) - target, 1e-300, hi, xtol=1e-300, rtol=1e-15,
               maxiter=500)
    if abs(m_of(n, k, r) - target) > 1e-12:
        raise RuntimeError("stationary point not resolved to 1e-12")
    x = _ground_x(n, k)
    g = float(np.mean(np.log(np.abs(1 + r * x))))
    f0 = g - target * math.log(r)
    curv = r * m_prime(n, k, r)
    approx = math.exp(k * f0) / math.sqrt(2 * math.pi * k * curv)
    closed = math.sin(ell * math.pi / n) / math.sin((k - ell) * math.pi / n)
    return SaddleData(n, k, ell, r, f0, curv, approx, closed)


def saddle_approx(n: int, k: int, ell: int) -> float:
    return solve_r(n, k, ell).approx_alpha_ell


def saddle_relative_error(n: int, k: int, ell: int) -> float:
    exact = elementary_ground(n, k, ell)
    return abs(saddle_approx(n, k, ell) / exact - 1)


def gamma_from_saddle(n: int, k: int, ell: int) -> float:
    """(2 pi/n) r sin(t)/(1 + r^2 + 2 r cos t) with t = k pi/n."""
    r = solve_r(n, k, ell).r
    t = k * math.pi / n
    return 2 * math.pi / n * r * math.sin(t) / (1 + r * r + 2 * r * math.cos(t))


def modulus_symmetry_residual(n: int, k: int) -> float:
    """max_{J, l} | |lambda^(l)_J| - |lambda^(k-l)_J| | over B_{k,n}."""
    sp = StateSpace(n, k)
    from .configs import xi_array
    e = np.abs(elementary_all(xi_array(n, k, sp.positions)))
    e0 = np.array([elementary_ground(n, k, l) for l in range(k + 1)])
    lam = e / e0[None, :]
    return float(np.abs(lam - lam[:, ::-1]).max())


# ---------------------------------------------------------------- transport

def atom_angles(config: CircleConfig) -> np.ndarray:
    """Atoms of mu_J in ]-pi, pi], as pi * (doubled centered index)/n."""
    return np.pi * centered_indices(config) / config.n


def transport_map(J: CircleConfig) -> tuple[float, list[tuple[float, float]]]:
    """Optimal map T from the atoms of I0 to those of J with |T(x)| >= |x|.

    Common atoms stay put; the remaining atoms are matched in sorted order.  The
    cost equals the sorted-assignment W1 (common atoms do not change the
    cumulative difference), and every moved atom of I0 lands outside the arc
    spanned by I0, so |T(x)| >= |x| holds without further exchanges.
    """
    n, k = J.n, J.k
    a0 = centered_indices(ground_state(n, k))
    a1 = centered_indices(J)
    common = set(a0.tolist()) & set(a1.tolist())
    src = np.sort([a for a in a0.tolist() if a not in common])
    dst = np.sort([a for a in a1.tolist() if a not in common])
    pairs = [(c, c) for c in sorted(common)] + list(zip(src.tolist(), dst.tolist()))
    pairs.sort()
    scale = np.pi / n
    match = [(x * scale, y * scale) for x, y in pairs]
    cost = float(sum(abs(y - x) for x, y in match))
    return cost, match


def sorted_assignment_cost(J: CircleConfig) -> float:
    """Plain sorted-assignment W1 on the line, as an oracle for transport_map."""
    a0 = np.sort(atom_angles(ground_state(J.n, J.k)))
    a1 = np.sort(atom_angles(J))
    return float(np.abs(a0 - a1).sum())


def _threshold(n: int, C2: float) -> float:
    return C2 / math.log(n)


def is_far(match, n: int, k: int, C1: float, C2: float) -> bool:
    """Integral of (|T x| - |x|) over atoms sent beyond k pi/n + h is >= C1 k / log k."""
    edge, h = k * math.pi / n, _threshold(n, C2)
    total = sum(abs(y) - abs(x) for x, y in match if abs(y) > edge + h)
    return total >= C1 * k / math.log(k)


def has_deep_move(match, n: int, k: int, C2: float) -> bool:
    """Some atom moves from depth >= h inside the edge to >= h beyond it."""
    edge, h = k * math.pi / n, _threshold(n, C2)
    return any(x != y and min(abs(y) - edge, edge - abs(x)) >= h for x, y in match)


def near_ground_box(n: int, C2: float) -> tuple[int, int]:
    """(max part, max length) of tau for atoms moved at most h beyond the edge."""
    H = _threshold(n, C2) * n / (2 * math.pi)
    return math.floor(H + 0.5), math.ceil(H + 0.5) - 1


@dataclass(frozen=True)
class OrbitClassification:
    orbit: OrbitClass
    cls: str
    transport_cost: float
    tau: PartitionPair | None
    constants_used: tuple[float, float]
    predicate_class: str = field(default="", compare=False)


def classify_orbits(n: int, k: int, C1: float = DEFAULT_C1, C2: float = DEFAULT_C2,
                    cap: int = 200_000) -> list[OrbitClassification]:
    """J3 when some shift decodes to a partition pair inside the near-ground box;
    otherwise J1 if every member is far, else J2.  ``predicate_class`` records the
    class from the far / deep-move predicates alone (J3 as their complement)."""
    if k < 2:
        raise ValueError("classification needs k >= 2")
    space = StateSpace(n, k, cap)
    reps, _, sizes, _ = orbit_labels(space)
    box = near_ground_box(n, C2)
    out = []
    for r, size in zip(reps, sizes):
        rep = space.config(int(r))
        members = [shift(rep, t) for t in range(int(size))]
        tau, best_cost, far_all, deep_all = None, math.inf, True, True
        for J in members:
            cost, match = transport_map(J)
            best_cost = min(best_cost, cost)
            far_all = far_all and is_far(match, n, k, C1, C2)
            deep_all = deep_all and has_deep_move(match, n, k, C2)
            cand = partition_pair_from_config(J, box)
            if cand is not None and (tau is None or cand.weight < tau.weight):
                tau = cand
        pred = "J1" if far_all else ("J2" if deep_all else "J3")
        cls = "J3" if tau is not None else ("J1" if far_all else "J2")
        out.append(OrbitClassification(OrbitClass(rep, int(size)), cls, best_cost, tau,
                                       (C1, C2), pred))
    return out


@dataclass
class EstimatesReport:
    n: int
    k: int
    ell: int
    rows: list[tuple[str, int, float]]     # (rep, |tau|, -log|lambda| / (gamma_l |tau|))
    band_ok: bool                          # all ratios with |tau| <= log n inside [0.5, 2]
    j1_max_modulus: float
    i1_modulus: float
    ordering_ok: bool
    counts: dict[str, int]


def estimates_check(n: int, k: int, ell: int, C1: float = DEFAULT_C1,
                    C2: float = DEFAULT_C2) -> EstimatesReport:
    classes = classify_orbits(n, k, C1, C2)
    g = gamma_ell_exact(n, k, ell)
    e0 = elementary_ground(n, k, abs(ell))
    rows, band_ok = [], True
    j1_max = 0.0
    counts = {"J1": 0, "J2": 0, "J3": 0}
    for oc in classes:
        counts[oc.cls] += 1
        mod = abs(elementary(xi(oc.orbit.representative), abs(ell))) / e0
        if oc.cls == "J3" and oc.tau is not None and oc.tau.weight > 0:
            ratio = -math.log(mod) / (g * oc.tau.weight) if mod > 0 else math.inf
            rows.append((" ".join(map(str, oc.orbit.representative.positions)),
                         oc.tau.weight, ratio))
            if oc.tau.weight <= math.log(n) and not 0.5 <= ratio <= 2.0:
                band_ok = False
        elif oc.cls == "J1":
            j1_max = max(j1_max, mod)
    i1 = abs(lambda_I1_closed_form(n, k, abs(ell)))
    return EstimatesReport(n, k, ell, rows, band_ok, j1_max, i1, j1_max < i1, counts)


# ---------------------------------------------------------------- Newton, subgroups

def newton_truncation(x, ell: int) -> complex:
    """Four-term head of Newton's expansion of e_ell in power sums."""
    p = {s: power_sum(x, s) for s in (1, 2, 3)}
    total = 0j
    for ctype, coef in newton_head(ell).items():
        term = complex(coef)
        for part in ctype:
            term *= p[part]
        total += term
    return total / math.factorial(ell)


def newton_truncation_check(J: CircleConfig, ell: int) -> float:
    """|e_ell - head| / |p1^ell / ell!| at xi(J)."""
    x = xi(J)
    head = newton_truncation(x, ell)
    exact = elementary(x, ell)
    scale = abs(power_sum(x, 1)) ** ell / math.factorial(ell)
    return float(abs(exact - head) / scale)


def subgroup_bound(n: int, k: int, s: int) -> float:
    sp = math.gcd(n, s)
    return sp * math.sin((k + sp) * math.pi / n) / math.sin(sp * math.pi / n)


def subgroup_bound_sharp(n: int, k: int, s: int) -> float:
    """Exact max of |sum d_i w_i| over r = n/s' equally spaced points with 0 <= d_i <= s',
    sum d_i = k: fill a contiguous arc (optimal for weights bounded by s')."""
    sp = math.gcd(n, s)
    r = n // sp
    w = np.exp(2j * np.pi * np.arange(r) / r)
    q, rem = divmod(k, sp)
    d = np.zeros(r)
    d[:q] = sp
    if q < r:
        d[q] = rem
    return float(abs(np.dot(d, w)))


@dataclass
class SubgroupReport:
    n: int
    k: int
    max_slack: float
    violations: list[tuple[tuple[int, ...], int, float, float]]   # (J, s, |p_s|, bound)


def subgroup_bound_check(n: int, k: int) -> SubgroupReport:
    """max over J in B_{k,n} and 1 <= s <= k of |p_s(xi(J))| - bound(s)."""
    from .configs import xi_array
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    sp = StateSpace(n, k)
    x = xi_array(n, k, sp.positions)
    worst, viol = -math.inf, []
    for s in range(1, k + 1):
        ps = np.abs((x ** s).sum(axis=1))
        b = subgroup_bound(n, k, s)
        slack = ps - b
        worst = max(worst, float(slack.max()))
        for i in np.nonzero(slack > 1e-10)[0][:3]:
            viol.append((tuple(int(v) for v in sp.positions[i]), s, float(ps[i]), b))
    return SubgroupReport(n, k, worst, viol)
