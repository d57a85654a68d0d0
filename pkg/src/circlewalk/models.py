"""Preset step distributions: constant kernel, conditioned ASEP, hexagonal dimers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .configs import DEFAULT_CAP, ground_state, xi
from .kernels import ChainModel, StepDistribution
from .symmetric import elementary_all


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    n: int
    k: int
    params: dict = field(default_factory=dict)

    def build(self, cap: int = DEFAULT_CAP) -> ChainModel:
        if self.kind in ("constant", "custom"):
            p = self.params["p"]
            if isinstance(p, str):
                p = StepDistribution.parse(p)
            return build_constant(self.n, self.k, p, cap=cap)
        if self.kind == "asep":
            return build_asep(self.n, self.k, self.params["alpha"], self.params["beta"], cap=cap)
        if self.kind == "dimer":
            return build_dimer(self.n, self.k, self.params["a1"], self.params["a2"], cap=cap)
        raise ModelError(f"unknown model kind {self.kind!r}")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    cap: int = DEFAULT_CAP
    out: str | None = None
    s_grid: tuple[float, ...] = tuple(np.arange(-4.0, 4.0 + 1e-9, 0.5).tolist())
    eps_grid: tuple[float, ...] = (0.5, 0.25, 0.1, 0.05)
    tol: float = 1e-10

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError("cap must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")


def build_constant(n: int, k: int, p: StepDistribution, cap: int = DEFAULT_CAP) -> ChainModel:
    if p.support_gcd != 1:
        raise ModelError(f"support gcd is {p.support_gcd}, need 1 (aperiodic, irreducible)")
    m = p.mean_abs
    meta = {"kind": "constant", "p": p.key(),
            "predicted_t_mix": n * n * math.log(n) / (2 * math.pi ** 2 * m)}
    return ChainModel(n, k, p, cap=cap, meta=meta)


def asep_weights(n: int, k: int, alpha: float, beta: float) -> dict[int, float]:
    if alpha < 0 or beta < 0 or alpha + beta <= 0:
        raise ModelError("need alpha, beta >= 0 with alpha + beta > 0")
    eps = 1 - (alpha + beta) / k
    if eps <= 0:
        raise ModelError(f"epsilon = 1 - (alpha+beta)/k = {eps} must be positive")
    ratio = k * math.sin(math.pi / n) / math.sin(k * math.pi / n)
    den = alpha + beta + eps * ratio
    a0 = (alpha + beta) * math.sin(k * math.pi / n) / (k * math.sin(math.pi / n)) + eps
    return {-1: alpha / den, 0: eps / a0, 1: beta / den}


def build_asep(n: int, k: int, alpha: float, beta: float, cap: int = DEFAULT_CAP) -> ChainModel:
    w = asep_weights(n, k, alpha, beta)
    total = sum(w.values())
    if abs(total - 1) > 1e-12:
        raise ModelError(f"ASEP weights sum to {total!r}")
    w = {l: v / total for l, v in w.items()}
    theta = k / n
    pred = n * n * math.log(n) / (2 * math.pi ** 2) * (
        1 + theta * math.pi / ((alpha + beta) * math.sin(theta * math.pi)))
    meta = {"kind": "asep", "alpha": alpha, "beta": beta, "epsilon": 1 - (alpha + beta) / k,
            "predicted_t_mix": pred,
            "gamma_first_order": 2 * math.pi ** 2 * (w[-1] + w[1]) / n ** 2}
    return ChainModel(n, k, StepDistribution(w), cap=cap, meta=meta)


def dimer_weights(n: int, k: int, a1: float, a2: float) -> np.ndarray:
    """p_l = e_l(xi(I0)) a1^l a2^(k-l) / prod_j (a2 + a1 xi_j), l = 0..k."""
    if a1 <= 0 or a2 <= 0:
        raise ModelError("dimer weights need a1, a2 > 0")
    x = xi(ground_state(n, k))
    # coefficients of prod_j (a2 + a1 z xi_j) = a2^k prod_j (1 + (a1/a2) z xi_j)
    c = elementary_all((a1 / a2) * x)
    if np.abs(c.imag).max() > 1e-9 * np.abs(c.real).max():
        raise ArithmeticError("dimer coefficients are not real")
    c = c.real
    if c.min() < -1e-12 * c.max():
        raise ArithmeticError("negative dimer weight")
    c = np.clip(c, 0.0, None)
    return c / c.sum()


def dimer_fourier_product(n: int, k: int, a1: float, a2: float, theta) -> np.ndarray:
    x = xi(ground_state(n, k))
    theta = np.atleast_1d(np.asarray(theta, float))
    num = a2 + a1 * np.exp(1j * theta)[:, None] * x[None, :]
    return np.prod(num / (a2 + a1 * x)[None, :], axis=1)


def dimer_product_residual(n: int, k: int, a1: float, a2: float, grid: int = 257) -> float:
    """max_theta |Phi_p(theta) - prod_j (a2 + a1 e^{i theta} xi_j)/(a2 + a1 xi_j)|."""
    p = dimer_weights(n, k, a1, a2)
    theta = np.linspace(-np.pi, np.pi, grid)
    dft = np.exp(1j * np.outer(theta, np.arange(k + 1))) @ p
    return float(np.abs(dft - dimer_fourier_product(n, k, a1, a2, theta)).max())


def dimer_lambda_I1(n: int, k: int, a1: float, a2: float) -> complex:
    return complex((a2 + a1 * np.exp(1j * np.pi * (k + 1) / n))
                   / (a2 + a1 * np.exp(1j * np.pi * (k - 1) / n)))


def dimer_predictions(n: int, k: int, a1: float, a2: float) -> dict:
    """First-order gap and mixing-time predictions, for both choices of the reference point."""
    out = {}
    for label, phase in (("k", k * math.pi / n), ("1", math.pi / n)):
        z = a2 + a1 * complex(math.cos(phase), math.sin(phase))
        r, th0 = abs(z), math.atan2(z.imag, z.real)
        s = math.sin(k * math.pi / n - th0)
        out[f"r_{label}"] = r
        out[f"theta0_{label}"] = th0
        # stated first-order gap and the matching t_mix ~ log n / gap
        out[f"gamma_stated_{label}"] = 4 * math.pi / n * a1 / r * s
        out[f"t_mix_stated_{label}"] = n * r * math.log(n) / (4 * math.pi * a1 * s)
    # first-order gap obtained by differentiating log|a2 + a1 e^{i phi}| at phi = k pi/n
    out["gamma_first_order"] = out["gamma_stated_k"] / 2
    out["t_mix_first_order"] = math.log(n) / out["gamma_first_order"]
    return out


def build_dimer(n: int, k: int, a1: float, a2: float, cap: int = DEFAULT_CAP) -> ChainModel:
    p = dimer_weights(n, k, a1, a2)
    w = {l: float(v) for l, v in enumerate(p) if v > 0}
    meta = {"kind": "dimer", "a1": a1, "a2": a2, **dimer_predictions(n, k, a1, a2)}
    return ChainModel(n, k, StepDistribution(w), cap=cap, meta=meta)
