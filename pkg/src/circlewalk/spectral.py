"""Spectrum of the conditioned walks.

Orientation note.  With A^(l)(I, J) = 1 when J is reached from I by l
anticlockwise moves, the right eigenvectors of A^(l) are the *unconjugated*
columns I -> S_I(xi(J)) with eigenvalue e_l(xi(J)) (l >= 0).  Since the
matrices are real, conj(S_I(xi(J))) is then an eigenvector for the conjugate
eigenvalue.  ``right_eigenvector`` returns the former (normalized),
``eigenvector`` the conjugated one, f_J.  Real quantities (heat kernel,
l2 distance) are the same either way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .configs import (CircleConfig, OrbitClass, StateSpace, first_excited,
                      orbit_labels, second_excited, xi, xi_array)
from .kernels import ChainModel, StepDistribution
from .symmetric import (elementary_all, elementary_ground, schur,
                        sine_product_weights)


class ZeroPerronEigenvalue(ArithmeticError):
    pass


def _ground_e(n: int, k: int, ell: int) -> float:
    e0 = elementary_ground(n, k, abs(ell))
    if abs(e0) < 1e-300:
        raise ZeroPerronEigenvalue(f"e_{abs(ell)}(xi(I0)) vanishes for n={n}, k={k}")
    return e0


def eigenvalue_ell(J: CircleConfig, ell: int) -> complex:
    k, n = J.k, J.n
    if abs(ell) > k:
        raise ValueError(f"|ell| = {abs(ell)} exceeds k = {k}")
    lam = elementary_all(xi(J))[abs(ell)] / _ground_e(n, k, ell)
    return complex(np.conj(lam) if ell < 0 else lam)


def lambda_I1_closed_form(n: int, k: int, ell: int) -> complex:
    """1 - w^{k-l} (1-w)(1-w^l)/(1-w^k), w = e^{2 pi i/n}."""
    if not 0 <= ell <= k:
        raise ValueError("need 0 <= ell <= k")
    w = np.exp(2j * np.pi / n)
    return complex(1 - w ** (k - ell) * (1 - w) * (1 - w ** ell) / (1 - w ** k))


def mixture_eigenvalue(J: CircleConfig, p: StepDistribution) -> complex:
    return sum(v * eigenvalue_ell(J, l) for l, v in p.weights.items())


@dataclass(frozen=True)
class SpectrumEntry:
    orbit: OrbitClass
    lambda_by_ell: dict[int, complex] = field(compare=False)
    lambda_mixture: complex
    d: float


class Spectrum:
    """Per-orbit eigenvalues with phases reconstructed for every state."""

    def __init__(self, model: ChainModel, arrays: dict[str, np.ndarray] | None = None):
        self.model = model
        if arrays is None:
            arrays = self.compute_arrays(model)
        self.reps, self.orbit_id = arrays["reps"], arrays["orbit_id"]
        self.orbit_size, self.offset = arrays["orbit_size"], arrays["offset"]
        self.rep_d = arrays["rep_d"]
        self.rep_lambda: dict[int, np.ndarray] = {
            l: arrays[f"lambda_{l}"] for l in model.p.support}

    @staticmethod
    def compute_arrays(model: ChainModel) -> dict[str, np.ndarray]:
        n, k = model.n, model.k
        space = model.space
        reps, orbit_id, orbit_size, offset = orbit_labels(space)
        rep_pos = space.positions[reps]
        e = elementary_all(xi_array(n, k, rep_pos))
        out = {"reps": reps, "orbit_id": orbit_id, "orbit_size": orbit_size,
               "offset": offset, "rep_d": sine_product_weights(n, rep_pos)}
        for ell in model.p.support:
            lam = e[:, abs(ell)] / _ground_e(n, k, ell)
            out[f"lambda_{ell}"] = np.conj(lam) if ell < 0 else lam
        return out

    @classmethod
    def cached(cls, model: ChainModel, cache) -> "Spectrum":
        """Reuse per-orbit arrays from an ``artifacts.Cache`` when available."""
        desc = {"what": "spectrum", "n": model.n, "k": model.k, "p": model.p.key()}
        return cls(model, cache.get_or_compute(desc, lambda: cls.compute_arrays(model)))

    @property
    def n_orbits(self) -> int:
        return len(self.reps)

    def rep_mixture(self) -> np.ndarray:
        return sum(self.model.p.weights[l] * self.rep_lambda[l] for l in self.model.p.support)

    def lambda_ell(self, ell: int) -> np.ndarray:
        """lambda^(ell)_J for every state J, via lambda_{t.J} = e^{2 pi i t l/n} lambda_J."""
        n = self.model.n
        phase = np.exp(2j * np.pi * self.offset * ell / n)
        return self.rep_lambda[ell][self.orbit_id] * phase

    @cached_property
    def lambdas(self) -> np.ndarray:
        out = np.zeros(self.model.space.size, dtype=complex)
        for ell, v in self.model.p.weights.items():
            out += v * self.lambda_ell(ell)
        return out

    @cached_property
    def d(self) -> np.ndarray:
        return self.rep_d[self.orbit_id]

    def entries(self) -> list[SpectrumEntry]:
        space = self.model.space
        mix = self.rep_mixture()
        out = []
        for o, r in enumerate(self.reps):
            orbit = OrbitClass(space.config(int(r)), int(self.orbit_size[o]))
            out.append(SpectrumEntry(
                orbit, {l: complex(v[o]) for l, v in self.rep_lambda.items()},
                complex(mix[o]), float(self.rep_d[o])))
        return out

    def second_modulus(self) -> float:
        """Largest |lambda_J| over J != I0."""
        lam = np.abs(self.lambdas).copy()
        lam[self.model.ground_index] = -np.inf
        return float(lam.max())

    def to_rows(self) -> tuple[list[str], list[list]]:
        ells = sorted(self.rep_lambda)
        header = ["orbit_rep", "orbit_size"]
        for l in ells:
            header += [f"re_lambda_{l}", f"im_lambda_{l}"]
        header += ["re_lambda_mix", "im_lambda_mix", "abs_lambda_mix", "d"]
        mix = self.rep_mixture()
        rows = []
        space = self.model.space
        for o, r in enumerate(self.reps):
            row = [" ".join(map(str, space.positions[r])), int(self.orbit_size[o])]
            for l in ells:
                row += [self.rep_lambda[l][o].real, self.rep_lambda[l][o].imag]
            row += [mix[o].real, mix[o].imag, abs(mix[o]), self.rep_d[o]]
            rows.append(row)
        return header, rows


def full_spectrum(model: ChainModel) -> list[SpectrumEntry]:
    return Spectrum(model).entries()


def schur_matrix(space: StateSpace) -> np.ndarray:
    """M[I, J] = S_I(xi(J)) over the whole space, one batched LU per column."""
    n, k = space.n, space.k
    pos = space.positions.astype(float)
    N = space.size
    M = np.empty((N, N), dtype=complex)
    vand_exp = np.arange(k - 1, -1, -1, dtype=float)
    for jj in range(N):
        arg = np.pi * (2.0 * pos[jj] - (k - 1)) / n  # angles of xi(J)
        num = np.exp(1j * arg[None, :, None] * pos[:, None, :])
        den = np.linalg.det(np.exp(1j * arg[:, None] * vand_exp[None, :]))
        M[:, jj] = np.linalg.det(num) / den
    return M


def right_eigenvector(model: ChainModel, J: CircleConfig) -> np.ndarray:
    """g_J(I) = d(J) S_I(xi(J)) / S_I(xi(I0)); P g_J = lambda_J g_J."""
    x = xi(J)
    vals = np.array([schur(I, x) for I in model.space.configs()])
    dJ = sine_product_weights(J.n, np.asarray([J.positions]))[0]
    return dJ * vals / model.phi


def eigenvector(model: ChainModel, J: CircleConfig) -> np.ndarray:
    """f_J(I) = d(J) conj(S_J(xi(I))) / conj(S_J(xi(I0))), i.e. conj of the right eigenvector."""
    return np.conj(right_eigenvector(model, J))


def eigenbasis(model: ChainModel) -> np.ndarray:
    """Columns f_J for every J (dense; small spaces only)."""
    space = model.space
    if space.size > 2000:
        raise ValueError("dense eigenbasis limited to 2000 states")
    d = sine_product_weights(space.n, space.positions)
    return np.conj(schur_matrix(space)) * d[None, :] / model.phi[:, None]


def orthonormality_check(n: int, k: int) -> float:
    model = ChainModel(n, k, StepDistribution({0: 1.0}))
    F = eigenbasis(model)
    gram = F.conj().T @ (model.mu[:, None] * F)
    return float(np.abs(gram - np.eye(len(gram))).max())


@dataclass(frozen=True)
class GapReport:
    gamma_exact: float
    gamma_formula: float
    gamma_ell: dict[int, float]
    gamma_ell_leading: dict[int, float]
    gamma_avg: float

    def as_dict(self) -> dict:
        return {"gamma_exact": self.gamma_exact, "gamma_formula": self.gamma_formula,
                "gamma_ell": {str(l): v for l, v in self.gamma_ell.items()},
                "gamma_ell_leading": {str(l): v for l, v in self.gamma_ell_leading.items()},
                "gamma_avg": self.gamma_avg}


def s_kn(n: int, k: int) -> float:
    return math.sin(math.pi / n) / math.sin(k * math.pi / n)


def _sym_weights(p: StepDistribution, k: int) -> dict[int, float]:
    return {l: p.get(l) + p.get(-l) for l in range(1, k + 1)}


def gamma_formula(n: int, k: int, p: StepDistribution) -> float:
    s = s_kn(n, k)
    return 2 * s * sum(w * math.sin(l * math.pi / n) * math.sin((k - l) * math.pi / n)
                       for l, w in _sym_weights(p, k).items())


def gamma_ell_exact(n: int, k: int, ell: int) -> float:
    return 1.0 - abs(lambda_I1_closed_form(n, k, abs(ell)))


def gamma_ell_leading(n: int, k: int, ell: int) -> float:
    l = abs(ell)
    return 2 * s_kn(n, k) * math.sin(l * math.pi / n) * math.sin((k - l) * math.pi / n)


def gap(model: ChainModel) -> GapReport:
    n, k, p = model.n, model.k, model.p
    lam1 = mixture_eigenvalue(first_excited(n, k), p)
    g_ell = {l: gamma_ell_exact(n, k, l) for l in range(-k, k + 1)}
    g_lead = {l: gamma_ell_leading(n, k, l) for l in range(-k, k + 1)}
    avg = sum(v * g_ell[l] for l, v in p.weights.items())
    return GapReport(1.0 - abs(lam1), gamma_formula(n, k, p), g_ell, g_lead, avg)


def lambda_I2(model: ChainModel) -> tuple[complex, float]:
    """(direct, closed form) for the eigenvalue at I2 = I0 + (1, 0, ..., 0, -1)."""
    n, k = model.n, model.k
    direct = mixture_eigenvalue(second_excited(n, k), model.p)
    c = math.sin(math.pi / n) / math.sin((k - 1) * math.pi / n)
    closed = 1 - 4 * c * sum(w * math.sin(l * math.pi / n) * math.sin((k - l) * math.pi / n)
                             for l, w in _sym_weights(model.p, k).items())
    return direct, closed


def heat_kernel_density(model: ChainModel, t: int, I: CircleConfig | None = None,
                        basis: np.ndarray | None = None):
    """P^t(I0, I)/mu(I) = sum_J lambda_J^t f_J(I0) f_J(I), as a real number.

    With I=None the whole row is returned.
    """
    F = eigenbasis(model) if basis is None else basis
    lam = Spectrum(model).lambdas
    d = F[model.ground_index]
    row = F @ (lam ** t * d)
    if np.abs(row.imag).max() > 1e-8 * max(1.0, np.abs(row.real).max()):
        raise ArithmeticError("spectral heat kernel is not real")
    row = row.real
    return row if I is None else float(row[model.space.index(I)])


def subgaussian_gap_estimate(model: ChainModel) -> tuple[float, float]:
    """(theta, theta*k/sqrt(gamma)) with theta the psi_2 parameter of gamma_X - gamma.

    theta is the least value with E exp((gamma_X - gamma)^2 / theta^2) <= 2.
    """
    rep = gap(model)
    ells = model.p.support
    probs = np.array([model.p.weights[l] for l in ells])
    dev = np.array([rep.gamma_ell[l] for l in ells]) - rep.gamma_exact
    y2 = dev ** 2
    if np.dot(probs, y2) <= 1e-300:
        return 0.0, 0.0

    def ok(th):
        with np.errstate(over="ignore"):
            return np.dot(probs, np.exp(y2 / th ** 2)) <= 2.0

    lo, hi = 0.0, float(np.sqrt(y2.max())) + 1e-300
    while not ok(hi):
        lo, hi = hi, 2 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
        if hi - lo <= 1e-14 * hi:
            break
    ratio = hi * model.k / math.sqrt(rep.gamma_exact) if rep.gamma_exact > 0 else math.inf
    return hi, ratio
