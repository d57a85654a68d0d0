import math

import pytest

from circlewalk.kernels import StepDistribution
from circlewalk.models import (ModelError, ModelSpec, RunConfig, asep_weights, build_asep,
                               build_constant, build_dimer, dimer_lambda_I1,
                               dimer_product_residual, dimer_weights)
from circlewalk.spectral import gap, mixture_eigenvalue
from circlewalk.configs import first_excited

LAZY = StepDistribution({-1: 0.25, 0: 0.5, 1: 0.25})


def test_constant_builder():
    m = build_constant(12, 6, LAZY)
    assert m.p.mean_abs == 0.5
    assert m.meta["predicted_t_mix"] == pytest.approx(144 * math.log(12) / math.pi ** 2)
    assert m.audit.gcd_ok and not m.audit.warnings
    w = build_constant(12, 6, StepDistribution({1: 1.0})).audit
    assert w.Ka_hat < 1e-9 and w.warnings
    with pytest.raises(ModelError):
        build_constant(12, 6, StepDistribution({0: 1.0}))
    with pytest.raises(ModelError, match="gcd"):
        build_constant(12, 6, StepDistribution({-2: 0.5, 2: 0.5}))


def test_asep_weights():
    w = asep_weights(16, 8, 1.5, 1.5)
    assert w[-1] == w[1]
    w = asep_weights(16, 8, 0.0, 1.0)
    assert w[-1] == 0
    m = build_asep(16, 8, 0.0, 1.0)
    assert m.p.support == [0, 1] and m.audit.gcd_ok
    w = asep_weights(20, 10, 1.0, 1.0)
    assert abs(sum(w.values()) - 1) <= 1e-13
    with pytest.raises(ModelError):
        asep_weights(16, 2, 1.0, 1.5)
    with pytest.raises(ModelError):
        asep_weights(16, 8, 0.0, 0.0)


def test_asep_gap_first_order():
    errs = []
    for n in (20, 40):
        m = build_asep(n, n // 2, 1.0, 1.0)
        g = gap(m).gamma_exact
        errs.append(abs(g / m.meta["gamma_first_order"] - 1))
    assert errs[0] <= 0.2 and errs[1] < errs[0]


def test_asep_gap_depends_on_sum_at_half_filling():
    gs = [gap(build_asep(16, 8, a, b)).gamma_exact for a, b in [(2, 0), (1, 1), (0, 2)]]
    assert max(gs) - min(gs) <= 1e-12
    # away from k = n/2 the lowest mode is not real and the gap moves with (alpha, beta)
    gs = [gap(build_asep(15, 5, a, b)).gamma_exact for a, b in [(2, 0), (1, 1)]]
    assert abs(gs[0] - gs[1]) > 1e-4


def test_dimer():
    p = dimer_weights(12, 6, 1.0, 1.0)
    assert abs(p.sum() - 1) <= 1e-12 and (p >= 0).all()
    assert dimer_product_residual(12, 6, 1.0, 1.0) <= 1e-9
    assert dimer_product_residual(15, 7, 0.4, 1.3) <= 1e-9
    m = build_dimer(12, 6, 0.7, 1.2)
    lam = mixture_eigenvalue(first_excited(12, 6), m.p)
    assert abs(lam - dimer_lambda_I1(12, 6, 0.7, 1.2)) <= 1e-12
    meta = m.meta
    assert meta["t_mix_stated_k"] == pytest.approx(math.log(12) / meta["gamma_stated_k"],
                                                   rel=1e-10)
    assert {"r_1", "theta0_1", "gamma_stated_1"} <= set(meta)
    tiny = dimer_weights(12, 6, 1e-8, 1.0)
    assert tiny[0] > 1 - 1e-6


def test_dimer_first_order_gap():
    ratios = []
    for n in (20, 40, 80):
        m = build_dimer(n, n // 2, 1.0, 1.0)
        g = 1 - abs(dimer_lambda_I1(n, n // 2, 1.0, 1.0))
        ratios.append(g / m.meta["gamma_first_order"])
    assert abs(ratios[-1] - 1) < abs(ratios[0] - 1) and abs(ratios[-1] - 1) < 0.03
    with pytest.raises(ModelError):
        dimer_weights(12, 6, 0.0, 1.0)


def test_model_spec_and_run_config():
    assert ModelSpec("asep", 10, 5, {"alpha": 1.0, "beta": 0.5}).build().p.support == [-1, 0, 1]
    assert ModelSpec("constant", 10, 5, {"p": "-1:0.5,1:0.5"}).build().p.mean_abs == 1
    with pytest.raises(ModelError):
        ModelSpec("bogus", 10, 5).build()
    rc = RunConfig()
    assert rc.s_grid[0] == -4 and rc.s_grid[-1] == 4 and len(rc.s_grid) == 17
    assert rc.eps_grid == (0.5, 0.25, 0.1, 0.05)
    with pytest.raises(ValueError):
        RunConfig(cap=0)
