import math

import numpy as np
import pytest

from squeezecat import analytics as an
from squeezecat.errors import DomainError, NoConvergence
from squeezecat.optimize import (
    Bracket,
    Scheme,
    SweepSpec,
    amplification_comparison,
    default_alpha_grid,
    maximize_1d,
    maximize_nd,
    numeric_gradient,
    success_beta_zero,
    sweep,
    tolerance_curves,
)

SQRT6 = math.sqrt(6.0)


def test_bracket_validation():
    with pytest.raises(ValueError):
        Bracket(1.0, 0.0)
    with pytest.raises(ValueError):
        Bracket(0.0, 1.0, 0.0)


def test_maximize_1d_flat_top():
    x, fx = maximize_1d(lambda x: 1 - (x - 0.3712) ** 4 - (x - 0.3712) ** 2, Bracket(0, 1))
    assert x == pytest.approx(0.3712, abs=1e-9)
    assert fx == pytest.approx(1.0, abs=1e-15)


def test_maximize_1d_picks_global_basin():
    f = lambda x: np.exp(-((x - 0.2) ** 2) / 0.001) + 2 * np.exp(-((x - 0.8) ** 2) / 0.001)
    x, _ = maximize_1d(f, Bracket(0, 1))
    assert x == pytest.approx(0.8, abs=1e-8)


def test_maximize_1d_skips_undefined_points():
    x, _ = maximize_1d(lambda x: math.log(x) - x, Bracket(-1.0, 3.0))
    assert x == pytest.approx(1.0, abs=1e-8)


def test_maximize_1d_fails_when_undefined_everywhere():
    with pytest.raises(NoConvergence):
        maximize_1d(lambda x: math.log(-1 - x), Bracket(0.0, 1.0))


def test_maximize_nd_quadratic():
    target = np.array([0.3, -1.2, 2.0])
    x, fx = maximize_nd(lambda v: -np.sum((v - target) ** 2 * [1, 10, 0.1]), [0, 0, 0], [1, 1, 1])
    assert np.allclose(x, target, atol=1e-6)
    assert fx == pytest.approx(0.0, abs=1e-12)


def test_maximize_nd_rosenbrock_within_budget():
    f = lambda v: -((1 - v[0]) ** 2 + 100 * (v[1] - v[0] ** 2) ** 2)
    x, _ = maximize_nd(f, [-1.0, 1.5], [0.5, 0.5])
    assert np.allclose(x, [1.0, 1.0], atol=1e-5)


def test_maximize_nd_dimension_limit():
    with pytest.raises(ValueError):
        maximize_nd(lambda v: 0.0, np.zeros(5), np.ones(5))


def test_numeric_gradient():
    g = numeric_gradient(lambda v: v[0] ** 2 + 3 * v[1], [2.0, 1.0])
    assert np.allclose(g, [4.0, 3.0], atol=1e-8)


def test_default_grid():
    grid = default_alpha_grid()
    assert len(grid) == 97
    assert grid[0] == 0.2 and grid[-1] == 5.0
    assert 1.9 in grid


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec([], Scheme.ONE_PHOTON)


def test_sweep_rows_match_closed_forms():
    grid = [0.5, 1.9, SQRT6]
    rep = sweep(SweepSpec(grid, Scheme.THREE_PHOTON))
    assert not rep.failures
    for row in rep.rows:
        assert row.fidelity == pytest.approx(an.f3(row.alpha, an.r3_opt(row.alpha), an.beta_opt_sq(row.alpha)))
    assert np.allclose(rep.column("alpha"), grid)


def test_sweep_records_failures(monkeypatch):
    real = an.r1_opt

    def flaky(alpha):
        if alpha > 1.5:
            raise DomainError("induced")
        return real(alpha)

    monkeypatch.setattr(an, "r1_opt", flaky)
    rep = sweep(SweepSpec([1.0, 2.0], Scheme.ONE_PHOTON))
    assert len(rep.failures) == 1
    assert "DomainError" in rep.failures[0].error
    assert math.isnan(rep.column("r")[1])


def test_sweep_parallel_matches_serial():
    spec = SweepSpec([0.8, 2.0, 3.1], Scheme.THREE_PHOTON_BETA_ZERO)
    a = sweep(spec)
    b = sweep(spec, max_workers=2)
    assert np.array_equal(a.column("fidelity"), b.column("fidelity"))


def test_f1_monotone_beyond_peak():
    rep = sweep(SweepSpec(default_alpha_grid(), Scheme.ONE_PHOTON))
    f = rep.column("fidelity")
    assert np.all(np.diff(f) < 0)


def test_success_beta_zero_at_sqrt6():
    params, fid, P, calls = success_beta_zero(SQRT6)
    assert 1.3e-2 <= P <= 1.9e-2
    assert params["x"] == pytest.approx(an.f3_beta_zero_opt(SQRT6)[0], rel=1e-10)
    assert params["r"] < 1
    assert fid == pytest.approx(0.8974, abs=1e-4)
    assert calls > 0


def test_tolerance_curves():
    curves = tolerance_curves((1.0, 3.0), n_points=401)
    for c in curves:
        i = int(np.argmax(c.f_vs_beta))
        assert c.f_max == pytest.approx(an.f3(c.alpha, an.r3_opt(c.alpha), an.beta_opt_sq(c.alpha)), abs=1e-8)
        assert c.r_opt == pytest.approx(an.r3_opt(c.alpha), abs=1e-8)
        assert c.f_vs_beta[i] <= c.f_max + 1e-12
        assert an.f3(c.alpha, c.r_opt, c.beta_zero**2) == pytest.approx(0.0, abs=1e-20)
    # the beta curve for alpha = 1 passes through the node inside its range
    c1 = curves[0]
    assert c1.beta_grid[-1] > c1.beta_zero
    j = int(np.argmin(c1.f_vs_beta))
    assert abs(c1.beta_grid[j] - c1.beta_zero) <= c1.beta_grid[1]
    assert c1.f_vs_beta[j] < 1e-2 * c1.f_max


def test_amplification_comparison():
    out = amplification_comparison(math.sqrt(1.5))
    assert out["probability"] == pytest.approx(0.13, abs=0.01)
    assert out["T1"] == pytest.approx(out["T1_closed_form"], rel=1e-7)
    assert out["probability_fourfold"] == pytest.approx(out["probability"] ** 4)
