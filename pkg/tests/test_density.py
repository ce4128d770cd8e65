import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from harmonic.density import (DensityError, builtin_models, load_model_config,
                              make_custom, make_damek_ricci, make_euclidean,
                              make_real_hyperbolic, mean_curvature_limit,
                              model_from_config, parse_model_config,
                              unit_sphere_volume, validate_density)


def test_builtin_models_roster():
    models = builtin_models()
    assert [m.key for m in models] == [
        "euclidean(0)", "euclidean(2)", "real_hyperbolic(2)",
        "damek_ricci(2,1)", "damek_ricci(1,1)"]
    assert [m.H for m in models] == [0.0, 0.0, 2.0, 2.0, 1.5]
    assert [m.dim for m in models] == [1, 3, 3, 4, 3]


def test_theta_closed_forms():
    r = np.linspace(0.1, 8.0, 40)
    assert np.allclose(make_euclidean(2).theta(r), r**2, rtol=1e-14)
    assert np.allclose(make_real_hyperbolic(2).theta(r), np.sinh(r) ** 2,
                       rtol=1e-13)
    dr = make_damek_ricci(2, 1)
    expect = 8 * np.sinh(r / 2) ** 3 * np.cosh(r / 2)
    assert np.allclose(dr.theta(r), expect, rtol=1e-13)


def test_unit_sphere_volume_values():
    assert unit_sphere_volume(0) == pytest.approx(2.0, rel=1e-15)
    assert unit_sphere_volume(1) == pytest.approx(2 * math.pi, rel=1e-15)
    assert unit_sphere_volume(2) == pytest.approx(4 * math.pi, rel=1e-15)
    assert unit_sphere_volume(3) == pytest.approx(2 * math.pi**2, rel=1e-15)


def test_small_r_expansion_coefficients():
    # theta/r^n = 1 + c2 r^2 + c4 r^4 + O(r^6); probe with a tiny radius
    for model in builtin_models():
        r = 1e-2
        ratio = model.theta(r) / r**model.n
        expect = 1 + model.c2 * r**2 + model.c4 * r**4
        assert ratio == pytest.approx(expect, abs=5e-13)
    assert make_real_hyperbolic(2).c2 == pytest.approx(1 / 3, rel=1e-12)
    assert make_euclidean(5).c2 == 0.0


def test_mean_curvature_limit_converges():
    assert mean_curvature_limit(make_real_hyperbolic(2), 40.0) == \
        pytest.approx(2.0, abs=1e-8)
    assert mean_curvature_limit(make_damek_ricci(1, 1), 40.0) == \
        pytest.approx(1.5, abs=1e-8)
    # flat models decay like n/r instead
    assert mean_curvature_limit(make_euclidean(2), 40.0) == \
        pytest.approx(2 / 40, rel=1e-12)


def test_log_theta_stable_at_huge_radius():
    model = make_damek_ricci(2, 1)
    r = np.array([300.0, 600.0])
    lt = model.log_theta(r)
    assert np.all(np.isfinite(lt))
    # slope of log theta approaches H
    assert model.dlog_theta(600.0) == pytest.approx(2.0, abs=1e-12)
    # consistency with direct theta where it does not overflow
    assert model.log_theta(5.0) == pytest.approx(math.log(model.theta(5.0)),
                                                 rel=1e-13)


def test_make_custom_matches_builtin():
    custom = make_custom("sinh(r)**2", 2)
    ref = make_real_hyperbolic(2)
    r = np.linspace(0.05, 6, 23)
    assert np.allclose(custom.theta(r), ref.theta(r), rtol=1e-12)
    assert custom.H == pytest.approx(2.0, abs=1e-6)
    assert custom.c2 == pytest.approx(1 / 3, rel=1e-9)


def test_make_custom_rejects_bad_densities():
    with pytest.raises(DensityError):
        make_custom("r**3", 2)          # theta/r^2 -> 0, not 1
    with pytest.raises(DensityError):
        make_custom("r**2 * (1 - r**2/4)", 2)   # negative past r = 2
    with pytest.raises(DensityError):
        make_custom("r**2 * exp(-r)", 2)        # theta'/theta -> -1 < 0


def test_validate_density_passes_builtins():
    for model in builtin_models():
        validate_density(model)


def test_validate_density_reports_overflow():
    # sinh^2(2000) is far outside double range; the check must fail loudly
    # instead of comparing infs.
    model = make_real_hyperbolic(2)
    with np.errstate(over="ignore"), pytest.raises(DensityError,
                                                   match="finite and positive"):
        validate_density(model, r_max=2000.0)


def test_model_config_round_trip(tmp_path):
    cfg = "model = damek-ricci\nm = 2\nk = 1\n"
    assert parse_model_config(cfg) == {"model": "damek-ricci",
                                       "m": "2", "k": "1"}
    model = model_from_config(cfg)
    assert model.key == "damek_ricci(2,1)"
    p = tmp_path / "m.cfg"
    p.write_text("model = hyperbolic\nn = 2\n")
    assert load_model_config(p).key == "real_hyperbolic(2)"


def test_model_config_rejects_unknown():
    with pytest.raises(ValueError):
        model_from_config("model = torus\n")
    with pytest.raises(ValueError):
        parse_model_config("not an assignment\n")


@given(n=st.integers(min_value=0, max_value=6),
       r=st.floats(min_value=0.01, max_value=30.0))
def test_euclidean_density_is_power_law(n, r):
    model = make_euclidean(n)
    assert model.theta(r) == pytest.approx(r**n, rel=1e-12)
    assert model.H == 0.0


@given(m=st.integers(min_value=1, max_value=4),
       k=st.integers(min_value=1, max_value=4),
       r=st.floats(min_value=0.05, max_value=20.0))
def test_damek_ricci_family_invariants(m, k, r):
    model = make_damek_ricci(m, k)
    assert model.H == pytest.approx(m / 2 + k, abs=1e-9)
    assert model.n == m + k
    # density positive and log-derivative decreasing toward H
    assert model.theta(r) > 0
    assert model.dlog_theta(r) >= model.H - 1e-9
