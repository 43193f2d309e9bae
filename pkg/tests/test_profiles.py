import math

import numpy as np
import pytest

import helmray as hr


def test_unit_gaussian_at_origin():
    prof = hr.CenteredGaussianSum(a=1.0, q=1.0)
    assert hr.eval_profile(prof, 0.0) == 1.0


def test_slit_sum_at_origin_matches_term_sum():
    # independent term-by-term evaluation of the four-Gaussian slit
    q, xc = 1.68, 0.31
    prof = hr.CenteredGaussianSum(a=0.0, b=1.0, q=q, m=2, x_c=xc)
    expected = 2.0 * (math.exp(-q * q * xc * xc) + math.exp(-q * q * (2 * xc) ** 2))
    assert hr.eval_profile(prof, 0.0) == pytest.approx(expected, rel=1e-15)


def test_comb_profile_even():
    prof = hr.MirroredGaussianComb(q=3.5, m=3, x_c=1.15, x_1=0.3)
    x = np.linspace(0.0, 4.0, 997)
    r_plus = hr.eval_profile(prof, x)
    r_minus = hr.eval_profile(prof, -x)
    np.testing.assert_allclose(r_plus, r_minus, rtol=0, atol=1e-12 * hr.eval_profile(prof, 0.0))


def test_centered_sum_even():
    prof = hr.CenteredGaussianSum(a=0.3, b=1.2, q=1.68, m=2, x_c=0.31)
    x = np.linspace(0.0, 5.0, 1201)
    np.testing.assert_allclose(hr.eval_profile(prof, x), hr.eval_profile(prof, -x),
                               rtol=0, atol=1e-12 * hr.eval_profile(prof, 0.0))


def test_single_gaussian_reduction():
    # b = 0 must reduce to a exp(-q^2 x^2) pointwise
    a, q = 0.7, 1.3
    prof = hr.CenteredGaussianSum(a=a, b=0.0, q=q, m=3, x_c=0.5)
    x = np.linspace(-4, 4, 301)
    np.testing.assert_allclose(hr.eval_profile(prof, x), a * np.exp(-q * q * x * x),
                               rtol=1e-15, atol=0)


def test_sampled_profile_interpolates_and_guards_range():
    xs = np.linspace(-2, 2, 41)
    prof = hr.SampledProfile(x=tuple(xs), r=tuple(np.exp(-xs ** 2)))
    assert hr.eval_profile(prof, 0.05) == pytest.approx(np.exp(-0.05 ** 2), rel=1e-3)
    with pytest.raises(ValueError):
        hr.eval_profile(prof, 3.0)


def test_profile_validation():
    assert hr.profile_violations(hr.CenteredGaussianSum(a=1.0, q=0.0))
    assert hr.profile_violations(hr.CenteredGaussianSum(a=0.0, b=0.0, q=1.0))
    assert hr.profile_violations(hr.MirroredGaussianComb(q=1.0, m=-1, x_c=1.0, x_1=0.1))
    assert hr.profile_violations(hr.SampledProfile(x=(0, 1), r=(1, 1)))
    assert not hr.profile_violations(hr.CenteredGaussianSum(a=1.0, q=1.0))


# --- launch front ------------------------------------------------------------

def cfg_for(profile, n_rays=5, window=6.0, **over):
    base = dict(epsilon=1.65e-4, n_rays=n_rays, x_min=-window, x_max=window,
                z_end=100.0, profile=profile)
    base.update(over)
    return hr.ScenarioConfig(**base)


def test_launch_amplitudes_gaussian_five_rays():
    cfg = cfg_for(hr.CenteredGaussianSum(a=1.0, q=1.0), n_rays=5, amp_floor=0.0)
    front = hr.build_launch_front(cfg)
    np.testing.assert_allclose(front.x, [-6, -3, 0, 3, 6], atol=1e-15)
    np.testing.assert_allclose(front.amp, np.exp(-np.array([36., 9., 0., 9., 36.])))


def test_launch_momenta_forward():
    cfg = cfg_for(hr.MirroredGaussianComb(q=3.5, m=3, x_c=1.15, x_1=0.3),
                  n_rays=101, window=3.4)
    front = hr.build_launch_front(cfg)
    assert not front.p_x.any()
    assert (front.p_z == 1.0).all()
    assert front.t == 0.0


def test_launch_front_symmetric():
    cfg = cfg_for(hr.CenteredGaussianSum(a=0.0, b=1.0, q=1.68, m=2, x_c=0.31),
                  n_rays=200, window=3.3)
    front = hr.build_launch_front(cfg)
    np.testing.assert_array_equal(front.x, -front.x[::-1])
    np.testing.assert_array_equal(front.amp, front.amp[::-1])


def test_launch_amplitudes_match_eval_exactly():
    prof = hr.CenteredGaussianSum(a=1.0, q=1.0)
    cfg = cfg_for(prof, n_rays=401, window=4.0)
    front = hr.build_launch_front(cfg)
    np.testing.assert_array_equal(front.amp, hr.eval_profile(prof, front.x))


def test_amp_floor_clamps_not_drops():
    cfg = cfg_for(hr.CenteredGaussianSum(a=1.0, q=1.0), n_rays=101, window=8.0,
                  amp_floor=1e-12)
    front = hr.build_launch_front(cfg)
    assert front.n_rays == 101
    assert front.amp.min() == pytest.approx(1e-12)


def test_all_zero_profile_rejected():
    xs = np.linspace(-1, 1, 8)
    prof = hr.SampledProfile(x=tuple(xs), r=tuple(np.zeros(8)))
    with pytest.raises(hr.ValidationError):
        hr.build_launch_front(cfg_for(prof, n_rays=9, window=1.0))
