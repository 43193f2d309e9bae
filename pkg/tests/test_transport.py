import numpy as np
import pytest

import helmray as hr
from helmray.model import BeamFront
from helmray.transport import StencilOperator, tube_widths


def front_from(x, amp, z=None, pz=None, t=0.0):
    x = np.asarray(x, dtype=float)
    n = len(x)
    return BeamFront(
        t=t, x=x,
        z=np.zeros(n) if z is None else np.asarray(z, float),
        p_x=np.zeros(n),
        p_z=np.ones(n) if pz is None else np.asarray(pz, float),
        amp=np.asarray(amp, dtype=float),
    )


def cfg(n_rays=2000, stencil=5, **over):
    base = dict(epsilon=1.65e-4, n_rays=n_rays, x_min=-5.0, x_max=5.0,
                z_end=100.0, stencil=stencil,
                profile=hr.CenteredGaussianSum(a=1.0, q=1.0))
    base.update(over)
    return hr.ScenarioConfig(**base)


# --- geometry ----------------------------------------------------------------

def test_uniform_launch_distances():
    front = hr.build_launch_front(cfg(n_rays=11, x_min=-1, x_max=1))
    geom = hr.adjacent_distances(front)
    np.testing.assert_allclose(geom.d, 0.2, rtol=1e-12)


def test_pythagorean_distance():
    front = front_from([0.0, 3.0], [1.0, 1.0], z=[0.0, 4.0])
    geom = hr.adjacent_distances(front)
    assert geom.d[0] == 5.0


def test_arc_abscissae_telescoping():
    rng = np.random.RandomState(7)
    x = np.sort(rng.uniform(-3, 3, 40))
    front = front_from(x, np.ones(40), z=rng.uniform(0, 1e-3, 40))
    geom = hr.adjacent_distances(front)
    assert geom.s[0] == 0.0
    assert geom.s[-1] == pytest.approx(geom.d.sum(), rel=1e-15)
    assert np.all(np.diff(geom.s) > 0)


def test_caustic_detection_reports_pair_and_time():
    front = front_from([0.0, 1e-12, 1.0], np.ones(3), t=3.5)
    with pytest.raises(hr.CausticError) as exc:
        hr.adjacent_distances(front, min_separation=1e-9)
    assert exc.value.index == 0
    assert exc.value.t == 3.5


def test_order_violation_is_caustic():
    front = front_from([0.0, 1.0, 0.5], np.ones(3))
    front = BeamFront(t=0.0, x=np.array([0.0, 1.0, 0.5]), z=np.zeros(3),
                      p_x=np.zeros(3), p_z=np.ones(3), amp=np.ones(3))
    with pytest.raises(hr.CausticError):
        hr.adjacent_distances(front)


# --- amplitude transport -------------------------------------------------------

def test_transport_identity():
    w = np.array([1.0, 2.0, 3.0])
    amp = np.array([0.5, 1.0, 2.0])
    np.testing.assert_array_equal(hr.transport_amplitudes(amp, w, w), amp)


def test_transport_doubling_shrinks_by_sqrt2():
    amp = np.array([1.0, 1.0])
    out = hr.transport_amplitudes(amp, np.ones(2), 2.0 * np.ones(2))
    np.testing.assert_allclose(out, 1.0 / np.sqrt(2.0), rtol=1e-15)


def test_transport_preserves_flux_exactly():
    rng = np.random.RandomState(3)
    amp = rng.uniform(0.1, 2.0, 50)
    w0 = rng.uniform(0.5, 1.5, 50)
    w1 = rng.uniform(0.5, 1.5, 50)
    out = hr.transport_amplitudes(amp, w0, w1)
    np.testing.assert_allclose(out ** 2 * w1, amp ** 2 * w0, rtol=1e-15)


def test_tube_widths_centered():
    d = np.array([1.0, 3.0, 5.0])
    np.testing.assert_array_equal(tube_widths(d), [1.0, 2.0, 4.0, 5.0])


# --- wave potential -----------------------------------------------------------

def test_constant_amplitude_gives_zero():
    front = front_from(np.linspace(-1, 1, 21), np.full(21, 2.5))
    g = hr.estimate_g(front, cfg(n_rays=21))
    np.testing.assert_allclose(g, 0.0, atol=1e-10)


def test_gaussian_peak_curvature():
    # R = exp(-q^2 x^2) has R''/R = -2 q^2 at the peak; q = 1 gives -2.
    # Cross-check with a fine central finite difference.
    q = 1.0
    x = np.linspace(-5, 5, 2001)
    x = 0.5 * (x - x[::-1])
    amp = np.exp(-q * q * x * x)
    front = front_from(x, amp)
    g = hr.estimate_g(front, cfg(n_rays=2001))
    j0 = len(x) // 2
    assert g[j0] == pytest.approx(-2.0 * q * q, rel=1e-6)
    h = 1e-4
    fd = (np.exp(-q * q * h * h) - 2 + np.exp(-q * q * h * h)) / h ** 2
    assert g[j0] == pytest.approx(fd, rel=1e-5)


def test_polynomial_reproduced_exactly():
    # quadratic amplitude: R = 1 + x^2 -> g = 2 / (1 + x^2), exact for
    # any stencil >= 3 because the Lagrange fit reproduces polynomials
    x = np.sort(np.random.RandomState(0).uniform(-1, 1, 30))
    amp = 1.0 + x * x
    front = front_from(x, amp)
    for stencil in (3, 5):
        g = hr.estimate_g(front, cfg(n_rays=30, stencil=stencil))
        np.testing.assert_allclose(g, 2.0 / (1.0 + x * x), rtol=1e-10)


def test_pz_correction_factor():
    x = np.linspace(-1, 1, 31)
    amp = 1.0 + x * x
    pz = np.full(31, 0.8)
    front = front_from(x, amp, pz=pz)
    g_with = hr.estimate_g(front, cfg(n_rays=31))
    g_without = hr.estimate_g(front, cfg(n_rays=31, pz_correction=False))
    np.testing.assert_allclose(g_with * 0.64, g_without, rtol=1e-12)


def test_gradient_constant_and_linear():
    x = np.sort(np.random.RandomState(1).uniform(-2, 2, 25))
    front = front_from(x, np.ones(25))
    c = cfg(n_rays=25)
    np.testing.assert_allclose(hr.estimate_dg_dx(front, np.full(25, 4.2), c),
                               0.0, atol=1e-11)
    np.testing.assert_allclose(hr.estimate_dg_dx(front, x.copy(), c),
                               1.0, rtol=1e-10)


def test_gradient_vanishes_at_symmetric_peak():
    front = hr.build_launch_front(cfg(n_rays=201))
    c = cfg(n_rays=201)
    g = hr.estimate_g(front, c)
    dg = hr.estimate_dg_dx(front, g, c)
    assert abs(dg[100]) < 1e-9


def test_symmetry_of_g_and_gradient():
    # tolerance 1e-10 relative to the field scale (values reach ~1e2 in
    # the window tails, where roundoff of the 1/h^2-weighted sums lives)
    c = cfg(n_rays=401)
    front = hr.attach_coupling(hr.build_launch_front(c), c)
    g_scale = max(1.0, np.abs(front.g).max())
    dg_scale = max(1.0, np.abs(front.dg_dx).max())
    np.testing.assert_allclose(front.g, front.g[::-1], rtol=0, atol=1e-10 * g_scale)
    np.testing.assert_allclose(front.dg_dx, -front.dg_dx[::-1], rtol=0,
                               atol=1e-10 * dg_scale)


def test_stencil_convergence_order():
    # 5-point second derivative converges at fourth order for exp(-x^2)
    q = 1.0
    errs = []
    for n in (201, 401, 801):
        x = np.linspace(-2, 2, n)
        amp = np.exp(-q * q * x * x)
        front = front_from(x, amp)
        g = hr.estimate_g(front, cfg(n_rays=n))
        exact = (4 * q ** 4 * x ** 2 - 2 * q * q)
        interior = slice(10, -10)
        errs.append(np.abs(g[interior] - exact[interior]).max())
    r1 = errs[0] / errs[1]
    r2 = errs[1] / errs[2]
    assert 10 < r1 < 25      # ~2^4
    assert 10 < r2 < 25


def test_degenerate_stencil_abscissae_raise():
    op = StencilOperator(10, 5, min_separation=1e-9)
    x = np.linspace(0, 1, 10)
    x[4] = x[3] + 1e-12
    with pytest.raises(hr.CausticError):
        op.derivative_weights(x)
