"""Light-cone reduction tests: unitary/diffusive evolution, currents,
weak-field residuals, and the exact coordinate/dispersion checks.

Oracles: closed-form free-packet evolution, heat kernels, and plane-wave
dispersion; the spectral evolver itself is validated against those, and the
Crank-Nicolson companion against the spectral one.
"""

import math

import numpy as np
import pytest

from kg5d.errors import ConfigurationError
from kg5d.numerics import fit_convergence_order
from kg5d.reduction import (
    CurrentField,
    GridField,
    current_and_continuity,
    evolve_fokker_planck,
    evolve_schrodinger,
    field_variance,
    gaussian_packet,
    lightcone_jacobian,
    lightcone_transform,
    null_dispersion_check,
    propagator_composition_check,
    schrodinger_evolver,
    verify_reduction,
    weakfield_dropped_term_ratio,
    weakfield_schrodinger_residual,
)
from kg5d.spectrum import ScaleSet

LHAT, C = 0.7, 1.3


# ---------------------------------------------------------------------------
# GridField plumbing
# ---------------------------------------------------------------------------

def test_gridfield_validation():
    with pytest.raises(ConfigurationError):
        GridField(values=np.zeros(8), step=(0.0,))
    with pytest.raises(ConfigurationError):
        GridField(values=np.zeros(8), step=(0.1, 0.1))
    with pytest.raises(ConfigurationError):
        GridField(values=np.array([1.0, np.inf]), step=(0.1,))
    with pytest.raises(ConfigurationError):
        GridField(values=np.zeros(8), step=(0.1,), boundary="open")


def test_gridfield_norm_and_coords():
    f = gaussian_packet(256, 40.0, 1.0)
    assert f.l2_norm() == pytest.approx(1.0, rel=1e-12)  # normalized packet
    assert f.coords(0)[0] == -20.0
    assert f.cell_volume == pytest.approx(40.0 / 256)


# ---------------------------------------------------------------------------
# Schroedinger evolution
# ---------------------------------------------------------------------------

def test_plane_wave_phase_spectral():
    n, box = 128, 20.0
    k = 2.0 * math.pi / box * 9
    x = -0.5 * box + box / n * np.arange(n)
    psi0 = GridField(values=np.exp(1j * k * x), step=(box / n,), origin=(-0.5 * box,))
    tau = 0.83
    traj = evolve_schrodinger(psi0, tau, LHAT, 7, c=C)
    omega = C * LHAT * k * k / 2.0
    expected = psi0.values * np.exp(-1j * omega * tau)
    assert np.max(np.abs(traj.snapshots[-1].values - expected)) < 1e-12


def test_constant_field_stationary():
    psi0 = GridField(values=np.full(64, 0.7 + 0.1j), step=(0.25,))
    traj = evolve_schrodinger(psi0, 2.0, LHAT, 10, c=C)
    assert np.max(np.abs(traj.snapshots[-1].values - psi0.values)) < 1e-13


def test_gaussian_packet_spread_closed_form():
    # |psi|^2 variance: sigma0^2 + (c lhat tau)^2 / (4 sigma0^2)
    sigma0, box, n = 1.0, 60.0, 1024
    psi0 = gaussian_packet(n, box, sigma0)
    tau = 2.5
    traj = evolve_schrodinger(psi0, tau, LHAT, 25, c=C)
    got = field_variance(traj.snapshots[-1])
    want = sigma0**2 + (C * LHAT * tau) ** 2 / (4.0 * sigma0**2)
    assert got == pytest.approx(want, abs=1e-6)


def test_norm_conserved_both_schemes():
    psi0 = gaussian_packet(128, 30.0, 1.2, k0=1.0)
    for method in ("spectral", "cn"):
        traj = evolve_schrodinger(psi0, 1.5, LHAT, 40, c=C, method=method)
        norms = [s.l2_norm() for s in traj.snapshots]
        assert max(abs(v - norms[0]) for v in norms) < 1e-10


def test_cn_converges_at_second_order_in_time():
    # reference: the same spatial operator driven with a very fine step, so
    # only the time error is measured
    psi0 = gaussian_packet(128, 30.0, 1.0)
    tau = 0.8
    ref = evolve_schrodinger(psi0, tau, LHAT, 2560, c=C, method="cn").snapshots[-1].values
    errs, dts = [], []
    for steps in (40, 80, 160):
        got = evolve_schrodinger(psi0, tau, LHAT, steps, c=C, method="cn").snapshots[-1].values
        errs.append(float(np.max(np.abs(got - ref))))
        dts.append(tau / steps)
    assert fit_convergence_order(dts, errs) >= 1.9


def test_evolve_configuration_errors():
    psi0 = gaussian_packet(64, 20.0, 1.0)
    with pytest.raises(ConfigurationError):
        evolve_schrodinger(psi0, 1.0, LHAT, 0)
    with pytest.raises(ConfigurationError):
        evolve_schrodinger(psi0, -1.0, LHAT, 4)
    bad = GridField(values=psi0.values, step=psi0.step, boundary="absorbing")
    with pytest.raises(ConfigurationError):
        evolve_schrodinger(bad, 1.0, LHAT, 4)
    two_d = GridField(values=np.zeros((16, 16)) + 0.1, step=(0.1, 0.1))
    with pytest.raises(ConfigurationError):
        evolve_schrodinger(two_d, 1.0, LHAT, 4, method="cn")


# ---------------------------------------------------------------------------
# Currents and continuity
# ---------------------------------------------------------------------------

def test_current_real_field_has_no_flux():
    x = np.linspace(-10.0, 10.0, 128, endpoint=False)
    psi0 = GridField(values=np.exp(-x * x) + 0.0j, step=(x[1] - x[0],), origin=(x[0],))
    traj = evolve_schrodinger(psi0, 1e-9, LHAT, 2, c=C)
    currents, _ = current_and_continuity(traj, LHAT, c=C)
    assert isinstance(currents[0], CurrentField)
    assert np.max(np.abs(currents[0].j_k[0])) < 1e-12


def test_current_plane_wave_values():
    n, box, amp = 64, 16.0, 1.7
    k = 2.0 * math.pi / box * 3
    x = box / n * np.arange(n)
    psi0 = GridField(values=amp * np.exp(1j * k * x), step=(box / n,))
    traj = evolve_schrodinger(psi0, 0.1, LHAT, 2, c=C)
    currents, resid = current_and_continuity(traj, LHAT, c=C)
    np.testing.assert_allclose(currents[0].j_tau, amp * amp, rtol=1e-12)
    np.testing.assert_allclose(currents[0].j_k[0], C * LHAT * k * amp * amp, rtol=1e-11)
    assert resid < 1e-10  # uniform currents: continuity is exact


def test_continuity_residual_converges_in_time():
    psi0 = gaussian_packet(256, 40.0, 1.0, k0=0.8)
    resids, dts = [], []
    for steps in (8, 16, 32):
        traj = evolve_schrodinger(psi0, 1.0, LHAT, steps, c=C)
        _, r = current_and_continuity(traj, LHAT, c=C)
        resids.append(r)
        dts.append(1.0 / steps)
    assert fit_convergence_order(dts, resids) >= 1.9


# ---------------------------------------------------------------------------
# Fokker-Planck evolution
# ---------------------------------------------------------------------------

def test_fp_mass_conservation_and_positivity():
    rho0 = gaussian_packet(512, 40.0, 1.0)
    rho0 = rho0.with_values(np.abs(rho0.values) ** 2)
    traj = evolve_fokker_planck(rho0, 2.0, 1.0, 20, c=C)
    mass0 = float(np.sum(traj.snapshots[0].values))
    for snap in traj.snapshots[1:]:
        assert abs(float(np.sum(snap.values)) - mass0) * traj.snapshots[0].cell_volume < 1e-10
        assert snap.values.min() > -1e-12


def test_fp_variance_growth():
    rho0 = gaussian_packet(512, 40.0, 1.0)
    rho0 = rho0.with_values(np.abs(rho0.values) ** 2)
    u, lam = 1.7, 0.9
    traj = evolve_fokker_planck(rho0, u, lam, 16, c=C)
    got = field_variance(traj.snapshots[-1], density=True)
    want = field_variance(rho0, density=True) + C * lam * u
    assert got == pytest.approx(want, abs=1e-6)


def test_fp_point_source_matches_heat_kernel():
    n, box = 512, 40.0
    h = box / n
    vals = np.zeros(n)
    vals[n // 2] = 1.0 / h  # discrete delta
    rho0 = GridField(values=vals, step=(h,), origin=(-box / 2,))
    u, lam = 1.2, 1.0
    traj = evolve_fokker_planck(rho0, u, lam, 8, c=C)
    x = rho0.coords(0)
    d = C * lam / 2.0
    kernel = np.exp(-x * x / (4.0 * d * u)) / math.sqrt(4.0 * math.pi * d * u)
    # spectral evolution of the band-limited delta: agreement away from the
    # Nyquist ringing floor
    assert np.max(np.abs(traj.snapshots[-1].values - kernel)) < 1e-6


def test_fp_rejects_bad_input():
    with pytest.raises(ConfigurationError):
        evolve_fokker_planck(gaussian_packet(64, 20.0, 1.0, k0=1.0), 1.0, 1.0, 4)
    neg = GridField(values=np.linspace(-1.0, 1.0, 64), step=(0.1,))
    with pytest.raises(ConfigurationError):
        evolve_fokker_planck(neg, 1.0, 1.0, 4)


# ---------------------------------------------------------------------------
# Weak-field Schroedinger residual
# ---------------------------------------------------------------------------

def test_weakfield_plane_wave_on_shell():
    s = ScaleSet.build(Z=0, alpha=0.0, R_over_Lambda=10.0)
    n, box = 32, 2.0 * math.pi * 4
    h = box / n
    k = 2.0 * math.pi / box * 3
    axes = [h * np.arange(n) for _ in range(3)]
    x = np.meshgrid(*axes, indexing="ij", sparse=True)
    psi = GridField(values=np.exp(1j * k * x[0]), step=(h,) * 3)
    energy = s.hbar**2 * k * k / (2.0 * s.m)
    resid = weakfield_schrodinger_residual(psi, np.zeros(psi.values.shape), s,
                                           energy, engine="spectral")
    assert resid < 1e-12


def test_weakfield_hydrogen_ground_state():
    # psi = e^{-r/a} with a the Bohr-like radius and the 1s eigenvalue:
    # interior residual is pure discretization error, falling ~h^2
    s = ScaleSet.build(Z=1, alpha=0.05, M_over_m=1.0, R_over_Lambda=10.0)
    a0 = s.lambda_c / (s.Z * s.alpha)
    energy = -0.5 * s.mc2 * (s.Z * s.alpha) ** 2
    resids, hs = [], []
    for n in (48, 96):
        box = 16.0 * a0
        h = box / n
        ax = -box / 2.0 + h * (np.arange(n) + 0.5)  # cell-centered, avoids r = 0
        x = np.meshgrid(ax, ax, ax, indexing="ij", sparse=True)
        r = np.sqrt(x[0] ** 2 + x[1] ** 2 + x[2] ** 2)
        psi = GridField(values=np.exp(-r / a0) + 0j, step=(h,) * 3,
                        origin=(float(ax[0]),) * 3, boundary="absorbing")
        a0_field = -s.Z * s.e_charge / r
        # fixed physical excision radius (3 coarse cells) so refinement
        # measures the smooth-region discretization error
        resids.append(weakfield_schrodinger_residual(psi, a0_field, s, energy,
                                                     excise_steps=3 * (n // 48)))
        hs.append(h)
    scale = abs(energy)  # residual in energy units times |psi| <= 1
    assert resids[1] < 0.05 * scale
    assert resids[1] < resids[0] / 2.0


def test_weakfield_dropped_term_ratio():
    s = ScaleSet.build(Z=1, alpha=0.01, M_over_m=1.0, R_over_Lambda=10.0)
    a0 = np.array([0.5, 1.0, 2.0])
    got = weakfield_dropped_term_ratio(a0, s)
    assert got == pytest.approx(abs(s.q * s.m) * 2.0 / (2.0 * s.m * s.c**2), rel=1e-12)


# ---------------------------------------------------------------------------
# Exact checks
# ---------------------------------------------------------------------------

def test_null_dispersion_values():
    assert null_dispersion_check([2.0, 0.0, 0.0, 0.0, 2.0]) == 0.0
    k, mu = 1.3, 0.7
    assert null_dispersion_check([math.hypot(k, mu), k, 0.0, 0.0, mu]) == pytest.approx(
        0.0, abs=1e-15)
    rng = np.random.default_rng(4)
    for _ in range(20):
        p = rng.standard_normal(5)
        want = -p[0] ** 2 + p[1] ** 2 + p[2] ** 2 + p[3] ** 2 + p[4] ** 2
        assert null_dispersion_check(p) == pytest.approx(want, rel=1e-14)


def test_lightcone_roundtrip_and_jacobian():
    rng = np.random.default_rng(8)
    for _ in range(20):
        x = rng.standard_normal(5)
        back = lightcone_transform(lightcone_transform(x), "inverse")
        assert np.max(np.abs(back - x)) < 1e-14
    jac = lightcone_jacobian()
    assert abs(np.linalg.det(jac)) == pytest.approx(1.0, abs=1e-15)
    # gradient of y^0 is 5D-null
    g = jac[0]
    eta = np.diag([-1.0, 1.0, 1.0, 1.0, 1.0])
    assert g @ eta @ g == 0.0


def test_lightcone_forward_values():
    y = lightcone_transform(np.array([1.0, 2.0, 3.0, 4.0, 5.0]))
    np.testing.assert_allclose(y, [4.0, 2.0, 3.0, 4.0, 3.0])


def test_semigroup_spectral_exact():
    psi0 = gaussian_packet(128, 30.0, 1.0, k0=0.5)
    run = schrodinger_evolver(LHAT, c=C)
    assert propagator_composition_check(run, 0.7, 1.1, psi0) < 1e-12
    assert propagator_composition_check(run, 0.0, 0.9, psi0) < 1e-15


def test_semigroup_cn_defect_shrinks_with_step():
    psi0 = gaussian_packet(128, 30.0, 1.0)
    defects = []
    for steps in (8, 16, 32):
        run = schrodinger_evolver(LHAT, c=C, steps=steps, method="cn")
        defects.append(propagator_composition_check(run, 0.6, 0.6, psi0))
    assert defects[0] > defects[1] > defects[2]


def test_verify_reduction_passes():
    report = verify_reduction()
    assert report["passed"]
    assert report["norm_drift_per_step"] <= 1e-8
    assert report["dispersion_error"] <= 1e-10
    assert report["semigroup_defect"] <= 1e-12
    assert report["fp_variance_error"] <= 1e-6
