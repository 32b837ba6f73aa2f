import numpy as np
import pytest

from ktflow.errors import (DegenerateTransverseError, NonFiniteFieldError,
                           PositivityError)
from ktflow.hermitian_geometry import (MetricState, bismut_ricci,
                                       bismut_torsion, characteristic_numbers,
                                       inner_1forms, lee_form, metric_split,
                                       norm_squared_1form, orthonormal_frame)
from ktflow.invariant_forms import (BaseGrid, apply_J, basis_form, coframe,
                                    exterior_d, random_band_limited, wedge)

from oracles import (homogeneous_scalar, koszul_fd_lowered,
                     left_invariant_curvature, metric_matrix)

RHO_COMPONENT_ORDER = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def random_state(grid, rng, rough=True, lam_const=False):
    u = 1.0 + 0.3 * random_band_limited(grid, rng)
    if lam_const:
        lam = np.full((grid.n, grid.n), 1.0 + 0.5 * rng.random())
    else:
        lam = 1.0 + 0.3 * random_band_limited(grid, rng)
    amp = 0.2 if rough else 0.0
    p = amp * random_band_limited(grid, rng)
    q = amp * random_band_limited(grid, rng)
    return MetricState(grid, u, lam, p, q)


def rho_matrix_at(pkg, ix, iy):
    out = np.zeros((4, 4))
    for pos, (i, j) in enumerate(RHO_COMPONENT_ORDER):
        out[i, j] = pkg.rho.coeffs[pos][ix, iy]
        out[j, i] = -out[i, j]
    return out


def test_state_positivity_enforcement(grid8):
    xx = grid8.xx
    m = MetricState(grid8, 1.0 + 0.0 * xx, np.full((8, 8), 2.0), 0.0 * xx, 0.0 * xx)
    m.require_positive()
    bad_u = MetricState(grid8, xx - 0.5, np.ones((8, 8)), 0.0 * xx, 0.0 * xx)
    with pytest.raises(PositivityError):
        bad_u.require_positive()
    # u, lam fine but the determinant fails where p is large
    bad_det = MetricState(grid8, np.ones((8, 8)), np.ones((8, 8)), 2.0 * xx, 0.0 * xx)
    with pytest.raises(PositivityError):
        bad_det.require_positive()
    assert bad_det.positivity_margin() < 0.0


def test_state_broadcast_and_nan_rejection(grid8):
    m = MetricState.constant(grid8, 2.0, 3.0, 0.5, -0.25)
    assert m.u.shape == (8, 8) and np.all(m.lam == 3.0)
    bad = np.ones((8, 8))
    bad[1, 1] = np.nan
    with pytest.raises(NonFiniteFieldError):
        MetricState(grid8, bad, np.ones((8, 8)), 0 * bad, 0 * bad)


def test_omega_coefficients(grid8):
    m = MetricState.constant(grid8, 2.0, 3.0, 0.5, -0.25)
    om = m.omega()
    assert np.all(om.coefficient(0, 1) == 2.0)
    assert np.all(om.coefficient(2, 3) == 3.0)
    assert np.all(om.coefficient(0, 2) == 0.5)
    assert np.all(om.coefficient(1, 3) == 0.5)
    assert np.all(om.coefficient(0, 3) == -0.25)
    assert np.all(om.coefficient(1, 2) == 0.25)
    assert (apply_J(om) - om).max_abs() == 0.0


def test_metric_tensor_matches_hand_matrix(grid8, rng):
    for _ in range(5):
        u0, lam0 = np.exp(0.4 * rng.normal(size=2))
        r = 0.7 * np.sqrt(u0 * lam0) * rng.random()
        ang = 2 * np.pi * rng.random()
        p0, q0 = r * np.cos(ang), r * np.sin(ang)
        m = MetricState.constant(grid8, u0, lam0, p0, q0)
        g = m.metric_tensor()
        assert np.max(np.abs(g[0, 0] - metric_matrix(u0, lam0, p0, q0))) < 1e-14
        gi = m.metric_inverse()
        prod = np.einsum("...ij,...jk->...ik", g, gi)
        assert np.max(np.abs(prod - np.eye(4))) < 1e-13


def test_split_of_standard_state(grid8):
    m = MetricState.constant(grid8, 1.0, 1.0)
    sp = metric_split(m)
    assert (sp.mu1 - coframe(grid8, 2)).max_abs() == 0.0
    assert (sp.mu2 - coframe(grid8, 3)).max_abs() == 0.0
    assert (sp.omega_check - basis_form(grid8, (0, 1))).max_abs() == 0.0
    assert np.all(sp.sigma1 == -1.0)
    assert np.all(sp.sigma2 == 0.0)
    assert np.all(sp.w_check == 1.0)


def test_split_shear_components(grid8):
    m = MetricState.constant(grid8, 2.0, 4.0, 0.6, -0.8)
    sp = metric_split(m)
    # mu1 = (q/lam) e1 + (p/lam) e2 + e3, mu2 its J image with e4
    assert np.all(sp.mu1.coefficient(0) == -0.2)
    assert np.all(sp.mu1.coefficient(1) == 0.15)
    assert np.all(sp.mu1.coefficient(2) == 1.0)
    assert np.all(sp.mu2.coefficient(0) == -0.15)
    assert np.all(sp.mu2.coefficient(1) == -0.2)
    assert np.all(sp.mu2.coefficient(3) == 1.0)
    assert (apply_J(sp.mu1) - sp.mu2).max_abs() < 1e-15
    assert np.all(np.abs(sp.w_check - (2.0 - 1.0 / 4.0)) < 1e-15)


def test_split_identities_random(grid32, rng):
    for _ in range(12):
        m = random_state(grid32, rng)
        sp = metric_split(m)
        assert exterior_d(sp.omega_check).max_abs() < 1e-12
        assert (exterior_d(sp.mu1) - sp.omega_check * sp.sigma1).max_abs() < 1e-12
        assert (exterior_d(sp.mu2) - sp.omega_check * sp.sigma2).max_abs() < 1e-12
        rebuilt = sp.omega_check + wedge(sp.mu1, sp.mu2) * sp.lam
        assert (m.omega() - rebuilt).max_abs() < 1e-13
        for mu in (sp.mu1, sp.mu2):
            dmu = exterior_d(mu)
            assert (apply_J(dmu) - dmu).max_abs() < 1e-12


def test_split_rejects_degenerate_transverse(grid8):
    ones = np.ones((8, 8))
    thin = MetricState(grid8, ones, ones, np.sqrt(1.0 - 1e-13) * ones, 0.0 * ones)
    with pytest.raises(DegenerateTransverseError):
        metric_split(thin)


def test_lee_form_defining_property(grid32, rng):
    # on a surface every 3-form is theta^omega for a unique 1-form
    for _ in range(8):
        m = random_state(grid32, rng)
        theta = lee_form(m)
        om = m.omega()
        assert (exterior_d(om) - wedge(theta, om)).max_abs() < 1e-11


def test_lee_form_standard_value(grid8):
    theta = lee_form(MetricState.constant(grid8, 1.0, 1.0))
    assert (theta + coframe(grid8, 3)).max_abs() < 1e-14


def test_lee_formula_on_pluriclosed_states(grid32, rng):
    for _ in range(8):
        m = random_state(grid32, rng, lam_const=True)
        sp = metric_split(m)
        formula = sp.mu2 * (sp.lam * sp.sigma1) + sp.mu1 * (-sp.lam * sp.sigma2)
        assert (sp.theta - formula).max_abs() < 1e-12


def test_torsion_standard_and_closure(grid32, rng):
    H = bismut_torsion(MetricState.constant(grid32, 1.0, 1.0))
    assert (H + basis_form(grid32, (0, 1, 2))).max_abs() == 0.0
    # pluriclosed (lambda constant) states have closed torsion
    for _ in range(6):
        m = random_state(grid32, rng, lam_const=True)
        assert exterior_d(bismut_torsion(m)).max_abs() < 1e-11
    # a nonconstant lambda breaks it
    m = random_state(grid32, rng, lam_const=False)
    assert exterior_d(bismut_torsion(m)).max_abs() > 1e-4


def test_orthonormal_frame_properties(grid32, rng):
    for _ in range(6):
        m = random_state(grid32, rng)
        frame, _ = orthonormal_frame(m)
        g = m.metric_tensor()
        gram = np.einsum("aixy,xyij,bjxy->abxy", frame, g, frame)
        assert np.max(np.abs(gram - np.eye(4)[:, :, None, None])) < 1e-12
        # J-adapted: J F0 = F1 and J F2 = F3
        from ktflow.invariant_forms import J_FRAME
        jf0 = np.einsum("ki,ixy->kxy", J_FRAME, frame[0])
        jf2 = np.einsum("ki,ixy->kxy", J_FRAME, frame[2])
        assert np.max(np.abs(jf0 - frame[1])) < 1e-12
        assert np.max(np.abs(jf2 - frame[3])) < 1e-12


def test_bismut_ricci_standard_values(grid16):
    pkg = bismut_ricci(MetricState.constant(grid16, 1.0, 1.0))
    # rho = -e1^e2 and s = -1: curvature concentrates on the base
    assert (pkg.rho + basis_form(grid16, (0, 1))).max_abs() < 1e-13
    assert np.max(np.abs(pkg.s + 1.0)) < 1e-13
    assert (pkg.rho11 - pkg.rho).max_abs() < 1e-13
    assert (pkg.H + basis_form(grid16, (0, 1, 2))).max_abs() < 1e-14


def test_bismut_ricci_against_left_invariant_oracle(grid16, rng):
    for _ in range(8):
        u0, lam0 = np.exp(0.4 * rng.normal(size=2))
        r = 0.7 * np.sqrt(u0 * lam0) * rng.random()
        ang = 2 * np.pi * rng.random()
        p0, q0 = r * np.cos(ang), r * np.sin(ang)
        m = MetricState.constant(grid16, u0, lam0, p0, q0)
        pkg = bismut_ricci(m)
        o = left_invariant_curvature(u0, lam0, p0, q0)
        assert np.max(np.abs(rho_matrix_at(pkg, 3, 5) - o["rho"])) < 1e-9
        assert np.max(np.abs(pkg.s - o["s"])) < 1e-9
        assert abs(o["s"] - homogeneous_scalar(u0, lam0, p0, q0)) < 1e-11


def test_bismut_scalar_closed_form(grid16, rng):
    for _ in range(6):
        u0, lam0 = np.exp(0.3 * rng.normal(size=2))
        m = MetricState.constant(grid16, u0, lam0, 0.2 * rng.random(), -0.2 * rng.random())
        pkg = bismut_ricci(m)
        w = u0 - (float(m.p[0, 0]) ** 2 + float(m.q[0, 0]) ** 2) / lam0
        assert np.max(np.abs(pkg.s + lam0 / w ** 2)) < 1e-11


def test_levi_civita_against_fd_oracle():
    grid = BaseGrid(64)
    c1 = np.cos(2 * np.pi * grid.xx) * np.sin(2 * np.pi * grid.yy)
    c2 = np.sin(2 * np.pi * (grid.xx + grid.yy))
    m = MetricState(grid, 1.0 + 0.25 * c1, 1.0 + 0.25 * c2, 0.1 * c2, 0.1 * c1)
    pkg = bismut_ricci(m)
    K_fd = koszul_fd_lowered(m)
    frame = pkg.frame
    arr = np.moveaxis(frame, (0, 1), (-2, -1))
    B = np.moveaxis(np.linalg.inv(arr), (-2, -1), (0, 1))
    dB = np.zeros((4,) + B.shape)
    dB[0] = grid.derivative(B, "x")
    dB[1] = grid.derivative(B, "y")
    FaB = np.einsum("amxy,mjbxy->ajbxy", frame, dB)
    K_grid = (np.einsum("iaxy,ajbxy,kbxy->ijkxy", B, FaB, B)
              + np.einsum("iaxy,jbxy,abcxy,kcxy->ijkxy", B, B, pkg.gamma_lc, B))
    assert np.max(np.abs(K_fd - K_grid)) < 1e-6


def _j_commutation_defect(pkg):
    jf = np.zeros((4, 4))
    jf[1, 0] = 1.0
    jf[0, 1] = -1.0
    jf[3, 2] = 1.0
    jf[2, 3] = -1.0
    gb = pkg.gamma_b
    left = np.einsum("kb,akcxy->abcxy", jf, gb)
    right = np.einsum("abkxy,ck->abcxy", gb, jf)
    return float(np.max(np.abs(left - right)))


def test_connection_j_commutation_and_closed_ricci_converge_spectrally():
    # both are exact identities of the continuum geometry; on rough rational
    # states the residual is set by the spectral tail and must collapse with n
    defects = []
    for n in (16, 32, 64):
        grid = BaseGrid(n)
        c1 = np.cos(2 * np.pi * grid.xx) * np.sin(2 * np.pi * grid.yy)
        c2 = np.sin(2 * np.pi * (grid.xx + grid.yy))
        m = MetricState(grid, 1.0 + 0.25 * c1, 1.0 + 0.25 * c2, 0.125 * c2,
                        0.125 * c1 * c2)
        pkg = bismut_ricci(m)
        defects.append((_j_commutation_defect(pkg),
                        exterior_d(pkg.rho).max_abs()))
    for i in (0, 1):
        assert defects[0][i] / defects[1][i] > 100.0
        assert defects[1][i] / defects[2][i] > 100.0
    assert defects[2][0] < 1e-9
    assert defects[2][1] < 1e-8


def test_ricci_closed_on_transverse_states(grid32):
    from ktflow.vaisman_toolkit import make_noncsc_vaisman, make_standard_vaisman
    for m in (make_standard_vaisman(grid32, 1.5),
              make_noncsc_vaisman(grid32, 0.1, (1, 1))):
        pkg = bismut_ricci(m)
        assert exterior_d(pkg.rho).max_abs() < 1e-12


def test_characteristic_numbers_universal(grid32, rng):
    # (-1, 0) for every state: the integrals see only the structure constant
    for _ in range(6):
        sp = metric_split(random_state(grid32, rng))
        c1, c2 = characteristic_numbers(sp)
        assert abs(c1 + 1.0) < 1e-12
        assert abs(c2) < 1e-12


def test_connection_form_norms(grid32, rng):
    for _ in range(6):
        m = random_state(grid32, rng)
        sp = metric_split(m)
        inv_lam = 1.0 / sp.lam
        assert np.max(np.abs(norm_squared_1form(m, sp.mu1) - inv_lam)) < 1e-12
        assert np.max(np.abs(norm_squared_1form(m, sp.mu2) - inv_lam)) < 1e-12
        assert np.max(np.abs(inner_1forms(m, sp.mu1, sp.mu2))) < 1e-12
