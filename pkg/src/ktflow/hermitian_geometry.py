"""Splitting data, Lee form and Bismut curvature of invariant metric states.

A metric state stores the four coefficient fields of the J-invariant 2-form

    omega = u e1^e2 + lam e3^e4 + p (e1^e3 + e2^e4) + q (e1^e4 - e2^e3) ,

positive exactly when u > 0, lam > 0 and u*lam - p^2 - q^2 > 0.  From it we
derive the vertical/transverse splitting

    omega = lam mu1^mu2 + omega_check ,

the connection 1-forms mu_i (dual pair of the vertical generators), the
curvature multipliers sigma_i with d(mu_i) = sigma_i omega_check, the Lee
form theta, and the Bismut curvature package computed by moving-frame
calculus in an orthonormal J-adapted frame.

Sign conventions, fixed once and verified by the test oracles:

  * g(X, Y) = -omega(JX, Y);
  * torsion 3-form H(X, Y, Z) = d(omega)(JX, JY, JZ), the unique sign for
    which the connection below is Hermitian (parallel g and J);
  * Bismut connection nabla^B = nabla^LC + (1/2) g^{-1} H;
  * Ricci form rho(X, Y) = (1/2) sum_a g(R^B(X, Y) J F_a, F_a) over an
    orthonormal frame, and scalar s = (1/2) sum_a rho(F_a, J F_a), so that
    rho = s * omega_check on states with constant lam, sigma_1, sigma_2.

With these choices the standard state (u = lam = 1, p = q = 0) has
rho = -e1^e2 and s = -1; it is a constant-curvature state but not a
Bismut-Ricci-flat one, and the flow in flow_engine expands its base.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTransverseError,
    GridError,
    LinearSolveError,
    PositivityError,
)
from .invariant_forms import (
    InvariantForm,
    J_FRAME,
    MULTI_INDEX,
    V1,
    V2,
    apply_J,
    base_integral,
    coframe,
    contract,
    exterior_d,
    p11_projection,
    wedge,
)

DEGENERACY_TOL = 1e-12

# Increasing pairs indexing 2-form components, shared with invariant_forms.
_PAIRS = MULTI_INDEX[2]


@dataclass(frozen=True, eq=False)
class MetricState:
    """Coefficient fields (u, lam, p, q) of an invariant Hermitian 2-form."""

    grid: object
    u: np.ndarray
    lam: np.ndarray
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        for name in ("u", "lam", "p", "q"):
            values = np.broadcast_to(np.asarray(getattr(self, name), dtype=float),
                                     (self.grid.n, self.grid.n))
            values = self.grid.check_field(values, f"metric coefficient {name}")
            object.__setattr__(self, name, values.copy())

    @staticmethod
    def constant(grid, u, lam, p=0.0, q=0.0):
        return MetricState(grid, grid.constant(u), grid.constant(lam),
                           grid.constant(p), grid.constant(q))

    def omega(self):
        out = InvariantForm(self.grid, 2)
        out.coeffs[0] = self.u          # e1^e2
        out.coeffs[1] = self.p          # e1^e3
        out.coeffs[2] = self.q          # e1^e4
        out.coeffs[3] = -self.q         # e2^e3
        out.coeffs[4] = self.p          # e2^e4
        out.coeffs[5] = self.lam        # e3^e4
        return out

    def determinant_margin(self):
        return self.u * self.lam - self.p * self.p - self.q * self.q

    def positivity_margin(self):
        """Smallest of min(u), min(lam), min(u lam - p^2 - q^2)."""
        return float(min(self.u.min(), self.lam.min(), self.determinant_margin().min()))

    def require_positive(self):
        for name, values in (("u", self.u), ("lam", self.lam),
                             ("u*lam - p^2 - q^2", self.determinant_margin())):
            worst = values.min()
            if not worst > 0.0:
                bad = np.unravel_index(np.argmin(values), values.shape)
                raise PositivityError(
                    f"positivity violated: {name} = {worst:.6e} at grid point {bad}"
                )

    def max_difference(self, other):
        return float(max(np.max(np.abs(self.u - other.u)),
                         np.max(np.abs(self.lam - other.lam)),
                         np.max(np.abs(self.p - other.p)),
                         np.max(np.abs(self.q - other.q))))

    def copy(self):
        return MetricState(self.grid, self.u, self.lam, self.p, self.q)

    def metric_tensor(self):
        """g_ij = -omega(J E_i, E_j) as an (n, n, 4, 4) array."""
        n = self.grid.n
        coeffs = self.omega().coeffs
        om = np.zeros((n, n, 4, 4))
        for pos, (i, j) in enumerate(_PAIRS):
            om[..., i, j] = coeffs[pos]
            om[..., j, i] = -coeffs[pos]
        return -np.einsum("ki,...kj->...ij", J_FRAME, om)

    def metric_inverse(self):
        g = self.metric_tensor()
        try:
            return np.linalg.inv(g)
        except np.linalg.LinAlgError as exc:  # positivity should prevent this
            raise LinearSolveError(f"metric tensor not invertible: {exc}") from exc


@dataclass(frozen=True, eq=False)
class MetricSplit:
    """Derived splitting data of a metric state."""

    grid: object
    lam: np.ndarray
    mu1: InvariantForm
    mu2: InvariantForm
    omega_check: InvariantForm
    sigma1: np.ndarray
    sigma2: np.ndarray
    theta: InvariantForm
    w_check: np.ndarray


def _top_coefficient(four_form):
    return four_form.coeffs[0]


def metric_split(m):
    """Vertical/transverse splitting of a positive metric state.

    mu1 = -(1/lam) V2 . omega and mu2 = +(1/lam) V1 . omega satisfy
    mu_i(V_j) = delta_ij; omega_check = omega - lam mu1^mu2 is basic; the
    multipliers sigma_i are extracted as top-form coefficient ratios
    d(mu_i)^mu1^mu2 / omega_check^mu1^mu2, which is exact because the
    transverse slot is one complex dimension.
    """
    m.require_positive()
    omega = m.omega()
    inv_lam = 1.0 / m.lam
    mu1 = contract(V2, omega) * (-inv_lam)
    mu2 = contract(V1, omega) * inv_lam
    mu_pair = wedge(mu1, mu2)
    omega_check = omega - mu_pair * m.lam
    w_check = omega_check.coefficient(0, 1).copy()

    denom = _top_coefficient(wedge(omega_check, mu_pair))
    worst = float(np.min(np.abs(denom)))
    if worst < DEGENERACY_TOL:
        raise DegenerateTransverseError(
            f"transverse area coefficient {worst:.3e} below {DEGENERACY_TOL:.0e}"
        )
    sigma1 = _top_coefficient(wedge(exterior_d(mu1), mu_pair)) / denom
    sigma2 = _top_coefficient(wedge(exterior_d(mu2), mu_pair)) / denom
    theta = lee_form(m)
    return MetricSplit(m.grid, m.lam.copy(), mu1, mu2, omega_check,
                       sigma1, sigma2, theta, w_check)


def lee_from_form(omega):
    """Unique 1-form theta with theta ^ omega = d(omega), omega nondegenerate.

    Wedging against omega is an isomorphism from 1-forms to 3-forms in four
    dimensions, so theta comes from a pointwise 4x4 solve.
    """
    if omega.degree != 2:
        raise GridError("Lee solve needs a 2-form")
    grid = omega.grid
    n = grid.n
    mat = np.zeros((n, n, 4, 4))
    for i in range(4):
        mat[..., :, i] = np.transpose(wedge(coframe(grid, i), omega).coeffs, (1, 2, 0))
    rhs = np.transpose(exterior_d(omega).coeffs, (1, 2, 0))
    try:
        theta = np.linalg.solve(mat, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        cond = float(np.max(np.linalg.cond(mat.reshape(-1, 4, 4))))
        raise LinearSolveError(
            f"pointwise Lee system singular (max condition number {cond:.3e})"
        ) from exc
    return InvariantForm(grid, 1, np.transpose(theta, (2, 0, 1)))


def lee_form(m):
    """Lee form of a metric state: solves theta ^ omega = d(omega) pointwise."""
    m.require_positive()
    return lee_from_form(m.omega())


def bismut_torsion(m):
    """Torsion 3-form H(X, Y, Z) = d(omega)(JX, JY, JZ).

    Implemented as -apply_J(d omega): the degree-3 transport of apply_J
    carries an extra minus sign, see invariant_forms.apply_J.
    """
    return -1.0 * apply_J(exterior_d(m.omega()))


@dataclass(frozen=True, eq=False)
class CurvaturePackage:
    """Frame data and curvature outputs of one metric state."""

    H: InvariantForm
    rho: InvariantForm
    rho11: InvariantForm
    s: np.ndarray
    frame: np.ndarray            # rows F_a over the coordinate frame, (4, 4, n, n)
    gamma_lc: np.ndarray         # Levi-Civita coefficients Gamma_{abc}, (4, 4, 4, n, n)
    gamma_b: np.ndarray          # Bismut coefficients, same layout


def orthonormal_frame(m, split=None):
    """J-adapted orthonormal frame rows over the coordinate frame (E1..E4).

    F1 = V1/sqrt(lam), F2 = V2/sqrt(lam); F3, F4 are the normalized
    horizontal lifts of the base directions, which for this model are
    already orthogonal to each other (the transverse metric is conformal
    to the flat one), so no extra orthogonalization step is needed.
    """
    if split is None:
        split = metric_split(m)
    n = m.grid.n
    a = split.mu1.coeffs[0]          # e1-component of mu1  (= q/lam)
    b = split.mu1.coeffs[1]          # e2-component of mu1  (= p/lam)
    inv_sqrt_lam = 1.0 / np.sqrt(m.lam)
    inv_sqrt_w = 1.0 / np.sqrt(split.w_check)
    frame = np.zeros((4, 4, n, n))
    frame[0, 2] = inv_sqrt_lam
    frame[1, 3] = inv_sqrt_lam
    frame[2, 0] = inv_sqrt_w
    frame[2, 2] = -a * inv_sqrt_w
    frame[2, 3] = b * inv_sqrt_w
    frame[3, 1] = inv_sqrt_w
    frame[3, 2] = -b * inv_sqrt_w
    frame[3, 3] = -a * inv_sqrt_w
    return frame, split


def _antisymmetric_filling(form):
    """Full antisymmetric component array of a degree-3 form, (4,4,4,n,n)."""
    n = form.grid.n
    out = np.zeros((4, 4, 4, n, n))
    for pos, idx in enumerate(MULTI_INDEX[3]):
        values = form.coeffs[pos]
        for perm in itertools.permutations(range(3)):
            sign = 1.0
            perm_list = list(perm)
            for i in range(3):
                for j in range(i + 1, 3):
                    if perm_list[i] > perm_list[j]:
                        sign = -sign
            target = tuple(idx[k] for k in perm)
            out[target] = sign * values
    return out


def bismut_ricci(m, split=None):
    """Bismut curvature package by first-principles moving-frame calculus.

    Pipeline: orthonormal J-adapted frame -> bracket structure functions
    (vertical part from the nilmanifold bracket, base part by spectral
    derivatives of the frame rows) -> Koszul formula for Levi-Civita ->
    torsion shift -> frame curvature -> Ricci trace against J -> scalar.
    """
    frame, split = orthonormal_frame(m, split)
    grid = m.grid
    g = m.metric_tensor()               # (n, n, 4, 4)
    g_back = np.moveaxis(g, (2, 3), (0, 1))   # (4, 4, n, n)

    dx_frame = grid.derivative(frame, "x")
    dy_frame = grid.derivative(frame, "y")
    # D_a f = (F_a)^x dx f + (F_a)^y dy f: directional derivative along F_a
    def directional(dx_arr, dy_arr):
        return (np.einsum("axy,...xy->a...xy", frame[:, 0], dx_arr)
                + np.einsum("axy,...xy->a...xy", frame[:, 1], dy_arr))

    # brackets [F_a, F_b] over the coordinate frame: nilpotent part plus
    # derivative part (only the base components of F act as derivations)
    w = np.zeros((4, 4, 4, grid.n, grid.n))
    w[..., 2, :, :] += (np.einsum("axy,bxy->abxy", frame[:, 0], frame[:, 1])
                        - np.einsum("axy,bxy->abxy", frame[:, 1], frame[:, 0]))
    d_frame = directional(dx_frame, dy_frame)        # (a, b, j, x, y)
    w += d_frame - np.swapaxes(d_frame, 0, 1)

    # lowered structure functions c_{abc} = g([F_a, F_b], F_c)
    c_low = np.einsum("abjxy,jkxy,ckxy->abcxy", w, g_back, frame, optimize=True)

    # Koszul in an orthonormal frame: Gamma_{abc} = (c_abc - c_bca + c_cab)/2
    gamma_lc = 0.5 * (c_low
                      - np.transpose(c_low, (2, 0, 1, 3, 4))
                      + np.transpose(c_low, (1, 2, 0, 3, 4)))

    H = bismut_torsion(m)
    h_full = _antisymmetric_filling(H)
    h_frame = np.einsum("aixy,bjxy,ckxy,ijkxy->abcxy", frame, frame, frame, h_full,
                        optimize=True)
    gamma_b = gamma_lc + 0.5 * h_frame

    dx_gamma = grid.derivative(gamma_b, "x")
    dy_gamma = grid.derivative(gamma_b, "y")
    d_gamma = directional(dx_gamma, dy_gamma)        # (a, b, c, d, x, y)

    riemann = (d_gamma - np.swapaxes(d_gamma, 0, 1)
               + np.einsum("bcexy,adexy->abcdxy", gamma_b, gamma_b, optimize=True)
               - np.einsum("acexy,bdexy->abcdxy", gamma_b, gamma_b, optimize=True)
               - np.einsum("abexy,ecdxy->abcdxy", c_low, gamma_b, optimize=True))

    # J in the orthonormal frame; J-adaptation makes this the constant block
    # map, but we compute it from the frame to keep the trace convention-free
    frame_inv = np.moveaxis(np.linalg.inv(np.moveaxis(frame, (0, 1), (2, 3))),
                            (2, 3), (0, 1))          # (i, b, x, y): E_i = sum_b inv[i,b] F_b
    j_frame = np.einsum("aixy,ki,kbxy->baxy", frame, J_FRAME, frame_inv, optimize=True)

    rho_frame = 0.5 * np.einsum("abdcxy,dcxy->abxy", riemann, j_frame, optimize=True)
    s = 0.5 * np.einsum("abxy,baxy->xy", rho_frame, j_frame, optimize=True)

    rho_coords = np.einsum("iaxy,jbxy,abxy->ijxy", frame_inv, frame_inv, rho_frame,
                           optimize=True)
    rho = InvariantForm(grid, 2)
    for pos, (i, j) in enumerate(_PAIRS):
        rho.coeffs[pos] = rho_coords[i, j]
    rho11 = p11_projection(rho)
    return CurvaturePackage(H=H, rho=rho, rho11=rho11, s=s,
                            frame=frame, gamma_lc=gamma_lc, gamma_b=gamma_b)


def characteristic_numbers(split):
    """Base integrals of the curvature 2-forms d(mu1), d(mu2)."""
    return (base_integral(exterior_d(split.mu1)),
            base_integral(exterior_d(split.mu2)))


def norm_squared_1form(m, alpha):
    """Pointwise squared norm of a 1-form in the metric of the state."""
    g_inv = m.metric_inverse()
    comps = np.moveaxis(alpha.coeffs, 0, -1)
    return np.einsum("...i,...ij,...j->...", comps, g_inv, comps)


def inner_1forms(m, alpha, beta):
    g_inv = m.metric_inverse()
    return np.einsum("...i,...ij,...j->...",
                     np.moveaxis(alpha.coeffs, 0, -1), g_inv,
                     np.moveaxis(beta.coeffs, 0, -1))
