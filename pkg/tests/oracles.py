"""Independent reference computations used to pin expected values.

Two oracles, both deliberately built along different code paths than the
package:

* left_invariant_curvature: for spatially constant states the whole
  geometry reduces to linear algebra on the 4-dimensional symmetry algebra
  with bracket [E0, E1] = E2.  Orthonormalization goes through a Cholesky
  factor (the package uses an adapted frame instead), invariant-form
  exterior derivatives through the bracket formula (the package uses
  lookup tables plus spectral calculus).

* koszul_fd_lowered: the Koszul formula for the invariant frame evaluated
  with 6th-order centered finite differences of the hand-written metric
  matrix, valid for arbitrary states.  The package computes the same
  connection in an orthonormal frame from spectral derivatives.
"""

import numpy as np

# bracket [E_a, E_b] = C[a, b, c] E_c
STRUCTURE = np.zeros((4, 4, 4))
STRUCTURE[0, 1, 2] = 1.0
STRUCTURE[1, 0, 2] = -1.0

# J E_j = JMAT[i, j] E_i
JMAT = np.zeros((4, 4))
JMAT[1, 0] = 1.0
JMAT[0, 1] = -1.0
JMAT[3, 2] = 1.0
JMAT[2, 3] = -1.0


def metric_matrix(u, lam, p, q):
    """g(E_i, E_j) for the four-coefficient invariant metric."""
    return np.array([
        [u, 0.0, q, -p],
        [0.0, u, p, q],
        [q, p, lam, 0.0],
        [-p, q, 0.0, lam],
    ])


def homogeneous_scalar(u, lam, p, q):
    """Closed form of the Bismut scalar on constant states."""
    w = u - (p * p + q * q) / lam
    return -lam / (w * w)


def left_invariant_curvature(u, lam, p, q):
    """Bismut curvature data of a constant state by frame-algebra only.

    Returns a dict with the torsion 3-tensor H[i,j,k] = H(E_i,E_j,E_k),
    the Ricci form rho[i,j] = rho(E_i,E_j) and the scalar s.
    """
    G = metric_matrix(u, lam, p, q)
    L = np.linalg.cholesky(G)            # G = L L^T
    A = np.linalg.inv(L)                 # F_a = A[a,i] E_i is orthonormal
    # E_i = L[i,a] F_a

    # omega(E_i, E_j) = g(J E_i, E_j)
    omega = JMAT.T @ G
    # invariant 2-form: d omega(X,Y,Z) = -om([X,Y],Z) + om([X,Z],Y) - om([Y,Z],X)
    dom = (-np.einsum("abk,kc->abc", STRUCTURE, omega)
           + np.einsum("ack,kb->abc", STRUCTURE, omega)
           - np.einsum("bck,ka->abc", STRUCTURE, omega))
    # torsion H(X,Y,Z) = d omega(JX, JY, JZ)
    H = np.einsum("ia,jb,kc,ijk->abc", JMAT, JMAT, JMAT, dom)

    cF = np.einsum("ai,bj,ijk,kc->abc", A, A, STRUCTURE, L)
    HF = np.einsum("ai,bj,ck,ijk->abc", A, A, A, H)
    gamma = 0.5 * (cF - np.einsum("bca->abc", cF) + np.einsum("cab->abc", cF))
    gb = gamma + 0.5 * HF

    riem = (np.einsum("bce,ade->abcd", gb, gb)
            - np.einsum("ace,bde->abcd", gb, gb)
            - np.einsum("abe,ecd->abcd", cF, gb))

    # J in the orthonormal frame: J F_a = jF[b,a] F_b
    jF = np.einsum("ai,ki,kb->ba", A, JMAT, L)
    rho_F = 0.5 * np.einsum("abdc,dc->ab", riem, jF)
    s = 0.5 * np.einsum("ab,ba->", rho_F, jF)
    rho = np.einsum("ia,jb,ab->ij", L, L, rho_F)
    return {"H": H, "rho": rho, "s": float(s), "gamma_b_frame": gb}


# 6th-order centered first derivative, error O(h^6)
_STENCIL = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
_OFFSETS = (-3, -2, -1, 0, 1, 2, 3)


def fd_derivative(field, axis, h):
    out = np.zeros_like(field)
    for w, k in zip(_STENCIL, _OFFSETS):
        if w != 0.0:
            out += w * np.roll(field, -k, axis=axis)
    return out / h


def koszul_fd_lowered(m):
    """g(nabla_{E_a} E_b, E_c) for any state, by finite differences.

    2 g(nabla_a b, c) = D_a g_bc + D_b g_ac - D_c g_ab
                      + g([a,b],c) - g([a,c],b) - g([b,c],a)
    with D_a nonzero only for the two base directions.
    """
    n = m.grid.n
    h = 1.0 / n
    G = np.zeros((4, 4, n, n))
    G[0, 0] = m.u
    G[1, 1] = m.u
    G[2, 2] = m.lam
    G[3, 3] = m.lam
    G[0, 2] = G[2, 0] = m.q
    G[0, 3] = G[3, 0] = -m.p
    G[1, 2] = G[2, 1] = m.p
    G[1, 3] = G[3, 1] = m.q

    D = np.zeros((4, 4, 4, n, n))      # D[a] = derivative of G along E_a
    for i in range(4):
        for j in range(4):
            D[0, i, j] = fd_derivative(G[i, j], 0, h)
            D[1, i, j] = fd_derivative(G[i, j], 1, h)

    bracket = (np.einsum("abk,kcxy->abcxy", STRUCTURE, G)
               - np.einsum("ack,kbxy->abcxy", STRUCTURE, G)
               - np.einsum("bck,kaxy->abcxy", STRUCTURE, G))
    deriv = (D
             + np.einsum("bacxy->abcxy", D)
             - np.einsum("cabxy->abcxy", D))
    return 0.5 * (deriv + bracket)
