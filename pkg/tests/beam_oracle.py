"""Brute-force finite-difference oracle for the mass-loaded tether beam.

Discretizes the clamped Euler-Bernoulli beam with an end mass M that also
feels an optical restoring force M*omega_opt^2, as a symmetric generalized
eigenproblem built from the energy functionals:

    U = (E b^4 / 24) Int phi''(x)^2 dx  +  (1/2) M omega_opt^2 phi(L)^2
    T = (rho b^2 / 2) Int phi(x)^2 dx   +  (1/2) M phi(L)^2

Clamping phi(0) = phi'(0) = 0 enters through a ghost reflection
(phi_{-1} = phi_1), so the curvature at the wall is 2*phi_1/h^2. The free
end's moment condition is natural to the energy form. Used only by tests.

Keep n_nodes moderate (<= 1600): the dense eigensolver's absolute error
grows with the largest stiffness eigenvalue (~1/h^4), and with a heavy end
mass the low-frequency mode sits many orders below it, so refining the grid
eventually drowns that eigenvalue in backward error instead of converging.
"""
import numpy as np
from scipy.linalg import eigh


def beam_spectrum_fd(membrane_mass, length, width, material, omega_opt, n_nodes=800, k_modes=12):
    """Lowest angular eigenfrequencies [rad/s] of the mass-loaded tether."""
    E = material.youngs_modulus
    rho = material.density
    b = width
    h = length / n_nodes
    n = n_nodes  # DOFs phi_1 .. phi_N, with x_N = L

    # second-difference operator: row i evaluates phi'' at node i (0 .. N-1);
    # DOF j holds phi at node j+1, and phi_0 = 0 drops out of the stencils
    d2 = np.zeros((n, n))
    d2[0, 0] = 2.0 / h**2  # ghost: phi''(0) = 2 phi_1 / h^2
    d2[1, 0] = -2.0 / h**2
    d2[1, 1] = 1.0 / h**2
    for i in range(2, n):
        d2[i, i - 2] = 1.0 / h**2
        d2[i, i - 1] = -2.0 / h**2
        d2[i, i] = 1.0 / h**2
    # trapezoid weights over nodes 0 .. N-1 (curvature at the free end is
    # naturally zero and is omitted)
    w_curv = np.full(n, h)
    w_curv[0] = 0.5 * h

    flex = E * b**4 / 12.0
    K = flex * d2.T @ (w_curv[:, None] * d2)
    K[-1, -1] += membrane_mass * omega_opt**2

    w_mass = np.full(n, h)
    w_mass[-1] = 0.5 * h
    Mmat = np.diag(rho * b**2 * w_mass)
    Mmat[-1, -1] += membrane_mass

    vals = eigh(K, Mmat, eigvals_only=True, subset_by_index=(0, k_modes - 1))
    vals = np.clip(vals, 0.0, None)
    return np.sqrt(vals)
