"""Independent brute-force oracles used by the tests.

Everything here builds dense matrices column by column (or sums naive loops)
so that no code path is shared with the spectral implementations it checks.
"""

import numpy as np

from ibflow.grid import GridSpec, ScalarField, VectorField


def dense_operator(spec: GridSpec, op) -> np.ndarray:
    """Dense matrix of a ScalarField -> ScalarField operator, basis by basis."""
    n = spec.n1 * spec.n2
    M = np.zeros((n, n))
    for col in range(n):
        e = np.zeros(n)
        e[col] = 1.0
        M[:, col] = op(ScalarField(spec, e.reshape(spec.shape))).values.ravel()
    return M


def dense_grad0(spec: GridSpec) -> np.ndarray:
    """Dense (2N x N) matrix of the centred gradient, built from raw stencils."""
    n1, n2, h = spec.n1, spec.n2, spec.h
    n = n1 * n2
    G = np.zeros((2 * n, n))
    for i in range(n1):
        for j in range(n2):
            row = i * n2 + j
            G[row, ((i + 1) % n1) * n2 + j] += 1.0 / (2 * h)
            G[row, ((i - 1) % n1) * n2 + j] -= 1.0 / (2 * h)
            G[n + row, i * n2 + (j + 1) % n2] += 1.0 / (2 * h)
            G[n + row, i * n2 + (j - 1) % n2] -= 1.0 / (2 * h)
    return G


def dense_laplacian5(spec: GridSpec) -> np.ndarray:
    n1, n2, h = spec.n1, spec.n2, spec.h
    n = n1 * n2
    L = np.zeros((n, n))
    for i in range(n1):
        for j in range(n2):
            row = i * n2 + j
            L[row, row] -= 4.0 / h**2
            L[row, ((i + 1) % n1) * n2 + j] += 1.0 / h**2
            L[row, ((i - 1) % n1) * n2 + j] += 1.0 / h**2
            L[row, i * n2 + (j + 1) % n2] += 1.0 / h**2
            L[row, i * n2 + (j - 1) % n2] += 1.0 / h**2
    return L


def vec_to_field(spec: GridSpec, x: np.ndarray) -> VectorField:
    n = spec.n1 * spec.n2
    return VectorField.from_arrays(
        spec, x[:n].reshape(spec.shape).copy(), x[n:].reshape(spec.shape).copy()
    )


def field_to_vec(v: VectorField) -> np.ndarray:
    return np.concatenate([v.c1.values.ravel(), v.c2.values.ravel()])


def dense_stokes_solve(w: VectorField, dt: float, mu: float, rho: float):
    """Least-squares solve of the coupled momentum/incompressibility system.

    Unknowns are (u1, u2, p) stacked; the momentum block is I - dt*(mu/rho)*L
    plus the (dt/rho) gradient of p, the constraint block is the centred
    divergence (the transpose of minus the gradient).
    """
    spec = w.spec
    n = spec.n1 * spec.n2
    G = dense_grad0(spec)
    L = dense_laplacian5(spec)
    A = np.eye(2 * n) - dt * (mu / rho) * np.kron(np.eye(2), L)
    M = np.zeros((3 * n, 3 * n))
    M[: 2 * n, : 2 * n] = A
    M[: 2 * n, 2 * n :] = (dt / rho) * G
    M[2 * n :, : 2 * n] = -G.T  # centred divergence
    rhs = np.concatenate([field_to_vec(w), np.zeros(n)])
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    u = sol[: 2 * n]
    gradp = (rho / dt) * (rhs[: 2 * n] - A @ u)
    return vec_to_field(spec, u), vec_to_field(spec, gradp)


def dense_helmholtz(v: VectorField):
    """Pseudoinverse splitting v = w + G psi with psi orthogonal to ker(G)."""
    spec = v.spec
    G = dense_grad0(spec)
    psi = np.linalg.pinv(G) @ field_to_vec(v)
    gpsi = G @ psi
    return vec_to_field(spec, field_to_vec(v) - gpsi), vec_to_field(spec, gpsi)


def naive_advection(u: VectorField) -> VectorField:
    """Triple-loop (u . D0) u, written directly from the stencil."""
    spec = u.spec
    n1, n2, h = spec.n1, spec.n2, spec.h
    comps = [u.c1.values, u.c2.values]
    out = [np.zeros(spec.shape), np.zeros(spec.shape)]
    for a in range(2):
        for i in range(n1):
            for j in range(n2):
                total = 0.0
                for b in range(2):
                    if b == 0:
                        dern = (comps[a][(i + 1) % n1, j] - comps[a][(i - 1) % n1, j]) / (2 * h)
                    else:
                        dern = (comps[a][i, (j + 1) % n2] - comps[a][i, (j - 1) % n2]) / (2 * h)
                    total += comps[b][i, j] * dern
                out[a][i, j] = total
    return VectorField.from_arrays(spec, out[0], out[1])


def direct_dft2(values: np.ndarray) -> np.ndarray:
    """O(n^4) DFT sum with the mean-preserving normalization."""
    n1, n2 = values.shape
    out = np.zeros((n1, n2), dtype=complex)
    for k1 in range(n1):
        for k2 in range(n2):
            acc = 0.0 + 0.0j
            for i in range(n1):
                for j in range(n2):
                    acc += values[i, j] * np.exp(-2j * np.pi * (k1 * i / n1 + k2 * j / n2))
            out[k1, k2] = acc / (n1 * n2)
    return out
