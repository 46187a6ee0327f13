"""The six-point C3 interaction kernel and particle/grid transfer operators.

The one-dimensional profile phi is not transcribed from a closed form; it is
reconstructed at every evaluation from its defining constraints: on each unit
shift class the six nonzero values satisfy five linear moment conditions
(even-offset sum 1/2, odd-offset sum 1/2, vanishing first and third moments,
second moment K = 59/60 - sqrt(29)/20) plus the quadratic condition that the
sum of squares is a shift-independent constant C.  The linear system leaves
one degree of freedom; the quadratic pins it up to a two-way root choice, and
we take the root that is continuous with phi(+-3) = 0 at the endpoints of the
shift interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, VectorField

#: Second moment of the profile, the unique value giving three continuous
#: derivatives.
K_MOMENT = 59.0 / 60.0 - math.sqrt(29.0) / 20.0

_OFFSETS = np.array([-3.0, -2.0, -1.0, 0.0, 1.0, 2.0])
_EVEN_ROW = np.array([0.0, 1.0, 0.0, 1.0, 0.0, 1.0])  # arguments s-2, s, s+2
_ODD_ROW = np.array([1.0, 0.0, 1.0, 0.0, 1.0, 0.0])  # arguments s-3, s-1, s+1


class KernelConstructionError(RuntimeError):
    """The quadratic constraint has no real root (wrong K or arithmetic bug)."""


def _constraint_system(s: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Linear constraints A @ weights = b at shift s; also returns arguments."""
    a = s + _OFFSETS
    A = np.vstack([_EVEN_ROW, _ODD_ROW, a, a**2, a**3])
    b = np.array([0.5, 0.5, 0.0, K_MOMENT, 0.0])
    return A, b, a


def _weights_at_zero() -> np.ndarray:
    # At s = 0 the support edge forces phi(-3) = 0, making the solution unique.
    A, b, _ = _constraint_system(0.0)
    A6 = np.vstack([A, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]])
    b6 = np.append(b, 0.0)
    return np.linalg.solve(A6, b6)


_W_ZERO = _weights_at_zero()

#: Sum of squares of the profile over any unit-spaced sampling (approx 0.326).
C_SUMSQ = float(_W_ZERO @ _W_ZERO)


def phi_weights(s: float) -> np.ndarray:
    """The six profile values (phi(s-3), phi(s-2), ..., phi(s+2)) for s in [0, 1).

    Solves the five linear constraints for the minimum-norm solution plus a
    nullspace direction, then picks the quadratic root continuous with the
    boundary solution at s = 0 (the nullspace vector is sign-normalized on its
    first entry, which stays bounded away from zero on [0, 1)).
    """
    if not 0.0 <= s < 1.0:
        raise ValueError(f"shift must lie in [0, 1), got {s}")
    if s == 0.0:
        return _W_ZERO.copy()
    A, b, _ = _constraint_system(s)
    wp, *_rest = np.linalg.lstsq(A, b, rcond=None)
    _, _, vt = np.linalg.svd(A)
    n = vt[-1]
    if n[0] < 0:
        n = -n
    qa = float(n @ n)
    qb = 2.0 * float(wp @ n)
    qc = float(wp @ wp) - C_SUMSQ
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0:
        raise KernelConstructionError(
            f"negative discriminant {disc:.3e} in the sum-of-squares constraint at s={s}"
        )
    t = (-qb + math.sqrt(disc)) / (2.0 * qa)
    return wp + t * n


def phi(x: float) -> float:
    """The 1D profile: zero outside (-3, 3), constraint-solved inside."""
    x = float(x)
    if abs(x) >= 3.0:
        return 0.0
    s = x - math.floor(x)
    w = phi_weights(s)
    return float(w[int(math.floor(x)) + 3])


def _phi_samples(offsets: np.ndarray) -> np.ndarray:
    """phi at an array of points sharing the same fractional part."""
    out = np.zeros_like(offsets)
    inside = np.abs(offsets) < 3.0
    for idx in np.nonzero(inside)[0]:
        out[idx] = phi(offsets[idx])
    return out


def delta_c(dx1: float, dx2: float, c: float) -> float:
    """Tensor-product regularized delta (1/c^2) phi(dx1/c) phi(dx2/c)."""
    if not c > 0:
        raise ValueError(f"kernel width must be positive, got {c}")
    return phi(dx1 / c) * phi(dx2 / c) / (c * c)


@dataclass(frozen=True)
class Kernel:
    """Interaction kernel of width c [m].

    When bound to a grid, c must be an integer multiple of the spacing h; this
    is what makes the discrete moment identities (unit mass, second moment
    2*K*c^2) hold exactly for every particle position.
    """

    c: float

    def __post_init__(self):
        if not (np.isfinite(self.c) and self.c > 0):
            raise ValueError(f"kernel width must be positive, got {self.c}")

    def ratio(self, spec: GridSpec) -> int:
        """c/h as an exact integer; raises if it is not one."""
        m = self.c / spec.h
        m_round = round(m)
        if m_round < 1 or abs(m - m_round) > 1e-9 * max(1.0, m):
            raise ValueError(
                f"kernel width c={self.c} is not an integer multiple of h={spec.h}"
            )
        return m_round

    def effective_radius(self) -> float:
        """Root-mean-square footprint radius, sqrt(2 K) * c."""
        return self.c * math.sqrt(2.0 * K_MOMENT)


@dataclass(frozen=True)
class ParticleState:
    """Immersed particle: position X, tether point X0, stiffness k [N/m^2]."""

    X: np.ndarray
    X0: np.ndarray
    k_spring: float

    def __post_init__(self):
        object.__setattr__(self, "X", np.asarray(self.X, dtype=float))
        object.__setattr__(self, "X0", np.asarray(self.X0, dtype=float))
        if self.X.shape != (2,) or self.X0.shape != (2,):
            raise ValueError("particle position and tether must be 2-vectors")
        if not np.all(np.isfinite(self.X)):
            raise ValueError("particle position must be finite")
        if self.k_spring < 0:
            raise ValueError(f"spring stiffness must be nonnegative, got {self.k_spring}")


def _axis_weights(spec_n: int, h: float, L: float, c: float, x_p: float):
    """Periodized kernel weights phi((x_i - x_p)/c) along one axis.

    Returns (indices, weights) over the grid nodes inside the support,
    summing over periodic images so the partition of unity survives even when
    the support 6c is wider than the domain (wide kernels on narrow channels
    are a supported configuration).
    """
    weights = np.zeros(spec_n)
    # images of the particle at x_p + q*L whose support touches [0, L)
    q_lo = math.floor((0.0 - (x_p + 3.0 * c)) / L)
    q_hi = math.ceil(((spec_n - 1) * h + 3.0 * c - x_p) / L)
    for q in range(q_lo, q_hi + 1):
        xq = x_p + q * L
        i_lo = math.ceil((xq - 3.0 * c) / h)
        i_hi = math.floor((xq + 3.0 * c) / h)
        if i_hi < 0 or i_lo > spec_n - 1:
            continue
        i_lo = max(i_lo, 0)
        i_hi = min(i_hi, spec_n - 1)
        idx = np.arange(i_lo, i_hi + 1)
        args = (idx * h - xq) / c
        weights[idx] += _phi_samples(args)
    idx = np.nonzero(weights)[0]
    return idx, weights[idx]


def spread(F: np.ndarray, X: np.ndarray, spec: GridSpec, kern: Kernel) -> VectorField:
    """Force density F * delta_c(x - X) on the grid [N/m^2]."""
    kern.ratio(spec)  # validates c/h integrality
    F = np.asarray(F, dtype=float)
    i1, w1 = _axis_weights(spec.n1, spec.h, spec.L1, kern.c, float(X[0]))
    i2, w2 = _axis_weights(spec.n2, spec.h, spec.L2, kern.c, float(X[1]))
    footprint = np.outer(w1, w2) / kern.c**2
    out = VectorField.zeros(spec)
    out.c1.values[np.ix_(i1, i2)] = F[0] * footprint
    out.c2.values[np.ix_(i1, i2)] = F[1] * footprint
    return out


def interpolate(u: VectorField, X: np.ndarray, kern: Kernel) -> np.ndarray:
    """Kernel-weighted velocity sum_x u(x) delta_c(x - X) h^2 at the particle."""
    spec = u.spec
    kern.ratio(spec)
    i1, w1 = _axis_weights(spec.n1, spec.h, spec.L1, kern.c, float(X[0]))
    i2, w2 = _axis_weights(spec.n2, spec.h, spec.L2, kern.c, float(X[1]))
    footprint = np.outer(w1, w2) * (spec.h**2 / kern.c**2)
    u1 = float(np.sum(u.c1.values[np.ix_(i1, i2)] * footprint))
    u2 = float(np.sum(u.c2.values[np.ix_(i1, i2)] * footprint))
    return np.array([u1, u2])


def effective_radius(kern: Kernel) -> float:
    return kern.effective_radius()
