"""Fourier-diagonalized solves for the circulant grid operators.

All operators here (the centred gradient, the five-point Laplacian) are
circulant on the periodic grid, so the coupled implicit-viscosity +
discrete-incompressibility solve, the discrete Helmholtz decomposition, and
the mean-flow pin are all cheap per-mode computations.

Transform convention: the forward transform divides by n1*n2, so the (0, 0)
coefficient equals the spatial mean of the field.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import GridSpec, ScalarField, VectorField, div0


@dataclass(frozen=True)
class ModeSymbols:
    """Per-mode symbols of the centred gradient and the five-point Laplacian.

    g1, g2: symbols of D0 along each axis, i*sin(2*pi*k/n)/h (purely
    imaginary; zero at k = 0 and at the Nyquist mode on even grids).
    gsq:    |g1|^2 + |g2|^2.
    lam:    symbol of -D+.D-, (4/h^2)(sin^2(pi*k1/n1) + sin^2(pi*k2/n2)).
    """

    spec: GridSpec
    g1: np.ndarray
    g2: np.ndarray
    gsq: np.ndarray
    lam: np.ndarray


@lru_cache(maxsize=32)
def mode_symbols(spec: GridSpec) -> ModeSymbols:
    h = spec.h
    k1 = np.arange(spec.n1)[:, None]
    k2 = np.arange(spec.n2)[None, :]
    s1 = np.sin(2.0 * np.pi * k1 / spec.n1)
    s2 = np.sin(2.0 * np.pi * k2 / spec.n2)
    # snap rounding residue at the Nyquist mode (sin(pi) ~ 1e-16) to an exact
    # zero so kernel modes of D0 are not spuriously projected
    s1[np.abs(s1) < 1e-12] = 0.0
    s2[np.abs(s2) < 1e-12] = 0.0
    g1 = 1j * s1 / h + np.zeros((1, spec.n2))
    g2 = 1j * s2 / h + np.zeros((spec.n1, 1))
    gsq = np.abs(g1) ** 2 + np.abs(g2) ** 2
    lam = (4.0 / h**2) * (
        np.sin(np.pi * k1 / spec.n1) ** 2 + np.sin(np.pi * k2 / spec.n2) ** 2
    )
    return ModeSymbols(spec, g1, g2, gsq, lam)


def transform(f: ScalarField) -> np.ndarray:
    """2D DFT with the mean-preserving normalization (divides by n1*n2)."""
    return np.fft.fft2(f.values, norm="forward")


def inverse_transform(spec: GridSpec, fhat: np.ndarray) -> ScalarField:
    return ScalarField(spec, np.fft.ifft2(fhat, norm="forward").real)


@dataclass(frozen=True)
class HelmholtzParts:
    """Orthogonal splitting v = w + grad0(psi) with div0(w) = 0."""

    w: VectorField
    gpsi: VectorField


def helmholtz(v: VectorField) -> HelmholtzParts:
    """Discrete Helmholtz decomposition of v.

    Per mode the centred-gradient part is the projection of v-hat onto the
    symbol vector g; modes where g vanishes (the kernel of D0, constants and
    checkerboards) belong entirely to the divergence-free part.
    """
    sym = mode_symbols(v.spec)
    v1 = np.fft.fft2(v.c1.values, norm="forward")
    v2 = np.fft.fft2(v.c2.values, norm="forward")
    with np.errstate(invalid="ignore", divide="ignore"):
        coef = np.where(sym.gsq > 0, (np.conj(sym.g1) * v1 + np.conj(sym.g2) * v2), 0.0)
        coef = np.where(sym.gsq > 0, coef / np.where(sym.gsq > 0, sym.gsq, 1.0), 0.0)
    gp1 = sym.g1 * coef
    gp2 = sym.g2 * coef
    spec = v.spec
    gpsi = VectorField.from_arrays(
        spec,
        np.fft.ifft2(gp1, norm="forward").real,
        np.fft.ifft2(gp2, norm="forward").real,
    )
    w = VectorField.from_arrays(
        spec,
        np.fft.ifft2(v1 - gp1, norm="forward").real,
        np.fft.ifft2(v2 - gp2, norm="forward").real,
    )
    return HelmholtzParts(w=w, gpsi=gpsi)


def stokes_solve(
    w: VectorField, dt: float, mu: float, rho: float
) -> tuple[VectorField, VectorField]:
    """Solve the coupled implicit-viscosity / incompressibility system.

    Returns (u_next, gradp) with
        (I - dt*(mu/rho)*D+.D-) u_next + (dt/rho) gradp = w
        div0(u_next) = 0
    Per mode: project w-hat off the gradient direction g, then divide by the
    viscous factor 1 + dt*(mu/rho)*lam.  Modes in ker(D0) receive no
    projection; the (0, 0) mode (lam = 0) passes through untouched.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
    spec = w.spec
    sym = mode_symbols(spec)
    w1 = np.fft.fft2(w.c1.values, norm="forward")
    w2 = np.fft.fft2(w.c2.values, norm="forward")
    denom = np.where(sym.gsq > 0, sym.gsq, 1.0)
    coef = np.where(sym.gsq > 0, (np.conj(sym.g1) * w1 + np.conj(sym.g2) * w2) / denom, 0.0)
    p1 = sym.g1 * coef  # (I - P) w-hat, the part along g
    p2 = sym.g2 * coef
    visc = 1.0 + dt * (mu / rho) * sym.lam
    u1 = (w1 - p1) / visc
    u2 = (w2 - p2) / visc
    u_next = VectorField.from_arrays(
        spec,
        np.fft.ifft2(u1, norm="forward").real,
        np.fft.ifft2(u2, norm="forward").real,
    )
    gradp = VectorField.from_arrays(
        spec,
        np.fft.ifft2(p1, norm="forward").real * (rho / dt),
        np.fft.ifft2(p2, norm="forward").real * (rho / dt),
    )
    return u_next, gradp


def lambda_min(spec: GridSpec) -> float:
    """Smallest nonzero eigenvalue of -D0.D0.

    The symbol is (sin^2(2*pi*k1/n1) + sin^2(2*pi*k2/n2))/h^2; the minimum is
    taken over modes outside ker(D0), i.e. where the symbol is nonzero.
    """
    k1 = np.arange(spec.n1)[:, None]
    k2 = np.arange(spec.n2)[None, :]
    sym = (
        np.sin(2.0 * np.pi * k1 / spec.n1) ** 2 + np.sin(2.0 * np.pi * k2 / spec.n2) ** 2
    ) / spec.h**2
    nonzero = sym[sym > 1e-14 / spec.h**2]
    return float(nonzero.min())


def pin_mean_flow(w: VectorField, u_mean: float) -> VectorField:
    """Set the (0, 0) Fourier coefficient of component 1 to u_mean.

    With the mean-preserving transform convention this prescribes the spatial
    mean of u1; every other mode is untouched.
    """
    w1 = np.fft.fft2(w.c1.values, norm="forward")
    w1[0, 0] = u_mean
    return VectorField(
        w.spec,
        ScalarField(w.spec, np.fft.ifft2(w1, norm="forward").real),
        w.c2,
    )


def divergence_residual(u: VectorField) -> float:
    """Relative discrete-divergence residual ||div0 u|| / max(||u||, tiny)."""
    from .grid import norm as _norm

    nu = _norm(u)
    nd = _norm(div0(u))
    if nu == 0.0:
        return nd
    return nd / nu


__all__ = [
    "ModeSymbols",
    "HelmholtzParts",
    "mode_symbols",
    "transform",
    "inverse_transform",
    "helmholtz",
    "stokes_solve",
    "lambda_min",
    "pin_mean_flow",
    "divergence_residual",
]
