"""Executable checks of the scheme's consistency and convergence order.

The residues substitute a known smooth solution into the discrete equations
and measure what is left over; the refinement study runs the same physical
problem on a ladder of grids (h halved, dt quartered) and fits the observed
order from the successive differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .grid import (
    GridSpec,
    ScalarField,
    VectorField,
    d0,
    div0,
    dminus,
    laplacian5,
    norm,
)
from .kernel import Kernel, ParticleState, interpolate, spread
from .sim import SimConfig, advection, run


@dataclass(frozen=True)
class ManufacturedSolution:
    """Closures for an exact smooth solution used as the consistency reference.

    velocity(spec, t) and pressure(spec, t) evaluate on the grid; position(t)
    and force(t) describe an optional manufactured particle.
    """

    velocity: Callable[[GridSpec, float], VectorField]
    pressure: Callable[[GridSpec, float], ScalarField]
    position: Optional[Callable[[float], np.ndarray]] = None
    force: Optional[Callable[[float], np.ndarray]] = None


def taylor_green(
    L: float,
    rho: float,
    mu: float,
    amplitude: float = 1.0,
    modes: tuple[int, int] = (1, 1),
) -> ManufacturedSolution:
    """A decaying Taylor-Green vortex on a square periodic box of side L.

    Built from the stream function psi = (A/k2) sin(k1 x) sin(k2 y) with
    k_a = 2 pi m_a / L, so u1 = A sin(k1 x) cos(k2 y) e^(-nu(k1^2+k2^2) t),
    u2 = -(k1/k2) A cos(k1 x) sin(k2 y) e^(...).  The vorticity is a multiple
    of psi, which makes the advection term a pure gradient; the matching
    pressure is p = -rho (|u|^2/2 + (k1^2+k2^2) psi^2 / 2).  In the classic
    m1 = m2 = 1 case this simplifies (up to a constant) to
    p = (rho A^2 / 4)(cos 2kx + cos 2ky) e^(-4 nu k^2 t).  Unequal mode
    numbers give a solution whose centred-difference divergence is a genuine
    O(h^2) quantity instead of cancelling exactly on the grid.
    """
    m1, m2 = modes
    k1 = 2.0 * np.pi * m1 / L
    k2 = 2.0 * np.pi * m2 / L
    nu = mu / rho
    ksq = k1 * k1 + k2 * k2

    def velocity(spec: GridSpec, t: float) -> VectorField:
        x1, x2 = spec.nodes()
        decay = math.exp(-nu * ksq * t)
        u1 = amplitude * np.sin(k1 * x1) * np.cos(k2 * x2) * decay
        u2 = -(k1 / k2) * amplitude * np.cos(k1 * x1) * np.sin(k2 * x2) * decay
        return VectorField.from_arrays(spec, u1 + np.zeros(spec.shape), u2 + np.zeros(spec.shape))

    def pressure(spec: GridSpec, t: float) -> ScalarField:
        x1, x2 = spec.nodes()
        decay2 = math.exp(-2.0 * nu * ksq * t)
        u1 = amplitude * np.sin(k1 * x1) * np.cos(k2 * x2)
        u2 = -(k1 / k2) * amplitude * np.cos(k1 * x1) * np.sin(k2 * x2)
        psi = (amplitude / k2) * np.sin(k1 * x1) * np.sin(k2 * x2)
        p = -rho * (0.5 * (u1**2 + u2**2) + 0.5 * ksq * psi**2) * decay2
        return ScalarField(spec, p + np.zeros(spec.shape))

    return ManufacturedSolution(velocity=velocity, pressure=pressure)


def uniform_flow(u1: float, u2: float, X_start: Optional[np.ndarray] = None) -> ManufacturedSolution:
    """Constant velocity field; the optional particle rides the flow exactly."""

    def velocity(spec: GridSpec, t: float) -> VectorField:
        return VectorField.from_arrays(
            spec, np.full(spec.shape, float(u1)), np.full(spec.shape, float(u2))
        )

    def pressure(spec: GridSpec, t: float) -> ScalarField:
        return ScalarField.zeros(spec)

    position = None
    if X_start is not None:
        X0 = np.asarray(X_start, dtype=float)

        def position(t: float) -> np.ndarray:
            return X0 + t * np.array([u1, u2])

    return ManufacturedSolution(velocity=velocity, pressure=pressure, position=position)


@dataclass(frozen=True)
class ResidueNorms:
    """Averaged norms of the consistency residues at one (t, h, dt)."""

    tau: float
    eta: float
    eta_grad: float
    xi: float


def residues(
    ms: ManufacturedSolution,
    spec: GridSpec,
    dt: float,
    t: float,
    rho: float,
    mu: float,
    kern: Optional[Kernel] = None,
) -> ResidueNorms:
    """Substitute the exact solution into the discrete equations.

    tau: momentum residue; eta: discrete divergence of u at t + dt (with the
    norm of its backward gradient); xi: particle-advection residue (zero when
    the manufactured solution has no particle).
    """
    u_n = ms.velocity(spec, t)
    u_np1 = ms.velocity(spec, t + dt)
    p_np1 = ms.pressure(spec, t + dt)

    tau1 = rho * ((u_np1.c1.values - u_n.c1.values) / dt) + d0(p_np1, 1).values
    tau2 = rho * ((u_np1.c2.values - u_n.c2.values) / dt) + d0(p_np1, 2).values
    adv = advection(u_n)
    tau1 += rho * adv.c1.values - mu * laplacian5(u_np1.c1).values
    tau2 += rho * adv.c2.values - mu * laplacian5(u_np1.c2).values
    if ms.position is not None and ms.force is not None and kern is not None:
        forcing = spread(ms.force(t), ms.position(t), spec, kern)
        tau1 -= forcing.c1.values
        tau2 -= forcing.c2.values
    tau = VectorField.from_arrays(spec, tau1, tau2)

    eta = div0(u_np1)
    eta_grad = VectorField(spec, dminus(eta, 1), dminus(eta, 2))

    xi_norm = 0.0
    if ms.position is not None and kern is not None:
        X_n = ms.position(t)
        X_np1 = ms.position(t + dt)
        xi = (X_np1 - X_n) / dt - interpolate(u_n, X_n, kern)
        xi_norm = float(np.linalg.norm(xi))

    return ResidueNorms(tau=norm(tau), eta=norm(eta), eta_grad=norm(eta_grad), xi=xi_norm)


@dataclass(frozen=True)
class RefinementLevel:
    h: float
    dt: float
    n1: int
    n2: int
    du_norm: Optional[float]  # difference against the previous (coarser) level
    dX_norm: Optional[float]


@dataclass(frozen=True)
class RefinementReport:
    levels: list
    p_u: Optional[float]
    p_X: Optional[float]

    def to_csv(self) -> str:
        lines = ["level,h,dt,du_norm,dX_norm"]
        for i, lev in enumerate(self.levels):
            du = "" if lev.du_norm is None else f"{lev.du_norm:.16e}"
            dX = "" if lev.dX_norm is None else f"{lev.dX_norm:.16e}"
            lines.append(f"{i},{lev.h:.16e},{lev.dt:.16e},{du},{dX}")
        pu = "" if self.p_u is None else f"{self.p_u:.6f}"
        pX = "" if self.p_X is None else f"{self.p_X:.6f}"
        lines.append(f"# fitted orders: p_u={pu} p_X={pX}")
        return "\n".join(lines) + "\n"


def restrict(fine: VectorField, coarse_spec: GridSpec) -> VectorField:
    """Injection at coincident nodes; the fine grid must double the coarse."""
    if fine.spec.n1 != 2 * coarse_spec.n1 or fine.spec.n2 != 2 * coarse_spec.n2:
        raise ValueError(
            f"restriction requires exact halving, got fine {fine.spec.shape} "
            f"vs coarse {coarse_spec.shape}"
        )
    return VectorField.from_arrays(
        coarse_spec,
        fine.c1.values[::2, ::2].copy(),
        fine.c2.values[::2, ::2].copy(),
    )


def estimate_order(diffs: list[tuple[float, float]]) -> float:
    """Least-squares slope of log(difference) against log(h)."""
    if len(diffs) < 2:
        raise ValueError("order estimation needs at least two (h, d) pairs")
    hs = np.array([h for h, _ in diffs])
    ds = np.array([d for _, d in diffs])
    if np.any(np.diff(hs) >= 0):
        raise ValueError("h values must be strictly decreasing")
    if np.any(ds <= 0):
        raise ValueError("differences must be positive (identical outputs?)")
    slope, _ = np.polyfit(np.log(hs), np.log(ds), 1)
    return float(slope)


def _refine_config(cfg: SimConfig) -> SimConfig:
    spec = cfg.spec
    fine_spec = GridSpec(n1=2 * spec.n1, n2=2 * spec.n2, h=spec.h / 2.0)
    return replace(cfg, spec=fine_spec, dt=cfg.dt / 4.0)


def refine_study(base_cfg: SimConfig, levels: int) -> RefinementReport:
    """Run `levels` simulations, halving h and quartering dt each time.

    Adjacent levels are compared at the common final time: velocity by the
    averaged norm of the difference at the coincident coarse nodes, particle
    position by Euclidean distance.  Orders are fitted over all adjacent pairs.
    """
    if levels < 2:
        raise ValueError(f"a refinement study needs at least 2 levels, got {levels}")
    cfgs = [base_cfg]
    for _ in range(levels - 1):
        cfgs.append(_refine_config(cfgs[-1]))

    results = []
    for cfg in cfgs:
        try:
            _, final = run(cfg)
        except Exception as exc:
            raise RuntimeError(
                f"refinement level with h={cfg.spec.h:.6g}, dt={cfg.dt:.6g} failed: {exc}"
            ) from exc
        results.append((cfg, final))

    out_levels = [
        RefinementLevel(
            h=cfgs[0].spec.h, dt=cfgs[0].dt, n1=cfgs[0].spec.n1, n2=cfgs[0].spec.n2,
            du_norm=None, dX_norm=None,
        )
    ]
    du_pairs = []
    dX_pairs = []
    for (cfg_c, st_c), (cfg_f, st_f) in zip(results[:-1], results[1:]):
        diff = restrict(st_f.u, cfg_c.spec) - st_c.u
        du = norm(diff)
        dX = None
        if st_c.X is not None and st_f.X is not None:
            dX = float(np.linalg.norm(st_f.X - st_c.X))
        out_levels.append(
            RefinementLevel(
                h=cfg_f.spec.h, dt=cfg_f.dt, n1=cfg_f.spec.n1, n2=cfg_f.spec.n2,
                du_norm=du, dX_norm=dX,
            )
        )
        # a pair's difference is attributed to the coarser of the two h's
        du_pairs.append((cfg_c.spec.h, du))
        if dX is not None:
            dX_pairs.append((cfg_c.spec.h, dX))

    def _fit(pairs):
        # identical outputs (exact playback) leave no order to fit
        if len(pairs) < 2 or any(d <= 0 for _, d in pairs):
            return None
        return estimate_order(pairs)

    return RefinementReport(levels=out_levels, p_u=_fit(du_pairs), p_X=_fit(dX_pairs))
