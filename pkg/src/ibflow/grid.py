"""Periodic uniform-grid fields and the finite-difference operators D0, D+, D-.

Fields live on a rectangular grid with the same spacing h along both axes.
Arrays are indexed (i, j) with i along x1 and j along x2; all stencils wrap
periodically via np.roll, so there are no ghost cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a periodic uniform grid: n1 x n2 nodes, spacing h [m]."""

    n1: int
    n2: int
    h: float

    def __post_init__(self):
        if self.n1 < 4 or self.n2 < 4:
            raise ValueError(f"grid must be at least 4x4, got {self.n1}x{self.n2}")
        if not (np.isfinite(self.h) and self.h > 0):
            raise ValueError(f"grid spacing must be positive and finite, got {self.h}")

    @property
    def L1(self) -> float:
        return self.n1 * self.h

    @property
    def L2(self) -> float:
        return self.n2 * self.h

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinates as broadcastable arrays x1 (n1,1) and x2 (1,n2)."""
        x1 = (np.arange(self.n1) * self.h)[:, None]
        x2 = (np.arange(self.n2) * self.h)[None, :]
        return x1, x2


@dataclass(frozen=True)
class ScalarField:
    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.spec.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.spec.shape}"
            )

    @classmethod
    def zeros(cls, spec: GridSpec) -> "ScalarField":
        return cls(spec, np.zeros(spec.shape))

    @classmethod
    def full(cls, spec: GridSpec, value: float) -> "ScalarField":
        return cls(spec, np.full(spec.shape, float(value)))

    def __add__(self, other: "ScalarField") -> "ScalarField":
        return ScalarField(self.spec, self.values + other.values)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        return ScalarField(self.spec, self.values - other.values)

    def __mul__(self, a: float) -> "ScalarField":
        return ScalarField(self.spec, self.values * a)

    __rmul__ = __mul__


@dataclass(frozen=True)
class VectorField:
    spec: GridSpec
    c1: ScalarField
    c2: ScalarField

    def __post_init__(self):
        if self.c1.spec != self.spec or self.c2.spec != self.spec:
            raise ValueError("vector components must share the parent GridSpec")

    @classmethod
    def from_arrays(cls, spec: GridSpec, v1: np.ndarray, v2: np.ndarray) -> "VectorField":
        return cls(spec, ScalarField(spec, v1), ScalarField(spec, v2))

    @classmethod
    def zeros(cls, spec: GridSpec) -> "VectorField":
        return cls.from_arrays(spec, np.zeros(spec.shape), np.zeros(spec.shape))

    @property
    def components(self) -> tuple[ScalarField, ScalarField]:
        return (self.c1, self.c2)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.spec, self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.spec, self.c1 - other.c1, self.c2 - other.c2)

    def __mul__(self, a: float) -> "VectorField":
        return VectorField(self.spec, self.c1 * a, self.c2 * a)

    __rmul__ = __mul__


def _axis(axis: int) -> int:
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    return axis - 1


def d0(f: ScalarField, axis: int) -> ScalarField:
    """Centred difference (f(x + h e) - f(x - h e)) / 2h with periodic wrap."""
    ax = _axis(axis)
    v = f.values
    return ScalarField(f.spec, (np.roll(v, -1, ax) - np.roll(v, 1, ax)) / (2.0 * f.spec.h))


def dplus(f: ScalarField, axis: int) -> ScalarField:
    """Forward difference (f(x + h e) - f(x)) / h with periodic wrap."""
    ax = _axis(axis)
    v = f.values
    return ScalarField(f.spec, (np.roll(v, -1, ax) - v) / f.spec.h)


def dminus(f: ScalarField, axis: int) -> ScalarField:
    """Backward difference (f(x) - f(x - h e)) / h with periodic wrap."""
    ax = _axis(axis)
    v = f.values
    return ScalarField(f.spec, (v - np.roll(v, 1, ax)) / f.spec.h)


def laplacian5(f: ScalarField) -> ScalarField:
    """Five-point periodic Laplacian, identical to dminus(dplus(f)) summed over axes."""
    v = f.values
    out = (
        np.roll(v, -1, 0) + np.roll(v, 1, 0) + np.roll(v, -1, 1) + np.roll(v, 1, 1) - 4.0 * v
    ) / f.spec.h**2
    return ScalarField(f.spec, out)


def grad0(f: ScalarField) -> VectorField:
    return VectorField(f.spec, d0(f, 1), d0(f, 2))


def div0(v: VectorField) -> ScalarField:
    return d0(v.c1, 1) + d0(v.c2, 2)


def dplus_div(v: VectorField) -> ScalarField:
    return dplus(v.c1, 1) + dplus(v.c2, 2)


def dminus_grad(f: ScalarField) -> VectorField:
    return VectorField(f.spec, dminus(f, 1), dminus(f, 2))


def vorticity(u: VectorField) -> ScalarField:
    """Centred-difference curl d0(u2, 1) - d0(u1, 2)."""
    return d0(u.c2, 1) - d0(u.c1, 2)


def inner(a, b) -> float:
    """Averaged inner product (h^2 / (L1 L2)) sum over nodes and components.

    The h^2/(L1 L2) weight equals 1/(n1 n2), so a constant field of value 1 has
    norm 1 on any grid.
    """
    if a.spec != b.spec:
        raise ValueError("inner product requires a shared GridSpec")
    if isinstance(a, ScalarField) != isinstance(b, ScalarField):
        raise TypeError("cannot mix scalar and vector fields in an inner product")
    if isinstance(a, ScalarField):
        total = float(np.vdot(a.values, b.values).real)
    else:
        total = float(
            np.vdot(a.c1.values, b.c1.values).real + np.vdot(a.c2.values, b.c2.values).real
        )
    return total / (a.spec.n1 * a.spec.n2)


def norm(a) -> float:
    return float(np.sqrt(inner(a, a)))
