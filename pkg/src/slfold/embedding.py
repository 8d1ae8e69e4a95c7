"""Lift of reduced planar data (x, y, u, v) to points of N in C^n.

A point of the submanifold is z = (r_1 e^{i t_1}, ..., r_{n-1} e^{i t_{n-1}},
x + iu) with r_j = sqrt(w + a_j), where w solves P(w) = v^2 + y^2 on the
distinguished branch and the angle sum Theta = t_1 + ... + t_{n-1} is pinned
by i^{n-3} z_1 ... z_{n-1} = v + iy.  Individual angles are gauge; the torus
action moves them freely at fixed Theta.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .branch import ReductionParams, solve_branch
from .errors import SingularPointError
from .grid import ScalarField2D, require_same_domain
from .pde import PdeSolution

# Exact powers of i, indexed mod 4.
_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def unit_power_i(k: int) -> complex:
    """i**k as an exact table lookup."""
    return _I_POW[k % 4]


def total_phase(params: ReductionParams, v: float, y: float) -> float:
    """Theta in (-pi, pi] with e^{i Theta} = i^{3-n} (v + iy)/|v + iy|."""
    if v == 0.0 and y == 0.0:
        raise SingularPointError("total phase undefined at v = y = 0")
    return cmath.phase(unit_power_i(3 - params.n) * complex(v, y))


@dataclass(frozen=True, eq=False)
class EmbeddedSample:
    """One lifted point with its reduced coordinates and torus angles."""

    z: np.ndarray
    x: float
    y: float
    u: float
    v: float
    w: float
    theta_total: float
    torus_angles: tuple[float, ...]

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @property
    def base(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.u, self.v)


def lift_point(
    params: ReductionParams,
    x: float,
    y: float,
    u: float,
    v: float,
    torus_angles: Sequence[float] | None = None,
) -> EmbeddedSample:
    """Lift reduced data to a point of N.

    torus_angles supplies (t_1, ..., t_{n-2}); the last angle is chosen so
    the angle sum equals Theta.  At v = y = 0 the lift exists only in the
    nonsingular regime (one radius vanishes and the phase drops out).
    """
    n = params.n
    angles = tuple(float(t) for t in (torus_angles if torus_angles is not None else [0.0] * (n - 2)))
    if len(angles) != n - 2:
        raise ValueError(f"need n-2 = {n - 2} torus angles, got {len(angles)}")

    if v == 0.0 and y == 0.0:
        if params.min_multiplicity > 1:
            raise SingularPointError("orbit collapses at v = y = 0 for degenerate min(a_j)")
        theta_sum = 0.0  # product of the z_j vanishes; the phase is immaterial
    else:
        theta_sum = total_phase(params, v, y)

    w = solve_branch(params, v * v + y * y).w
    radicand = np.array([w + aj for aj in params.a])
    radicand[radicand < 0.0] = 0.0  # floating dust below the branch floor
    radii = np.sqrt(radicand)

    full_angles = np.array(angles + (theta_sum - sum(angles),))
    z = np.empty(n, dtype=complex)
    z[: n - 1] = radii * np.exp(1j * full_angles)
    z[n - 1] = complex(x, u)
    return EmbeddedSample(
        z=z, x=float(x), y=float(y), u=float(u), v=float(v),
        w=w, theta_total=theta_sum, torus_angles=angles,
    )


def moment_residual(params: ReductionParams, sample: EmbeddedSample) -> np.ndarray:
    """(|z_j|^2 - |z_{n-1}|^2) - (a_j - a_{n-1}) for j = 1, ..., n-2."""
    n = params.n
    mags = np.abs(sample.z[: n - 1]) ** 2
    return (mags[: n - 2] - mags[n - 2]) - (np.array(params.a[: n - 2]) - params.a[n - 2])


def product_residual(params: ReductionParams, sample: EmbeddedSample) -> float:
    """|i^{n-3} z_1 ... z_{n-1} - (v + iy)|, the defining-relation defect."""
    prod = unit_power_i(params.n - 3) * np.prod(sample.z[: params.n - 1])
    return abs(prod - complex(sample.v, sample.y))


@dataclass(frozen=True, eq=False)
class SurfaceSamples:
    """Lifted samples over a solution grid plus the skipped singular nodes."""

    samples: list[EmbeddedSample]
    skipped_nodes: list[tuple[int, int]]


def sample_fields(
    params: ReductionParams, u: "ScalarField2D", v: "ScalarField2D", torus_resolution: int
) -> SurfaceSamples:
    """Tensor sampling: every grid node times a uniform torus lattice.

    Nodes with (v, y) = (0, 0) in the singular regime are skipped and
    recorded rather than raised; ordering is node-major (i outer, j inner)
    then torus-index-major.
    """
    if torus_resolution < 1:
        raise ValueError("torus_resolution must be >= 1")
    n = params.n
    dom = require_same_domain(u, v)
    xs, ys = dom.xs(), dom.ys()
    step = 2.0 * np.pi / torus_resolution
    lattice = [tuple(step * m for m in idx)
               for idx in itertools.product(range(torus_resolution), repeat=n - 2)]

    samples: list[EmbeddedSample] = []
    skipped: list[tuple[int, int]] = []
    for i in range(dom.nx):
        for j in range(dom.ny):
            vv = float(v.values[i, j])
            y = float(ys[j])
            if vv == 0.0 and y == 0.0 and params.min_multiplicity > 1:
                skipped.append((i, j))
                continue
            uu = float(u.values[i, j])
            x = float(xs[i])
            for angles in lattice:
                samples.append(lift_point(params, x, y, uu, vv, angles))
    return SurfaceSamples(samples=samples, skipped_nodes=skipped)


def sample_surface(
    params: ReductionParams, sol: PdeSolution, torus_resolution: int
) -> SurfaceSamples:
    """sample_fields applied to the derivative fields of a solved potential."""
    return sample_fields(params, sol.u, sol.v, torus_resolution)
