"""Reduced quasilinear system on the plane and its Dirichlet solver.

First-order system:      u_x = v_y,   v_x = -P'(w(v^2 + y^2)) u_y.
Potential form:          f_xx + P'(w) f_yy = 0 with (u, v) = (f_y, f_x) and
                         w the branch root of P(w) = f_x^2 + y^2.

Discretisation is the 5-point second-order stencil; the nonlinear coefficient
is evaluated nodewise from the current iterate.  The Dirichlet solver runs a
Picard (frozen-coefficient) outer loop around red-black SOR sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .branch import ReductionParams, ellipticity_array
from .errors import (
    DegeneracyEncounteredError,
    DomainMismatchError,
    NoConvergenceError,
    SingularParametersError,
)
from .grid import BoundaryData, GridDomain, ScalarField2D, require_same_domain


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and iteration controls for solve_dirichlet."""

    tolerance: float = 1e-10
    max_iterations: int = 10_000
    sor_factor: float = 1.7
    ellipticity_floor: float = 1e-10
    coefficient_damping: float = 0.7

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if not (0 < self.sor_factor < 2):
            raise ValueError("sor_factor must lie in (0, 2)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True, eq=False)
class PdeSolution:
    """Converged potential f with derived derivative fields u, v."""

    f: ScalarField2D
    u: ScalarField2D
    v: ScalarField2D
    iterations: int
    final_residual: float
    ellipticity_margin: float


def _dx_central(arr: np.ndarray, hx: float) -> np.ndarray:
    return (arr[2:, 1:-1] - arr[:-2, 1:-1]) / (2.0 * hx)


def _dy_central(arr: np.ndarray, hy: float) -> np.ndarray:
    return (arr[1:-1, 2:] - arr[1:-1, :-2]) / (2.0 * hy)


def _interior_coefficient(params: ReductionParams, f: np.ndarray, domain: GridDomain) -> np.ndarray:
    """P'(w) at interior nodes with s = (D_x f)^2 + y^2 from the iterate."""
    fx = _dx_central(f, domain.hx)
    s = fx * fx + domain.ys()[None, 1:-1] ** 2
    return ellipticity_array(params, s)


def ellipticity_field(params: ReductionParams, f: ScalarField2D) -> np.ndarray:
    """Public view of the assembled interior coefficient, shape (nx-2, ny-2)."""
    return _interior_coefficient(params, f.values, f.domain)


def residual_first_order(
    params: ReductionParams, u: ScalarField2D, v: ScalarField2D
) -> tuple[ScalarField2D, ScalarField2D]:
    """Central-difference residuals of the first-order system.

    r1 = D_x u - D_y v and r2 = D_x v + P'(w(v^2 + y^2)) D_y u at interior
    nodes; boundary rows are reported as zero.
    """
    dom = require_same_domain(u, v)
    uu, vv = u.values, v.values
    r1 = np.zeros_like(uu)
    r2 = np.zeros_like(uu)
    s = vv[1:-1, 1:-1] ** 2 + dom.ys()[None, 1:-1] ** 2
    coef = ellipticity_array(params, s)
    r1[1:-1, 1:-1] = _dx_central(uu, dom.hx) - _dy_central(vv, dom.hy)
    r2[1:-1, 1:-1] = _dx_central(vv, dom.hx) + coef * _dy_central(uu, dom.hy)
    return ScalarField2D(dom, r1), ScalarField2D(dom, r2)


def residual_potential(params: ReductionParams, f: ScalarField2D) -> ScalarField2D:
    """D_xx f + P'(w) D_yy f at interior nodes, coefficient from D_x f."""
    dom = f.domain
    out = np.zeros_like(f.values)
    out[1:-1, 1:-1] = _potential_residual_interior(
        params, f.values, dom, _interior_coefficient(params, f.values, dom)
    )
    return ScalarField2D(dom, out)


def _potential_residual_interior(
    params: ReductionParams, f: np.ndarray, domain: GridDomain, coef: np.ndarray
) -> np.ndarray:
    hx2, hy2 = domain.hx**2, domain.hy**2
    fxx = (f[2:, 1:-1] - 2.0 * f[1:-1, 1:-1] + f[:-2, 1:-1]) / hx2
    fyy = (f[1:-1, 2:] - 2.0 * f[1:-1, 1:-1] + f[1:-1, :-2]) / hy2
    return fxx + coef * fyy


def recover_uv(f: ScalarField2D) -> tuple[ScalarField2D, ScalarField2D]:
    """(u, v) = (D_y f, D_x f): central interior, second-order one-sided edges."""
    dom = f.domain
    vals = f.values
    hx, hy = dom.hx, dom.hy

    u = np.empty_like(vals)
    u[:, 1:-1] = (vals[:, 2:] - vals[:, :-2]) / (2.0 * hy)
    u[:, 0] = (-3.0 * vals[:, 0] + 4.0 * vals[:, 1] - vals[:, 2]) / (2.0 * hy)
    u[:, -1] = (3.0 * vals[:, -1] - 4.0 * vals[:, -2] + vals[:, -3]) / (2.0 * hy)

    v = np.empty_like(vals)
    v[1:-1, :] = (vals[2:, :] - vals[:-2, :]) / (2.0 * hx)
    v[0, :] = (-3.0 * vals[0, :] + 4.0 * vals[1, :] - vals[2, :]) / (2.0 * hx)
    v[-1, :] = (3.0 * vals[-1, :] - 4.0 * vals[-2, :] + vals[-3, :]) / (2.0 * hx)

    return ScalarField2D(dom, u), ScalarField2D(dom, v)


def transfinite_interpolant(phi: BoundaryData) -> np.ndarray:
    """Bilinear blend of the four boundary edges; exact on bilinear data."""
    dom = phi.domain
    nx, ny = dom.nx, dom.ny
    full = np.zeros((nx, ny))
    phi.apply_to(full)
    bottom, top = full[:, 0], full[:, -1]
    left, right = full[0, :], full[-1, :]
    xi = ((dom.xs() - dom.x0) / (dom.x1 - dom.x0))[:, None]
    eta = ((dom.ys() - dom.y0) / (dom.y1 - dom.y0))[None, :]
    blend = (
        (1 - xi) * left[None, :]
        + xi * right[None, :]
        + (1 - eta) * bottom[:, None]
        + eta * top[:, None]
        - (1 - xi) * (1 - eta) * full[0, 0]
        - xi * (1 - eta) * full[-1, 0]
        - (1 - xi) * eta * full[0, -1]
        - xi * eta * full[-1, -1]
    )
    phi.apply_to(blend)
    return blend


def _checkerboard(nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
    ii, jj = np.meshgrid(np.arange(1, nx - 1), np.arange(1, ny - 1), indexing="ij")
    red = (ii + jj) % 2 == 0
    return red, ~red


def _sor_color_pass(
    f: np.ndarray, coef: np.ndarray, mask: np.ndarray, hx: float, hy: float, omega: float
) -> None:
    invx, invy = 1.0 / hx**2, 1.0 / hy**2
    num = (f[2:, 1:-1] + f[:-2, 1:-1]) * invx + coef * (f[1:-1, 2:] + f[1:-1, :-2]) * invy
    den = 2.0 * invx + 2.0 * coef * invy
    interior = f[1:-1, 1:-1]
    f[1:-1, 1:-1] = np.where(mask, interior + omega * (num / den - interior), interior)


def solve_dirichlet(
    params: ReductionParams,
    domain: GridDomain,
    phi: BoundaryData,
    cfg: SolverConfig = SolverConfig(),
) -> PdeSolution:
    """Solve f_xx + P'(w) f_yy = 0 with Dirichlet data phi.

    Requires min(a_j) of multiplicity one so the coefficient stays bounded
    away from zero.  Boundary nodes carry phi exactly; iterations counts the
    total number of red-black sweeps performed.
    """
    if params.min_multiplicity > 1:
        raise SingularParametersError(
            "min(a_j) has multiplicity > 1; the nonsingular Dirichlet solver does not apply"
        )
    if phi.domain != domain:
        raise DomainMismatchError("boundary data was built for a different domain")

    f = transfinite_interpolant(phi)
    red, black = _checkerboard(domain.nx, domain.ny)
    omega = cfg.sor_factor

    def coefficient(fa: np.ndarray) -> np.ndarray:
        coef = _interior_coefficient(params, fa, domain)
        low = float(coef.min())
        if low < cfg.ellipticity_floor:
            raise DegeneracyEncounteredError(
                f"P'(w) = {low:.3e} fell below floor {cfg.ellipticity_floor:.0e}"
            )
        return coef

    sweeps = 0
    coef = coefficient(f)
    residual = float(
        np.max(np.abs(_potential_residual_interior(params, f, domain, coef)))
    )
    inner_target = 0.25 * cfg.tolerance

    while residual > cfg.tolerance:
        for k in range(500):
            _sor_color_pass(f, coef, red, domain.hx, domain.hy, omega)
            _sor_color_pass(f, coef, black, domain.hx, domain.hy, omega)
            sweeps += 1
            if sweeps >= cfg.max_iterations:
                fresh = coefficient(f)
                res = float(
                    np.max(np.abs(_potential_residual_interior(params, f, domain, fresh)))
                )
                if res <= cfg.tolerance:
                    residual = res
                    coef = fresh
                    break
                raise NoConvergenceError(sweeps, res)
            if k % 5 == 4:
                lin = np.max(np.abs(_potential_residual_interior(params, f, domain, coef)))
                if lin <= inner_target:
                    break
        if residual <= cfg.tolerance:
            break
        fresh = coefficient(f)
        new_residual = float(
            np.max(np.abs(_potential_residual_interior(params, f, domain, fresh)))
        )
        if new_residual > residual:
            coef = coef + cfg.coefficient_damping * (fresh - coef)
        else:
            coef = fresh
        residual = new_residual

    margin = float(_interior_coefficient(params, f, domain).min())
    field = ScalarField2D(domain, f)
    u, v = recover_uv(field)
    return PdeSolution(
        f=field,
        u=u,
        v=v,
        iterations=sweeps,
        final_residual=residual,
        ellipticity_margin=margin,
    )
