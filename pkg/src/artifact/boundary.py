"""Boundary treatment for fourth-order two-stage schemes.

Inflow ghosts come from an inverse Lax-Wendroff construction: a cubic is
fitted to the two interior averages, the boundary value g and the
boundary derivative u_x(0) = -g'/f'(g), and then integrated over the ghost
cells.  A WENO-type selection between the cubic, a quadratic and a linear
candidate handles discontinuities next to the boundary.  At the
intermediate stage the boundary data are shifted so that they are
consistent with the stage value of the interior scheme.  Outflow ghosts
use cubic extrapolation with the mirrored selection procedure.

The mesh convention is x = 0 at the inflow boundary with interior cells
I_0 = (0, h), I_1 = (h, 2h), ... and ghost cells I_-1, I_-2 to the left.
"""
from __future__ import annotations

from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import DegeneracyError, PositivityError
from .euler_model import GasConstants, cons_to_prim, prim_to_cons, Primitive

ILW_EPS = 1e-12
FPRIME_TOL = 1e-12


class InflowData(NamedTuple):
    g: Callable[[float], float]
    dg: Callable[[float], float]
    fprime: Callable
    d3g: Optional[Callable[[float], float]] = None


class GhostCells(NamedTuple):
    """Ghost averages and averaged derivatives, nearest cell first."""
    u1: np.ndarray
    u2: np.ndarray
    du1: np.ndarray
    du2: np.ndarray


def _q(g, dg, fprime, h):
    fp = np.asarray(fprime(g), dtype=float)
    if np.any(np.abs(fp) < FPRIME_TOL):
        raise DegeneracyError("f'(g) vanishes at the inflow boundary")
    return h * np.asarray(dg, dtype=float) / fp


# ------------------------------------------------------------ inflow ILW

def ilw_candidates(g, dg, fprime, ubar0, ubar1, h):
    """Ghost data on the three stencils, ordered (S0, S1, S2).

    S2 is the cubic through both interior cells, S1 the quadratic using
    I_0 only and S0 the linear function fixed by the boundary data alone.
    """
    g = np.asarray(g, dtype=float)
    q = _q(g, dg, fprime, h)
    u0 = np.asarray(ubar0, dtype=float)
    u1 = np.asarray(ubar1, dtype=float)
    s2 = GhostCells((-6.0 * g + 6.0 * q + 11.0 * u0 - u1) / 4.0,
                    (-90.0 * g + 42.0 * q + 105.0 * u0 - 11.0 * u1) / 4.0,
                    (66.0 * g - 34.0 * q - 73.0 * u0 + 7.0 * u1) / (8.0 * h),
                    (294.0 * g - 118.0 * q - 331.0 * u0 + 37.0 * u1) / (8.0 * h))
    s1 = GhostCells(q + u0,
                    -6.0 * g + 5.0 * q + 7.0 * u0,
                    (6.0 * g - 5.0 * q - 6.0 * u0) / (2.0 * h),
                    (18.0 * g - 11.0 * q - 18.0 * u0) / (2.0 * h))
    s0 = GhostCells(g + 0.5 * q, g + 1.5 * q, -q / h + 0.0 * u0, -q / h + 0.0 * u0)
    return s0, s1, s2


def ilw_inflow_ghosts(g, dg, fprime, ubar0, ubar1, h) -> GhostCells:
    """Smooth-path inflow ghosts (cubic on the full stencil)."""
    return ilw_candidates(g, dg, fprime, ubar0, ubar1, h)[2]


def ilw_indicators(g, dg, fprime, ubar0, ubar1, h):
    """Smoothness indicators (beta0, beta1, beta2) of the three stencils.

    They are the usual sums of scaled squared derivatives over I_-1; the
    boundary slope enters as s = h u_x(0) = -h g'/f'(g).
    """
    g = np.asarray(g, dtype=float)
    s = -_q(g, dg, fprime, h)
    u0 = np.asarray(ubar0, dtype=float)
    u1 = np.asarray(ubar1, dtype=float)
    b2 = (66516.0 * g * g + 9444.0 * s * s - 56348.0 * s * u0 + 85929.0 * u0 * u0
          + 6644.0 * s * u1 - 20694.0 * u0 * u1 + 1281.0 * u1 * u1
          + 12.0 * g * (4142.0 * s - 12597.0 * u0 + 1511.0 * u1)) / 80.0
    b1 = (48.0 * g * g + 54.0 * g * s + 16.0 * s * s - 96.0 * g * u0 + 48.0 * u0 * u0
          - 54.0 * s * u0)
    b0 = s * s + 0.0 * u0
    return b0, b1, b2


def ilw_weights(betas, h, eps=ILW_EPS):
    d = (h * h, h, 1.0 - h - h * h)
    alphas = [dr / (eps + b) ** 2 for dr, b in zip(d, betas)]
    tot = alphas[0] + alphas[1] + alphas[2]
    return tuple(a / tot for a in alphas)


def ilw_inflow_ghosts_weno(g, dg, fprime, ubar0, ubar1, h, eps=ILW_EPS) -> GhostCells:
    """Inflow ghosts with WENO-type selection among the three stencils."""
    cands = ilw_candidates(g, dg, fprime, ubar0, ubar1, h)
    w = ilw_weights(ilw_indicators(g, dg, fprime, ubar0, ubar1, h), h, eps)
    return GhostCells(*(sum(wr * c[i] for wr, c in zip(w, cands)) for i in range(4)))


# ------------------------------------------------- intermediate stage

def third_derivative_fd(g, t, dt):
    """Five-point centred g''' with spacing dt/4."""
    s = 0.25 * dt
    return (g(t + 2 * s) - 2.0 * g(t + s) + 2.0 * g(t - s) - g(t - 2 * s)) / (2.0 * s ** 3)


def intermediate_stage_boundary(g, dg, t_mid, dt, d3g=None, correct=True):
    """Boundary data (g, g') to pair with the intermediate stage value.

    The stage value carries an O(dt^3) defect -dt^3/48 u_ttt; the same
    defect is applied to g.  ``g``, ``dg`` and ``d3g`` are callables.
    """
    gm = g(t_mid)
    if correct:
        g3 = d3g(t_mid) if d3g is not None else third_derivative_fd(g, t_mid, dt)
        gm = gm - dt ** 3 / 48.0 * g3
    return gm, dg(t_mid)


def boundary_derivative(g, dg, fprime):
    """u_x at the inflow boundary from the equation: -g'/f'(g)."""
    return -_q(g, dg, fprime, 1.0)


def first_interface_derivative(g, dg, fprime, ubar0, ubar1, ubar2, h):
    """u_x at x = h from the boundary data and three interior averages."""
    q = _q(g, dg, fprime, h)
    return (-49.0 * np.asarray(ubar0) + 59.0 * np.asarray(ubar1) - 4.0 * np.asarray(ubar2)
            - 6.0 * np.asarray(g) + 6.0 * q) / (48.0 * h)


# ------------------------------------------------------------- outflow

def outflow_candidates(uM3, uM2, uM1, uM, h):
    """Extrapolated ghost data on shortened stencils, ordered (S0, S1, S2).

    S2 is the cubic on I_{M-3..M}, S1 the quadratic on I_{M-2..M} and S0
    the linear function on I_{M-1..M}.
    """
    uM3, uM2, uM1, uM = (np.asarray(v, dtype=float) for v in (uM3, uM2, uM1, uM))
    s2 = GhostCells(4.0 * uM - 6.0 * uM1 + 4.0 * uM2 - uM3,
                    10.0 * uM - 20.0 * uM1 + 15.0 * uM2 - 4.0 * uM3,
                    (26.0 * uM - 57.0 * uM1 + 42.0 * uM2 - 11.0 * uM3) / (6.0 * h),
                    (47.0 * uM - 114.0 * uM1 + 93.0 * uM2 - 26.0 * uM3) / (6.0 * h))
    s1 = GhostCells(3.0 * uM - 3.0 * uM1 + uM2,
                    6.0 * uM - 8.0 * uM1 + 3.0 * uM2,
                    (5.0 * uM - 8.0 * uM1 + 3.0 * uM2) / (2.0 * h),
                    (7.0 * uM - 12.0 * uM1 + 5.0 * uM2) / (2.0 * h))
    s0 = GhostCells(2.0 * uM - uM1, 3.0 * uM - 2.0 * uM1, (uM - uM1) / h, (uM - uM1) / h)
    return s0, s1, s2


def outflow_indicators(uM3, uM2, uM1, uM):
    uM3, uM2, uM1, uM = (np.asarray(v, dtype=float) for v in (uM3, uM2, uM1, uM))
    b2 = (2107.0 * uM * uM - 9402.0 * uM * uM1 + 7042.0 * uM * uM2 - 1854.0 * uM * uM3
          + 11003.0 * uM1 * uM1 - 17246.0 * uM1 * uM2 + 4642.0 * uM1 * uM3
          + 7043.0 * uM2 * uM2 - 3882.0 * uM2 * uM3 + 547.0 * uM3 * uM3) / 240.0
    b1 = (10.0 * uM * uM - 31.0 * uM * uM1 + 11.0 * uM * uM2 + 25.0 * uM1 * uM1
          - 19.0 * uM1 * uM2 + 4.0 * uM2 * uM2) / 3.0
    b0 = (uM - uM1) ** 2
    return b0, b1, b2


def outflow_ghosts(uM3, uM2, uM1, uM, h, weno=False, eps=ILW_EPS) -> GhostCells:
    """Outflow ghosts by cubic extrapolation, optionally with stencil selection."""
    cands = outflow_candidates(uM3, uM2, uM1, uM, h)
    if not weno:
        return cands[2]
    w = ilw_weights(outflow_indicators(uM3, uM2, uM1, uM), h, eps)
    return GhostCells(*(sum(wr * c[i] for wr, c in zip(w, cands)) for i in range(4)))


# --------------------------------------------------------- Euler systems

def system_boundary(ubar, du, h, side, kind, g: GasConstants = GasConstants(),
                    state: Optional[Primitive] = None, weno=False):
    """Two layers of ghost cells for the conserved Euler variables.

    ``ubar`` and ``du`` hold the interior cells, shape (3, N).  ``side`` is
    "left" or "right"; ``kind`` is "wall", "outflow", "transmissive" or
    "inflow".  Outflow extrapolates the cubic through the last averages;
    transmissive copies the edge cell with zero slope, which stays stable
    where the flow at an open end is subsonic and nearly uniform.  Inflow
    prescribes ``state``: for subsonic inflow density and velocity are
    imposed and the pressure is extrapolated (one outgoing characteristic),
    for supersonic inflow the whole state is imposed.

    Returns (ghost_ubar, ghost_du), shape (3, 2), nearest ghost first.
    """
    ubar = np.asarray(ubar, dtype=float)
    du = np.asarray(du, dtype=float)
    if side == "left":
        ub, db, sgn = ubar[:, :4], du[:, :4], -1.0
    elif side == "right":
        ub, db, sgn = ubar[:, ::-1][:, :4], du[:, ::-1][:, :4], 1.0
    else:
        raise ValueError("side must be 'left' or 'right'")
    # ub[:, 0] is the cell touching the boundary, ub[:, 1] the next one
    if kind == "wall":
        # density and energy are even about the wall, momentum is odd
        parity = np.array([1.0, -1.0, 1.0])[:, None]
        gu = parity * ub[:, :2]
        gd = -parity * db[:, :2]
    elif kind == "outflow":
        gc = outflow_ghosts(ub[:, 3], ub[:, 2], ub[:, 1], ub[:, 0], h, weno=weno)
        gu = np.stack([gc.u1, gc.u2], axis=1)
        # the extrapolation formulas differentiate along the outward normal
        gd = sgn * np.stack([gc.du1, gc.du2], axis=1)
    elif kind == "transmissive":
        gu = np.repeat(ub[:, :1], 2, axis=1)
        gd = np.zeros((ub.shape[0], 2))
    elif kind == "inflow":
        if state is None:
            raise ValueError("inflow boundary needs a prescribed state")
        gu, gd = _inflow_ghosts(ub, h, g, state, sgn)
    else:
        raise ValueError(f"unknown boundary kind {kind!r}")
    w = cons_to_prim(gu, g)
    if np.any(np.asarray(w.rho) <= 0) or np.any(np.asarray(w.p) <= 0):
        raise PositivityError("non-positive ghost state")
    return gu, gd


def dirichlet_ghosts(gb, u0, u1, u2, h) -> GhostCells:
    """Ghosts from the cubic through a boundary point value and three averages.

    Coordinates run into the domain from the boundary; the derivatives are
    taken along that direction.
    """
    gb, u0, u1, u2 = (np.asarray(v, dtype=float) for v in (gb, u0, u1, u2))
    return GhostCells((12.0 * gb - 13.0 * u0 + 5.0 * u1 - u2) / 3.0,
                      (48.0 * gb - 70.0 * u0 + 32.0 * u1 - 7.0 * u2) / 3.0,
                      (-132.0 * gb + 197.0 * u0 - 82.0 * u1 + 17.0 * u2) / (18.0 * h),
                      (-312.0 * gb + 509.0 * u0 - 256.0 * u1 + 59.0 * u2) / (18.0 * h))


def _inflow_ghosts(ub, h, g, state, sgn):
    rho, u, p = (float(v) for v in state)
    c = np.sqrt(g.gamma * p / rho)
    # velocity component pointing into the domain
    into = -sgn * u
    if into <= 0:
        raise ValueError("prescribed inflow state does not enter the domain")
    wi = np.asarray(cons_to_prim(ub, g), dtype=float)
    gu = np.empty((3, 2))
    gdw = np.empty((3, 2))
    comps = [(0, rho), (1, u)] + ([(2, p)] if into >= c else [])
    for k, val in comps:
        gc = dirichlet_ghosts(val, wi[k, 0], wi[k, 1], wi[k, 2], h)
        gu[k] = (gc.u1, gc.u2)
        gdw[k] = (-sgn * gc.du1, -sgn * gc.du2)
    if into < c:
        # one outgoing characteristic: the pressure is extrapolated
        # (linear: the cubic extrapolant feeds a reflection instability)
        s = wi[2, 0] - wi[2, 1]
        gu[2] = (wi[2, 0] + s, wi[2, 0] + 2.0 * s)
        gdw[2] = (sgn * s / h, sgn * s / h)
    if np.any(gu[0] <= 0) or np.any(gu[2] <= 0):
        raise PositivityError("non-positive inflow ghost state")
    cons = np.asarray(prim_to_cons(Primitive(*gu), g), dtype=float)
    r, v = gu[0], gu[1]
    dr, dv, dp = gdw
    dcons = np.stack([dr, dr * v + r * dv,
                      dp / (g.gamma - 1.0) + 0.5 * dr * v * v + r * v * dv])
    return cons, dcons
