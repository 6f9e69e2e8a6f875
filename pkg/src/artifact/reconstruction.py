"""Compact interface reconstruction.

Two families are provided:

* minmod-limited linear data whose middle slope argument comes from the
  interface history (second order);
* a Hermite-WENO interpolation (HWENO5) that uses cell averages together
  with cell-averaged derivatives on a three-cell stencil, with WENO-Z
  nonlinear weights, plus a four-point formula for interface derivatives.

Everything is vectorized: window arguments can be arrays over cells.
For systems, ``characteristic_reconstruct`` projects onto Roe-averaged
characteristic fields before the scalar procedure is applied.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import PositivityError
from .euler_model import GasConstants

HWENO_EPS = 1e-12
LINEAR_WEIGHTS = (9.0 / 80.0, 29.0 / 80.0, 21.0 / 40.0)


class Field1D(NamedTuple):
    """Cell averages and cell-averaged derivatives on a uniform mesh."""
    ubar: np.ndarray
    du: np.ndarray
    h: float


class EdgeData(NamedTuple):
    """Left/right limits at each interface and the interface derivative."""
    left: np.ndarray
    right: np.ndarray
    dleft: np.ndarray
    dright: np.ndarray


def minmod(a, b, c):
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c)))
    same = (np.sign(a) == np.sign(b)) & (np.sign(b) == np.sign(c))
    m = np.minimum(np.minimum(np.abs(a), np.abs(b)), np.abs(c))
    return np.where(same, np.sign(a) * m, 0.0)


def minmod_slope(um, u0, up, edge_left, edge_right, alpha=1.9, h=1.0):
    """Limited slope with the interface-history difference as middle argument."""
    if not 0.0 <= alpha < 2.0:
        raise ValueError("alpha must lie in [0, 2)")
    um, u0, up = (np.asarray(v, dtype=float) for v in (um, u0, up))
    mid = np.asarray(edge_right, dtype=float) - np.asarray(edge_left, dtype=float)
    return minmod(alpha * (u0 - um), mid, alpha * (up - u0)) / h


# ------------------------------------------------------------------ HWENO

def hweno5_candidates(um, u0, up, dum, dup, h):
    """Candidate values at x_{j+1/2} from the stencils S(-1), S(0), S(1)."""
    cm = -7.0 / 6.0 * um + 13.0 / 6.0 * u0 - 2.0 * h / 3.0 * dum
    c0 = -um / 6.0 + 5.0 / 6.0 * u0 + up / 3.0
    cp = u0 / 6.0 + 5.0 / 6.0 * up - h / 3.0 * dup
    return cm, c0, cp


def hweno5_smooth_value(um, u0, up, dum, dup, h):
    """Value of the degree-4 Hermite interpolant on the full stencil."""
    return (-23.0 * um + 76.0 * u0 + 67.0 * up - 9.0 * h * dum - 21.0 * h * dup) / 120.0


def hweno5_indicators(um, u0, up, dum, dup, h):
    bm = (-2.0 * um + 2.0 * u0 - h * dum) ** 2 + 13.0 / 3.0 * (-um + u0 - h * dum) ** 2
    b0 = 0.25 * (up - um) ** 2 + 13.0 / 12.0 * (-um + 2.0 * u0 - up) ** 2
    bp = (2.0 * up - 2.0 * u0 - h * dup) ** 2 + 13.0 / 3.0 * (up - u0 - h * dup) ** 2
    return bm, b0, bp


def hweno5_weights(um, u0, up, dum, dup, h, eps=HWENO_EPS):
    """WENO-Z weights (omega_-1, omega_0, omega_1)."""
    bm, b0, bp = hweno5_indicators(um, u0, up, dum, dup, h)
    tau = np.abs(bp - bm)
    alphas = [g * (1.0 + tau / (b + eps)) for g, b in zip(LINEAR_WEIGHTS, (bm, b0, bp))]
    s = alphas[0] + alphas[1] + alphas[2]
    return tuple(a / s for a in alphas)


def hweno5_edge(um, u0, up, dum, dup, h, side="left", eps=HWENO_EPS):
    """HWENO5 limit value at an edge of cell j.

    ``side="left"`` gives u_{j+1/2,-} (the left limit at the right edge);
    ``side="right"`` gives u_{j-1/2,+} by mirroring the window about x_j.
    """
    if side == "right":
        um, up = up, um
        dum, dup = -np.asarray(dup, dtype=float), -np.asarray(dum, dtype=float)
    elif side != "left":
        raise ValueError("side must be 'left' or 'right'")
    um, u0, up, dum, dup = (np.asarray(v, dtype=float) for v in (um, u0, up, dum, dup))
    w = hweno5_weights(um, u0, up, dum, dup, h, eps)
    c = hweno5_candidates(um, u0, up, dum, dup, h)
    return w[0] * c[0] + w[1] * c[1] + w[2] * c[2]


def edge_derivative(um1, u0, u1, u2, h):
    """Interface derivative at x_{j+1/2} from the four surrounding averages."""
    return (np.asarray(um1) - 15.0 * np.asarray(u0) + 15.0 * np.asarray(u1)
            - np.asarray(u2)) / (12.0 * h)


def hweno5_interfaces(ubar, du, h, ng=2, eps=HWENO_EPS):
    """Edge data at all interfaces between interior cells of a padded array.

    ``ubar`` and ``du`` carry ``ng >= 2`` ghost cells on each side along the
    last axis; the result has N + 1 entries for N interior cells.
    """
    if ng < 2:
        raise ValueError("HWENO5 needs two ghost cells")
    ubar = np.asarray(ubar, dtype=float)
    du = np.asarray(du, dtype=float)
    n = ubar.shape[-1] - 2 * ng
    # cells owning the left limit: ng-1 .. ng+n-1
    jl = np.arange(ng - 1, ng + n)
    jr = jl + 1
    left = hweno5_edge(ubar[..., jl - 1], ubar[..., jl], ubar[..., jl + 1],
                       du[..., jl - 1], du[..., jl + 1], h, "left", eps)
    right = hweno5_edge(ubar[..., jr - 1], ubar[..., jr], ubar[..., jr + 1],
                        du[..., jr - 1], du[..., jr + 1], h, "right", eps)
    dx = edge_derivative(ubar[..., jl - 1], ubar[..., jl], ubar[..., jr], ubar[..., jr + 1], h)
    return EdgeData(left, right, dx, dx)


def minmod_interfaces(ubar, edge_hist, h, ng=2, alpha=1.9):
    """Limited linear edge data.  ``edge_hist`` holds u^{n,-} at all n+1
    interior interfaces plus one per ghost layer (length N + 2*ng + 1)."""
    ubar = np.asarray(ubar, dtype=float)
    hist = np.asarray(edge_hist, dtype=float)
    n = ubar.shape[-1] - 2 * ng
    j = np.arange(1, ubar.shape[-1] - 1)
    s = np.zeros_like(ubar)
    s[..., j] = minmod_slope(ubar[..., j - 1], ubar[..., j], ubar[..., j + 1],
                             hist[..., j], hist[..., j + 1], alpha, h)
    jl = np.arange(ng - 1, ng + n)
    left = ubar[..., jl] + 0.5 * h * s[..., jl]
    right = ubar[..., jl + 1] - 0.5 * h * s[..., jl + 1]
    return EdgeData(left, right, s[..., jl], s[..., jl + 1])


# ------------------------------------------------- characteristic fields

def roe_average(ul, ur, g: GasConstants = GasConstants()):
    """Roe-averaged (u, H, c) from two conserved states (axis 0 = component)."""
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    rl, rr = ul[0], ur[0]
    if np.any(rl <= 0) or np.any(rr <= 0):
        raise PositivityError("non-positive density in Roe average")
    vl, vr = ul[1] / rl, ur[1] / rr
    pl = (g.gamma - 1.0) * (ul[2] - 0.5 * rl * vl * vl)
    pr = (g.gamma - 1.0) * (ur[2] - 0.5 * rr * vr * vr)
    if np.any(pl <= 0) or np.any(pr <= 0):
        raise PositivityError("non-positive pressure in Roe average")
    sl, sr = np.sqrt(rl), np.sqrt(rr)
    u = (sl * vl + sr * vr) / (sl + sr)
    H = (sl * (ul[2] + pl) / rl + sr * (ur[2] + pr) / rr) / (sl + sr)
    c2 = (g.gamma - 1.0) * (H - 0.5 * u * u)
    if np.any(c2 <= 0):
        raise PositivityError("non-positive Roe sound speed")
    return u, H, np.sqrt(c2)


def euler_eigenvectors(u, H, c, g: GasConstants = GasConstants()):
    """Right and left eigenvector matrices of the 1-D Euler flux Jacobian.

    Shapes are (3, 3, ...) with L @ R = I pointwise.
    """
    u, H, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (u, H, c)))
    one = np.ones_like(u)
    R = np.array([[one, one, one],
                  [u - c, u, u + c],
                  [H - u * c, 0.5 * u * u, H + u * c]])
    b1 = (g.gamma - 1.0) / (c * c)
    b2 = 0.5 * b1 * u * u
    L = np.array([[0.5 * (b2 + u / c), -0.5 * (b1 * u + 1.0 / c), 0.5 * b1],
                  [1.0 - b2, b1 * u, -b1],
                  [0.5 * (b2 - u / c), -0.5 * (b1 * u - 1.0 / c), 0.5 * b1]])
    return R, L


def _apply(M, v):
    # M: (3, 3, n), v: (3, n) -> (3, n)
    return np.einsum("ijn,jn->in", M, v)


def characteristic_reconstruct(ubar, du, h, g: GasConstants = GasConstants(), ng=2,
                               basis="characteristic", eps=HWENO_EPS):
    """HWENO5 edge data for the conserved Euler variables.

    ``ubar`` and ``du`` have shape (3, N + 2 ng).  With the characteristic
    basis every interface window is projected onto the left eigenvectors of
    the Roe average of its two adjacent cells; ``basis="primitive"`` skips
    the projection (componentwise reconstruction).
    """
    ubar = np.asarray(ubar, dtype=float)
    du = np.asarray(du, dtype=float)
    if basis not in ("characteristic", "primitive"):
        raise ValueError("basis must be 'characteristic' or 'primitive'")
    if basis == "primitive":
        return hweno5_interfaces(ubar, du, h, ng, eps)
    n = ubar.shape[-1] - 2 * ng
    jl = np.arange(ng - 1, ng + n)
    R, L = euler_eigenvectors(*roe_average(ubar[:, jl], ubar[:, jl + 1], g), g)
    win = [ubar[:, jl + s] for s in (-1, 0, 1, 2)]
    dwin = [du[:, jl + s] for s in (-1, 0, 1, 2)]
    cw = [_apply(L, v) for v in win]
    cd = [_apply(L, v) for v in dwin]
    left = hweno5_edge(cw[0], cw[1], cw[2], cd[0], cd[2], h, "left", eps)
    right = hweno5_edge(cw[1], cw[2], cw[3], cd[1], cd[3], h, "right", eps)
    dx = edge_derivative(*win, h)
    return EdgeData(_apply(R, left), _apply(R, right), dx, dx)
