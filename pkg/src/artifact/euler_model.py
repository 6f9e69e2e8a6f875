"""Polytropic gas relations and the exact Riemann solver.

All functions accept scalars or numpy arrays and broadcast elementwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, PositivityError, VacuumError


@dataclass(frozen=True)
class GasConstants:
    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")

    @property
    def mu2(self) -> float:
        return (self.gamma - 1.0) / (self.gamma + 1.0)


class Primitive(NamedTuple):
    rho: np.ndarray
    u: np.ndarray
    p: np.ndarray


class Conserved(NamedTuple):
    rho: np.ndarray
    mom: np.ndarray
    ener: np.ndarray


class DuctGeometry(NamedTuple):
    """Cross-section area and its slope at one point (or many)."""

    A: float = 1.0
    dA: float = 0.0

    @property
    def ratio(self):
        return np.asarray(self.dA) / np.asarray(self.A)


def _check_positive(rho, p, what="state"):
    rho = np.asarray(rho, dtype=float)
    p = np.asarray(p, dtype=float)
    bad = ~((rho > 0) & (p > 0))
    if np.any(bad):
        idx = np.flatnonzero(np.atleast_1d(bad))[0]
        raise PositivityError(
            f"non-positive density or pressure in {what} at index {idx}: "
            f"rho={np.atleast_1d(rho)[idx]!r}, p={np.atleast_1d(p)[idx]!r}"
        )


def prim_to_cons(w: Primitive, g: GasConstants) -> Conserved:
    rho, u, p = (np.asarray(a, dtype=float) for a in w)
    _check_positive(rho, p)
    mom = rho * u
    ener = p / (g.gamma - 1.0) + 0.5 * rho * u * u
    return Conserved(rho, mom, ener)


def cons_to_prim(q: Conserved, g: GasConstants) -> Primitive:
    rho, mom, ener = (np.asarray(a, dtype=float) for a in q)
    if np.any(~(rho > 0)):
        _check_positive(rho, np.ones_like(rho), "conserved state")
    u = mom / rho
    p = (g.gamma - 1.0) * (ener - 0.5 * mom * u)
    _check_positive(rho, p, "conserved state")
    return Primitive(rho, u, p)


def sound_speed(w: Primitive, g: GasConstants):
    rho = np.asarray(w[0], dtype=float)
    p = np.asarray(w[2], dtype=float)
    _check_positive(rho, p)
    return np.sqrt(g.gamma * p / rho)


def entropy_slope_quantity(w: Primitive, dw: Primitive, g: GasConstants):
    """T dS/dx from the Gibbs relation, T S' = e' - (p / rho^2) rho'."""
    rho, _, p = w
    drho, _, dp = dw
    de = dp / ((g.gamma - 1.0) * rho) - p * drho / ((g.gamma - 1.0) * rho * rho)
    return de - p * drho / (rho * rho)


def riemann_invariants(w: Primitive, g: GasConstants):
    c = sound_speed(w, g)
    u = np.asarray(w[1], dtype=float)
    k = 2.0 / (g.gamma - 1.0)
    return u - k * c, u + k * c


def hugoniot(p, pbar, rhobar, g: GasConstants):
    """Velocity jump Phi and post-shock density Psi across a shock.

    (pbar, rhobar) is the state ahead of the shock, p the pressure behind it.
    """
    mu2 = g.mu2
    phi = (p - pbar) * np.sqrt((1.0 - mu2) / (rhobar * (p + mu2 * pbar)))
    psi = rhobar * (p + mu2 * pbar) / (pbar + mu2 * p)
    return phi, psi


class RiemannSolution(NamedTuple):
    p0: np.ndarray
    u0: np.ndarray
    rho0l: np.ndarray
    rho0r: np.ndarray
    left_shock: np.ndarray
    right_shock: np.ndarray
    # wave speeds; for a shock head == tail == shock speed
    left_head: np.ndarray
    left_tail: np.ndarray
    right_tail: np.ndarray
    right_head: np.ndarray

    @property
    def pattern(self):
        kind = lambda s: np.where(s, "shock", "rarefaction")
        return kind(self.left_shock), kind(self.right_shock)


def _side_function(p, rho_k, p_k, c_k, g: GasConstants):
    """Velocity change across one wave and its pressure derivative."""
    gam = g.gamma
    mu2 = g.mu2
    shock = p > p_k
    with np.errstate(invalid="ignore", divide="ignore"):
        a = (1.0 - mu2) / rho_k
        b = mu2 * p_k
        sq = np.sqrt(a / (p + b))
        fs = (p - p_k) * sq
        dfs = sq * (1.0 - 0.5 * (p - p_k) / (p + b))
        ratio = np.maximum(p, 0.0) / p_k
        z = (gam - 1.0) / (2.0 * gam)
        fr = 2.0 * c_k / (gam - 1.0) * (ratio**z - 1.0)
        dfr = ratio ** (-(gam + 1.0) / (2.0 * gam)) / (rho_k * c_k)
    return np.where(shock, fs, fr), np.where(shock, dfs, dfr)


def exact_riemann(left: Primitive, right: Primitive, g: GasConstants,
                  tol: float = 1e-12, max_iter: int = 100) -> RiemannSolution:
    """Exact solution of the Riemann problem for the polytropic Euler equations.

    Pressure root by Newton iteration inside a bisection bracket, starting
    from the two-rarefaction estimate.
    """
    rl, ul, pl = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in left))
    rr, ur, pr = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in right))
    shape = np.broadcast_shapes(rl.shape, rr.shape)
    rl, ul, pl, rr, ur, pr = (np.broadcast_to(a, shape).astype(float).ravel()
                              for a in (rl, ul, pl, rr, ur, pr))
    _check_positive(rl, pl, "left Riemann state")
    _check_positive(rr, pr, "right Riemann state")
    gam = g.gamma
    cl = np.sqrt(gam * pl / rl)
    cr = np.sqrt(gam * pr / rr)
    du = ur - ul
    k = 2.0 / (gam - 1.0)
    gap = k * (cl + cr) - du
    if np.any(gap <= 0):
        idx = np.flatnonzero(gap <= 0)[0]
        raise VacuumError(f"Riemann data generate vacuum at index {idx}")

    z = (gam - 1.0) / (2.0 * gam)
    p = ((cl + cr - 0.5 * (gam - 1.0) * du) / (cl / pl**z + cr / pr**z)) ** (1.0 / z)
    p = np.maximum(p, 1e-300)

    def fun(p):
        fL, dL = _side_function(p, rl, pl, cl, g)
        fR, dR = _side_function(p, rr, pr, cr, g)
        return fL + fR + du, dL + dR

    lo = np.zeros_like(p)
    hi = np.maximum(p, np.maximum(pl, pr))
    f_hi, _ = fun(hi)
    for _ in range(200):
        need = f_hi <= 0
        if not need.any():
            break
        hi = np.where(need, 2.0 * hi, hi)
        f_hi, _ = fun(hi)

    scale = np.maximum(1.0, np.abs(ul) + np.abs(ur) + cl + cr)
    converged = False
    for _ in range(max_iter):
        f, df = fun(p)
        lo = np.where(f < 0, p, lo)
        hi = np.where(f > 0, p, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = f / df
            pn = p - step
        bad = ~np.isfinite(pn) | (pn < lo) | (pn > hi)
        pn = np.where(bad, 0.5 * (lo + hi), pn)
        # quadratic convergence: a step this small leaves a round-off error
        done = (np.abs(step) <= 1e-13 * p) | (f == 0) | (hi - lo <= 1e-15 * p)
        p = np.where(done & bad, p, pn)
        if done.all():
            converged = True
            break
    f, _ = fun(p)
    if not converged and np.any(np.abs(f) > tol * scale):
        raise ConvergenceError("pressure iteration in exact_riemann did not converge")
    if np.any(np.abs(f) > tol * scale):
        raise ConvergenceError("exact_riemann velocity residual above tolerance")

    fL, _ = _side_function(p, rl, pl, cl, g)
    fR, _ = _side_function(p, rr, pr, cr, g)
    u0 = 0.5 * (ul + ur) + 0.5 * (fR - fL)

    mu2 = g.mu2
    lshock = p > pl
    rshock = p > pr
    rho0l = np.where(lshock, rl * (p + mu2 * pl) / (pl + mu2 * p), rl * (p / pl) ** (1.0 / gam))
    rho0r = np.where(rshock, rr * (p + mu2 * pr) / (pr + mu2 * p), rr * (p / pr) ** (1.0 / gam))
    c0l = np.sqrt(gam * p / rho0l)
    c0r = np.sqrt(gam * p / rho0r)
    with np.errstate(invalid="ignore", divide="ignore"):
        sl = np.where(np.abs(rho0l - rl) > 0, (rho0l * u0 - rl * ul) / (rho0l - rl), ul - cl)
        sr = np.where(np.abs(rho0r - rr) > 0, (rho0r * u0 - rr * ur) / (rho0r - rr), ur + cr)
    left_head = np.where(lshock, sl, ul - cl)
    left_tail = np.where(lshock, sl, u0 - c0l)
    right_tail = np.where(rshock, sr, u0 + c0r)
    right_head = np.where(rshock, sr, ur + cr)

    out = (p, u0, rho0l, rho0r, lshock, rshock, left_head, left_tail, right_tail, right_head)
    if shape == ():
        out = tuple(a[0] for a in out)
    else:
        out = tuple(a.reshape(shape) for a in out)
    return RiemannSolution(*out)


def sample_riemann(sol: RiemannSolution, left: Primitive, right: Primitive, xi,
                   g: GasConstants) -> Primitive:
    """Self-similar Riemann solution at xi = x / t."""
    gam = g.gamma
    mu2 = g.mu2
    rl, ul, pl = (np.asarray(a, dtype=float) for a in left)
    rr, ur, pr = (np.asarray(a, dtype=float) for a in right)
    xi = np.asarray(xi, dtype=float)
    cl = np.sqrt(gam * pl / rl)
    cr = np.sqrt(gam * pr / rr)
    p0, u0 = sol.p0, sol.u0

    # left fan interior: u - c = xi with psi constant
    ufl = (1.0 - mu2) * (cl + 0.5 * (gam - 1.0) * ul + xi)
    cfl = ufl - xi
    with np.errstate(invalid="ignore"):
        rfl = rl * np.abs(cfl / cl) ** (2.0 / (gam - 1.0))
        pfl = pl * np.abs(cfl / cl) ** (2.0 * gam / (gam - 1.0))
    # right fan interior: u + c = xi with phi constant
    ufr = (1.0 - mu2) * (-cr + 0.5 * (gam - 1.0) * ur + xi)
    cfr = xi - ufr
    with np.errstate(invalid="ignore"):
        rfr = rr * np.abs(cfr / cr) ** (2.0 / (gam - 1.0))
        pfr = pr * np.abs(cfr / cr) ** (2.0 * gam / (gam - 1.0))

    left_of_contact = xi <= u0
    in_left = xi < sol.left_head
    in_lfan = (~in_left) & (xi < sol.left_tail)
    in_right = xi > sol.right_head
    in_rfan = (~in_right) & (xi > sol.right_tail)

    rho = np.where(left_of_contact, sol.rho0l, sol.rho0r)
    u = np.broadcast_to(u0, np.broadcast(xi, u0).shape).astype(float)
    p = np.broadcast_to(p0, u.shape).astype(float)
    lmask = left_of_contact & in_lfan
    rho = np.where(lmask, rfl, rho)
    u = np.where(lmask, ufl, u)
    p = np.where(lmask, pfl, p)
    lmask = left_of_contact & in_left
    rho = np.where(lmask, rl, rho)
    u = np.where(lmask, ul, u)
    p = np.where(lmask, pl, p)
    rmask = (~left_of_contact) & in_rfan
    rho = np.where(rmask, rfr, rho)
    u = np.where(rmask, ufr, u)
    p = np.where(rmask, pfr, p)
    rmask = (~left_of_contact) & in_right
    rho = np.where(rmask, rr, rho)
    u = np.where(rmask, ur, u)
    p = np.where(rmask, pr, p)
    if rho.ndim == 0:
        return Primitive(float(rho), float(u), float(p))
    return Primitive(rho, u, p)
