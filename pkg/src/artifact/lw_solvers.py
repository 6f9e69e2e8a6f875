"""Lax-Wendroff type interface solvers.

Every solver returns the pair (interface value, instantaneous time
derivative) at t = 0+ for piecewise-linear data with a jump at x = 0:
linear scalar and system solvers, the acoustic approximation for the
Euler equations in a duct, and the nonlinear generalized Riemann problem
(GRP) solver with its sonic case.  A flux time-linearization utility for
kinetic-type solvers is included.

Euler solvers work on primitive variables (rho, u, p) and are vectorized:
every field of the input states may be a numpy array.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DegeneracyError
from .euler_model import (DuctGeometry, GasConstants, Primitive, exact_riemann,
                          sample_riemann)

ACOUSTIC_THRESHOLD = 1e-6
# pressure excess (relative) below which a wave is handled by the
# rarefaction formulas, which stay regular at zero strength
SHOCK_THRESHOLD = 1e-7
DET_TOL = 1e-14
GAMMA_BRANCH_TOL = 1e-12


class SlopedState(NamedTuple):
    w: Primitive
    dw: Primitive


class InterfacePair(NamedTuple):
    value: Primitive
    ddt: Primitive


class RarefactionCoeffs(NamedTuple):
    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    theta: np.ndarray
    G1: np.ndarray
    G2: np.ndarray
    G2bar: np.ndarray
    TdSdt: np.ndarray
    dpsidt: np.ndarray


class ShockCoeffs(NamedTuple):
    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    sigma: np.ndarray
    Phi1: np.ndarray
    Phi2: np.ndarray
    Phi3: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    H3: np.ndarray
    Lp: np.ndarray
    Lu: np.ndarray
    Lrho: np.ndarray
    j: np.ndarray
    g_rho: np.ndarray
    g_p: np.ndarray
    g_u: np.ndarray
    f: np.ndarray


def _ratio(geom):
    if geom is None:
        return 0.0
    if isinstance(geom, DuctGeometry):
        return geom.ratio
    return np.asarray(geom, dtype=float)


def _f(x):
    return np.asarray(x, dtype=float)


# ---------------------------------------------------------------- linear

def linear_scalar_grp(a, alpha, ul, ur, dul, dur):
    """Scalar u_t + a u_x = alpha u.

    Returns (u0, du/dt): the upwind value and -a * (upwind slope) + alpha u0.
    """
    a = _f(a)
    up = np.where(a > 0, 1.0, np.where(a < 0, 0.0, 0.5))
    u0 = up * _f(ul) + (1.0 - up) * _f(ur)
    ap = 0.5 * (a + np.abs(a))
    am = 0.5 * (a - np.abs(a))
    ut = -ap * _f(dul) - am * _f(dur) + _f(alpha) * u0
    return u0, ut


def characteristic_projectors(A):
    """Projectors onto the right-/left-running fields of a constant matrix.

    Returns (Pp, Pm, Ap, Am); a zero eigenvalue is split 1/2-1/2 between
    Pp and Pm, and Ap, Am are the positive and negative parts of A.
    """
    A = np.asarray(A, dtype=float)
    lam, R = np.linalg.eig(A)
    if np.any(np.abs(lam.imag) > 1e-12):
        raise np.linalg.LinAlgError("matrix has complex eigenvalues")
    lam = lam.real
    R = R.real
    if np.linalg.cond(R) > 1e12:
        raise np.linalg.LinAlgError("matrix is not diagonalizable")
    Rinv = np.linalg.inv(R)
    pos = np.where(lam > 0, 1.0, np.where(lam < 0, 0.0, 0.5))
    Pp = R @ np.diag(pos) @ Rinv
    Pm = R @ np.diag(1.0 - pos) @ Rinv
    absA = R @ np.diag(np.abs(lam)) @ Rinv
    return Pp, Pm, 0.5 * (A + absA), 0.5 * (A - absA)


def linear_system_grp(A, src, ul, ur, dul, dur):
    """u_t + A u_x = h(u) with constant diagonalizable A.

    ``src`` is a callable h(u) or a constant vector (or None).  The value is
    the characteristic upwind state; A u0 equals the split combination
    (A+|A|)/2 ul + (A-|A|)/2 ur.  States carry the component axis first.
    """
    Pp, Pm, Ap, Am = characteristic_projectors(A)
    ul, ur, dul, dur = (np.asarray(v, dtype=float) for v in (ul, ur, dul, dur))
    u0 = np.tensordot(Pp, ul, 1) + np.tensordot(Pm, ur, 1)
    ut = -np.tensordot(Ap, dul, 1) - np.tensordot(Am, dur, 1)
    if callable(src):
        ut = ut + np.asarray(src(u0), dtype=float)
    elif src is not None:
        ut = ut + np.asarray(src, dtype=float).reshape((-1,) + (1,) * (ut.ndim - 1))
    return u0, ut


# ----------------------------------------------------------- Euler helpers

def upwind_euler_ddt(w, dw, k, g: GasConstants):
    """Time derivatives of smooth data from the duct equations."""
    rho, u, p = (_f(v) for v in w)
    drho, du, dp = (_f(v) for v in dw)
    c2 = g.gamma * p / rho
    rt = -(u * drho + rho * du) - k * rho * u
    ut = -(u * du + dp / rho)
    pt = -(u * dp + rho * c2 * du) - k * rho * c2 * u
    return rt, ut, pt


def _mirror(w, dw):
    rho, u, p = w
    drho, du, dp = dw
    return (rho, -u, p), (-drho, du, -dp)


def _tds(w, dw, g):
    rho, _, p = w
    drho, _, dp = dw
    return (dp - g.gamma * p * drho / rho) / ((g.gamma - 1.0) * rho)


def acoustic_grp_euler(left: SlopedState, right: SlopedState, u0state: Primitive,
                       geom=None, g: GasConstants = GasConstants()) -> InterfacePair:
    """Acoustic approximation linearized at ``u0state``."""
    k = _ratio(geom)
    rt, ut, pt = _acoustic(left.w, left.dw, right.dw, u0state, k, g)
    value = Primitive(*(_f(v) for v in u0state))
    return InterfacePair(value, Primitive(rt, ut, pt))


def _acoustic(wl, dwl, dwr, w0, k, g):
    rho0, u0, p0 = (_f(v) for v in w0)
    drl, dul, dpl = (_f(v) for v in dwl)
    drr, dur, dpr = (_f(v) for v in dwr)
    c0 = np.sqrt(g.gamma * p0 / rho0)
    z = rho0 * c0
    wl_ = dul + dpl / z
    wr_ = dur - dpr / z
    ut = -0.5 * ((u0 + c0) * wl_ + (u0 - c0) * wr_)
    pt = -0.5 * z * ((u0 + c0) * wl_ - (u0 - c0) * wr_) - k * z * c0 * u0
    left_side = u0 >= 0
    dps = np.where(left_side, dpl, dpr)
    drs = np.where(left_side, drl, drr)
    rt = (pt + u0 * (dps - c0 * c0 * drs)) / (c0 * c0)
    # both acoustic waves on one side: upwind derivatives
    sup_r = u0 - c0 >= 0
    sup_l = u0 + c0 <= 0
    if np.any(sup_r | sup_l):
        ruL, uuL, puL = upwind_euler_ddt((rho0, u0, p0), (drl, dul, dpl), k, g)
        ruR, uuR, puR = upwind_euler_ddt((rho0, u0, p0), (drr, dur, dpr), k, g)
        rt = np.where(sup_r, ruL, np.where(sup_l, ruR, rt))
        ut = np.where(sup_r, uuL, np.where(sup_l, uuR, ut))
        pt = np.where(sup_r, puL, np.where(sup_l, puR, pt))
    return rt, ut, pt


# ------------------------------------------------------- rarefaction side

def _expm1_ratio(s, log_theta):
    """(1 - theta**s) / s, continued to -log(theta) at s = 0."""
    if abs(s) < GAMMA_BRANCH_TOL:
        return -log_theta
    return -np.expm1(s * log_theta) / s


def _g2bar(theta, cl, psil, g):
    # duct part of the fan expansion; the s -> 0 limits cover gamma = 5/3 and 3
    gam = g.gamma
    e = (3.0 - gam) / (2.0 * (gam - 1.0))
    lt = np.log(theta)
    return (psil * _expm1_ratio(e, lt)
            - 2.0 * cl * theta / (gam - 1.0) * _expm1_ratio(e - 1.0, lt)) / (2.0 * g.mu2)


def rarefaction_coeffs(left: SlopedState, beta, theta, geom=None,
                       g: GasConstants = GasConstants()) -> RarefactionCoeffs:
    """Characteristic relation a u_t + b p_t = d inside a left-facing fan.

    ``beta`` is the fan coordinate (u - c on the fan characteristic) and
    ``theta`` = c(0, beta) / c_l.
    """
    gam = g.gamma
    mu2 = g.mu2
    k = _ratio(geom)
    rl, ul, pl = (_f(v) for v in left.w)
    drl, dul, dpl = (_f(v) for v in left.dw)
    beta = _f(beta)
    theta = _f(theta)
    cl = np.sqrt(gam * pl / rl)
    psil = ul + 2.0 * cl / (gam - 1.0)
    dcl = (gam * dpl - cl * cl * drl) / (2.0 * rl * cl)
    dpsil = dul + 2.0 * dcl / (gam - 1.0)
    tds = _tds((rl, ul, pl), (drl, dul, dpl), g)
    th_mid = theta ** ((3.0 - gam) / (2.0 * (gam - 1.0)))
    th_top = theta ** ((gam + 1.0) / (gam - 1.0))
    bracket = (1.0 + mu2) / (1.0 + 2.0 * mu2) * tds - cl * dpsil
    G2bar = _g2bar(theta, cl, psil, g)
    G2 = beta * (beta + cl * theta) - (beta + 2.0 * cl * theta) * (ul * th_mid + G2bar)
    G1 = ((beta + 2.0 * cl * theta) / cl * th_mid * bracket
          - th_top * tds * (beta * (1.0 + mu2) + cl * theta) / (cl * (1.0 + 2.0 * mu2)))
    TdSdt = -(beta + cl * theta) * theta ** (2.0 * gam / (gam - 1.0)) * tds
    dpsidt = G1 + 0.5 * k * G2
    rho_f = rl * theta ** (2.0 / (gam - 1.0))
    c_f = cl * theta
    a = np.ones_like(rho_f)
    b = 1.0 / (rho_f * c_f)
    # u_t + p_t/(rho c) = psi_t - T S_t / c
    d = dpsidt - TdSdt / c_f
    return RarefactionCoeffs(a, b, d, theta, G1, G2, G2bar, TdSdt, dpsidt)


# ------------------------------------------------------------- shock side

def shock_coeffs(right: SlopedState, sol, geom=None,
                 g: GasConstants = GasConstants()) -> ShockCoeffs:
    """Shock-side relation a u_t + b p_t = d for a right-facing shock.

    ``sol`` needs fields p0, u0 and rho0r (a RiemannSolution works).
    """
    mu2 = g.mu2
    k = _ratio(geom)
    rr, ur, pr = (_f(v) for v in right.w)
    drr, dur, dpr = (_f(v) for v in right.dw)
    p0, u0, r0 = _f(sol.p0), _f(sol.u0), _f(sol.rho0r)
    cr2 = g.gamma * pr / rr
    c02 = g.gamma * p0 / r0
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma = (r0 * u0 - rr * ur) / (r0 - rr)
        root = np.sqrt((1.0 - mu2) / (rr * (p0 + mu2 * pr)))
        Phi1 = 0.5 * root * (p0 + (1.0 + 2.0 * mu2) * pr) / (p0 + mu2 * pr)
        Phi2 = -0.5 * root * ((2.0 + mu2) * p0 + mu2 * pr) / (p0 + mu2 * pr)
        Phi3 = -(p0 - pr) / (2.0 * rr) * root
        den = u0 * u0 - c02
        a = 1.0 - sigma * u0 / den - sigma * r0 * c02 / den * Phi1
        b = sigma / (r0 * den) - (1.0 - sigma * u0 / den) * Phi1
        Lp = -1.0 / rr + (sigma - ur) * Phi2
        Lu = sigma - ur - rr * cr2 * Phi2 - rr * Phi3
        Lrho = (sigma - ur) * Phi3
        j = (-(Phi2 * cr2 + Phi3) * rr * ur
             - (1.0 + Phi1 * r0 * u0) * sigma * c02 * u0 / den)
        d = Lp * dpr + Lu * dur + Lrho * drr + k * j
        q = pr + mu2 * p0
        H1 = rr * (1.0 - mu2 * mu2) * pr / (q * q)
        H2 = rr * (mu2 * mu2 - 1.0) * p0 / (q * q)
        H3 = (p0 + mu2 * pr) / q
        g_rho = u0 - sigma
        g_p = sigma / c02 - u0 * H1
        g_u = r0 * (sigma - u0) * u0 * H1
        f = ((sigma - ur) * H2 * dpr + (sigma - ur) * H3 * drr
             - rr * (H2 * cr2 + H3) * dur - k * (H2 * cr2 + H3) * rr * ur)
    return ShockCoeffs(a, b, d, sigma, Phi1, Phi2, Phi3, H1, H2, H3, Lp, Lu, Lrho,
                       j, g_rho, g_p, g_u, f)


def _shock_side_density(ut, pt, u0, r0, c0, sc: ShockCoeffs, k):
    """Density rate from the shock side using material derivatives."""
    c02 = c0 * c0
    U = (ut - k * u0 * u0 - u0 * pt / (r0 * c02)) / (1.0 - u0 * u0 / c02)
    P = pt - u0 * r0 * U
    return (u0 * sc.f - sc.g_p * P - sc.g_u * U) / sc.g_rho


def _transfer_row(a, b, d, u0, r_from, c_from, r_to, c_to, k):
    """Rewrite a row a u_t + b p_t = d from one side of the contact to the other.

    Material derivatives of u and p are continuous across the contact;
    the partial time derivatives are not.
    """
    cf2 = c_from * c_from
    ct2 = c_to * c_to
    D = ct2 - u0 * u0
    ratio = r_to * ct2 / (r_from * cf2)
    a2 = ct2 / D * (a * (1.0 - r_to * u0 * u0 / (r_from * cf2)) + b * (r_from - r_to) * u0)
    b2 = (a * (-1.0 / r_to + ct2 / (r_from * cf2)) * u0
          + b * (ct2 - r_from / r_to * u0 * u0)) / D
    d2 = d + k * u0**3 / D * (a * u0 * (1.0 - ratio) + b * (r_from - r_to) * ct2)
    return a2, b2, d2


# --------------------------------------------------------------- sonic case

def sonic_grp_euler(left: SlopedState, geom=None,
                    g: GasConstants = GasConstants()) -> InterfacePair:
    """The t-axis lies inside the left (u - c) fan."""
    k = _ratio(geom)
    value, ddt = _sonic(left.w, left.dw, k, g)
    return InterfacePair(Primitive(*value), Primitive(*ddt))


def _sonic(wl, dwl, k, g):
    gam = g.gamma
    rl, ul, pl = (_f(v) for v in wl)
    cl = np.sqrt(gam * pl / rl)
    c0 = g.mu2 * (ul + 2.0 * cl / (gam - 1.0))
    theta = c0 / cl
    u0 = c0
    r0 = rl * theta ** (2.0 / (gam - 1.0))
    p0 = pl * theta ** (2.0 * gam / (gam - 1.0))
    rc = rarefaction_coeffs(SlopedState(wl, dwl), 0.0, theta, k, g)
    tds = _tds((rl, ul, pl), dwl, g)
    ent = theta ** (2.0 * gam / (gam - 1.0)) * tds
    # the u - c family is tangent to the t-axis: its invariant rate follows
    # algebraically from the first-order fan expansion
    psit = rc.dpsidt
    phit = 0.5 * (k * c0 * u0 + ent - (3.0 - gam) / (gam + 1.0) * psit)
    ut = 0.5 * (psit + phit)
    pt = r0 * c0 * (0.5 * (psit - phit) + ent)
    rt = (pt + (gam - 1.0) * r0 * u0 * ent) / (c0 * c0)
    return (r0, u0, p0), (rt, ut, pt)


# ----------------------------------------------------------- nonlinear GRP

def nonlinear_grp_euler(left: SlopedState, right: SlopedState, geom=None,
                        g: GasConstants = GasConstants()) -> InterfacePair:
    """Nonlinear GRP solver for the Euler equations in a duct."""
    k = _ratio(geom)
    value, ddt = grp_arrays(left.w, left.dw, right.w, right.dw, k, g)
    return InterfacePair(Primitive(*value), Primitive(*ddt))


def grp_arrays(wl, dwl, wr, dwr, k, g: GasConstants, mode: str = "nonlinear"):
    """Array-level GRP; returns ((rho, u, p), (rho_t, u_t, p_t)).

    ``mode`` is "nonlinear" (default) or "acoustic".
    """
    arrs = np.broadcast_arrays(*(_f(v) for v in (*wl, *dwl, *wr, *dwr)), _f(k))
    shape = arrs[0].shape
    flat = [a.ravel().astype(float) for a in arrs]
    rl, ul, pl, drl, dul, dpl, rr, ur, pr, drr, dur, dpr, kk = flat
    value, ddt = _grp_flat(rl, ul, pl, drl, dul, dpl, rr, ur, pr, drr, dur, dpr, kk, g, mode)
    if shape == ():
        return tuple(float(v[0]) for v in value), tuple(float(v[0]) for v in ddt)
    return (tuple(v.reshape(shape) for v in value), tuple(v.reshape(shape) for v in ddt))


def _grp_flat(rl, ul, pl, drl, dul, dpl, rr, ur, pr, drr, dur, dpr, k, g, mode):
    WL = (rl, ul, pl)
    WR = (rr, ur, pr)
    sol = exact_riemann(Primitive(*WL), Primitive(*WR), g)
    v = sample_riemann(sol, Primitive(*WL), Primitive(*WR), 0.0, g)
    value = (np.asarray(v.rho, float), np.asarray(v.u, float), np.asarray(v.p, float))
    rt, ut, pt = _acoustic(WL, (drl, dul, dpl), (drr, dur, dpr), value, k, g)
    if mode == "acoustic":
        return value, (rt, ut, pt)

    scale = np.sqrt(rl * rl + ul * ul + pl * pl)
    jump = np.sqrt((rl - rr) ** 2 + (ul - ur) ** 2 + (pl - pr) ** 2) / scale
    nl = jump >= ACOUSTIC_THRESHOLD
    if not nl.any():
        return value, (rt, ut, pt)

    idx = np.flatnonzero(nl)
    sub = lambda a: a[idx]
    out = _grp_nonlinear(*(sub(a) for a in (rl, ul, pl, drl, dul, dpl, rr, ur, pr,
                                            drr, dur, dpr, k)),
                         _sub_solution(sol, idx), g)
    rt[idx], ut[idx], pt[idx] = out
    return value, (rt, ut, pt)


def _sub_solution(sol, idx):
    return type(sol)(*(np.atleast_1d(a)[idx] for a in sol))


def _grp_nonlinear(rl, ul, pl, drl, dul, dpl, rr, ur, pr, drr, dur, dpr, k, sol, g):
    gam = g.gamma
    p0, u0, r0l, r0r = sol.p0, sol.u0, sol.rho0l, sol.rho0r
    c0l = np.sqrt(gam * p0 / r0l)
    c0r = np.sqrt(gam * p0 / r0r)
    cl = np.sqrt(gam * pl / rl)
    cr = np.sqrt(gam * pr / rr)
    WL, DL = (rl, ul, pl), (drl, dul, dpl)
    WR, DR = (rr, ur, pr), (drr, dur, dpr)
    WLm, DLm = _mirror(WL, DL)
    WRm, DRm = _mirror(WR, DR)

    lshock = p0 > pl * (1.0 + SHOCK_THRESHOLD)
    rshock = p0 > pr * (1.0 + SHOCK_THRESHOLD)

    # where does the t-axis sit
    upL = np.where(sol.left_shock, sol.left_head >= 0, ul - cl >= 0)
    upR = np.where(sol.right_shock, sol.right_head <= 0, ur + cr <= 0)
    fanL = (~sol.left_shock) & (ul - cl < 0) & (u0 - c0l >= 0) & ~upL
    fanR = (~sol.right_shock) & (ur + cr > 0) & (u0 + c0r <= 0) & ~upR
    star = ~(upL | upR | fanL | fanR)

    rt = np.zeros_like(p0)
    ut = np.zeros_like(p0)
    pt = np.zeros_like(p0)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # rows in the original frame
        rc_l = rarefaction_coeffs(SlopedState(WL, DL), u0 - c0l, c0l / cl, k, g)
        sc_l = shock_coeffs(SlopedState(WLm, DLm), _StarState(p0, -u0, r0l), -k, g)
        aL = np.where(lshock, -sc_l.a, rc_l.a)
        bL = np.where(lshock, sc_l.b, rc_l.b)
        dL = np.where(lshock, sc_l.d, rc_l.d)

        sc_r = shock_coeffs(SlopedState(WR, DR), _StarState(p0, u0, r0r), k, g)
        rc_r = rarefaction_coeffs(SlopedState(WRm, DRm), -u0 - c0r, c0r / cr, -k, g)
        aR = np.where(rshock, sc_r.a, -rc_r.a)
        bR = np.where(rshock, sc_r.b, rc_r.b)
        dR = np.where(rshock, sc_r.d, rc_r.d)

        pos = u0 >= 0
        aR2, bR2, dR2 = _transfer_row(aR, bR, dR, u0, r0r, c0r, r0l, c0l, k)
        aL2, bL2, dL2 = _transfer_row(aL, bL, dL, u0, r0l, c0l, r0r, c0r, k)
        aR = np.where(pos, aR2, aR)
        bR = np.where(pos, bR2, bR)
        dR = np.where(pos, dR2, dR)
        aL = np.where(pos, aL, aL2)
        bL = np.where(pos, bL, bL2)
        dL = np.where(pos, dL, dL2)

        det = aL * bR - aR * bL
        if np.any(star & (np.abs(det) < DET_TOL)):
            raise DegeneracyError("singular 2x2 system in the nonlinear GRP solver")
        ut_s = (dL * bR - dR * bL) / det
        pt_s = (aL * dR - aR * dL) / det

        # density rate on the side of the contact that holds the t-axis
        tdsl = _tds(WL, DL, g)
        tdsr = _tds(WR, DR, g)
        e = 2.0 * gam / (gam - 1.0)
        rho_rare_l = (pt_s + (gam - 1.0) * r0l * u0 * (c0l / cl) ** e * tdsl) / (c0l * c0l)
        rho_shock_l = _shock_side_density(-ut_s, pt_s, -u0, r0l, c0l, sc_l, -k)
        rho_rare_r = (pt_s + (gam - 1.0) * r0r * u0 * (c0r / cr) ** e * tdsr) / (c0r * c0r)
        rho_shock_r = _shock_side_density(ut_s, pt_s, u0, r0r, c0r, sc_r, k)
        rt_s = np.where(pos, np.where(lshock, rho_shock_l, rho_rare_l),
                        np.where(rshock, rho_shock_r, rho_rare_r))

    rt = np.where(star, rt_s, rt)
    ut = np.where(star, ut_s, ut)
    pt = np.where(star, pt_s, pt)

    if upL.any() or upR.any():
        a = upwind_euler_ddt(WL, DL, k, g)
        b = upwind_euler_ddt(WR, DR, k, g)
        rt = np.where(upL, a[0], np.where(upR, b[0], rt))
        ut = np.where(upL, a[1], np.where(upR, b[1], ut))
        pt = np.where(upL, a[2], np.where(upR, b[2], pt))
    if fanL.any():
        _, (r1, u1, p1) = _sonic(WL, DL, k, g)
        rt = np.where(fanL, r1, rt)
        ut = np.where(fanL, u1, ut)
        pt = np.where(fanL, p1, pt)
    if fanR.any():
        _, (r1, u1, p1) = _sonic(WRm, DRm, -k, g)
        rt = np.where(fanR, r1, rt)
        ut = np.where(fanR, -u1, ut)
        pt = np.where(fanR, p1, pt)
    return rt, ut, pt


class _StarState(NamedTuple):
    p0: np.ndarray
    u0: np.ndarray
    rho0r: np.ndarray


# --------------------------------------------------------------- fluxes

def euler_flux(w, g: GasConstants):
    rho, u, p = (_f(v) for v in w)
    ener = p / (g.gamma - 1.0) + 0.5 * rho * u * u
    return np.stack([rho * u, rho * u * u + p, u * (ener + p)])


def euler_flux_rate(w, wt, g: GasConstants):
    """d/dt of the Euler flux given primitive time derivatives."""
    rho, u, p = (_f(v) for v in w)
    rt, ut, pt = (_f(v) for v in wt)
    gg = g.gamma / (g.gamma - 1.0)
    f1 = rt * u + rho * ut
    f2 = rt * u * u + 2.0 * rho * u * ut + pt
    f3 = ut * (gg * p + 0.5 * rho * u * u) + u * (gg * pt + 0.5 * rt * u * u + rho * u * ut)
    return np.stack([f1, f2, f3])


def interface_flux_pair(pair: InterfacePair, geom=None, g: GasConstants = GasConstants()):
    """Area-weighted Euler flux at the interface and its time derivative."""
    A = 1.0 if geom is None else _f(geom.A if isinstance(geom, DuctGeometry) else geom)
    F = A * euler_flux(pair.value, g)
    dF = A * euler_flux_rate(pair.value, pair.ddt, g)
    return F, dF


def flux_time_linearize(Fint_half, Fint_full, dt):
    """Fit F(t) = F_n + t dF_n to the flux integrals over (0, dt/2) and (0, dt)."""
    Fh = _f(Fint_half)
    Ff = _f(Fint_full)
    Fn = (4.0 * Fh - Ff) / dt
    dFn = 4.0 * (Ff - 2.0 * Fh) / (dt * dt)
    return Fn, dFn
