"""Finite-volume drivers built on interface (value, time derivative) pairs.

1-D: scalar advection, Burgers and Euler in a duct of variable area, with
minmod or HWENO5 reconstruction and several time-stepping choices.  Each
stage needs one reconstruction sweep and one sweep of local GRP solves; the
two-stage fourth-order step therefore costs two sweeps.

The cell-averaged derivatives Delta u_j are carried along with the averages
and advanced from the interface history:
Delta u_j^{n+1} = (u^{n+1}_{j+1/2} - u^{n+1}_{j-1/2}) / h, the interface
values being advanced with the GRP pairs of the step.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Optional

import numpy as np

from .boundary import (InflowData, first_interface_derivative, ilw_inflow_ghosts,
                       ilw_inflow_ghosts_weno, intermediate_stage_boundary,
                       outflow_ghosts, system_boundary)
from .errors import PositivityError, ValidationError
from .euler_model import GasConstants, Primitive
from .integrator import StagePair
from .lw_solvers import (characteristic_projectors, euler_flux, euler_flux_rate, grp_arrays,
                         linear_scalar_grp)
from .reconstruction import (EdgeData, characteristic_reconstruct, hweno5_interfaces, minmod,
                             minmod_interfaces)

RECONSTRUCTIONS = ("minmod", "hweno5")
SOLVERS = ("nonlinear", "acoustic")
STEPPINGS = ("two_stage_4", "rk2", "single_stage_2", "rk4")
BASES = ("characteristic", "primitive")
NG = 2


# ------------------------------------------------------------------ meshes

@dataclass(frozen=True)
class Mesh1D:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 1 or not self.x_max > self.x_min:
            raise ValidationError("mesh needs n >= 1 and x_max > x_min")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n) + 0.5) * self.h

    @property
    def edges(self) -> np.ndarray:
        return self.x_min + np.arange(self.n + 1) * self.h


@dataclass(frozen=True)
class Mesh2D:
    bounds: tuple  # (x_min, x_max, y_min, y_max)
    nx: int
    ny: int

    @property
    def hx(self) -> float:
        return (self.bounds[1] - self.bounds[0]) / self.nx

    @property
    def hy(self) -> float:
        return (self.bounds[3] - self.bounds[2]) / self.ny

    @property
    def xc(self) -> np.ndarray:
        return self.bounds[0] + (np.arange(self.nx) + 0.5) * self.hx

    @property
    def yc(self) -> np.ndarray:
        return self.bounds[2] + (np.arange(self.ny) + 0.5) * self.hy


@dataclass(frozen=True)
class SchemeConfig:
    cfl: float = 0.5
    reconstruction: str = "hweno5"
    solver: str = "nonlinear"
    stepping: str = "two_stage_4"
    transversal: bool = True
    basis: str = "characteristic"
    alpha: float = 1.9

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValidationError(f"cfl must lie in (0, 1), got {self.cfl}")
        for name, allowed in (("reconstruction", RECONSTRUCTIONS), ("solver", SOLVERS),
                              ("stepping", STEPPINGS), ("basis", BASES)):
            if getattr(self, name) not in allowed:
                raise ValidationError(f"{name} must be one of {allowed}, got "
                                      f"{getattr(self, name)!r}")
        if not 0.0 <= self.alpha < 2.0:
            raise ValidationError("alpha must lie in [0, 2)")


class Field1D(NamedTuple):
    """Cell averages and averaged derivatives, shape (nvar, N)."""
    ubar: np.ndarray
    du: np.ndarray


class StageResult(NamedTuple):
    L: np.ndarray
    dtL: np.ndarray
    U0: np.ndarray   # interface values (conserved), shape (nvar, N+1)
    Ut: np.ndarray   # their time derivatives
    F: np.ndarray
    dF: np.ndarray

    @property
    def pair(self) -> StagePair:
        return StagePair(self.L, self.dtL)


class StageContext(NamedTuple):
    t: float       # time the stage data represent
    dt: float      # full step size
    stage: int     # 0: data at t^n, 1: intermediate data


# ------------------------------------------------------------------ models

class Advection:
    nvar = 1

    def __init__(self, a: float = 1.0):
        self.a = float(a)

    def flux(self, u):
        return self.a * u

    def dflux(self, u):
        return self.a + 0.0 * u

    def max_speed(self, ubar):
        return abs(self.a)

    def interface(self, e: EdgeData, xI, mode):
        u0, ut = linear_scalar_grp(self.a, 0.0, e.left, e.right, e.dleft, e.dright)
        return u0, ut, self.a * u0, self.a * ut


def burgers_grp(ul, ur, dl, dr):
    """Scalar GRP pair for u_t + (u^2/2)_x = 0 at x = 0."""
    ul, ur, dl, dr = (np.asarray(v, dtype=float) for v in (ul, ur, dl, dr))
    shock = ul > ur
    s = 0.5 * (ul + ur)
    take_left = np.where(shock, s >= 0, ul >= 0)
    take_right = np.where(shock, s < 0, ur <= 0)
    sonic = ~shock & (ul < 0) & (ur > 0)
    u0 = np.where(take_left, ul, np.where(take_right, ur, 0.0))
    slope = np.where(take_left, dl, dr)
    ut = np.where(sonic, 0.0, -u0 * slope)
    return u0, ut


class Burgers:
    nvar = 1

    def flux(self, u):
        return 0.5 * u * u

    def dflux(self, u):
        return u

    def max_speed(self, ubar):
        return float(np.max(np.abs(ubar)))

    def interface(self, e: EdgeData, xI, mode):
        u0, ut = burgers_grp(e.left, e.right, e.dleft, e.dright)
        return u0, ut, 0.5 * u0 * u0, u0 * ut


def _prim(U, g, where=""):
    rho, mom, ener = U
    bad = ~(rho > 0)
    u = mom / np.where(bad, 1.0, rho)
    p = (g.gamma - 1.0) * (ener - 0.5 * mom * u)
    bad |= ~(p > 0)
    if np.any(bad):
        idx = np.unravel_index(np.flatnonzero(bad)[0], bad.shape)
        raise PositivityError(f"non-positive density or pressure {where} at index "
                              f"{tuple(int(i) for i in idx)}")
    return rho, u, p


def _dprim(U, dU, w, g):
    rho, u, _ = w
    dr, dm, dE = dU
    du = (dm - u * dr) / rho
    dp = (g.gamma - 1.0) * (dE - u * dm + 0.5 * u * u * dr)
    return dr, du, dp


def cons_rate(w, wt, g):
    """Time derivative of the conserved variables from primitive rates."""
    rho, u, p = w
    rt, ut, pt = wt
    return np.stack([rt, rt * u + rho * ut,
                     pt / (g.gamma - 1.0) + 0.5 * rt * u * u + rho * u * ut])


def cons_from_prim(w, g):
    rho, u, p = (np.asarray(v, dtype=float) for v in w)
    return np.stack([rho, rho * u, p / (g.gamma - 1.0) + 0.5 * rho * u * u])


class EulerDuct:
    """Euler equations in a duct of cross-section A(x); A = 1 if omitted."""

    nvar = 3

    def __init__(self, gamma: float = 1.4, area: Optional[Callable] = None,
                 darea: Optional[Callable] = None):
        self.gas = GasConstants(gamma)
        if (area is None) != (darea is None):
            raise ValidationError("area and its derivative must be given together")
        self.area = area
        self.darea = darea

    def max_speed(self, ubar):
        rho, u, p = _prim(ubar, self.gas, "in cell")
        return float(np.max(np.abs(u) + np.sqrt(self.gas.gamma * p / rho)))

    def A(self, x):
        return np.ones_like(np.asarray(x, dtype=float)) if self.area is None else self.area(x)

    def k(self, x):
        if self.area is None:
            return np.zeros_like(np.asarray(x, dtype=float))
        return self.darea(x) / self.area(x)

    def cell_area(self, mesh: Mesh1D):
        if self.area is None:
            return np.ones(mesh.n)
        xg, wg = np.polynomial.legendre.leggauss(5)
        xs = mesh.centers[:, None] + 0.5 * mesh.h * xg[None, :]
        return 0.5 * (self.area(xs) * wg[None, :]).sum(axis=1)

    def interface(self, e: EdgeData, xI, mode):
        g = self.gas
        wl = _prim(e.left, g, "in left edge state")
        wr = _prim(e.right, g, "in right edge state")
        dwl = _dprim(e.left, e.dleft, wl, g)
        dwr = _dprim(e.right, e.dright, wr, g)
        value, ddt = grp_arrays(wl, dwl, wr, dwr, self.k(xI), g, mode)
        A = self.A(xI)
        F = A * euler_flux(value, g)
        dF = A * euler_flux_rate(value, ddt, g)
        return cons_from_prim(value, g), cons_rate(value, ddt, g), F, dF

    def source(self, U0, Ut, mesh: Mesh1D):
        """Momentum source from the area variation and its time derivative.

        (A_{j+1/2} - A_{j-1/2})/h times the mean interface pressure: exact
        for a fluid at rest, so the rest state is preserved to round-off.
        """
        if self.area is None:
            return None
        g = self.gas
        xI = mesh.edges
        dA = np.diff(self.A(xI)) / mesh.h
        rho, u, p = _prim(U0, g, "at interface")
        dU = Ut
        pt = (g.gamma - 1.0) * (dU[2] - u * dU[1] + 0.5 * u * u * dU[0])
        S = np.zeros((3, mesh.n))
        dS = np.zeros((3, mesh.n))
        S[1] = dA * 0.5 * (p[1:] + p[:-1])
        dS[1] = dA * 0.5 * (pt[1:] + pt[:-1])
        return S, dS


# -------------------------------------------------------------- boundaries

class PeriodicBoundary:
    def pad(self, model, ubar, du, h, ctx):
        idx = np.r_[np.arange(-NG, 0), np.arange(ubar.shape[1]),
                    np.arange(NG)] % ubar.shape[1]
        return ubar[:, idx], du[:, idx]

    def adjust(self, model, edge, ubar, h, ctx):
        return edge, {}

    def final_values(self, model, t_next):
        return {}


class ScalarInflowOutflow:
    """Inflow (inverse Lax-Wendroff) on the left, extrapolation on the right.

    ``correct`` switches the third-derivative shift of the boundary value
    at the intermediate stage; ``weno`` switches stencil selection.
    """

    def __init__(self, inflow: InflowData, weno: bool = False, correct: bool = True):
        self.inflow = inflow
        self.weno = weno
        self.correct = correct

    def _g(self, ctx):
        d = self.inflow
        if ctx.stage == 0:
            return d.g(ctx.t), d.dg(ctx.t)
        return intermediate_stage_boundary(d.g, d.dg, ctx.t, ctx.dt, d.d3g, self.correct)

    def pad(self, model, ubar, du, h, ctx):
        gv, dgv = self._g(ctx)
        fp = self.inflow.fprime
        ghost = ilw_inflow_ghosts_weno if self.weno else ilw_inflow_ghosts
        gl = ghost(gv, dgv, fp, ubar[0, 0], ubar[0, 1], h)
        gr = outflow_ghosts(ubar[0, -4], ubar[0, -3], ubar[0, -2], ubar[0, -1], h,
                            weno=self.weno)
        pu = np.concatenate([[gl.u2, gl.u1], ubar[0], [gr.u1, gr.u2]])[None, :]
        pd = np.concatenate([[gl.du2, gl.du1], du[0], [gr.du1, gr.du2]])[None, :]
        return pu, pd

    def adjust(self, model, edge, ubar, h, ctx):
        gv, dgv = self._g(ctx)
        if ctx.stage == 1:
            d1 = first_interface_derivative(gv, dgv, self.inflow.fprime,
                                            ubar[0, 0], ubar[0, 1], ubar[0, 2], h)
            dl = edge.dleft.copy()
            dr = edge.dright.copy()
            dl[0, 1] = d1
            dr[0, 1] = d1
            edge = EdgeData(edge.left, edge.right, dl, dr)
        u0 = np.array([gv])
        ut = np.array([dgv])
        return edge, {0: (u0, ut, model.flux(u0), model.dflux(u0) * ut)}

    def final_values(self, model, t_next):
        return {0: np.array([self.inflow.g(t_next)])}


class EulerBoundary:
    """Wall / outflow / inflow ghost layers for the 1-D Euler system."""

    def __init__(self, left: str = "outflow", right: str = "outflow",
                 left_state: Optional[Primitive] = None,
                 right_state: Optional[Primitive] = None, weno: bool = False):
        self.left, self.right = left, right
        self.left_state, self.right_state = left_state, right_state
        self.weno = weno

    def pad(self, model, ubar, du, h, ctx):
        g = model.gas
        gl, gdl = system_boundary(ubar, du, h, "left", self.left, g, self.left_state, self.weno)
        gr, gdr = system_boundary(ubar, du, h, "right", self.right, g, self.right_state,
                                  self.weno)
        pu = np.concatenate([gl[:, ::-1], ubar, gr], axis=1)
        pd = np.concatenate([gdl[:, ::-1], du, gdr], axis=1)
        return pu, pd

    def adjust(self, model, edge, ubar, h, ctx):
        return edge, {}

    def final_values(self, model, t_next):
        return {}


# ---------------------------------------------------------------- assembly

@dataclass
class Counters:
    reconstructions: int = 0
    stages: int = 0
    steps: int = 0


def compute_dt(field, mesh, cfl: float, model) -> float:
    """Time step from the CFL condition."""
    if isinstance(mesh, Mesh2D):
        smax = model.max_speed(field)
        h = min(mesh.hx, mesh.hy)
    else:
        ubar = field.ubar if isinstance(field, Field1D) else field
        smax = model.max_speed(ubar)
        h = mesh.h
    if not np.isfinite(smax):
        raise PositivityError("non-finite wave speed")
    if smax <= 0.0:
        return np.inf
    return cfl * h / smax


def _minmod_edges(pu, pd, h, alpha):
    hist = np.concatenate([np.zeros((pu.shape[0], 1)), np.cumsum(h * pd, axis=1)], axis=1)
    return minmod_interfaces(pu, hist, h, NG, alpha)


def reconstruct(model, pu, pd, h, config: SchemeConfig):
    if config.reconstruction == "minmod":
        if not isinstance(model, EulerDuct):
            return _minmod_edges(pu, pd, h, config.alpha)
        # limit (rho, u, p): edge densities and pressures then lie between
        # neighbouring cell values
        g = model.gas
        w = _prim(pu, g, "in cell")
        e = _minmod_edges(np.stack(w), np.stack(_dprim(pu, pd, w, g)), h, config.alpha)
        return EdgeData(cons_from_prim(e.left, g), cons_from_prim(e.right, g),
                        cons_rate(e.left, e.dleft, g), cons_rate(e.right, e.dright, g))
    if isinstance(model, EulerDuct):
        return characteristic_reconstruct(pu, pd, h, model.gas, NG, config.basis)
    return hweno5_interfaces(pu, pd, h, NG)


def assemble_stage_1d(field: Field1D, mesh: Mesh1D, config: SchemeConfig, boundary,
                      t: float, model, dt: float = 0.0, stage: int = 0,
                      counters: Optional[Counters] = None) -> StageResult:
    """Spatial operator L and its time derivative for one stage."""
    ubar = np.atleast_2d(np.asarray(field.ubar, dtype=float))
    du = np.atleast_2d(np.asarray(field.du, dtype=float))
    h = mesh.h
    ctx = StageContext(t, dt, stage)
    pu, pd = boundary.pad(model, ubar, du, h, ctx)
    edge = reconstruct(model, pu, pd, h, config)
    if counters is not None:
        counters.reconstructions += 1
        counters.stages += 1
    edge, fixed = boundary.adjust(model, edge, ubar, h, ctx)
    U0, Ut, F, dF = (np.atleast_2d(np.asarray(v, dtype=float))
                     for v in model.interface(edge, mesh.edges, config.solver))
    for i, (u0, ut, f, df) in fixed.items():
        U0[:, i], Ut[:, i], F[:, i], dF[:, i] = u0, ut, f, df
    if isinstance(model, EulerDuct) and model.area is not None:
        Abar = model.cell_area(mesh)
        S, dS = model.source(U0, Ut, mesh)
        L = (-np.diff(F, axis=1) / h + S) / Abar
        dL = (-np.diff(dF, axis=1) / h + dS) / Abar
    else:
        L = -np.diff(F, axis=1) / h
        dL = -np.diff(dF, axis=1) / h
    return StageResult(L, dL, U0, Ut, F, dF)


def _apply_final(values, fixed):
    for i, v in fixed.items():
        values[:, i] = v
    return values


def advance_1d(field: Field1D, mesh: Mesh1D, config: SchemeConfig, boundary, t: float,
               dt: float, model, counters: Optional[Counters] = None,
               return_stages: bool = False):
    """One time step; returns the new Field1D (and the stage results)."""
    w = np.atleast_2d(np.asarray(field.ubar, dtype=float))
    d = np.atleast_2d(np.asarray(field.du, dtype=float))
    h = mesh.h
    asm = lambda f, tt, st: assemble_stage_1d(f, mesh, config, boundary, tt, model, dt, st,
                                              counters)
    s0 = asm(Field1D(w, d), t, 0)
    stages = [s0]
    if config.stepping == "two_stage_4":
        ws = w + 0.5 * dt * s0.L + 0.125 * dt * dt * s0.dtL
        Is = s0.U0 + 0.5 * dt * s0.Ut
        s1 = asm(Field1D(ws, np.diff(Is, axis=1) / h), t + 0.5 * dt, 1)
        stages.append(s1)
        wn = w + dt * s0.L + dt * dt / 6.0 * (s0.dtL + 2.0 * s1.dtL)
        # midpoint rule with the intermediate-stage rate
        In = s0.U0 + dt * s1.Ut
    elif config.stepping == "single_stage_2":
        wn = w + dt * s0.L + 0.5 * dt * dt * s0.dtL
        In = s0.U0 + dt * s0.Ut
    elif config.stepping == "rk2":
        w1 = w + dt * s0.L
        d1 = d + dt * np.diff(s0.Ut, axis=1) / h
        s1 = asm(Field1D(w1, d1), t + dt, 1)
        stages.append(s1)
        wn = 0.5 * (w + w1 + dt * s1.L)
        dn = 0.5 * (d + d1 + dt * np.diff(s1.Ut, axis=1) / h)
        In = None
    else:  # rk4 wrapper, L only
        ks, kd = [s0.L], [np.diff(s0.Ut, axis=1) / h]
        for c, st in ((0.5, 1), (0.5, 1), (1.0, 1)):
            si = asm(Field1D(w + c * dt * ks[-1], d + c * dt * kd[-1]), t + c * dt, st)
            stages.append(si)
            ks.append(si.L)
            kd.append(np.diff(si.Ut, axis=1) / h)
        wn = w + dt / 6.0 * (ks[0] + 2 * ks[1] + 2 * ks[2] + ks[3])
        dn = d + dt / 6.0 * (kd[0] + 2 * kd[1] + 2 * kd[2] + kd[3])
        In = None
    if In is not None:
        In = _apply_final(In, boundary.final_values(model, t + dt))
        dn = np.diff(In, axis=1) / h
    if counters is not None:
        counters.steps += 1
    out = Field1D(wn, dn)
    return (out, stages) if return_stages else out


# ----------------------------------------------------- 2-D linear waves

class WaveSystemState(NamedTuple):
    """(p, u, v) cell averages and cell gradients, each shape (3, nx, ny)."""
    q: np.ndarray
    gx: np.ndarray
    gy: np.ndarray


WAVE_VARIANTS = ("GRP2D", "RK2", "GRP1D")


def wave_matrices(c0: float = 1.0):
    A = c0 * np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    B = c0 * np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    return A, B


def _mm(M, v):
    return np.tensordot(M, v, 1)


def wave_slopes(q, mesh: Mesh2D, alpha: float = 1.0):
    """Cell gradients from neighbouring averages; ``alpha=None`` leaves them unlimited."""
    out = []
    for ax, h in ((1, mesh.hx), (2, mesh.hy)):
        dl = q - np.roll(q, 1, axis=ax)
        dr = np.roll(q, -1, axis=ax) - q
        if alpha is None:
            out.append(0.5 * (dl + dr) / h)
        else:
            out.append(minmod(alpha * dl, 0.5 * (dl + dr), alpha * dr) / h)
    return out


@lru_cache(maxsize=8)
def _wave_operators(c0):
    A, B = wave_matrices(c0)
    return ((A, B) + characteristic_projectors(A), (B, A) + characteristic_projectors(B))


def _wave_interface_pairs(st: WaveSystemState, mesh: Mesh2D, c0, transversal):
    ops_x, ops_y = _wave_operators(float(c0))
    res = []
    for ax, h, ops, gn, gt in ((1, mesh.hx, ops_x, st.gx, st.gy),
                               (2, mesh.hy, ops_y, st.gy, st.gx)):
        M, T, Pp, Pm, Mp, Mm = ops
        ul = st.q + 0.5 * h * gn
        ur = np.roll(st.q - 0.5 * h * gn, -1, axis=ax)
        u0 = _mm(Pp, ul) + _mm(Pm, ur)
        ut = -_mm(Mp, gn) - _mm(Mm, np.roll(gn, -1, axis=ax))
        if transversal:
            gt0 = _mm(Pp, gt) + _mm(Pm, np.roll(gt, -1, axis=ax))
            ut = ut - _mm(T, gt0)
        res.append((ax, h, M, u0, ut))
    return res


def wave_system_step_2d(state: WaveSystemState, mesh: Mesh2D, variant: str, dt: float,
                        c0: float = 1.0, alpha: float | None = None,
                        slopes: str = "central") -> WaveSystemState:
    """One step of the periodic 2-D linear wave system.

    GRP2D: one-step GRP update whose interface time derivative includes the
    transversal term; GRP1D drops it; RK2 is a two-stage method of lines
    with upwind (Riemann) fluxes of reconstructed states.  Gradients are
    rebuilt from the averages (central, optionally minmod-limited with
    ``alpha``); ``slopes="history"`` makes the GRP variants difference the
    interface values at the new time level instead.  Unlimited history
    gradients admit growing gradient-only modes, hence the central default.
    """
    if slopes not in ("central", "history"):
        raise ValidationError("slopes must be 'central' or 'history'")
    if variant not in WAVE_VARIANTS:
        raise ValidationError(f"variant must be one of {WAVE_VARIANTS}")
    if variant == "RK2":
        def rhs(q):
            gx, gy = wave_slopes(q, mesh, alpha)
            L = np.zeros_like(q)
            for ax, h, M, u0, _ in _wave_interface_pairs(WaveSystemState(q, gx, gy), mesh,
                                                        c0, False):
                F = _mm(M, u0)
                L -= (F - np.roll(F, 1, axis=ax)) / h
            return L
        q1 = state.q + dt * rhs(state.q)
        q2 = 0.5 * (state.q + q1 + dt * rhs(q1))
        gx, gy = wave_slopes(q2, mesh, alpha)
        return WaveSystemState(q2, gx, gy)
    pairs = _wave_interface_pairs(state, mesh, c0, variant == "GRP2D")
    q = state.q.copy()
    grads = []
    for ax, h, M, u0, ut in pairs:
        F = _mm(M, u0 + 0.5 * dt * ut)
        q -= dt * (F - np.roll(F, 1, axis=ax)) / h
        hist = u0 + dt * ut
        grads.append((hist - np.roll(hist, 1, axis=ax)) / h)
    if slopes == "central":
        gx, gy = wave_slopes(q, mesh, alpha)
    else:
        # limited slopes with the interface-history difference as middle argument
        gx, gy = [minmod_history(q, g, ax, h, alpha)
                  for g, (ax, h, *_rest) in zip(grads, pairs)]
    return WaveSystemState(q, gx, gy)


def minmod_history(q, ghist, ax, h, alpha):
    if alpha is None:
        return ghist
    dl = (q - np.roll(q, 1, axis=ax)) / h
    dr = (np.roll(q, -1, axis=ax) - q) / h
    return minmod(alpha * dl, ghist, alpha * dr)


# ------------------------------------------------------------ 2-D Euler

class Field2D(NamedTuple):
    """Conserved averages (rho, rho u, rho v, E) and averaged x/y derivatives,
    each of shape (4, nx, ny)."""
    ubar: np.ndarray
    dux: np.ndarray
    duy: np.ndarray


class Euler2D:
    nvar = 4

    def __init__(self, gamma: float = 1.4, boundary=("transmissive", "transmissive")):
        self.gas = GasConstants(gamma)
        for b in boundary:
            if b not in ("transmissive", "periodic"):
                raise ValidationError("2-D boundaries are 'transmissive' or 'periodic'")
        self.boundary = tuple(boundary)

    def primitive(self, U, where="in cell"):
        rho, m, n, E = U
        bad = ~(rho > 0)
        r = np.where(bad, 1.0, rho)
        u, v = m / r, n / r
        p = (self.gas.gamma - 1.0) * (E - 0.5 * (m * u + n * v))
        bad |= ~(p > 0)
        if np.any(bad):
            idx = np.unravel_index(np.flatnonzero(bad)[0], bad.shape)
            raise PositivityError(f"non-positive density or pressure {where} at index "
                                  f"{tuple(int(i) for i in idx)}")
        return rho, u, v, p

    def conserved(self, rho, u, v, p):
        rho, u, v, p = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (rho, u, v, p)))
        return np.stack([rho, rho * u, rho * v,
                         p / (self.gas.gamma - 1.0) + 0.5 * rho * (u * u + v * v)])

    def max_speed(self, field):
        U = field.ubar if isinstance(field, Field2D) else field
        rho, u, v, p = self.primitive(U)
        c = np.sqrt(self.gas.gamma * p / rho)
        return float(max(np.max(np.abs(u) + c), np.max(np.abs(v) + c)))


def _pad2(a, ax, kind, ng=NG):
    """Ghost layers along axis ``ax`` (1 or 2) of a (nvar, nx, ny) array."""
    n = a.shape[ax]
    if kind == "periodic":
        idx = np.arange(-ng, n + ng) % n
    else:
        idx = np.clip(np.arange(-ng, n + ng), 0, n - 1)
    return np.take(a, idx, axis=ax)


def _normal_flux(rho, un, ut, p, g):
    E = p / (g.gamma - 1.0) + 0.5 * rho * (un * un + ut * ut)
    return np.stack([rho * un, rho * un * un + p, rho * un * ut, un * (E + p)])


def _normal_flux_rate(w, wt, g):
    rho, un, ut, p = w
    rt, unt, utt, pt = wt
    gg = g.gamma / (g.gamma - 1.0)
    q2 = un * un + ut * ut
    q2t = 2.0 * (un * unt + ut * utt)
    f1 = rt * un + rho * unt
    H = gg * p + 0.5 * rho * q2
    Ht = gg * pt + 0.5 * (rt * q2 + rho * q2t)
    return np.stack([f1, f1 * un + rho * un * unt + pt, f1 * ut + rho * un * utt,
                     unt * H + un * Ht])


def _cons_rate2(w, wt, g):
    rho, un, ut, p = w
    rt, unt, utt, pt = wt
    return np.stack([rt, rt * un + rho * unt, rt * ut + rho * utt,
                     pt / (g.gamma - 1.0) + 0.5 * rt * (un * un + ut * ut)
                     + rho * (un * unt + ut * utt)])


def _dprim2(U, dU, w, g):
    """Derivatives of (rho, u, v, p) from derivatives of the conserved variables."""
    rho, u, v, _ = w
    dr, dm, dn, dE = dU
    return np.stack([dr, (dm - u * dr) / rho, (dn - v * dr) / rho,
                     (g.gamma - 1.0) * (dE - u * dm - v * dn + 0.5 * (u * u + v * v) * dr)])


def _edge_solve(wl, dwl, wr, dwr, g, mode):
    """Normal GRP on (rho, un, ut, p) edge data; the tangential velocity is
    carried upwind."""
    for side, w in (("left", wl), ("right", wr)):
        bad = ~(w[0] > 0) | ~(w[3] > 0)
        if np.any(bad):
            idx = np.unravel_index(np.flatnonzero(bad)[0], bad.shape)
            raise PositivityError(f"non-positive density or pressure in {side} edge state "
                                  f"at index {tuple(int(i) for i in idx)}")
    pick = lambda i: (wl[i], wr[i])
    (r0, u0, p0), (rt, ut, pt) = grp_arrays(
        (wl[0], wl[1], wl[3]), (dwl[0], dwl[1], dwl[3]),
        (wr[0], wr[1], wr[3]), (dwr[0], dwr[1], dwr[3]), 0.0, g, mode)
    vl, vr = pick(2)
    v0 = np.where(u0 > 0, vl, np.where(u0 < 0, vr, 0.5 * (vl + vr)))
    dv = np.where(u0 > 0, dwl[2], np.where(u0 < 0, dwr[2], 0.5 * (dwl[2] + dwr[2])))
    vt = -u0 * dv
    return [np.asarray(a, dtype=float) for a in (r0, u0, v0, p0)], \
        [np.asarray(a, dtype=float) for a in (rt, ut, vt, pt)]


_GAUSS2 = 0.5 / np.sqrt(3.0)


def _sweep_x(P, SX, SY, hx, hy, g, mode, transversal):
    """Fluxes through the x-edges of interior cells.

    ``P`` is the padded (4, nx+4, ny+4) primitive array ordered
    (rho, u_n, u_t, p), ``SX``/``SY`` its limited normal/tangential slopes.
    Returns Gauss-averaged F, dF, U0 and Ut, each (4, nx+1, ny).
    """
    nx, ny = P.shape[1] - 2 * NG, P.shape[2] - 2 * NG
    i = slice(NG - 1, NG + nx)
    ip = slice(NG, NG + nx + 1)
    j = slice(NG - 1, NG + ny + 1)   # one extra row each side for transversal differences
    UL = P[:, i, j] + 0.5 * hx * SX[:, i, j]
    UR = P[:, ip, j] - 0.5 * hx * SX[:, ip, j]
    dL, dR = SX[:, i, j], SX[:, ip, j]
    wm, _ = _edge_solve(UL, dL, UR, dR, g, mode)
    F = dF = U0s = Uts = 0.0
    for sgn, side in ((-1.0, 0), (1.0, 1)):
        off = sgn * _GAUSS2 * hy
        jj = slice(1, ny + 1)
        w, wt = _edge_solve(UL[:, :, jj] + off * SY[:, i, NG:NG + ny],
                            dL[:, :, jj],
                            UR[:, :, jj] + off * SY[:, ip, NG:NG + ny],
                            dR[:, :, jj], g, mode)
        if transversal:
            # central difference of the edge-midpoint solutions bracketing the Gauss point
            lo = slice(0, ny) if side == 0 else slice(1, ny + 1)
            hi = slice(1, ny + 1) if side == 0 else slice(2, ny + 2)
            dy = [(a[:, hi] - a[:, lo]) / hy for a in wm]
            rho, un, ut, p = w
            dr, dun, dut, dp = dy
            wt = [wt[0] - (ut * dr + rho * dut),
                  wt[1] - ut * dun,
                  wt[2] - (ut * dut + dp / rho),
                  wt[3] - (ut * dp + g.gamma * p * dut)]
        F = F + 0.5 * _normal_flux(*w, g)
        dF = dF + 0.5 * _normal_flux_rate(w, wt, g)
        U0s = U0s + 0.5 * np.stack([w[0], w[0] * w[1], w[0] * w[2],
                                    w[3] / (g.gamma - 1.0)
                                    + 0.5 * w[0] * (w[1] ** 2 + w[2] ** 2)])
        Uts = Uts + 0.5 * _cons_rate2(w, wt, g)
    return F, dF, U0s, Uts


_SWAP = [0, 2, 1, 3]


def _slopes2(P, D, ax, h, alpha):
    """minmod slope with the carried derivative as middle argument."""
    dl = P - np.roll(P, 1, axis=ax)
    dr = np.roll(P, -1, axis=ax) - P
    return minmod(alpha * dl, h * D, alpha * dr) / h


class Stage2D(NamedTuple):
    L: np.ndarray
    dtL: np.ndarray
    Ix: tuple        # (U0, Ut) on x-edges, shape (4, nx+1, ny)
    Iy: tuple        # (U0, Ut) on y-edges, shape (4, nx, ny+1)
    Fx: tuple        # (F, dF) on x-edges
    Fy: tuple


def assemble_stage_2d(field: Field2D, mesh: Mesh2D, config: SchemeConfig, model: Euler2D,
                      counters: Optional[Counters] = None) -> Stage2D:
    g = model.gas
    bx, by = model.boundary
    pad = lambda a: _pad2(_pad2(a, 1, bx), 2, by)
    P, DX, DY = pad(field.ubar), pad(field.dux), pad(field.duy)
    # limit primitive variables so that edge densities and pressures stay positive
    W = np.stack(model.primitive(P))
    SX = _slopes2(W, _dprim2(P, DX, W, g), 1, mesh.hx, config.alpha)
    SY = _slopes2(W, _dprim2(P, DY, W, g), 2, mesh.hy, config.alpha)
    P = W
    if counters is not None:
        counters.reconstructions += 1
        counters.stages += 1
    Fx, dFx, U0x, Utx = _sweep_x(P, SX, SY, mesh.hx, mesh.hy, g, config.solver,
                                 config.transversal)
    # y-edges: swap axes and the momentum components so that y is the normal direction
    T = lambda a: np.swapaxes(a[_SWAP], 1, 2)
    Fy, dFy, U0y, Uty = (T(a) for a in _sweep_x(T(P), T(SY), T(SX), mesh.hy, mesh.hx,
                                                 g, config.solver, config.transversal))
    L = -np.diff(Fx, axis=1) / mesh.hx - np.diff(Fy, axis=2) / mesh.hy
    dL = -np.diff(dFx, axis=1) / mesh.hx - np.diff(dFy, axis=2) / mesh.hy
    return Stage2D(L, dL, (U0x, Utx), (U0y, Uty), (Fx, dFx), (Fy, dFy))


def _boundary_outflow(st: Stage2D, mesh: Mesh2D, weights):
    """Net flux out of the domain, weighted over the stages' (F, dF) pairs."""
    out = np.zeros(4)
    for (Fx, dFx), (Fy, dFy), (a, b) in zip((s.Fx for s in st), (s.Fy for s in st), weights):
        fx = a * Fx + b * dFx
        fy = a * Fy + b * dFy
        out += (fx[:, -1, :] - fx[:, 0, :]).sum(axis=1) * mesh.hy
        out += (fy[:, :, -1] - fy[:, :, 0]).sum(axis=1) * mesh.hx
    return out


def euler_step_2d(field: Field2D, mesh: Mesh2D, config: SchemeConfig, dt: float,
                  model: Optional[Euler2D] = None, counters: Optional[Counters] = None,
                  return_outflow: bool = False):
    """One step of the 2-D Euler solver.

    Each edge carries a normal GRP at two Gauss points; the tangential flux
    gradient enters the interface time derivative as a source, estimated by
    differencing the edge-midpoint Riemann solutions on either side of the
    Gauss point.  Reconstruction is the minmod-limited linear one with the
    carried averaged derivatives as middle argument (``config.alpha``).
    ``return_outflow`` also returns the time-integrated net boundary flux
    (4,), for conservation bookkeeping on open domains.
    """
    model = model or Euler2D()
    if config.reconstruction != "minmod":
        raise ValidationError("2-D Euler supports the minmod reconstruction only")
    if config.stepping not in ("two_stage_4", "single_stage_2"):
        raise ValidationError("2-D Euler supports two_stage_4 and single_stage_2 stepping")
    w = field.ubar
    s0 = assemble_stage_2d(field, mesh, config, model, counters)
    (U0x, Utx), (U0y, Uty) = s0.Ix, s0.Iy
    if config.stepping == "two_stage_4":
        ws = w + 0.5 * dt * s0.L + 0.125 * dt * dt * s0.dtL
        fs = Field2D(ws, np.diff(U0x + 0.5 * dt * Utx, axis=1) / mesh.hx,
                     np.diff(U0y + 0.5 * dt * Uty, axis=2) / mesh.hy)
        s1 = assemble_stage_2d(fs, mesh, config, model, counters)
        wn = w + dt * s0.L + dt * dt / 6.0 * (s0.dtL + 2.0 * s1.dtL)
        Inx, Iny = U0x + dt * s1.Ix[1], U0y + dt * s1.Iy[1]
        stages, weights = (s0, s1), ((dt, dt * dt / 6.0), (0.0, dt * dt / 3.0))
    else:
        wn = w + dt * s0.L + 0.5 * dt * dt * s0.dtL
        Inx, Iny = U0x + dt * Utx, U0y + dt * Uty
        stages, weights = (s0,), ((dt, 0.5 * dt * dt),)
    if counters is not None:
        counters.steps += 1
    out = Field2D(wn, np.diff(Inx, axis=1) / mesh.hx, np.diff(Iny, axis=2) / mesh.hy)
    if return_outflow:
        return out, _boundary_outflow(stages, mesh, weights)
    return out


def vorticity(field: Field2D, mesh: Mesh2D):
    """Cell vorticity v_x - u_y by central differences (one-sided at the edges)."""
    rho, m, n, _ = field.ubar
    u, v = m / rho, n / rho
    return (np.gradient(v, mesh.hx, axis=0) - np.gradient(u, mesh.hy, axis=1))


# ------------------------------------------------------ entropy diagnostic

def entropy_production_monitor(field_before, field_after, pairs, dt: float, h: float,
                               gamma: float = 1.4):
    """Per-cell discrete entropy production for a 1-D Euler step.

    ``pairs`` is (U0, Ut) at the N + 1 interfaces from the first stage; the
    entropy flux rho u S is evaluated at the midpoint state U0 + dt/2 Ut with
    S = ln(p / rho^gamma) / (gamma - 1).  Returns
    h (rhoS_after - rhoS_before) + dt (Q_{j+1/2} - Q_{j-1/2}); it is only
    reported, never enforced, and is NaN where a state is not physical.
    """
    def rho_s(U):
        rho, mom, ener = np.asarray(U, dtype=float)
        with np.errstate(all="ignore"):
            u = mom / rho
            p = (gamma - 1.0) * (ener - 0.5 * mom * u)
            val = rho * np.log(p / rho ** gamma) / (gamma - 1.0)
        ok = (rho > 0) & (p > 0)
        return np.where(ok, val, np.nan), np.where(ok, u, np.nan)

    ub = field_before.ubar if isinstance(field_before, Field1D) else field_before
    ua = field_after.ubar if isinstance(field_after, Field1D) else field_after
    U0, Ut = pairs
    es, u = rho_s(np.asarray(U0) + 0.5 * dt * np.asarray(Ut))
    return h * (rho_s(ua)[0] - rho_s(ub)[0]) + dt * np.diff(es * u)
