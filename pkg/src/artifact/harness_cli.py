"""Problem library, run configuration, error norms, convergence tables and
the command-line entry point."""
from __future__ import annotations

import configparser
import csv
import json
import math
import time
from dataclasses import dataclass, field as dc_field, replace
from typing import Callable, Optional

import click
import numpy as np
from scipy.optimize import brentq

from .boundary import InflowData
from .errors import SolverError, ValidationError
from .euler_model import Primitive, exact_riemann, sample_riemann
from .fv_core import (Advection, Burgers, Counters, Euler2D, EulerBoundary, EulerDuct,
                      Field1D, Field2D, Mesh1D, Mesh2D, PeriodicBoundary,
                      ScalarInflowOutflow, SchemeConfig, WAVE_VARIANTS, WaveSystemState,
                      advance_1d, compute_dt, entropy_production_monitor, euler_step_2d,
                      wave_slopes, wave_system_step_2d)

GAUSS5 = np.polynomial.legendre.leggauss(5)


class ConfigError(ValidationError):
    """Unreadable or invalid run configuration."""


# ------------------------------------------------------------ problems

@dataclass(frozen=True)
class ProblemSpec:
    id: str
    dimension: int
    equations: str
    final_time: Optional[float]
    reference: str
    description: str
    default_n: int
    scheme_defaults: dict = dc_field(default_factory=dict)


PROBLEMS = {p.id: p for p in (
    ProblemSpec("advection", 1, "advection", 1.0, "analytic",
                "u_t + u_x = 0, sin(2 pi x), periodic on [0, 1]", 80),
    ProblemSpec("burgers", 1, "burgers", 1.0, "analytic",
                "Burgers on [0, 1], inflow g(t) = 1 + 0.1 sin(pi t), outflow at x = 1", 80),
    ProblemSpec("density_wave", 1, "euler1d", 1.0, "analytic",
                "Euler density wave rho = 1 + 0.2 sin(2 pi x), u = p = 1, periodic", 80),
    ProblemSpec("sod", 1, "euler1d", 0.2, "riemann-sampler",
                "Sod shock tube on [0, 1], diaphragm at 0.5", 400),
    ProblemSpec("density_ratio", 1, "euler1d", 0.1, "riemann-sampler",
                "Riemann problem with density ratio 1e3 and pressure ratio 1e4", 200,
                {"cfl": 0.4, "reconstruction": "minmod"}),
    ProblemSpec("nozzle_supersonic", 1, "euler_duct", None, "analytic",
                "steady supersonic flow in A(x) = 1 + x^2 on [0, 1], inflow Mach 2", 50),
    ProblemSpec("nozzle_transonic", 1, "euler_duct", None, "analytic",
                "steady transonic flow in A(x) = 1 + x^2 on [-1, 1], sonic throat", 100),
    ProblemSpec("wave2d", 2, "wave2d", 2.0, "analytic",
                "periodic plane wave of the 2-D acoustic system, box [0, 16]^2, "
                "wave vector 2 pi (3, 1) / 16", 80),
    ProblemSpec("quadrant", 2, "euler2d", 0.3, "none",
                "four-state Riemann problem on [0, 1]^2 with two vortex sheets", 200,
                {"reconstruction": "minmod"}),
)}

# wave2d data
WAVE_BOX = 16.0
WAVE_VECTOR = (3.0, 1.0)
WAVE_AMPLITUDE = 0.024
WAVE_SPEED = 1.0

# quadrant data (rho, u, v, p) for quadrants NE, NW, SW, SE
QUADRANT_STATES = ((1.0, 0.1, 0.1, 1.0), (0.5197, -0.6259, 0.1, 0.4),
                   (0.8, 0.1, 0.1, 0.4), (0.5197, 0.1, -0.6259, 0.4))

BURGERS_AMPLITUDE = 0.1
SOD = (Primitive(1.0, 0.0, 1.0), Primitive(0.125, 0.0, 0.1))
DENSITY_RATIO = (Primitive(1000.0, 0.0, 1000.0), Primitive(1.0, 0.0, 0.1))


def cell_average(f: Callable, mesh):
    """Cell averages of f by 5-point Gauss quadrature (tensor product in 2-D)."""
    xg, wg = GAUSS5
    if isinstance(mesh, Mesh2D):
        X, Y = np.meshgrid(mesh.xc, mesh.yc, indexing="ij")
        s = 0.0
        for a, wa in zip(xg, wg):
            for b, wb in zip(xg, wg):
                s = s + wa * wb * f(X + 0.5 * mesh.hx * a, Y + 0.5 * mesh.hy * b)
        return s / 4.0
    xs = mesh.centers[:, None] + 0.5 * mesh.h * xg[None, :]
    vals = np.asarray(f(xs))
    return 0.5 * (vals * wg).sum(axis=-1)


def l1_error(numeric, exact: Callable, mesh) -> float:
    """sum |u_j - exact cell average| times the cell size."""
    diff = np.abs(np.asarray(numeric, dtype=float) - cell_average(exact, mesh))
    if isinstance(mesh, Mesh2D):
        return float(diff.sum() * mesh.hx * mesh.hy)
    return float(diff.sum() * mesh.h)


def burgers_exact(x, t, amp=BURGERS_AMPLITUDE):
    """Characteristic solution u = g(s) with x = (t - s) g(s), s <= t.

    Also valid for t = 0 data, where the characteristics enter at s < 0.
    """
    g = lambda s: 1.0 + amp * np.sin(np.pi * s)
    x = np.asarray(x, dtype=float)
    lo = np.full_like(x, t - x / (1.0 - amp) - 1e-9)
    hi = np.full_like(x, t + 0.0)
    for _ in range(80):
        m = 0.5 * (lo + hi)
        pos = (t - m) * g(m) - x > 0
        lo = np.where(pos, m, lo)
        hi = np.where(pos, hi, m)
    return g(0.5 * (lo + hi))


def _nozzle_state(M, gamma):
    """Isentropic state at Mach M with unit stagnation density."""
    rho = (1.0 + 0.5 * (gamma - 1.0) * M * M) ** (-1.0 / (gamma - 1.0))
    p = rho ** gamma
    return rho, M * math.sqrt(gamma * p / rho), p


def transonic_mach(x, gamma=1.4):
    """Mach number in A = 1 + x^2 with the sonic throat at x = 0,
    subsonic upstream and supersonic downstream."""
    if abs(x) < 1e-14:
        return 1.0
    e = (gamma + 1.0) / (2.0 * (gamma - 1.0))
    f = lambda M: (1.0 / M) * ((2.0 / (gamma + 1.0)) * (1.0 + 0.5 * (gamma - 1.0) * M * M)) ** e \
        - (1.0 + x * x)
    return brentq(f, 1e-8, 1.0) if x < 0 else brentq(f, 1.0, 100.0)


@dataclass
class Case:
    spec: ProblemSpec
    mesh: object
    model: object
    field: object
    boundary: object = None
    exact: Optional[Callable] = None      # exact(x[, y]) of the error variable at final time
    error_index: int = 0
    variant: str = ""
    startup_steps: int = 0   # steps run at a reduced CFL number


# cell speeds underestimate the waves of initial jumps: start Riemann problems gently
STARTUP_STEPS = 10
STARTUP_FACTOR = 0.2


def _step_size(case: Case, fld, scheme: SchemeConfig, k: int):
    dt = compute_dt(fld, case.mesh, scheme.cfl, case.model)
    return dt * STARTUP_FACTOR if k < case.startup_steps else dt


def _euler_riemann_case(spec, n, states):
    mesh = Mesh1D(0.0, 1.0, n)
    model = EulerDuct(1.4)
    left = mesh.centers < 0.5
    W = [np.where(left, a, b) for a, b in zip(*states)]
    U = _cons(W, model.gas)
    sol = exact_riemann(states[0], states[1], model.gas)
    T = spec.final_time
    exact = lambda x: np.asarray(sample_riemann(sol, states[0], states[1], (x - 0.5) / T,
                                                model.gas).rho)
    return Case(spec, mesh, model, Field1D(U, np.zeros_like(U)),
                EulerBoundary("transmissive", "transmissive"), exact,
                startup_steps=STARTUP_STEPS)


def _cons(W, g):
    rho, u, p = (np.asarray(v, dtype=float) for v in W)
    return np.stack([rho, rho * u, p / (g.gamma - 1.0) + 0.5 * rho * u * u])


def _field_from(fun, mesh):
    """Cell averages and averaged derivatives from a profile fun(x) -> (nvar, ...)."""
    ubar = np.atleast_2d(cell_average(fun, mesh))
    return Field1D(ubar, np.diff(np.atleast_2d(fun(mesh.edges)), axis=1) / mesh.h)


def build_case(name: str, n: int, final_time: Optional[float] = None,
               variant: str = "GRP2D") -> Case:
    if name not in PROBLEMS:
        raise ValidationError(f"problem: unknown problem {name!r}; see list-problems")
    spec = PROBLEMS[name]
    if final_time is not None:
        spec = replace(spec, final_time=final_time)
    T = spec.final_time
    if name == "advection":
        mesh = Mesh1D(0.0, 1.0, n)
        f = lambda x: np.sin(2 * np.pi * x)
        return Case(spec, mesh, Advection(1.0), _field_from(lambda x: f(x)[None], mesh),
                    PeriodicBoundary(), lambda x: f(x - T))
    if name == "burgers":
        mesh = Mesh1D(0.0, 1.0, n)
        a, w = BURGERS_AMPLITUDE, np.pi
        inflow = InflowData(lambda t: 1.0 + a * np.sin(w * t), lambda t: a * w * np.cos(w * t),
                            lambda u: u, lambda t: -a * w ** 3 * np.cos(w * t))
        fld = _field_from(lambda x: burgers_exact(x, 0.0)[None], mesh)
        return Case(spec, mesh, Burgers(), fld, ScalarInflowOutflow(inflow),
                    lambda x: burgers_exact(x, T))
    if name == "density_wave":
        mesh = Mesh1D(0.0, 1.0, n)
        model = EulerDuct(1.4)
        rho = lambda x, t: 1.0 + 0.2 * np.sin(2 * np.pi * (x - t))
        prof = lambda x: _cons((rho(x, 0.0), np.ones_like(x), np.ones_like(x)), model.gas)
        return Case(spec, mesh, model, _field_from(prof, mesh), PeriodicBoundary(), lambda x: rho(x, T))
    if name == "sod":
        return _euler_riemann_case(spec, n, SOD)
    if name == "density_ratio":
        return _euler_riemann_case(spec, n, DENSITY_RATIO)
    if name in ("nozzle_supersonic", "nozzle_transonic"):
        gam = 1.4
        model = EulerDuct(gam, lambda x: 1.0 + x * x, lambda x: 2.0 * x)
        if name == "nozzle_supersonic":
            mesh = Mesh1D(0.0, 1.0, n)
            inflow = (1.0, 2.0, 1.0 / gam)   # Mach 2
            point = _duct_isentropic(*inflow, gam, 1.0, supersonic=True)
        else:
            mesh = Mesh1D(-1.0, 1.0, n)
            point = lambda x: _nozzle_state(transonic_mach(x, gam), gam)
        prim = lambda xs: np.moveaxis(np.array([point(float(v)) for v in np.ravel(xs)])
                                      .reshape(np.shape(xs) + (3,)), -1, 0)
        if name == "nozzle_supersonic":
            # start from the uniform inflow state and march to the steady solution
            U = _cons([np.full(n, v) for v in inflow], model.gas)
            fld = Field1D(U, np.zeros_like(U))
        else:
            # the transonic solution is reached from nearby data only
            fld = _field_from(lambda x: _cons(prim(x), model.gas), mesh)
        bnd = EulerBoundary("inflow", "outflow", left_state=Primitive(*point(mesh.x_min)))
        return Case(spec, mesh, model, fld, bnd, lambda x: prim(x)[0])
    if name == "wave2d":
        if variant not in WAVE_VARIANTS:
            raise ValidationError(f"variant: must be one of {WAVE_VARIANTS}")
        mesh = Mesh2D((0.0, WAVE_BOX, 0.0, WAVE_BOX), n, n)
        q = cell_average(lambda x, y: wave_exact(x, y, 0.0), mesh)
        gx, gy = wave_slopes(q, mesh, None)
        return Case(spec, mesh, None, WaveSystemState(q, gx, gy), None,
                    lambda x, y: wave_exact(x, y, T)[1], 1, variant)
    if name == "quadrant":
        mesh = Mesh2D((0.0, 1.0, 0.0, 1.0), n, n)
        model = Euler2D(1.4)
        X, Y = np.meshgrid(mesh.xc, mesh.yc, indexing="ij")
        masks = ((X > 0.5) & (Y > 0.5), (X < 0.5) & (Y > 0.5),
                 (X < 0.5) & (Y < 0.5), (X > 0.5) & (Y < 0.5))
        W = sum(np.array(s)[:, None, None] * m for s, m in zip(QUADRANT_STATES, masks))
        U = model.conserved(*W)
        return Case(spec, mesh, model, Field2D(U, np.zeros_like(U), np.zeros_like(U)),
                    startup_steps=STARTUP_STEPS)
    raise ValidationError(f"problem: no builder for {name!r}")


def _duct_isentropic(rho0, u0, p0, gamma, area0, supersonic):
    """Steady isentropic duct state at x from mass, enthalpy and entropy."""
    mass = rho0 * u0 * area0
    K = p0 / rho0 ** gamma
    H = gamma / (gamma - 1.0) * p0 / rho0 + 0.5 * u0 * u0

    def state(x):
        A = 1.0 + x * x
        # u from H = gamma/(gamma-1) K rho^(gamma-1) + u^2/2, rho = mass/(A u)
        f = lambda u: gamma / (gamma - 1.0) * K * (mass / (A * u)) ** (gamma - 1.0) + 0.5 * u * u - H
        c_star = math.sqrt(2.0 * (gamma - 1.0) / (gamma + 1.0) * H)
        u = brentq(f, c_star, math.sqrt(2.0 * H) * (1 - 1e-14)) if supersonic else \
            brentq(f, 1e-12, c_star)
        rho = mass / (A * u)
        return rho, u, K * rho ** gamma
    return state


def wave_exact(x, y, t):
    k1, k2 = WAVE_VECTOR
    kn = math.hypot(k1, k2)
    ph = 2 * np.pi * (k1 * x + k2 * y) / WAVE_BOX - 2 * np.pi * kn / WAVE_BOX * WAVE_SPEED * t
    f = WAVE_AMPLITUDE * np.sin(ph)
    return np.stack([f, f * k1 / kn, f * k2 / kn])


# -------------------------------------------------------------- config

SCHEME_KEYS = {"cfl": float, "reconstruction": str, "solver": str, "stepping": str,
               "transversal": "bool", "basis": str, "alpha": float}
PROBLEM_KEYS = {"name": str, "n": int, "final_time": float, "variant": str,
                "max_steps": int, "tolerance": float}
OUTPUT_KEYS = {"field": str, "convergence": str, "summary": str}
SECTIONS = {"scheme": SCHEME_KEYS, "problem": PROBLEM_KEYS, "output": OUTPUT_KEYS}


@dataclass(frozen=True)
class ProblemSettings:
    name: str
    n: Optional[int] = None
    final_time: Optional[float] = None
    variant: str = "GRP2D"
    max_steps: int = 100000
    tolerance: float = 1e-9


@dataclass(frozen=True)
class OutputSettings:
    field: Optional[str] = None
    convergence: Optional[str] = None
    summary: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    scheme: SchemeConfig
    problem: ProblemSettings
    output: OutputSettings = OutputSettings()
    explicit_scheme: tuple = ()


def _convert(section, key, raw, kind):
    try:
        if kind == "bool":
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw.strip())
    except ValueError:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r}") from None


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError(f"line {e.lineno}: missing section header") from None
    except configparser.ParsingError as e:
        lineno, line = e.errors[0]
        raise ConfigError(f"line {lineno}: cannot parse {line.strip()!r}") from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as e:
        raise ConfigError(f"line {e.lineno}: {e.message}") from None
    values = {}
    for sec in cp.sections():
        if sec not in SECTIONS:
            raise ConfigError(f"unknown section [{sec}]")
        values[sec] = {}
        for key, raw in cp.items(sec):
            if key not in SECTIONS[sec]:
                raise ConfigError(f"{sec}.{key}: unknown key")
            values[sec][key] = _convert(sec, key, raw, SECTIONS[sec][key])
    prob = values.get("problem", {})
    if "name" not in prob:
        raise ConfigError("problem.name: required")
    if prob["name"] not in PROBLEMS:
        raise ConfigError(f"problem.name: unknown problem {prob['name']!r}")
    spec = PROBLEMS[prob["name"]]
    user_scheme = values.get("scheme", {})
    scheme_args = {**spec.scheme_defaults, **user_scheme}
    try:
        scheme = SchemeConfig(**scheme_args)
    except ValidationError as e:
        raise ConfigError(f"scheme: {e}") from None
    if spec.equations == "euler2d" and scheme.reconstruction != "minmod":
        raise ConfigError("scheme.reconstruction: the 2-D Euler problem needs minmod")
    if spec.equations == "euler2d" and scheme.stepping not in ("two_stage_4", "single_stage_2"):
        raise ConfigError("scheme.stepping: 2-D Euler supports two_stage_4 or single_stage_2")
    if prob.get("n") is not None and prob["n"] < 4:
        raise ConfigError("problem.n: need at least 4 cells")
    if prob.get("final_time") is not None and not prob["final_time"] > 0:
        raise ConfigError("problem.final_time: must be positive")
    if "variant" in prob and prob["variant"] not in WAVE_VARIANTS:
        raise ConfigError(f"problem.variant: must be one of {WAVE_VARIANTS}")
    return RunConfig(scheme, ProblemSettings(**prob), OutputSettings(**values.get("output", {})),
                     tuple(sorted(user_scheme)))


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    return parse_config(text)


def serialize_config(cfg: RunConfig) -> str:
    lines = ["[scheme]"]
    for key in SCHEME_KEYS:
        v = getattr(cfg.scheme, key)
        lines.append(f"{key} = {repr(v) if isinstance(v, float) else str(v).lower() if isinstance(v, bool) else v}")
    lines.append("")
    lines.append("[problem]")
    for key in PROBLEM_KEYS:
        v = getattr(cfg.problem, key)
        if v is not None:
            lines.append(f"{key} = {repr(v) if isinstance(v, float) else v}")
    out = [(k, getattr(cfg.output, k)) for k in OUTPUT_KEYS if getattr(cfg.output, k)]
    if out:
        lines += ["", "[output]"] + [f"{k} = {v}" for k, v in out]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- runs

@dataclass
class RunResult:
    case: Case
    field: object
    summary: dict


def _flux_weights(stepping, dt):
    """Weights (on F, on dF) of each stage in the time-integrated flux."""
    return {"two_stage_4": ((dt, dt * dt / 6.0), (0.0, dt * dt / 3.0)),
            "single_stage_2": ((dt, 0.5 * dt * dt),),
            "rk2": ((0.5 * dt, 0.0), (0.5 * dt, 0.0)),
            "rk4": ((dt / 6, 0.0), (dt / 3, 0.0), (dt / 3, 0.0), (dt / 6, 0.0))}[stepping]


def _primitive_1d(U, gamma):
    rho = U[0]
    u = U[1] / rho
    p = (gamma - 1.0) * (U[2] - 0.5 * U[1] * u)
    return rho, u, p


def run_case(case: Case, scheme: SchemeConfig, max_steps: int = 100000,
             tolerance: float = 1e-9, counters: Optional[Counters] = None,
             dts: Optional[list] = None) -> RunResult:
    """Advance a built case to its final time (or to steady state)."""
    counters = counters or Counters()
    spec = case.spec
    t0 = time.perf_counter()
    summary = {"problem": spec.id}
    if spec.equations == "wave2d":
        fld = _run_wave(case, scheme, summary)
    elif spec.equations == "euler2d":
        fld = _run_euler2d(case, scheme, counters, summary)
    else:
        fld = _run_1d(case, scheme, counters, summary, max_steps, tolerance, dts)
    summary["wall_time"] = time.perf_counter() - t0
    summary["reconstructions"] = counters.reconstructions
    summary["stages"] = counters.stages
    summary.setdefault("steps", counters.steps)
    return RunResult(case, fld, summary)


def _run_wave(case, scheme, summary):
    T = case.spec.final_time
    mesh = case.mesh
    n = int(math.ceil(T / (scheme.cfl * min(mesh.hx, mesh.hy) / WAVE_SPEED) - 1e-12))
    dt = T / n
    st = case.field
    for _ in range(n):
        st = wave_system_step_2d(st, mesh, case.variant, dt, WAVE_SPEED)
    summary["steps"] = n
    summary["final_time"] = T
    return st


def _run_euler2d(case, scheme, counters, summary):
    mesh, model = case.mesh, case.model
    T = case.spec.final_time
    fld = case.field
    cell = mesh.hx * mesh.hy
    total0 = fld.ubar.sum(axis=(1, 2)) * cell
    outflow = np.zeros(4)
    t = 0.0
    while t < T - 1e-14 * T:
        try:
            dt = min(_step_size(case, fld, scheme, counters.steps), T - t)
            fld, out = euler_step_2d(fld, mesh, scheme, dt, model, counters, return_outflow=True)
        except SolverError as e:
            raise type(e)(f"step {counters.steps + 1} (t = {t:.6g}): {e}") from None
        outflow += out
        t += dt
    rho, u, v, p = model.primitive(fld.ubar)
    drift = fld.ubar.sum(axis=(1, 2)) * cell - total0 + outflow
    summary.update(final_time=t, conservation_drift=float(np.max(np.abs(drift))),
                   min_density=float(rho.min()), min_pressure=float(p.min()))
    return fld


def _run_1d(case, scheme, counters, summary, max_steps, tolerance, dts):
    mesh, model, bnd = case.mesh, case.model, case.boundary
    T = case.spec.final_time
    steady = T is None
    fld = case.field
    euler = isinstance(model, EulerDuct)
    weights_area = model.cell_area(mesh) if euler else np.ones(mesh.n)
    total0 = (fld.ubar * weights_area).sum(axis=1) * mesh.h
    outflow = np.zeros(fld.ubar.shape[0])
    ent_min, ent_max = math.inf, -math.inf
    t, residual, k = 0.0, math.inf, 0
    while (k < max_steps) if steady else (t < T - 1e-14 * T):
        if dts is not None and k >= len(dts):
            break
        try:
            if dts is not None:
                dt = dts[k]
            else:
                dt = _step_size(case, fld, scheme, k)
                if not steady:
                    dt = min(dt, T - t)
            new, stages = advance_1d(fld, mesh, scheme, bnd, t, dt, model, counters,
                                     return_stages=True)
        except SolverError as e:
            raise type(e)(f"step {k + 1} (t = {t:.6g}): {e}") from None
        for st, (a, b) in zip(stages, _flux_weights(scheme.stepping, dt)):
            outflow += a * (st.F[:, -1] - st.F[:, 0]) + b * (st.dF[:, -1] - st.dF[:, 0])
        if euler:
            prod = entropy_production_monitor(fld, new, (stages[0].U0, stages[0].Ut), dt,
                                              mesh.h, model.gas.gamma)
            if np.isfinite(prod).any():
                ent_min = min(ent_min, np.nanmin(prod))
                ent_max = max(ent_max, np.nanmax(prod))
        if steady:
            residual = float(np.max(np.abs(new.ubar - fld.ubar)) / dt)
        fld = new
        t += dt
        k += 1
        if steady and residual < tolerance:
            break
    summary.update(steps=k, final_time=t)
    if not (euler and model.area is not None):
        drift = (fld.ubar * weights_area).sum(axis=1) * mesh.h - total0 + outflow
        summary["conservation_drift"] = float(np.max(np.abs(drift)))
    if euler:
        rho, u, p = _primitive_1d(fld.ubar, model.gas.gamma)
        summary.update(min_density=float(rho.min()), min_pressure=float(p.min()),
                       entropy_production_min=float(ent_min),
                       entropy_production_max=float(ent_max))
    if steady:
        summary["residual"] = residual
    return fld


def _case_for(cfg: RunConfig, n: Optional[int] = None) -> Case:
    spec = PROBLEMS[cfg.problem.name]
    return build_case(cfg.problem.name, n or cfg.problem.n or spec.default_n,
                      cfg.problem.final_time, cfg.problem.variant)


def run_problem(cfg: RunConfig) -> RunResult:
    case = _case_for(cfg)
    res = run_case(case, cfg.scheme, cfg.problem.max_steps, cfg.problem.tolerance)
    if case.exact is not None and case.spec.final_time is not None:
        res.summary["l1_error"] = case_error(res)
    if cfg.output.field:
        write_field_csv(res, cfg.output.field)
    if cfg.output.summary:
        with open(cfg.output.summary, "w", encoding="utf-8") as fh:
            json.dump(res.summary, fh, indent=2, sort_keys=True)
    return res


def case_error(res: RunResult) -> float:
    case = res.case
    if case.spec.equations == "wave2d":
        num = res.field.q[case.error_index]
    else:
        num = res.field.ubar[case.error_index]
    return l1_error(num, case.exact, case.mesh)


def _fmt(v):
    return f"{float(v):.17g}"


def field_rows(res: RunResult):
    case, fld = res.case, res.field
    eq = case.spec.equations
    if eq in ("advection", "burgers"):
        return ["x", "u"], zip(case.mesh.centers, fld.ubar[0])
    if eq in ("euler1d", "euler_duct"):
        g = case.model.gas.gamma
        rho, u, p = _primitive_1d(fld.ubar, g)
        S = np.log(p / rho ** g) / (g - 1.0)
        return ["x", "rho", "u", "p", "S"], zip(case.mesh.centers, rho, u, p, S)
    X, Y = np.meshgrid(case.mesh.xc, case.mesh.yc, indexing="ij")
    if eq == "wave2d":
        q = fld.q
        return ["x", "y", "p", "u", "v"], zip(X.ravel(), Y.ravel(), *(c.ravel() for c in q))
    g = case.model.gas.gamma
    rho, u, v, p = case.model.primitive(fld.ubar)
    S = np.log(p / rho ** g) / (g - 1.0)
    return (["x", "y", "rho", "u", "v", "p", "S"],
            zip(X.ravel(), Y.ravel(), *(c.ravel() for c in (rho, u, v, p, S))))


def write_field_csv(res: RunResult, path):
    header, rows = field_rows(res)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


# ---------------------------------------------------------- convergence

@dataclass
class ConvergenceReport:
    problem: str
    scheme: str
    meshes: list
    errors: list
    orders: list
    wall_times: list
    reconstructions: list

    def csv_text(self) -> str:
        lines = ["N,L1_error,order"]
        for n, e, o in zip(self.meshes, self.errors, self.orders):
            lines.append(f"{n},{_fmt(e)},{'' if o is None else _fmt(o)}")
        return "\n".join(lines) + "\n"


def observed_orders(meshes, errors):
    out = [None]
    for (n0, e0), (n1, e1) in zip(zip(meshes, errors), zip(meshes[1:], errors[1:])):
        out.append(math.log(e0 / e1) / math.log(n1 / n0))
    return out


def scheme_label(cfg: RunConfig) -> str:
    if PROBLEMS[cfg.problem.name].equations == "wave2d":
        return cfg.problem.variant
    s = cfg.scheme
    return f"{s.reconstruction}/{s.solver}/{s.stepping}"


def run_convergence(cfg: RunConfig, meshes) -> ConvergenceReport:
    spec = PROBLEMS[cfg.problem.name]
    if spec.final_time is None and cfg.problem.final_time is None:
        raise ValidationError(f"problem.name: {spec.id} is a steady problem without a "
                              "final-time reference")
    if spec.reference not in ("analytic", "riemann-sampler"):
        raise ValidationError(f"problem.name: {spec.id} has no reference solution")
    errors, times, recs = [], [], []
    for n in meshes:
        try:
            res = run_case(_case_for(cfg, n), cfg.scheme, cfg.problem.max_steps,
                           cfg.problem.tolerance)
        except SolverError as e:
            raise type(e)(f"mesh N = {n}: {e}") from None
        errors.append(case_error(res))
        times.append(res.summary["wall_time"])
        recs.append(res.summary["reconstructions"])
    rep = ConvergenceReport(spec.id, scheme_label(cfg), list(meshes), errors,
                            observed_orders(list(meshes), errors), times, recs)
    if cfg.output.convergence:
        with open(cfg.output.convergence, "w", encoding="utf-8") as fh:
            fh.write(rep.csv_text())
    return rep


# ----------------------------------------------------------- efficiency

@dataclass
class EfficiencyReport:
    problem: str
    n: int
    steps: int
    reconstructions_two_stage: int
    reconstructions_rk4: int
    time_two_stage: float
    time_rk4: float

    @property
    def per_step(self):
        return (self.reconstructions_two_stage / self.steps, self.reconstructions_rk4 / self.steps)

    @property
    def time_ratio(self):
        return self.time_two_stage / self.time_rk4


def efficiency_compare(cfg: RunConfig, n: Optional[int] = None,
                       repeats: int = 1) -> EfficiencyReport:
    """Two-stage scheme vs the RK4 wrapper at identical reconstruction and steps."""
    spec = PROBLEMS[cfg.problem.name]
    if spec.dimension != 1 or spec.final_time is None:
        raise ValidationError("problem.name: efficiency comparison needs a 1-D unsteady problem")
    n = n or cfg.problem.n or spec.default_n
    two = replace(cfg.scheme, stepping="two_stage_4")
    rk4 = replace(cfg.scheme, stepping="rk4")
    best2 = best4 = math.inf
    for _ in range(repeats):
        c2 = Counters()
        case = _case_for(cfg, n)
        dts = _dt_sequence(case, two)
        t0 = time.perf_counter()
        run_case(case, two, counters=c2, dts=dts)
        best2 = min(best2, time.perf_counter() - t0)
        c4 = Counters()
        t0 = time.perf_counter()
        run_case(_case_for(cfg, n), rk4, counters=c4, dts=dts)
        best4 = min(best4, time.perf_counter() - t0)
    return EfficiencyReport(spec.id, n, c2.steps, c2.reconstructions, c4.reconstructions,
                            best2, best4)


def _dt_sequence(case: Case, scheme: SchemeConfig):
    """Step sizes of a two-stage run, replayed by the comparison run."""
    dts = []
    fld, t, T = case.field, 0.0, case.spec.final_time
    while t < T - 1e-14 * T:
        dt = min(_step_size(case, fld, scheme, len(dts)), T - t)
        fld = advance_1d(fld, case.mesh, scheme, case.boundary, t, dt, case.model)
        dts.append(dt)
        t += dt
    return dts


# ------------------------------------------------------------------ CLI

def _fail(code, msg):
    click.echo(f"error: {msg}", err=True)
    raise SystemExit(code)


def _guarded(fn):
    try:
        return fn()
    except ValidationError as e:
        _fail(1, e)
    except (SolverError, FloatingPointError) as e:
        _fail(2, e)


@click.group()
def main():
    """Finite-volume GRP solvers: runs, convergence studies, efficiency counts."""


@main.command("run")
@click.argument("config", type=click.Path(dir_okay=False))
def run_cmd(config):
    """Run one problem and print a summary."""
    def go():
        res = run_problem(load_config(config))
        for k in sorted(res.summary):
            click.echo(f"{k}: {res.summary[k]}")
    _guarded(go)


@main.command("convergence")
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--meshes", required=True, help="comma-separated cell counts, e.g. 40,80,160")
def convergence_cmd(config, meshes):
    """Mesh-refinement study; prints N,L1_error,order."""
    def go():
        try:
            ns = [int(v) for v in meshes.split(",") if v.strip()]
        except ValueError:
            raise ValidationError(f"--meshes: cannot parse {meshes!r}") from None
        if len(ns) < 1 or min(ns) < 4:
            raise ValidationError("--meshes: need cell counts >= 4")
        rep = run_convergence(load_config(config), ns)
        click.echo(rep.csv_text(), nl=False)
    _guarded(go)


@main.command("compare-efficiency")
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--n", "n", type=int, default=None, help="cell count")
def compare_cmd(config, n):
    """Reconstruction counts and wall time: two-stage vs RK4 wrapper."""
    def go():
        rep = efficiency_compare(load_config(config), n)
        a, b = rep.per_step
        click.echo(f"problem: {rep.problem}  N = {rep.n}  steps = {rep.steps}")
        click.echo(f"reconstructions/step: two_stage_4 = {a:g}  rk4 = {b:g}")
        click.echo(f"wall time: two_stage_4 = {rep.time_two_stage:.3f}s  "
                   f"rk4 = {rep.time_rk4:.3f}s  ratio = {rep.time_ratio:.3f}")
    _guarded(go)


@main.command("list-problems")
def list_cmd():
    """Built-in problems."""
    for p in PROBLEMS.values():
        click.echo(f"{p.id:18s} {p.dimension}-D {p.equations:10s} {p.description}")


if __name__ == "__main__":
    main()
