"""Time integrators: two-derivative tableaux, the two-stage fourth-order
scheme, classical RK4, and the finite-volume two-stage composition."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np


@dataclass(frozen=True)
class ExtendedTableau:
    """Explicit multi-stage two-derivative tableau.

    Stage i: Y_i = y + h sum_j a[i,j] f(Y_j) + h^2 sum_j ahat[i,j] g(Y_j),
    update:  y+ = y + h sum_i b[i] f(Y_i) + h^2 sum_i bhat[i] g(Y_i),
    with g = f' f.
    """

    a: np.ndarray
    ahat: np.ndarray
    b: np.ndarray
    bhat: np.ndarray

    def __post_init__(self):
        for name in ("a", "ahat", "b", "bhat"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        s = self.stages
        if self.a.shape != (s, s) or self.ahat.shape != (s, s) or self.bhat.shape != (s,):
            raise ValueError("inconsistent tableau shapes")
        if np.any(np.triu(self.a) != 0) or np.any(np.triu(self.ahat) != 0):
            raise ValueError("tableau must be explicit (strictly lower triangular)")
        if not np.isclose(self.b.sum(), 1.0):
            raise ValueError("sum of b must be 1 for consistency")

    @property
    def stages(self) -> int:
        return len(self.b)

    @property
    def c(self) -> np.ndarray:
        return self.a.sum(axis=1)


TWO_STAGE_FOURTH = ExtendedTableau(
    a=[[0.0, 0.0], [0.5, 0.0]],
    ahat=[[0.0, 0.0], [0.125, 0.0]],
    b=[1.0, 0.0],
    bhat=[1.0 / 6.0, 1.0 / 3.0],
)

TAYLOR_SECOND = ExtendedTableau(a=[[0.0]], ahat=[[0.0]], b=[1.0], bhat=[0.5])


def msmd_step(f: Callable, g: Callable, y, h: float, tableau: ExtendedTableau):
    y = np.asarray(y, dtype=float)
    s = tableau.stages
    fs, gs = [], []
    for i in range(s):
        Y = y.copy()
        for j in range(i):
            if tableau.a[i, j]:
                Y = Y + h * tableau.a[i, j] * fs[j]
            if tableau.ahat[i, j]:
                Y = Y + h * h * tableau.ahat[i, j] * gs[j]
        fs.append(np.asarray(f(Y), dtype=float))
        gs.append(np.asarray(g(Y), dtype=float))
    out = y.copy()
    for i in range(s):
        if tableau.b[i]:
            out = out + h * tableau.b[i] * fs[i]
        if tableau.bhat[i]:
            out = out + h * h * tableau.bhat[i] * gs[i]
    return out


def two_stage_fourth_ode(f: Callable, fprime: Callable, y, h: float):
    """Two-stage fourth-order step for y' = f(y); fprime(y) is the Jacobian."""
    y = np.asarray(y, dtype=float)

    def g(v):
        return np.dot(fprime(v), f(v)) if np.ndim(v) else fprime(v) * f(v)

    f0 = f(y)
    g0 = g(y)
    ystar = y + 0.5 * h * f0 + 0.125 * h * h * g0
    return y + h * f0 + h * h / 6.0 * (g0 + 2.0 * g(ystar))


def rk4_ode(f: Callable, y, h: float):
    y = np.asarray(y, dtype=float)
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class StagePair(NamedTuple):
    L: np.ndarray
    dtL: np.ndarray


def fv_two_stage_step(field, L_provider: Callable, dt: float, t: float = 0.0):
    """One two-stage step for cell averages.

    ``L_provider(field, t, stage)`` returns a StagePair; stage is 0 for the
    data at t and 1 for the intermediate data, which is associated with
    t + dt/2 (boundary data use that time).
    """
    w = np.asarray(field, dtype=float)
    L0, dL0 = L_provider(w, t, 0)
    wstar = w + 0.5 * dt * L0 + 0.125 * dt * dt * dL0
    _, dL1 = L_provider(wstar, t + 0.5 * dt, 1)
    return w + dt * L0 + dt * dt / 6.0 * (dL0 + 2.0 * dL1)
