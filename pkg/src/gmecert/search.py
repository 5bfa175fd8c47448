"""Derivative-free maximization of witness values over measurement settings."""
from dataclasses import dataclass, field
import enum
import math

import numpy as np
from scipy.optimize import minimize

from .behavior import pair_marginal
from .linalg import PAULIS, partial_trace
from .quantum import (
    BlochObservable,
    DensityMatrix,
    MeasurementSettings,
    born_behavior,
    correlation_tensor,
    pair_correlation_tensor,
)
from . import witnesses


class SearchError(ValueError):
    pass


class Objective(str, enum.Enum):
    MERMIN = "mermin"
    SVETLICHNY = "svetlichny"
    CHSH_PAIR = "chsh_pair"


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 64
    max_iterations: int = 2000
    shrink_tol: float = 1e-10
    seed: int = 42

    def __post_init__(self):
        if int(self.restarts) < 1:
            raise SearchError(f"restarts must be >= 1, got {self.restarts}")
        if int(self.max_iterations) < 1:
            raise SearchError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not self.shrink_tol > 0:
            raise SearchError(f"shrink_tol must be > 0, got {self.shrink_tol}")


@dataclass(frozen=True)
class SearchResult:
    best_value: float
    best_settings: MeasurementSettings
    trace: tuple = field(default=())
    objective: str = "mermin"

    def to_json(self):
        return {
            "objective": self.objective,
            "best_value": self.best_value,
            "best_settings": self.best_settings.to_json(),
            "trace": list(self.trace),
        }


def _directions(angles):
    """(..., 2) spherical angles -> (..., 3) unit vectors."""
    th, ph = angles[..., 0], angles[..., 1]
    st = np.sin(th)
    return np.stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)], axis=-1)


def _correlators_from_tensor(tensor, dirs):
    # dirs: (3 parties, 2 settings, 3); returns E[x, y, z]
    e = (dirs[0] @ tensor.reshape(3, 9)).reshape(2, 3, 3)  # [x, j, k]
    e = np.matmul(dirs[1][None], e)  # [x, y, k]
    return e @ dirs[2].T  # [x, y, z]


def _objective_fn(rho, objective):
    if objective is Objective.CHSH_PAIR:
        t2 = _pair_tensor(rho)

        def f(dirs):
            e = dirs[1] @ t2 @ dirs[2].T
            return e[1, 1] + e[1, 0] + e[0, 1] - e[0, 0]

        return f

    tensor = correlation_tensor(rho)
    if objective is Objective.MERMIN:
        def f(dirs):
            e = _correlators_from_tensor(tensor, dirs)
            return e[0, 0, 1] + e[0, 1, 0] + e[1, 0, 0] - e[1, 1, 1]
    else:
        def f(dirs):
            e = _correlators_from_tensor(tensor, dirs)
            return (e[0, 0, 1] + e[0, 1, 0] + e[1, 0, 0] - e[1, 1, 1]
                    + e[0, 0, 0] - e[1, 1, 0] - e[1, 0, 1] - e[0, 1, 1])
    return f


def _pair_tensor(rho):
    return pair_correlation_tensor(partial_trace(rho.m, [1, 2]))


def evaluate(rho, settings, objective):
    """Witness value recomputed through the full Born-rule behavior."""
    objective = Objective(objective)
    p = born_behavior(rho, settings)
    if objective is Objective.MERMIN:
        return witnesses.mermin_value(p)
    if objective is Objective.SVETLICHNY:
        return witnesses.svetlichny_value(p)
    return abs(witnesses.chsh_value(pair_marginal(p, "BC")))


def _nelder_mead(fun, x0, cfg):
    opts = {
        "maxiter": int(cfg.max_iterations),
        "xatol": cfg.shrink_tol,
        "fatol": cfg.shrink_tol,
        "adaptive": False,
    }
    res = minimize(fun, x0, method="Nelder-Mead", options=opts)
    # restart once from the best vertex with a fresh simplex; guards against collapse
    res2 = minimize(fun, res.x, method="Nelder-Mead", options=opts)
    return res2 if res2.fun <= res.fun else res


def _restart_streams(cfg):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)]


def maximize_witness(rho, objective="mermin", cfg=None):
    """Maximize |witness| over 12 spherical angles with restarted Nelder-Mead."""
    cfg = cfg or SearchConfig()
    if not isinstance(cfg, SearchConfig):
        raise SearchError("cfg must be a SearchConfig")
    if not isinstance(rho, DensityMatrix) or rho.dim != 8:
        raise SearchError("maximize_witness needs a three-qubit DensityMatrix")
    objective = Objective(objective)
    f = _objective_fn(rho, objective)

    def neg(x):
        return -abs(f(_directions(x.reshape(3, 2, 2))))

    trace = []
    best_x, best_val = None, -math.inf
    for rng in _restart_streams(cfg):
        x0 = np.column_stack([
            np.arccos(rng.uniform(-1, 1, 6)), rng.uniform(0, 2 * math.pi, 6)
        ]).reshape(-1)
        res = _nelder_mead(neg, x0, cfg)
        val = -float(res.fun)
        trace.append(val)
        if val > best_val:
            best_val, best_x = val, res.x
    settings = MeasurementSettings.from_vectors(_directions(best_x.reshape(3, 2, 2)))
    value = evaluate(rho, settings, objective)
    return SearchResult(value, settings, tuple(trace), objective.value)


def threshold_visibility(pure, target, cfg=None):
    """Smallest white-noise visibility at which the Mermin value reaches ``target``.

    Correlators of ``v rho + (1 - v) I/8`` scale linearly in v, so this is
    target / max Mermin(pure).
    """
    if target == 0:
        return 0.0
    best = maximize_witness(pure, Objective.MERMIN, cfg).best_value
    if best <= 0:
        raise SearchError("optimizer found no positive Mermin value")
    return target / best


def _chsh_operator(b0, b1, c0, c1):
    # party order: the given side (y), then the optimized side (z)
    k = np.kron
    return k(b1, c1) + k(b1, c0) + k(b0, c1) - k(b0, c0)


def _chsh_basis(m0, m1):
    """Flattened b1 x sigma_i and b0 x sigma_i, so that the CHSH operator is
    (c1 + c0) . K1 + (c1 - c0) . K0 for Bloch vectors c0, c1."""
    k1 = np.array([np.kron(m1, s) for s in PAULIS]).reshape(3, 16)
    k0 = np.array([np.kron(m0, s) for s in PAULIS]).reshape(3, 16)
    return k1, k0


def chsh_max_given_pair(b0, b1, cfg=None):
    """Largest CHSH value reachable with (b0, b1) fixed on one side.

    Optimizes the other side's two directions; for each choice the best
    two-qubit state attains the top eigenvalue of the CHSH operator.
    """
    cfg = cfg or SearchConfig()
    if not isinstance(cfg, SearchConfig):
        raise SearchError("cfg must be a SearchConfig")
    b0 = b0 if isinstance(b0, BlochObservable) else BlochObservable(b0)
    b1 = b1 if isinstance(b1, BlochObservable) else BlochObservable(b1)
    k1, k0 = _chsh_basis(np.asarray(b0.matrix), np.asarray(b1.matrix))

    def neg(x):
        d = _directions(x.reshape(2, 2))
        op = ((d[1] + d[0]) @ k1 + (d[1] - d[0]) @ k0).reshape(4, 4)
        return -np.linalg.eigvalsh(op)[-1]

    best = -math.inf
    for rng in _restart_streams(cfg):
        x0 = np.column_stack([np.arccos(rng.uniform(-1, 1, 2)), rng.uniform(0, 2 * math.pi, 2)]).reshape(-1)
        res = _nelder_mead(neg, x0, cfg)
        best = max(best, -float(res.fun))
    return best
