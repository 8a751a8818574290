"""Bounded derivative-free search: coarse grid scan, then Nelder-Mead polish."""

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize


@dataclass(frozen=True)
class SearchConfig:
    grid_points: int = 16
    xatol: float = 1e-5
    fatol: float = 1e-6
    max_evals: int = 600


@dataclass(frozen=True)
class Box:
    """Plain parameter box; the simplest family descriptor."""

    bounds: tuple

    def spec(self, x):
        return tuple(float(v) for v in x)


class _BudgetExhausted(Exception):
    pass


@dataclass
class SearchResult:
    value: float
    x: np.ndarray
    argopt: object
    evaluations: int
    converged: bool
    history: list = field(default_factory=list, repr=False)


def search_over_family(objective, family, config=SearchConfig()):
    """Minimize ``objective(x)`` over ``family.bounds``.

    A ``grid_points``-per-axis scan seeds a bounded Nelder-Mead run. Every
    evaluation is recorded in ``history`` as ``(x, f)``. When the budget
    runs out the best point so far is returned with ``converged=False``.
    The procedure is deterministic for a given configuration.
    """
    bounds = np.asarray(family.bounds, dtype=float).reshape(-1, 2)
    history = []

    def f(x):
        if len(history) >= config.max_evals:
            raise _BudgetExhausted
        x = np.clip(np.asarray(x, dtype=float), bounds[:, 0], bounds[:, 1])
        val = float(objective(x))
        history.append((x.copy(), val))
        return val

    def best():
        if not history:
            return SearchResult(np.inf, None, None, 0, False, history)
        x, v = min(history, key=lambda h: h[1])
        return SearchResult(v, x, family.spec(x), len(history), converged, history)

    converged = False
    axes = [np.linspace(lo, hi, config.grid_points) if hi > lo else np.array([lo]) for lo, hi in bounds]
    try:
        for pt in itertools.product(*axes):
            f(np.array(pt))
        x0 = min(history, key=lambda h: h[1])[0]
        if np.all(bounds[:, 1] == bounds[:, 0]):
            converged = True
            return best()
        # initial simplex spans one coarse cell around the best grid point
        step = np.array([(hi - lo) / max(config.grid_points - 1, 1) for lo, hi in bounds])
        simplex = [x0]
        for d in range(len(x0)):
            v = x0.copy()
            v[d] = v[d] + step[d] if v[d] + step[d] <= bounds[d, 1] else v[d] - step[d]
            simplex.append(v)
        res = minimize(
            f,
            x0,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "xatol": config.xatol,
                "fatol": config.fatol,
                "initial_simplex": np.array(simplex),
                "maxfev": max(config.max_evals - len(history), 1),
            },
        )
        converged = bool(res.success)
    except _BudgetExhausted:
        converged = False
    return best()
