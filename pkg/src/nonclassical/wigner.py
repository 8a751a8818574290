"""Wigner functions of number-basis density matrices and their negativity.

Convention (dimensionless quadratures, hbar = 1, ``a = (x + i p)/sqrt2``)::

    W(x, p) = (1/pi) \\int exp(2 i p y) <x - y| rho |x + y> dy

so that the vacuum peaks at ``1/pi`` and ``\\int\\int W dx dp = Tr rho``.
In this convention the matrix element ``C[n, n+k]`` contributes through
the kernel

    W_{n,n+k}(x, p) = (-1)^n / pi * sqrt(n!/(n+k)!) (sqrt2 (x + i p))^k
                      * exp(-r^2) L_n^k(2 r^2),

and ``C[n+k, n]`` through its conjugate.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ExtentError, QuadratureError

EXTENT_PAD = 4.0
EDGE_TOL = 1e-10
CONVERGENCE_TOL = 1e-4
OCCUPATION_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Square-or-rectangular uniform grid; ``None`` extents are chosen from the state."""

    x_min: float = None
    x_max: float = None
    p_min: float = None
    p_max: float = None
    n_x: int = 257
    n_p: int = 257

    @classmethod
    def square(cls, half_width, n):
        return cls(-half_width, half_width, -half_width, half_width, n, n)

    def resolve(self, rho):
        if None not in (self.x_min, self.x_max, self.p_min, self.p_max):
            return self
        R = default_extent(rho)
        return GridSpec(-R, R, -R, R, self.n_x, self.n_p)

    def refined(self):
        return GridSpec(self.x_min, self.x_max, self.p_min, self.p_max, 2 * self.n_x - 1, 2 * self.n_p - 1)


@dataclass(frozen=True)
class WignerGrid:
    x_min: float
    x_max: float
    p_min: float
    p_max: float
    n_x: int
    n_p: int
    values: np.ndarray  # shape (n_x, n_p), values[i, j] = W(x_i, p_j)

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def p(self):
        return np.linspace(self.p_min, self.p_max, self.n_p)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.n_x - 1)

    @property
    def dp(self):
        return (self.p_max - self.p_min) / (self.n_p - 1)

    def integrate(self, f=None):
        """Composite trapezoid rule of ``f(W)`` (default ``W``) over the grid."""
        v = self.values if f is None else f(self.values)
        wx = np.full(self.n_x, self.dx)
        wx[[0, -1]] *= 0.5
        wp = np.full(self.n_p, self.dp)
        wp[[0, -1]] *= 0.5
        return float(wx @ v @ wp)

    def negative_volume(self):
        """``\\int\\int (|W| - W)``, i.e. twice the volume under the negative part."""
        return self.integrate(lambda w: np.abs(w) - w)


def _edge_ratio(rho, R, n=65):
    t = np.linspace(-R, R, n)
    inner = np.abs(wigner_values(rho, t, t)).max()
    edge = np.concatenate([
        wigner_values(rho, t, [-R, R]).ravel(),
        wigner_values(rho, [-R, R], t).ravel(),
    ])
    return np.abs(edge).max() / inner


def default_extent(rho, tol=OCCUPATION_TOL):
    """Half-width ``sqrt(2 n_max) + 4``, widened in steps of 0.5 until the
    boundary values fall below a tenth of the extent tolerance."""
    R = math.sqrt(2 * rho.highest_occupied(tol)) + EXTENT_PAD
    for _ in range(40):
        if _edge_ratio(rho, R) <= 0.1 * EDGE_TOL:
            break
        R += 0.5
    return R


def _laguerre_diagonal_sum(coeffs, k, X, scale):
    """``sum_n coeffs[n] (-1)^n scale * sqrt(n!/(n+k)!) L_n^k(X)``.

    Upward three-term recurrence on the normalized polynomials, seeded with
    ``scale / sqrt(k!)`` so no factorial is ever formed.
    """
    prev = scale  # already divided by sqrt(k!)
    total = coeffs[0] * prev
    if coeffs.size == 1:
        return total
    cur = prev * (1.0 + k - X) / math.sqrt(k + 1.0)
    total = total - coeffs[1] * cur
    for n in range(1, coeffs.size - 1):
        nxt = ((2 * n + 1 + k - X) * cur - math.sqrt(n * (n + k)) * prev) / math.sqrt((n + 1) * (n + k + 1.0))
        prev, cur = cur, nxt
        if coeffs[n + 1] != 0:
            total = total + (-1) ** (n + 1) * coeffs[n + 1] * cur
    return total


def wigner_values(rho, x, p, tol=0.0):
    """``W`` on the outer grid ``x`` (rows) by ``p`` (columns)."""
    X, P = np.meshgrid(np.asarray(x, float), np.asarray(p, float), indexing="ij")
    r2 = X**2 + P**2
    two_r2 = 2.0 * r2
    theta = np.arctan2(P, X)
    log_r = 0.5 * np.log(np.where(r2 > 0, 2.0 * r2, 1.0))
    c = rho.entries if hasattr(rho, "entries") else np.asarray(rho)
    dim = c.shape[0]
    W = np.zeros_like(r2)
    for k in range(dim):
        coeffs = np.diag(c, k)
        if not np.any(np.abs(coeffs) > tol):
            continue
        if k == 0:
            scale = np.exp(-r2)
        else:
            scale = np.where(r2 > 0, np.exp(-r2 + k * log_r - 0.5 * gammaln(k + 1)), 0.0)
        s = _laguerre_diagonal_sum(coeffs, k, two_r2, scale)
        if k == 0:
            W += np.real(s)
        else:
            W += 2.0 * np.real(s * np.exp(1j * k * theta))
    return W / np.pi


def _is_diagonal(rho):
    c = rho.entries
    return not np.any(c - np.diag(np.diag(c)))


def _is_centered_square(g):
    return g.n_x == g.n_p and g.n_x % 2 == 1 and g.x_min == -g.x_max == g.p_min == -g.p_max


def _radial_values(rho, g):
    """Same samples as :func:`wigner_values` for a phase-invariant state.

    On a centered odd square grid ``r^2 = h^2 (i^2 + j^2)``, so ``W`` is
    evaluated once per distinct integer ``i^2 + j^2`` and scattered back.
    """
    c = (g.n_x - 1) // 2
    h = g.x_max / c
    i = np.arange(c + 1)
    s = (i[:, None] ** 2 + i[None, :] ** 2).ravel()
    uniq, inv = np.unique(s, return_inverse=True)
    r2 = h * h * uniq
    w = np.real(_laguerre_diagonal_sum(np.diag(rho.entries), 0, 2.0 * r2, np.exp(-r2))) / np.pi
    quad = w[inv].reshape(c + 1, c + 1)
    full = np.empty((g.n_x, g.n_x))
    full[c:, c:] = quad
    full[c:, : c + 1] = quad[:, ::-1]
    full[: c + 1, :] = full[c:, :][::-1]
    return full


def wigner_synthesize(rho, grid=GridSpec(), check_extent=True):
    """Sample the Wigner function of ``rho`` on ``grid``.

    Raises ``ExtentError`` when ``|W|`` on the grid boundary exceeds
    ``1e-10 * max|W|``.
    """
    g = grid.resolve(rho)
    x = np.linspace(g.x_min, g.x_max, g.n_x)
    p = np.linspace(g.p_min, g.p_max, g.n_p)
    if _is_diagonal(rho) and _is_centered_square(g):
        W = _radial_values(rho, g)
    else:
        W = wigner_values(rho, x, p)
    if check_extent:
        edge = max(np.abs(W[0]).max(), np.abs(W[-1]).max(), np.abs(W[:, 0]).max(), np.abs(W[:, -1]).max())
        if edge > EDGE_TOL * np.abs(W).max():
            raise ExtentError(f"boundary |W| = {edge:.3e}; widen the grid beyond {g}")
    return WignerGrid(g.x_min, g.x_max, g.p_min, g.p_max, g.n_x, g.n_p, W)


@dataclass(frozen=True)
class NegativityResult:
    value: float
    error: float  # |change| over the last grid doubling
    n_points: int
    refinements: int

    def __float__(self):
        return self.value


def _start_points(rho, R):
    # a few samples per radial fringe near the origin
    n_top = rho.highest_occupied(OCCUPATION_TOL)
    spacing = math.pi / (4.0 * math.sqrt(2.0 * n_top + 1.0))
    n = int(2 * R / spacing * 2) + 1
    return max(129, min(n, 1025)) | 1


def negativity_report(rho, grid=None, tol=CONVERGENCE_TOL, max_refinements=4):
    """Converged ``\\int\\int (|W| - W) dx dp`` with its refinement history.

    The grid is refined (spacing halved) until two successive values differ
    by less than ``tol``. Raises ``QuadratureError`` otherwise.
    """
    if grid is None:
        R = default_extent(rho)
        n = _start_points(rho, R)
        grid = GridSpec.square(R, n)
    grid = grid.resolve(rho)
    prev = wigner_synthesize(rho, grid).negative_volume()
    for i in range(1, max_refinements + 1):
        grid = grid.refined()
        cur = wigner_synthesize(rho, grid).negative_volume()
        delta = abs(cur - prev)
        if delta < tol:
            return NegativityResult(max(cur, 0.0), delta, grid.n_x, i)
        prev = cur
    raise QuadratureError(f"negativity not converged to {tol:g} after {max_refinements} refinements (last delta {delta:.3e})")


def negativity(rho, grid=None, tol=CONVERGENCE_TOL):
    """Negativity ``eta_W`` of ``rho``; see :func:`negativity_report`."""
    return negativity_report(rho, grid, tol).value


def write_wigner_csv(grid, path):
    """CSV with header ``x,p,w`` and one row per grid sample."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "p", "w"])
        for i, xv in enumerate(grid.x):
            for j, pv in enumerate(grid.p):
                w.writerow([repr(float(xv)), repr(float(pv)), repr(float(grid.values[i, j]))])
