"""Exact number-basis evolution of the damped harmonic oscillator.

The master equation

    d rho / dt = (gamma/2) (N L[a^dag] rho + (N+1) L[a] rho),
    L[O] rho = 2 O rho O^dag - O^dag O rho - rho O^dag O,

couples only entries on the same diagonal ``C[n, n+k]``. For each ``k``
the solution is ``C_k(t) = T exp(gamma t Lambda) T^{-1} C_k(0)`` with
eigenvalues ``-(j + k/2)``. Summing over the eigen-index in closed form
gives the propagator ``G_k[n, z]`` that maps ``C[z, z+k](0)`` to
``C[n, n+k](t)``.

Two evaluations of that propagator are provided:

* :func:`propagator_basis_entry` is the printed triple sum over
  ``(i, nu, j)``. Its terms alternate in sign, so it is accumulated with
  mpmath at ``64 + 4 (n + n0 + k)`` bits plus headroom for the growth of
  the geometric factor.
* :func:`propagator_block` sums the ``i`` and ``nu`` binomial series in
  closed form first, which leaves a single sum over ``j`` of positive
  terms. It is evaluated in log space in double precision and is what
  :func:`propagate` uses by default.

:func:`ode_oracle` integrates the truncated master equation in operator
form with an adaptive Runge-Kutta method and shares no code with either.
"""

import math
import warnings
from dataclasses import dataclass
from math import comb

import mpmath
import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import gammaln, xlog1py, xlogy

from .errors import (
    CapacityError,
    IntegrationError,
    TruncationWarning,
    ValidationError,
    ZeroTemperatureError,
)
from .states import BathParams, FockDensityMatrix, lowering_operator

#: Largest ``n + n0 + k`` accepted by the extended-precision triple sum.
PRINTED_CAPACITY = 120
#: Largest working truncation accepted by the fast propagator.
FAST_CAPACITY = 2000
#: Below this bath occupation the zero-temperature branch is used.
SMALL_N = 1e-8
#: Initial levels whose population is below this are dropped from the z-sum.
Z_TAIL_TOL = 1e-14
#: Target for the neglected output tail when choosing a truncation.
OUTPUT_TAIL_TOL = 1e-14


def _check_N(N):
    if N <= 0:
        raise ZeroTemperatureError("finite-temperature formula needs N > 0; use the N = 0 branch")


def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


# -- diagonalization matrices --------------------------------------------------


def _entry_sum(k, l, j, N):
    s = mpmath.mpf(0)
    for i in range(min(l, j) + 1):
        term = mpmath.mpf(comb(l, i) * comb(j, i)) / comb(k + i, k) / N**i
        s += -term if i % 2 else term
    return s


def _entry_prec(k, l, j, N):
    return 64 + 4 * (k + l + j) + int(max(0.0, -math.log2(N)) * min(l, j))


def eigenvector_entry(k, l, j, N):
    """Entry ``l`` of eigenvector ``j`` of the diagonal-``k`` generator."""
    _check_N(N)
    with mpmath.workprec(_entry_prec(k, l, j, N)):
        Nm = mpmath.mpf(N)
        val = mpmath.sqrt(comb(k + l, k)) * (Nm / (Nm + 1)) ** l * _entry_sum(k, l, j, Nm)
        return mpmath.mpf(val)


def inverse_entry(k, l, j, N):
    """Entry ``(l, j)`` of the inverse eigenvector matrix."""
    _check_N(N)
    with mpmath.workprec(_entry_prec(k, l, j, N)):
        Nm = mpmath.mpf(N)
        pref = mpmath.sqrt(comb(k + j, k)) * comb(k + l, k) * Nm**l / (Nm + 1) ** (l + k + 1)
        return mpmath.mpf(pref * _entry_sum(k, l, j, Nm))


@dataclass(frozen=True)
class DiagonalizationData:
    """Truncated eigenvector matrix ``T``, its inverse and the eigenvalues."""

    k: int
    trunc: int
    N: float
    T: np.ndarray
    T_inv: np.ndarray
    eigenvalues: np.ndarray

    def identity_defect(self, block=None):
        """``max |(T T_inv - I)[a, b]|`` over the top-left ``block`` square.

        The inner sum runs over the ``trunc`` retained columns and is
        accumulated in extended precision. ``block`` defaults to
        ``trunc - trunc // 4``.
        """
        if block is None:
            block = self.trunc - self.trunc // 4
        M = self.trunc
        prec = 64 + 4 * (self.k + 2 * M) + int(max(0.0, -math.log2(self.N)) * M)
        worst = mpmath.mpf(0)
        with mpmath.workprec(prec):
            t = [[eigenvector_entry(self.k, a, m, self.N) for m in range(M)] for a in range(block)]
            ti = [[inverse_entry(self.k, m, b, self.N) for b in range(block)] for m in range(M)]
            for a in range(block):
                for b in range(block):
                    s = mpmath.fsum(t[a][m] * ti[m][b] for m in range(M))
                    worst = max(worst, abs(s - (1 if a == b else 0)))
        return float(worst)


def diagonalization(k, trunc, N):
    """Build :class:`DiagonalizationData` for diagonal ``k`` at truncation ``trunc``."""
    _check_N(N)
    T = np.array([[float(eigenvector_entry(k, l, j, N)) for j in range(trunc)] for l in range(trunc)])
    Ti = np.array([[float(inverse_entry(k, l, j, N)) for j in range(trunc)] for l in range(trunc)])
    lam = -(np.arange(trunc) + k / 2.0)
    return DiagonalizationData(k=k, trunc=trunc, N=float(N), T=T, T_inv=Ti, eigenvalues=lam)


# -- propagator ----------------------------------------------------------------


def propagator_basis_entry(n, k, n0, gamma_t, N):
    """``C[n, n+k](t)`` for the initial condition ``C[z, z+k](0) = delta(z, n0)``.

    Evaluated term by term as the alternating triple sum, in extended
    precision. The same function serves the lower triangle
    ``C[m+k, m]`` with ``(n, n0)`` read as ``(m, m0)``.
    """
    _check_N(N)
    if min(n, k, n0) < 0 or gamma_t < 0:
        raise ValidationError("indices and gamma_t must be non-negative")
    if n + n0 + k > PRINTED_CAPACITY:
        raise CapacityError(f"n + n0 + k = {n + n0 + k} exceeds {PRINTED_CAPACITY}")
    # headroom for the growth of ((N+1)/N e^{gt})^j against D^{-(i+nu)}
    growth = math.log2((N + 1) / N) + gamma_t / math.log(2)
    prec = 64 + 4 * (n + n0 + k) + int(math.ceil(max(0.0, growth) * min(n, n0)))
    with mpmath.workprec(prec):
        Nm = mpmath.mpf(N)
        E = mpmath.exp(mpmath.mpf(gamma_t))
        D = (Nm + 1) * E - Nm
        q = (Nm + 1) / Nm * E
        inner = {}
        total = mpmath.mpf(0)
        for i in range(n + 1):
            for nu in range(n0 + 1):
                key = (min(i, nu), max(i, nu))
                if key not in inner:
                    inner[key] = mpmath.fsum(
                        mpmath.mpf(comb(i, j) * comb(nu, j)) / comb(j + k, k) * q**j
                        for j in range(min(i, nu) + 1)
                    )
                term = comb(n, i) * comb(n0, nu) * inner[key] / D ** (i + nu + k + 1)
                total += -term if (i + nu) % 2 else term
        val = (
            mpmath.sqrt(comb(k + n, k) * comb(k + n0, k))
            * (Nm / (Nm + 1)) ** n
            * E ** (mpmath.mpf(k + 2) / 2)
            * total
        )
        return float(val)


def propagator_block(k, n_out, n_in, gamma_t, N):
    """Propagator ``G[n, z]`` for diagonal ``k``, ``n < n_out``, ``z < n_in``.

    With ``E = e^{gamma t}``, ``D = (N+1) E - N``, ``r = N/(N+1)`` and
    ``u = 1 - 1/D``::

        G[n, z] = sqrt(C(n+k, k) C(z+k, k)) E^{(k+2)/2} D^{-(k+1)}
                  * sum_j C(n, j) C(z, j) / C(j+k, k)
                          * r^{n-j} E^j D^{-2j} u^{n+z-2j}

    All terms are non-negative, so the sum is evaluated with a log-sum-exp
    in double precision. ``N = 0`` is handled (only ``j = n`` survives).
    """
    if N < 0 or gamma_t < 0:
        raise ValidationError("N and gamma_t must be non-negative")
    if n_out <= 0 or n_in <= 0:
        return np.zeros((max(n_out, 0), max(n_in, 0)))
    n = np.arange(n_out)[:, None, None]
    z = np.arange(n_in)[None, :, None]
    j = np.arange(min(n_out, n_in))[None, None, :]
    valid = (j <= n) & (j <= z)

    E_log = float(gamma_t)
    D = (N + 1.0) * math.exp(gamma_t) - N
    D_log = math.log(D)
    r = N / (N + 1.0)
    u = 1.0 - 1.0 / D  # 0 at t = 0
    jj = np.where(valid, j, 0)
    logt = (
        _log_binom(n, jj)
        + _log_binom(z, jj)
        - _log_binom(jj + k, k)
        + xlogy(n - jj, r)
        + jj * E_log
        - 2 * jj * D_log
        + xlogy(n + z - 2 * jj, u)
    )
    pref = (
        0.5 * (_log_binom(n + k, k) + _log_binom(z + k, k))
        + 0.5 * (k + 2) * E_log
        - (k + 1) * D_log
    )
    logt = np.where(valid, logt + pref, -np.inf)
    peak = np.max(logt, axis=2, keepdims=True)
    safe = np.where(np.isfinite(peak), peak, 0.0)
    s = np.sum(np.exp(logt - safe), axis=2) * np.exp(safe[..., 0])
    return np.where(np.isfinite(peak[..., 0]), s, 0.0)


def zero_temperature_populations(n0, gamma_t):
    """Fock-state populations in a vacuum bath from the alternating closed form.

    ``P_n = sum_{m=n}^{n0} C(n0, m) C(m, n) (-1)^{n+m} e^{-m gamma t}``,
    with exact integer binomials and extended-precision accumulation.
    """
    if n0 < 0 or gamma_t < 0:
        raise ValidationError("n0 and gamma_t must be non-negative")
    with mpmath.workprec(64 + 4 * n0):
        x = mpmath.exp(-mpmath.mpf(gamma_t))
        out = np.empty(n0 + 1)
        for n in range(n0 + 1):
            s = mpmath.mpf(0)
            for m in range(n, n0 + 1):
                term = comb(n0, m) * comb(m, n) * x**m
                s += -term if (n + m) % 2 else term
            out[n] = float(s)
    return out


def zero_temperature_propagate(initial, gamma_t):
    """Evolve ``initial`` in a vacuum bath (``N = 0``).

    At ``N = 0`` each diagonal obeys an upper-triangular system, and
    ``C[n, n+k](t) = e^{-(n + k/2) gamma t} sum_{z >= n} C[z, z+k](0)
    sqrt(C(z, n) C(z+k, n+k)) (1 - e^{-gamma t})^{z-n}``.
    The truncation of ``initial`` is exact here: mass only flows down.
    """
    if gamma_t < 0:
        raise ValidationError("gamma_t must be non-negative")
    c0 = initial.entries
    d = initial.dim
    out = np.zeros((d, d), dtype=complex)
    n = np.arange(d)[:, None]
    z = np.arange(d)[None, :]
    for k in range(d):
        m = d - k
        nn, zz = n[:m], z[:, :m]
        ok = zz >= nn
        zc = np.where(ok, zz, nn)
        logg = (
            0.5 * (_log_binom(zc, nn) + _log_binom(zc + k, nn + k))
            - (nn + 0.5 * k) * gamma_t
            + xlog1py(zc - nn, -math.exp(-gamma_t))
        )
        g = np.where(ok, np.exp(logg), 0.0)
        out[n[:m, 0], n[:m, 0] + k] = g @ np.diag(c0, k)
    out = np.triu(out) + np.triu(out, 1).conj().T
    return FockDensityMatrix(out, trace_tol=1e-10)


def default_trunc(initial, N, tail_tol=OUTPUT_TAIL_TOL):
    """Working truncation for finite-``N`` propagation of ``initial``."""
    top = initial.highest_occupied(Z_TAIL_TOL)
    if N < SMALL_N:
        return initial.dim
    tail = int(math.ceil(math.log(tail_tol) / math.log(N / (N + 1.0))))
    return max(initial.dim, top + 1 + tail + 10)


@dataclass(frozen=True)
class PropagatorRequest:
    """Everything needed to evolve one density matrix to time ``t``."""

    bath: BathParams
    t: float
    initial: FockDensityMatrix
    trunc: int = None
    tail_tol: float = 1e-10
    method: str = "fast"

    def __post_init__(self):
        if not self.t >= 0:
            raise ValidationError(f"t must be >= 0, got {self.t}")
        if self.trunc is None:
            object.__setattr__(self, "trunc", default_trunc(self.initial, self.bath.N))
        if self.trunc < self.initial.dim:
            raise ValidationError(f"trunc={self.trunc} below initial dim {self.initial.dim}")
        if self.method not in ("fast", "printed"):
            raise ValidationError(f"unknown method {self.method!r}")

    @property
    def gamma_t(self):
        return self.bath.gamma * self.t


def propagate(req):
    """Evolve ``req.initial`` under the master equation to ``req.t``.

    Upper-triangle entries come from the diagonal propagator, the lower
    triangle is the conjugate. The sum over initial levels stops at the
    highest level with population above ``1e-14``. A ``TruncationWarning``
    is issued when the output trace misses 1 by more than ``req.tail_tol``.
    """
    N = req.bath.N
    gt = req.gamma_t
    if N < SMALL_N:
        rho = zero_temperature_propagate(req.initial, gt)
        return rho.padded(req.trunc) if req.trunc > rho.dim else rho

    M = req.trunc
    if M > FAST_CAPACITY:
        raise CapacityError(f"trunc={M} exceeds {FAST_CAPACITY}")
    Z = req.initial.highest_occupied(Z_TAIL_TOL) + 1
    # off-diagonals can reach past the last populated level only by roundoff
    c0 = req.initial.entries[:Z, :Z]
    out = np.zeros((M, M), dtype=complex)
    for k in range(M):
        vec = np.diag(c0, k) if k < Z else None
        if vec is None or not np.any(vec):
            continue
        n_out = M - k
        if req.method == "fast":
            g = propagator_block(k, n_out, Z - k, gt, N)
        else:
            g = np.array(
                [[propagator_basis_entry(n, k, z, gt, N) for z in range(Z - k)] for n in range(n_out)]
            )
        idx = np.arange(n_out)
        out[idx, idx + k] = g @ vec
    out = np.triu(out) + np.triu(out, 1).conj().T
    deficit = abs(1.0 - float(np.trace(out).real))
    if deficit > req.tail_tol:
        warnings.warn(
            f"trunc={M} loses {deficit:.3e} of the trace; increase trunc",
            TruncationWarning,
            stacklevel=2,
        )
    return FockDensityMatrix(out, trace_tol=max(1e-10, 2 * deficit))


def evolve(initial, gamma_t, N, trunc=None, method="fast"):
    """Shorthand for :func:`propagate` in units where ``gamma = 1``."""
    req = PropagatorRequest(BathParams(1.0, N), gamma_t, initial, trunc=trunc, method=method)
    return propagate(req)


def positivity_time(N, gamma=1.0):
    """``t* = log((2N+2)/(2N+1)) / gamma``; an evolved Fock state is Wigner-positive from here on."""
    return math.log((2 * N + 2) / (2 * N + 1)) / gamma


# -- independent ODE oracle ----------------------------------------------------


def _lindblad_rhs(N, dim):
    """Truncated generator, applied through the bidiagonal structure of ``a``.

    ``(a rho a^dag)[n, m] = sqrt((n+1)(m+1)) rho[n+1, m+1]`` and
    ``(a^dag rho a)[n, m] = sqrt(n m) rho[n-1, m-1]``; the truncated
    ``a a^dag`` is ``diag(1, ..., dim-1, 0)``. Works on stacked ``(..., dim, dim)``.
    """
    lev = np.arange(dim, dtype=float)
    root = np.sqrt(np.outer(lev[1:], lev[1:]))
    n_sum = lev[:, None] + lev[None, :]
    anti = np.append(lev[1:], 0.0)
    anti_sum = anti[:, None] + anti[None, :]

    def rhs(rho):
        out = -(N + 1) * 0.5 * n_sum * rho
        out[..., :-1, :-1] += (N + 1) * root * rho[..., 1:, 1:]
        if N:
            out -= N * 0.5 * anti_sum * rho
            out[..., 1:, 1:] += N * root * rho[..., :-1, :-1]
        return out

    return rhs


def ode_oracle(initial, bath, gamma_t, trunc=None, rtol=1e-12, atol=1e-16):
    """Integrate the truncated master equation with adaptive Runge-Kutta (DOP853).

    ``gamma_t`` may be a scalar or a sequence of non-negative times; a list
    of states is returned in the latter case. The generator is assembled
    from truncated ladder operators, so it shares nothing with the closed
    forms above. Time is measured in units of ``1/gamma``.
    """
    scalar = np.ndim(gamma_t) == 0
    times = np.atleast_1d(np.asarray(gamma_t, dtype=float))
    if np.any(times < 0):
        raise ValidationError("gamma_t must be non-negative")
    N = bath.N
    M = trunc if trunc is not None else default_trunc(initial, N)
    rho0 = initial.padded(M).entries
    real = not np.any(rho0.imag)
    rhs = _lindblad_rhs(N, M)

    if real:
        def f(_, y):
            return rhs(y.reshape(M, M)).ravel()

        y = rho0.real.ravel().copy()
    else:
        def f(_, y):
            r = rhs(y[: M * M].reshape(M, M) + 1j * y[M * M :].reshape(M, M))
            return np.concatenate([r.real.ravel(), r.imag.ravel()])

        y = np.concatenate([rho0.real.ravel(), rho0.imag.ravel()])

    order = np.argsort(times)
    results = [None] * times.size
    t_now = 0.0
    for idx in order:
        t_next = times[idx]
        if t_next > t_now:
            sol = solve_ivp(f, (t_now, t_next), y, method="DOP853", rtol=rtol, atol=atol)
            if not sol.success:
                raise IntegrationError(sol.message)
            y = sol.y[:, -1]
            t_now = t_next
        c = y.reshape(M, M) if real else y[: M * M].reshape(M, M) + 1j * y[M * M :].reshape(M, M)
        c = 0.5 * (c + c.conj().T)
        results[idx] = FockDensityMatrix(c, trace_tol=1e-8)
    return results[0] if scalar else results
