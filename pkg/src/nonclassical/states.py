"""Number-basis density matrices and the state constructors.

All matrices live in a truncated Fock space with levels ``0 .. dim-1``.
The truncation is always explicit; :func:`suggested_dim` encodes the
heuristics used when a caller does not want to pick one by hand.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DimensionError, TruncationError, ValidationError
from .linalg import PSD_CLIP_TOL, hermitian_eigendecomposition, purity

HERMITIAN_TOL = 1e-12
DEFAULT_TRACE_TOL = 1e-10
COHERENT_NORM_TOL = 1e-10
THERMAL_TAIL_TOL = 1e-12
DISPLACED_LEAK_TOL = 1e-8

FAMILIES = ("consecutive", "skip", "equal", "geometric")


@dataclass(frozen=True)
class BathParams:
    """Coupling rate ``gamma`` (1/time) and mean thermal photon number ``N``."""

    gamma: float = 1.0
    N: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValidationError(f"gamma must be > 0, got {self.gamma}")
        if not self.N >= 0:
            raise ValidationError(f"N must be >= 0, got {self.N}")

    def gamma_t(self, t):
        return self.gamma * t


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """A validated, immutable density matrix ``C[n, m] = <n|rho|m>``.

    Construction checks Hermiticity, unit trace (to ``trace_tol``),
    real non-negative populations and positive semidefiniteness (smallest
    eigenvalue >= -1e-9). The stored array is a read-only copy.
    """

    entries: np.ndarray
    trace_tol: float = DEFAULT_TRACE_TOL
    check_psd: bool = field(default=True, repr=False)

    def __post_init__(self):
        c = np.array(self.entries, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
            raise DimensionError(f"expected a non-empty square matrix, got {c.shape}")
        asym = np.max(np.abs(c - c.conj().T))
        if asym > HERMITIAN_TOL:
            raise ValidationError(f"not Hermitian: max|C - C^H| = {asym:.3e}")
        diag = np.diag(c)
        if np.max(np.abs(diag.imag)) > HERMITIAN_TOL or np.min(diag.real) < -HERMITIAN_TOL:
            raise ValidationError("populations must be real and non-negative")
        tr = float(np.sum(diag.real))
        if abs(tr - 1.0) > self.trace_tol:
            raise ValidationError(f"trace {tr!r} differs from 1 by more than {self.trace_tol:g}")
        if self.check_psd:
            wmin = hermitian_eigendecomposition(c).eigenvalues[0]
            if wmin < -PSD_CLIP_TOL:
                raise ValidationError(f"not positive semidefinite: min eigenvalue {wmin:.3e}")
        c.setflags(write=False)
        object.__setattr__(self, "entries", c)

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def populations(self):
        return np.diag(self.entries).real.copy()

    def diagonal(self, k):
        """Entries ``C[n, n+k]`` (``k >= 0``) or ``C[n-k, n]`` (``k < 0``)."""
        return np.diag(self.entries, k).copy()

    def trace(self):
        return float(np.trace(self.entries).real)

    def purity(self):
        return purity(self.entries)

    def mean_photon_number(self):
        return float(np.dot(np.arange(self.dim), self.populations))

    def padded(self, dim):
        """Embed into a larger truncation (zeros in the new levels)."""
        if dim < self.dim:
            raise DimensionError(f"cannot pad dim {self.dim} down to {dim}")
        if dim == self.dim:
            return self
        c = np.zeros((dim, dim), dtype=complex)
        c[: self.dim, : self.dim] = self.entries
        return FockDensityMatrix(c, trace_tol=self.trace_tol, check_psd=False)

    def highest_occupied(self, tol=1e-14):
        """Largest level whose population exceeds ``tol`` (0 if none does)."""
        idx = np.nonzero(self.populations > tol)[0]
        return int(idx[-1]) if idx.size else 0

    def allclose(self, other, atol):
        d = max(self.dim, other.dim)
        return bool(np.max(np.abs(self.padded(d).entries - other.padded(d).entries)) <= atol)

    def __eq__(self, other):
        if not isinstance(other, FockDensityMatrix):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.entries, other.entries)

    __hash__ = None


def from_amplitudes(psi, dim=None):
    """Pure state ``|psi><psi|`` from number-basis amplitudes, normalized."""
    psi = np.asarray(psi, dtype=complex)
    if dim is not None:
        if np.any(psi[dim:] != 0):
            raise DimensionError(f"amplitudes occupy levels >= dim={dim}")
        psi = np.pad(psi[:dim], (0, max(0, dim - psi.size)))
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValidationError("zero state vector")
    psi = psi / norm
    # an outer product is positive semidefinite by construction
    return FockDensityMatrix(np.outer(psi, psi.conj()), check_psd=False)


def mixture(weights, states):
    """Convex combination of density matrices, padded to a common dim."""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ValidationError(f"mixture weights must be non-negative and sum to 1: {weights}")
    d = max(s.dim for s in states)
    c = sum(w * s.padded(d).entries for w, s in zip(weights, states))
    tol = max(s.trace_tol for s in states)
    return FockDensityMatrix(c, trace_tol=tol)


def fock_state(n0, dim):
    if not 0 <= n0 < dim:
        raise DimensionError(f"level {n0} outside truncation 0..{dim - 1}")
    c = np.zeros((dim, dim), dtype=complex)
    c[n0, n0] = 1.0
    return FockDensityMatrix(c)


def coherent_amplitudes(alpha, dim):
    """Untruncated-normalized amplitudes ``e^{-|a|^2/2} a^n / sqrt(n!)``."""
    n = np.arange(dim)
    a = complex(alpha)
    if a == 0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    logmag = -0.5 * abs(a) ** 2 + n * math.log(abs(a)) - 0.5 * gammaln(n + 1)
    return np.exp(logmag) * np.exp(1j * n * np.angle(a))


def coherent_state(alpha, dim):
    """Coherent state ``|alpha>``, renormalized after truncation.

    Raises ``TruncationError`` when the truncated norm falls below
    ``1 - 1e-10``.
    """
    c = coherent_amplitudes(alpha, dim)
    kept = float(np.sum(np.abs(c) ** 2))
    if kept < 1.0 - COHERENT_NORM_TOL:
        raise TruncationError(
            f"dim={dim} keeps only {kept:.12f} of |alpha={alpha}>; "
            f"try dim >= {suggested_dim('coherent', alpha=alpha)}"
        )
    return from_amplitudes(c)


def thermal_populations(N, dim):
    n = np.arange(dim)
    if N == 0:
        p = np.zeros(dim)
        p[0] = 1.0
        return p
    return np.exp(n * math.log(N / (N + 1.0)) - math.log(N + 1.0))


def thermal_state(N, dim):
    """Diagonal thermal state ``P_n = N^n / (N+1)^(n+1)``, renormalized."""
    if N < 0:
        raise ValidationError(f"N must be >= 0, got {N}")
    if N > 0 and (N / (N + 1.0)) ** dim > THERMAL_TAIL_TOL:
        raise TruncationError(
            f"thermal tail (N/(N+1))^dim = {(N / (N + 1.0)) ** dim:.3e} exceeds "
            f"{THERMAL_TAIL_TOL:g}; try dim >= {suggested_dim('thermal', N=N)}"
        )
    p = thermal_populations(N, dim)
    return FockDensityMatrix(np.diag(p / p.sum()).astype(complex), check_psd=False)


def lowering_operator(dim):
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def displacement_operator(alpha, dim):
    """Truncated ``exp(alpha a^dag - alpha* a)``.

    The generator ``G`` is skew-Hermitian, so ``iG`` is Hermitian and
    ``exp(G) = V exp(-i w) V^dag`` with ``iG = V w V^dag``. Entries near the
    truncation edge are inaccurate; callers work in a padded space and crop.
    """
    a = lowering_operator(dim)
    gen = alpha * a.T - np.conj(alpha) * a
    eig = hermitian_eigendecomposition(1j * gen)
    return eig.apply(lambda w: np.exp(-1j * w))


def displaced_thermal_state(alpha, N_th, dim):
    """``D(alpha) rho_th D(alpha)^dag`` cropped to ``dim`` levels."""
    if alpha == 0:
        return thermal_state(N_th, dim)
    inner = suggested_dim("thermal", N=N_th) if N_th > 0 else 1
    work = max(dim, inner) + int(math.ceil(12 * abs(alpha) + 2 * abs(alpha) ** 2)) + 40
    th = np.diag(thermal_populations(N_th, work))
    disp = displacement_operator(alpha, work)
    full = disp @ th @ disp.conj().T
    c = full[:dim, :dim]
    deficit = 1.0 - float(np.trace(c).real)
    if deficit > DISPLACED_LEAK_TOL:
        raise TruncationError(
            f"displaced thermal state leaks {deficit:.3e} past dim={dim}; "
            f"try dim >= {suggested_dim('displaced_thermal', alpha=alpha, N=N_th)}"
        )
    c = 0.5 * (c + c.conj().T)
    return FockDensityMatrix(c / np.trace(c).real)


def family_amplitudes(family, n):
    """Amplitudes of the four superposition families, index ``n >= 1``.

    consecutive: (|n-1> + |n>)/sqrt2
    skip:        (|n-1> + |n+1>)/sqrt2
    equal:       sum_{m=1..n} |m> / sqrt(n)
    geometric:   sum_{m=1..n-1} 2^{-m/2}|2m-1> + 2^{-(n-1)/2}|2n-1>
    """
    if n < 1:
        raise DimensionError(f"family index must be >= 1, got {n}")
    if family == "consecutive":
        psi = np.zeros(n + 1)
        psi[[n - 1, n]] = 1.0
    elif family == "skip":
        psi = np.zeros(n + 2)
        psi[[n - 1, n + 1]] = 1.0
    elif family == "equal":
        psi = np.zeros(n + 1)
        psi[1:] = 1.0
    elif family == "geometric":
        psi = np.zeros(2 * n)
        for m in range(1, n):
            psi[2 * m - 1] = 2.0 ** (-m / 2)
        psi[2 * n - 1] = 2.0 ** (-(n - 1) / 2)
    else:
        raise ValidationError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return psi / np.linalg.norm(psi)


def superposition_family(family, n, dim):
    psi = family_amplitudes(family, n)
    if psi.size > dim:
        raise DimensionError(f"{family} n={n} occupies level {psi.size - 1} >= dim={dim}")
    return from_amplitudes(psi, dim)


def suggested_dim(kind, tail_tol=THERMAL_TAIL_TOL, **params):
    """Truncation that keeps the neglected tail below ``tail_tol``.

    ``kind`` is one of ``fock`` (``n0``), ``coherent`` (``alpha``),
    ``thermal`` (``N``), ``displaced_thermal`` (``alpha``, ``N``),
    ``family`` (``family``, ``n``).
    """
    if kind == "fock":
        return int(params["n0"]) + 1
    if kind == "coherent":
        a = abs(params["alpha"])
        return int(math.ceil(a * a + 10 * a + 20))
    if kind == "thermal":
        N = params["N"]
        if N == 0:
            return 1
        return int(math.ceil(math.log(tail_tol) / math.log(N / (N + 1.0))))
    if kind == "displaced_thermal":
        a, N = abs(params["alpha"]), params["N"]
        base = suggested_dim("thermal", tail_tol, N=N)
        return int(math.ceil(a * a + 10 * a * math.sqrt(2 * N + 1))) + base + 20
    if kind == "family":
        return family_amplitudes(params["family"], params["n"]).size
    raise ValidationError(f"unknown state kind {kind!r}")


# -- plain-text serialization ------------------------------------------------


def format_density_matrix(rho):
    """Text form: ``dim D`` then D lines of D ``re im`` pairs (17 sig. digits)."""
    lines = [f"dim {rho.dim}"]
    for row in rho.entries:
        lines.append(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    return "\n".join(lines) + "\n"


def parse_density_matrix(text, trace_tol=DEFAULT_TRACE_TOL):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split()[0] != "dim":
        raise ValidationError("density-matrix file must start with 'dim D'")
    dim = int(lines[0].split()[1])
    vals = np.array([float(v) for ln in lines[1:] for v in ln.split()])
    if vals.size != 2 * dim * dim:
        raise ValidationError(f"expected {2 * dim * dim} numbers for dim {dim}, got {vals.size}")
    c = (vals[0::2] + 1j * vals[1::2]).reshape(dim, dim)
    return FockDensityMatrix(c, trace_tol=trace_tol)


def save_density_matrix(rho, path):
    with open(path, "w") as fh:
        fh.write(format_density_matrix(rho))


def load_density_matrix(path, trace_tol=DEFAULT_TRACE_TOL):
    with open(path) as fh:
        return parse_density_matrix(fh.read(), trace_tol=trace_tol)
