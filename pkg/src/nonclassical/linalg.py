"""Hermitian linear-algebra primitives used by the distance measures."""

from dataclasses import dataclass

import numpy as np

from .errors import NotPSDError, ValidationError

#: Eigenvalues above this (negative) value are treated as roundoff and clipped.
PSD_CLIP_TOL = 1e-9
#: Eigenvalues below this value mean the matrix is genuinely not PSD.
PSD_FAIL_TOL = 1e-6


@dataclass(frozen=True)
class HermitianEigenDecomposition:
    """Spectral decomposition ``A = V diag(w) V^dagger`` with ``w`` ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def apply(self, func):
        """Return ``f(A)`` for a scalar function ``f`` applied to the spectrum."""
        v = self.eigenvectors
        return (v * func(self.eigenvalues)) @ v.conj().T


def _check_hermitian(a, rtol=1e-10):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    asym = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if asym > rtol * max(scale, 1e-300) and asym > 0:
        raise ValidationError(
            f"matrix is not Hermitian: max|A - A^H| = {asym:.3e} (scale {scale:.3e})"
        )
    return a


def hermitian_eigendecomposition(a):
    """Diagonalize a Hermitian matrix.

    Raises ``ValidationError`` when ``a`` is not Hermitian to within
    ``1e-10 * max|a|``. The input is symmetrized before LAPACK sees it so
    the returned basis is exactly unitary to working precision.
    """
    a = _check_hermitian(a)
    sym = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(sym)
    return HermitianEigenDecomposition(eigenvalues=w, eigenvectors=v)


def trace_norm(a):
    """Sum of the absolute eigenvalues of a Hermitian matrix."""
    if np.size(a) == 0:
        return 0.0
    w = hermitian_eigendecomposition(a).eigenvalues
    return float(np.sum(np.abs(w)))


def matrix_sqrt_psd(a):
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-1e-6, 0)`` are clipped to zero; anything more
    negative raises ``NotPSDError``.
    """
    eig = hermitian_eigendecomposition(a)
    wmin = eig.eigenvalues[0] if eig.eigenvalues.size else 0.0
    if wmin < -PSD_FAIL_TOL:
        raise NotPSDError(f"smallest eigenvalue {wmin:.3e} < -{PSD_FAIL_TOL:g}")
    return eig.apply(lambda w: np.sqrt(np.clip(w, 0.0, None)))


def purity(a):
    """``Tr(A^2)`` for Hermitian ``A``."""
    a = np.asarray(a)
    return float(np.real(np.vdot(a, a)))
