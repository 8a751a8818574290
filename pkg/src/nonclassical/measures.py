"""Relative non-classicality measures and the classical reference families.

Three distances to a set of classical states are provided:

* Hillery: ``inf ||rho - sigma||_1``, range ``[0, 2]``;
* Bures: ``inf sqrt(2 (1 - F(rho, sigma)))`` with the Uhlmann fidelity
  ``F = Tr sqrt(sqrt(rho) sigma sqrt(rho))``, range ``[0, sqrt2]``;
* Dodonov: ``sup Tr(rho sigma) / sqrt(Tr rho^2 Tr sigma^2)``, a
  classicality (1 means classical), range ``[0, 1]``.

The classical set is never complete. It is represented by parameterized
families (coherent, thermal, displaced thermal and the broadened
microcanonical mixtures ``rho_nu^+``) searched with
:func:`~nonclassical.search.search_over_family`; a union of families is the
minimum (maximum) over its members.
"""

import csv
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.stats import poisson

from .errors import DimensionError, ValidationError
from .evolution import default_trunc, evolve, positivity_time
from .linalg import hermitian_eigendecomposition, matrix_sqrt_psd, trace_norm
from .search import SearchConfig, search_over_family
from .states import (
    BathParams,
    FockDensityMatrix,
    coherent_state,
    displaced_thermal_state,
    fock_state,
    mixture,
    suggested_dim,
    thermal_state,
)

MEASURES = ("hillery", "bures", "dodonov", "negativity")
RANGES = {
    "hillery": (0.0, 2.0),
    "bures": (0.0, math.sqrt(2.0)),
    "dodonov": (0.0, 1.0),
    "negativity": (0.0, math.inf),
}
RANGE_SLACK = 1e-9
CLASSICALITY_TOL = 1e-3


# -- classical reference states ----------------------------------------------


@dataclass(frozen=True)
class ClassicalStateSpec:
    """One classical reference state.

    ``kind`` is ``coherent`` (``alpha``), ``thermal`` (``N_th``),
    ``displaced_thermal`` (``alpha``, ``N_th``) or
    ``broadened_microcanonical`` (``nu``, ``bath``).
    """

    kind: str
    alpha: complex = 0j
    N_th: float = 0.0
    nu: float = 0.0
    bath: BathParams = BathParams()

    def materialize(self, dim):
        if self.kind == "coherent":
            return coherent_state(self.alpha, dim)
        if self.kind == "thermal":
            return thermal_state(self.N_th, dim)
        if self.kind == "displaced_thermal":
            return displaced_thermal_state(self.alpha, self.N_th, dim)
        if self.kind == "broadened_microcanonical":
            # Gaussian members are non-negative by construction; these are checked
            return build_rho_nu_plus(self.nu, self.bath, dim, verify=True)
        raise ValidationError(f"unknown classical kind {self.kind!r}")

    def label(self):
        if self.kind == "coherent":
            return f"coherent(alpha={self.alpha:.6g})"
        if self.kind == "thermal":
            return f"thermal(N={self.N_th:.6g})"
        if self.kind == "displaced_thermal":
            return f"displaced_thermal(alpha={self.alpha:.6g},N={self.N_th:.6g})"
        return f"rho_nu_plus(nu={self.nu:.6g},N={self.bath.N:.6g})"


def min_dim(kind, tail=1e-11, **params):
    """Smallest truncation whose neglected tail is below ``tail``."""
    if kind == "coherent":
        a2 = abs(params["alpha"]) ** 2
        return int(poisson.isf(tail, a2)) + 2 if a2 > 0 else 1
    if kind == "rho_nu_plus":
        top = int(math.floor(params["nu"])) + 1
        N = params["bath"].N
        return default_trunc(fock_state(top, top + 1), N)
    return suggested_dim(kind, **params)


@lru_cache(maxsize=512)
def _evolved_fock(n, N, gamma, dim):
    t_star = positivity_time(N, gamma)
    rho = evolve(fock_state(n, n + 1), gamma * t_star, N, trunc=max(dim, default_trunc(fock_state(n, n + 1), N)))
    if rho.dim > dim:
        c = rho.entries[:dim, :dim]
        lost = 1.0 - float(np.trace(c).real)
        if lost > 1e-10:
            raise DimensionError(f"rho_{n}^+ needs more than dim={dim} levels (loses {lost:.2e})")
        return FockDensityMatrix(c / np.trace(c).real)
    return rho.padded(dim)


@lru_cache(maxsize=512)
def _component_negativity(n, N, gamma):
    from .wigner import negativity

    return negativity(_evolved_fock(n, N, gamma, default_trunc(fock_state(n, n + 1), N)))


def rho_plus(n, bath, dim):
    """Fock state ``n`` evolved to the positivity time ``t*``."""
    return _evolved_fock(int(n), float(bath.N), float(bath.gamma), int(dim))


def build_rho_nu_plus(nu, bath, dim, verify=False):
    """``(x + 1 - nu) rho_x^+ + (nu - x) rho_{x+1}^+`` with ``x = floor(nu)``.

    With ``verify=True`` both components are checked to have Wigner
    negativity at most ``1e-3`` (a mixture of non-negative Wigner functions
    is non-negative).
    """
    if nu < 0:
        raise ValidationError(f"nu must be >= 0, got {nu}")
    x = int(math.floor(nu))
    w_hi = nu - x
    parts = [(1.0 - w_hi, x)] + ([(w_hi, x + 1)] if w_hi > 0 else [])
    if verify:
        for _, n in parts:
            eta = _component_negativity(n, float(bath.N), float(bath.gamma))
            if eta > CLASSICALITY_TOL:
                raise ValidationError(f"rho_{n}^+ has negativity {eta:.3e} > {CLASSICALITY_TOL:g}")
    if len(parts) == 1:
        return rho_plus(x, bath, dim)
    return mixture([w for w, _ in parts], [rho_plus(n, bath, dim) for _, n in parts])


# -- parameterized families ----------------------------------------------------


@dataclass(frozen=True)
class CoherentFamily:
    """Coherent states ``|alpha|<= alpha_max``; real ``alpha >= 0`` when ``phase_symmetric``."""

    alpha_max: float
    phase_symmetric: bool = True
    name: str = "coherent"

    @property
    def bounds(self):
        a = self.alpha_max
        return ((0.0, a),) if self.phase_symmetric else ((-a, a), (-a, a))

    def spec(self, x):
        alpha = complex(x[0]) if self.phase_symmetric else complex(x[0], x[1])
        return ClassicalStateSpec("coherent", alpha=alpha)

    def working_dim(self):
        return min_dim("coherent", alpha=self.alpha_max * (1 if self.phase_symmetric else math.sqrt(2)))


@dataclass(frozen=True)
class ThermalFamily:
    N_max: float = 10.0
    name: str = "thermal"

    @property
    def bounds(self):
        return ((0.0, self.N_max),)

    def spec(self, x):
        return ClassicalStateSpec("thermal", N_th=float(x[0]))

    def working_dim(self):
        return suggested_dim("thermal", N=self.N_max)


@dataclass(frozen=True)
class DisplacedThermalFamily:
    alpha_max: float
    N_max: float = 10.0
    phase_symmetric: bool = True
    name: str = "displaced_thermal"

    @property
    def bounds(self):
        a = self.alpha_max
        ab = ((0.0, a),) if self.phase_symmetric else ((-a, a), (-a, a))
        return ab + ((0.0, self.N_max),)

    def spec(self, x):
        alpha = complex(x[0]) if self.phase_symmetric else complex(x[0], x[1])
        return ClassicalStateSpec("displaced_thermal", alpha=alpha, N_th=float(x[-1]))

    def working_dim(self):
        a = self.alpha_max * (1 if self.phase_symmetric else math.sqrt(2))
        return suggested_dim("displaced_thermal", alpha=a, N=self.N_max)


@dataclass(frozen=True)
class RhoNuPlusFamily:
    nu_max: float
    bath: BathParams = BathParams()
    name: str = "rho_nu_plus"

    @property
    def bounds(self):
        return ((0.0, self.nu_max),)

    def spec(self, x):
        return ClassicalStateSpec("broadened_microcanonical", nu=float(x[0]), bath=self.bath)

    def working_dim(self):
        return min_dim("rho_nu_plus", nu=self.nu_max, bath=self.bath)


FAMILY_KINDS = ("coherent", "thermal", "displaced_thermal", "rho_nu_plus")


def is_phase_symmetric(rho, tol=1e-14):
    c = rho.entries
    return bool(np.max(np.abs(c - np.diag(np.diag(c))), initial=0.0) <= tol)


def default_families(rho, kinds=("coherent", "thermal", "rho_nu_plus"), bath=BathParams()):
    """Families with the standard parameter boxes for the state ``rho``.

    ``|alpha| <= sqrt(2 n_max) + 3``, ``N_th in [0, 10]``,
    ``nu in [0, 2 n_max + 5]``, where ``n_max`` is the highest populated level.
    Evolving to ``t*`` at least halves the energy of a Fock state, so the
    closest ``rho_nu^+`` to ``|n>`` sits near ``nu = 2n``.
    """
    n_max = rho.highest_occupied(1e-12)
    a_max = math.sqrt(2 * n_max) + 3
    sym = is_phase_symmetric(rho)
    out = []
    for kind in kinds:
        if kind == "coherent":
            out.append(CoherentFamily(a_max, sym))
        elif kind == "thermal":
            out.append(ThermalFamily(10.0))
        elif kind == "displaced_thermal":
            out.append(DisplacedThermalFamily(a_max, 10.0, sym))
        elif kind == "rho_nu_plus":
            out.append(RhoNuPlusFamily(2.0 * n_max + 5.0, bath))
        else:
            raise ValidationError(f"unknown family kind {kind!r}; expected one of {FAMILY_KINDS}")
    return out


# -- pairwise quantities -------------------------------------------------------


def _common(rho, sigma):
    if rho.dim != sigma.dim:
        raise DimensionError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    return rho.entries, sigma.entries


def hillery_distance(rho, sigma):
    """Trace norm ``||rho - sigma||_1``."""
    a, b = _common(rho, sigma)
    return trace_norm(a - b)


def bures_fidelity(rho1, rho2, sqrt_rho1=None):
    """Uhlmann fidelity ``Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))`` (not squared)."""
    a, b = _common(rho1, rho2)
    s = matrix_sqrt_psd(a) if sqrt_rho1 is None else sqrt_rho1
    m = s @ b @ s
    w = hermitian_eigendecomposition(0.5 * (m + m.conj().T)).eigenvalues
    return float(min(np.sum(np.sqrt(np.clip(w, 0.0, None))), 1.0))


def bures_distance(rho1, rho2, sqrt_rho1=None):
    return math.sqrt(max(2.0 * (1.0 - bures_fidelity(rho1, rho2, sqrt_rho1)), 0.0))


def normalized_overlap(rho, sigma):
    """``Tr(rho sigma) / sqrt(Tr rho^2 Tr sigma^2)``."""
    a, b = _common(rho, sigma)
    num = float(np.real(np.vdot(a, b)))
    return num / math.sqrt(rho.purity() * sigma.purity())


# -- reports -------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureReport:
    measure: str
    value: float
    argopt: ClassicalStateSpec = None
    evaluations: int = 0
    converged: bool = True
    search_tol: float = 0.0

    def __post_init__(self):
        check_range(self.measure, self.value)

    def csv_row(self, state_id, gamma_t, N):
        return [self.measure, state_id, repr(float(gamma_t)), repr(float(N)), repr(float(self.value)),
                str(bool(self.converged)).lower(), str(int(self.evaluations))]


CSV_HEADER = ["measure", "n_or_state_id", "gamma_t", "N", "value", "converged", "evaluations"]


def check_range(measure, value):
    if measure not in RANGES:
        raise ValidationError(f"unknown measure {measure!r}")
    lo, hi = RANGES[measure]
    if not (lo - RANGE_SLACK <= value <= hi + RANGE_SLACK):
        raise ValidationError(f"{measure} value {value!r} outside [{lo}, {hi}]")


def write_reports_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        w.writerows(rows)


# -- searched measures ---------------------------------------------------------


def _search_union(rho, families, config, make_objective, maximize):
    best = None
    evals = 0
    converged = True
    for fam in families:
        dim = max(rho.dim, fam.working_dim())
        target = rho.padded(dim)
        score = make_objective(target)

        def objective(x, fam=fam, dim=dim, score=score):
            s = score(fam.spec(x).materialize(dim))
            return -s if maximize else s

        res = search_over_family(objective, fam, config)
        evals += res.evaluations
        converged &= res.converged
        if res.argopt is not None and (best is None or res.value < best.value):
            best = res
    if best is None:
        return (math.nan, None, evals, False)
    value = -best.value if maximize else best.value
    return value, best.argopt, evals, converged


def _families(rho, families):
    return default_families(rho) if families is None else list(families)


def hillery_eta(rho, families=None, config=SearchConfig()):
    """Infimum of the trace distance to the union of ``families``."""
    fams = _families(rho, families)

    def make(target):
        return lambda sigma: hillery_distance(target, sigma)

    value, arg, evals, conv = _search_union(rho, fams, config, make, maximize=False)
    return MeasureReport("hillery", min(value, 2.0), arg, evals, conv, config.fatol)


def bures_eta(rho, families=None, config=SearchConfig()):
    """Infimum of ``sqrt(2 (1 - F))`` over the union of ``families``."""
    fams = _families(rho, families)

    def make(target):
        s = matrix_sqrt_psd(target.entries)
        return lambda sigma: bures_distance(target, sigma, sqrt_rho1=s)

    value, arg, evals, conv = _search_union(rho, fams, config, make, maximize=False)
    return MeasureReport("bures", min(value, math.sqrt(2.0)), arg, evals, conv, config.fatol)


def dodonov_eta(rho, families=None, config=SearchConfig()):
    """Supremum of the purity-normalized overlap over the union of ``families``."""
    fams = _families(rho, families)

    def make(target):
        return lambda sigma: normalized_overlap(target, sigma)

    value, arg, evals, conv = _search_union(rho, fams, config, make, maximize=True)
    return MeasureReport("dodonov", min(max(value, 0.0), 1.0), arg, evals, conv, config.fatol)


def negativity_eta(rho):
    from .wigner import negativity_report

    r = negativity_report(rho)
    return MeasureReport("negativity", r.value, None, r.n_points, True, r.error)


def measure(name, rho, families=None, config=SearchConfig()):
    """Dispatch by measure name (``hillery``, ``bures``, ``dodonov``, ``negativity``)."""
    if name == "hillery":
        return hillery_eta(rho, families, config)
    if name == "bures":
        return bures_eta(rho, families, config)
    if name == "dodonov":
        return dodonov_eta(rho, families, config)
    if name == "negativity":
        return negativity_eta(rho)
    raise ValidationError(f"unknown measure {name!r}; expected one of {MEASURES}")


def fock_coherent_overlap(n):
    """``max_alpha |<n|alpha>|^2 = e^{-n} n^n / n!``."""
    if n == 0:
        return 1.0
    return math.exp(-n + n * math.log(n) - math.lgamma(n + 1))


def with_budget(config, max_evals):
    return replace(config, max_evals=max_evals)
