"""Experiment sweeps: non-classicality versus n, time and bath temperature.

Configuration files are plain ``key = value`` lines. Repeating a key builds
a list, ``#`` starts a comment. Recognized keys::

    scenario      static_measures | zero_temp_dynamics | finite_temp_negativity
                  | superposition_families | single_state
    n_min, n_max  range of initial-state indices (inclusive)
    gamma_t       evolution time(s) in units of 1/gamma
    N             bath mean photon number(s)
    measure       hillery | bures | dodonov | negativity
    family        classical basis for relative measures:
                  coherent | thermal | displaced_thermal | rho_nu_plus
    state_family  consecutive | skip | equal | geometric
                  (superposition_families only)
    truncation    Fock-space dimension of the initial states
    budget        objective evaluations per family per search
    grid_points   coarse-scan points per search axis
    output        CSV path
"""

import datetime
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NonclassicalError
from .evolution import evolve
from .measures import CSV_HEADER, FAMILY_KINDS, MEASURES, default_families, measure
from .search import SearchConfig
from .states import FAMILIES, BathParams, family_amplitudes, fock_state, superposition_family

log = logging.getLogger(__name__)

SCENARIOS = (
    "static_measures",
    "zero_temp_dynamics",
    "finite_temp_negativity",
    "superposition_families",
    "single_state",
)
LIST_KEYS = {"gamma_t", "N", "measure", "family"}
SCALAR_KEYS = {"scenario", "n_min", "n_max", "state_family", "truncation", "budget", "grid_points", "output"}


class ConfigError(NonclassicalError, ValueError):
    """Carries every problem found in a configuration, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class SweepConfig:
    scenario: str
    n_range: tuple
    gamma_t: tuple = (0.0,)
    N: tuple = (0.0,)
    measures: tuple = ("negativity",)
    families: tuple = ("coherent", "thermal", "rho_nu_plus")
    state_family: str = None
    truncation: int = None
    budget: int = 600
    grid_points: int = 16
    output: str = None
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n_values(self):
        return list(range(self.n_range[0], self.n_range[1] + 1))

    def search_config(self):
        return SearchConfig(grid_points=self.grid_points, max_evals=self.budget)

    def max_level(self):
        n_hi = self.n_range[1]
        if self.scenario == "superposition_families" and self.state_family:
            return family_amplitudes(self.state_family, max(n_hi, 1)).size - 1
        return n_hi


def parse_config_text(text, source="<config>"):
    """Parse ``key = value`` lines into a dict of strings / string lists."""
    raw, errors = {}, []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"{source}:{lineno}: expected 'key = value', got {line!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in LIST_KEYS | SCALAR_KEYS:
            errors.append(f"{source}:{lineno}: unknown key {key!r}")
            continue
        if key in LIST_KEYS:
            raw.setdefault(key, []).extend(v for v in value.replace(",", " ").split())
        elif key in raw:
            errors.append(f"{source}:{lineno}: key {key!r} given twice")
        else:
            raw[key] = (value, lineno)
    return raw, errors


def _number(raw, key, conv, errors, source):
    if key not in raw:
        return None
    value, lineno = raw[key]
    try:
        return conv(value)
    except ValueError:
        errors.append(f"{source}:{lineno}: field {key!r} is not a valid {conv.__name__}: {value!r}")
        return None


def build_config(raw, errors, source="<config>"):
    errors = list(errors)
    scenario = raw.get("scenario", (None, 0))[0]
    if scenario is None:
        errors.append("missing required field 'scenario'")
    elif scenario not in SCENARIOS:
        errors.append(f"field 'scenario': {scenario!r} not one of {SCENARIOS}")

    n_min = _number(raw, "n_min", int, errors, source)
    n_max = _number(raw, "n_max", int, errors, source)
    if n_max is None and "n_max" not in raw:
        errors.append("missing required field 'n_max'")
    if n_min is None:
        n_min = 0 if scenario in ("static_measures", "single_state") else 1
    if scenario == "single_state" and n_max is not None and "n_min" not in raw:
        n_min = n_max
    if n_max is not None and n_min > n_max:
        errors.append(f"field 'n_min' ({n_min}) exceeds 'n_max' ({n_max})")
    if n_min is not None and n_min < 0:
        errors.append(f"field 'n_min' must be >= 0, got {n_min}")

    def floats(key):
        out = []
        for v in raw.get(key, []):
            try:
                out.append(float(v))
            except ValueError:
                errors.append(f"field {key!r}: not a number: {v!r}")
        return tuple(out)

    gamma_t = floats("gamma_t")
    N = floats("N")
    if any(g < 0 for g in gamma_t):
        errors.append("field 'gamma_t': values must be >= 0")
    if any(v < 0 for v in N):
        errors.append("field 'N': values must be >= 0")

    measures = tuple(raw.get("measure", []))
    for m in measures:
        if m not in MEASURES:
            errors.append(f"field 'measure': {m!r} not one of {MEASURES}")
    families = tuple(raw.get("family", [])) or ("coherent", "thermal", "rho_nu_plus")
    for f in families:
        if f not in FAMILY_KINDS:
            errors.append(f"field 'family': {f!r} not one of {FAMILY_KINDS}")

    state_family = raw.get("state_family", (None, 0))[0]
    if scenario == "superposition_families":
        if state_family is None:
            errors.append("missing required field 'state_family' for scenario superposition_families")
        elif state_family not in FAMILIES:
            errors.append(f"field 'state_family': {state_family!r} not one of {FAMILIES}")
        if n_min is not None and n_min < 1:
            errors.append("superposition families need n_min >= 1")

    # scenario defaults and requirements
    if scenario == "static_measures":
        gamma_t = gamma_t or (0.0,)
        N = N or (0.0,)
        measures = measures or MEASURES
    elif scenario == "zero_temp_dynamics":
        if not gamma_t:
            errors.append("missing required field 'gamma_t' for scenario zero_temp_dynamics")
        if N and any(v != 0 for v in N):
            errors.append("field 'N': zero_temp_dynamics requires N = 0")
        N = (0.0,)
        measures = measures or ("negativity",)
    elif scenario == "finite_temp_negativity":
        if not N:
            errors.append("missing required field 'N' for scenario finite_temp_negativity")
        if not gamma_t:
            errors.append("missing required field 'gamma_t' for scenario finite_temp_negativity")
        if measures and set(measures) != {"negativity"}:
            errors.append("field 'measure': finite_temp_negativity only supports negativity")
        measures = ("negativity",)
    elif scenario in ("superposition_families", "single_state"):
        gamma_t = gamma_t or (0.0,)
        N = N or ((0.06,) if scenario == "superposition_families" else (0.0,))
        measures = measures or ("negativity",)

    budget = _number(raw, "budget", int, errors, source)
    grid_points = _number(raw, "grid_points", int, errors, source)
    if budget is not None and budget < 0:
        errors.append(f"field 'budget' must be >= 0, got {budget}")
    if grid_points is not None and grid_points < 1:
        errors.append(f"field 'grid_points' must be >= 1, got {grid_points}")

    truncation = _number(raw, "truncation", int, errors, source)
    top = None
    family_ok = scenario != "superposition_families" or state_family in FAMILIES
    if n_max is not None and n_max >= 0 and family_ok:
        if scenario == "superposition_families":
            top = family_amplitudes(state_family, max(n_max, 1)).size - 1
        else:
            top = n_max
        if truncation is None:
            truncation = top + 10
        elif truncation < top + 10:
            errors.append(
                f"field 'truncation': {truncation} violates truncation >= max level + 10 "
                f"(max level {top}, need >= {top + 10})"
            )

    if errors:
        raise ConfigError(errors)
    return SweepConfig(
        scenario=scenario,
        n_range=(n_min, n_max),
        gamma_t=gamma_t,
        N=N,
        measures=measures,
        families=families,
        state_family=state_family,
        truncation=truncation,
        budget=500 if budget is None else budget,
        grid_points=16 if grid_points is None else grid_points,
        output=raw.get("output", (None, 0))[0],
    )


def validate_config(path):
    """Parse and validate a configuration file; raises ``ConfigError`` listing every violation."""
    with open(path) as fh:
        text = fh.read()
    raw, errors = parse_config_text(text, source=str(path))
    return build_config(raw, errors, source=str(path))


def config_from_text(text):
    raw, errors = parse_config_text(text)
    return build_config(raw, errors)


def initial_state(config, n):
    if config.scenario == "superposition_families":
        return superposition_family(config.state_family, n, config.truncation)
    return fock_state(n, config.truncation)


def state_id(config, n):
    if config.scenario == "superposition_families":
        return f"{config.state_family}:{n}"
    return str(n)


def _cell(config, n, gt, N, name):
    sid = state_id(config, n)
    try:
        rho = evolve(initial_state(config, n), gt, N)
        fams = None
        if name != "negativity":
            fams = default_families(rho, config.families, BathParams(1.0, N))
        rep = measure(name, rho, fams, config.search_config())
        return rep.csv_row(sid, gt, N), None
    except (NonclassicalError, ArithmeticError) as exc:
        row = [name, sid, repr(float(gt)), repr(float(N)), "nan", "failed", "0"]
        return row, f"{name} n={sid} gamma_t={gt} N={N}: {exc}"


@dataclass
class SweepResult:
    rows: list
    failures: list
    peaks: dict

    def summary(self):
        lines = []
        for (measure_name, gt, N), (n_peak, v) in sorted(self.peaks.items()):
            kind = "argmin" if measure_name == "dodonov" else "argmax"
            lines.append(f"{measure_name} gamma_t={gt:g} N={N:g}: {kind}_n = {n_peak} (value {v:.6g})")
        if self.failures:
            lines.append(f"{len(self.failures)} failed cell(s):")
            lines.extend("  " + f for f in self.failures)
        return "\n".join(lines)


def run_sweep(config, threads=1, out=None):
    """Evaluate every (state, gamma_t, N, measure) cell; write CSV in config order."""
    cells = [
        (n, gt, N, name)
        for name in config.measures
        for N in config.N
        for gt in config.gamma_t
        for n in config.n_values
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _cell(config, *c), cells))
    else:
        results = [_cell(config, *c) for c in cells]
    rows = [r for r, _ in results]
    failures = [f for _, f in results if f]
    for f in failures:
        log.warning(f)

    peaks = {}
    for (n, gt, N, name), (row, err) in zip(cells, results):
        if err:
            continue
        v = float(row[4])
        key = (name, gt, N)
        better = (lambda a, b: a < b) if name == "dodonov" else (lambda a, b: a > b)
        if key not in peaks or better(v, peaks[key][1]):
            peaks[key] = (n, v)

    path = out or config.output
    if path:
        write_sweep_csv(rows, path, config)
    return SweepResult(rows, failures, peaks)


def write_sweep_csv(rows, path, config):
    import csv

    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    with open(path, "w", newline="") as fh:
        fh.write(f"# nonclassical sweep scenario={config.scenario} generated={stamp}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(rows)


def curve(result, name, gt, N):
    """``(n, value)`` arrays for one curve of a sweep."""
    pts = [
        (int(r[1]) if r[1].isdigit() else r[1], float(r[4]))
        for r in result.rows
        if r[0] == name and math.isclose(float(r[2]), gt) and math.isclose(float(r[3]), N) and r[5] != "failed"
    ]
    return np.array([p[0] for p in pts]), np.array([p[1] for p in pts])
