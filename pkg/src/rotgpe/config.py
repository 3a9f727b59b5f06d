"""Run configuration: the line-based config grammar and initial data specs.

The format is plain ``key = value`` lines under ``[section]`` headers with
sections [grid], [phys], [evolve], [init] and [output]; ``#`` starts a
comment.  Vector values are whitespace- or comma-separated and a single value
broadcasts across axes.  Unknown sections or keys are errors, every error
carries its line number, and all structural invariants are validated at parse
time.  Command-line ``--key value`` overrides beat file values in all cases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evolution import SCHEMES, EvolveConfig
from .grid import ComplexField, Grid, make_grid
from .operators import PhysParams


class ConfigError(ValueError):
    """Config rejection with an optional 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


# (section, key) -> default value as a config string
_DEFAULTS: dict[tuple[str, str], str] = {
    ("grid", "d"): "2",
    ("grid", "n"): "128 128",
    ("grid", "L"): "8 8",
    ("phys", "omega"): "1",
    ("phys", "Omega"): "0",
    ("phys", "g"): "0",
    ("phys", "sigma"): "1",
    ("phys", "gamma"): "1",
    ("phys", "mass"): "1",
    ("evolve", "dt"): "1e-3",
    ("evolve", "T"): "1",
    ("evolve", "scheme"): "projection",
    ("evolve", "record_every"): "1",
    ("evolve", "snapshot_every"): "0",
    ("init", "init"): "gaussian",
    ("init", "seed"): "0",
    ("init", "noise"): "0.1",
    ("output", "dir"): "out",
}

_SECTIONS = ("grid", "phys", "evolve", "init", "output")
_KEY_SECTION = {key: section for (section, key) in _DEFAULTS}


@dataclass(frozen=True)
class InitSpec:
    """Parsed ``init = ...`` line: the kind plus its arguments."""

    kind: str
    k: int = 1
    m: int = 0
    terms: tuple[tuple[int, int, complex], ...] = ()  # (k, m, coeff) for mix
    path: str = ""
    seed: int = 0
    noise: float = 0.1


@dataclass(frozen=True)
class RunConfig:
    grid: Grid
    phys: PhysParams
    evolve: EvolveConfig
    init: InitSpec
    output_dir: str
    seed: int


def _parse_floats(raw: str, line: int | None) -> list[float]:
    parts = raw.replace(",", " ").split()
    try:
        return [float(v) for v in parts]
    except ValueError:
        raise ConfigError(f"expected numbers, got {raw!r}", line)


def _parse_ints(raw: str, line: int | None) -> list[int]:
    vals = _parse_floats(raw, line)
    out = []
    for v in vals:
        if v != int(v):
            raise ConfigError(f"expected integers, got {raw!r}", line)
        out.append(int(v))
    return out


def _scalar_float(raw: str, line: int | None) -> float:
    vals = _parse_floats(raw, line)
    if len(vals) != 1:
        raise ConfigError(f"expected a single number, got {raw!r}", line)
    return vals[0]


def _scalar_int(raw: str, line: int | None) -> int:
    vals = _parse_ints(raw, line)
    if len(vals) != 1:
        raise ConfigError(f"expected a single integer, got {raw!r}", line)
    return vals[0]


def _broadcast(values: list, d: int, what: str, line: int | None) -> list:
    if len(values) == 1:
        return values * d
    if len(values) != d:
        raise ConfigError(f"{what} needs 1 or {d} values, got {len(values)}", line)
    return values


def _parse_init_spec(raw: str, seed: int, noise: float, line: int | None) -> InitSpec:
    parts = raw.split()
    if not parts:
        raise ConfigError("empty init spec", line)
    kind = parts[0]
    args = parts[1:]
    if kind == "gaussian" or kind == "vortex_seed":
        if args:
            raise ConfigError(f"init {kind} takes no arguments", line)
        return InitSpec(kind=kind, seed=seed, noise=noise)
    if kind == "eigenmode":
        if len(args) != 2:
            raise ConfigError("init eigenmode takes exactly: k m", line)
        k, m = _parse_ints(" ".join(args), line)
        return InitSpec(kind=kind, k=k, m=m, seed=seed, noise=noise)
    if kind == "mix":
        if len(args) == 0 or len(args) % 3 != 0:
            raise ConfigError("init mix takes triples: k m coeff [k m coeff ...]", line)
        terms = []
        for i in range(0, len(args), 3):
            k = _scalar_int(args[i], line)
            m = _scalar_int(args[i + 1], line)
            try:
                coeff = complex(args[i + 2])
            except ValueError:
                raise ConfigError(f"bad mix coefficient {args[i + 2]!r}", line)
            terms.append((k, m, coeff))
        return InitSpec(kind=kind, terms=tuple(terms), seed=seed, noise=noise)
    if kind == "file":
        if len(args) != 1:
            raise ConfigError("init file takes exactly one path", line)
        return InitSpec(kind=kind, path=args[0], seed=seed, noise=noise)
    raise ConfigError(f"unknown init kind {kind!r}", line)


def parse_config(text: str, overrides: dict[str, str] | None = None) -> RunConfig:
    """Parse config text, apply CLI overrides, validate every invariant."""
    raw: dict[tuple[str, str], tuple[str, int | None]] = {
        key: (value, None) for key, value in _DEFAULTS.items()}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got {stripped!r}", lineno)
        if section is None:
            raise ConfigError("key outside any [section]", lineno)
        key, value = (s.strip() for s in stripped.split("=", 1))
        if (section, key) not in _DEFAULTS:
            raise ConfigError(f"unknown key {key!r} in section [{section}]", lineno)
        raw[(section, key)] = (value, lineno)

    if overrides:
        for key, value in overrides.items():
            if key not in _KEY_SECTION:
                raise ConfigError(f"unknown override key {key!r}")
            raw[(_KEY_SECTION[key], key)] = (str(value), None)

    def get(section: str, key: str) -> tuple[str, int | None]:
        return raw[(section, key)]

    val, ln = get("grid", "d")
    d = _scalar_int(val, ln)
    if d not in (2, 3):
        raise ConfigError(f"dimension must be 2 or 3, got {d}", ln)
    val, ln = get("grid", "n")
    n = _broadcast(_parse_ints(val, ln), d, "n", ln)
    val, ln_L = get("grid", "L")
    L = _broadcast(_parse_floats(val, ln_L), d, "L", ln_L)
    try:
        grid = make_grid(d, n, L)
    except ValueError as exc:
        raise ConfigError(str(exc), ln)

    val, ln = get("phys", "omega")
    omega = _broadcast(_parse_floats(val, ln), d, "omega", ln)
    phys_fields = {}
    for key, name in (("Omega", "Omega"), ("g", "g"), ("sigma", "sigma"),
                      ("gamma", "gamma"), ("mass", "mass_target")):
        val, ln = get("phys", key)
        phys_fields[name] = _scalar_float(val, ln)
    try:
        phys = PhysParams(omega=tuple(omega), **phys_fields)
    except ValueError as exc:
        raise ConfigError(str(exc))

    val, ln = get("evolve", "scheme")
    scheme = val
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {SCHEMES}, got {scheme!r}", ln)
    try:
        evolve_cfg = EvolveConfig(
            dt=_scalar_float(*get("evolve", "dt")),
            T=_scalar_float(*get("evolve", "T")),
            scheme=scheme,
            record_every=_scalar_int(*get("evolve", "record_every")),
            snapshot_every=_scalar_int(*get("evolve", "snapshot_every")),
        )
    except ValueError as exc:
        raise ConfigError(str(exc))

    seed = _scalar_int(*get("init", "seed"))
    noise = _scalar_float(*get("init", "noise"))
    val, ln = get("init", "init")
    init = _parse_init_spec(val, seed, noise, ln)

    output_dir, _ = get("output", "dir")
    return RunConfig(grid=grid, phys=phys, evolve=evolve_cfg, init=init,
                     output_dir=output_dir, seed=seed)


def build_initial_state(rc_or_spec, grid: Grid | None = None,
                        p: PhysParams | None = None) -> ComplexField:
    """Construct the initial field of a run, rescaled to the target mass."""
    from . import io as app_io
    from .ground_state import gaussian_seed
    from .modes import EigenIndex, eigenfunction, mode_state, synthesize

    if isinstance(rc_or_spec, RunConfig):
        spec, grid, p = rc_or_spec.init, rc_or_spec.grid, rc_or_spec.phys
    else:
        spec = rc_or_spec
        if grid is None or p is None:
            raise ValueError("grid and parameters are required with a bare InitSpec")

    if spec.kind == "gaussian":
        return gaussian_seed(grid, p)
    if spec.kind == "eigenmode":
        f = eigenfunction(EigenIndex(spec.k, spec.m), grid, p)
        f.data *= np.sqrt(p.mass_target)
        return f
    if spec.kind == "mix":
        ms = mode_state([EigenIndex(k, m) for k, m, _ in spec.terms],
                        [c for _, _, c in spec.terms], p)
        f = synthesize(ms, grid, p)
        return _rescaled(f, p.mass_target)
    if spec.kind == "vortex_seed":
        rng = np.random.default_rng(spec.seed)
        f = gaussian_seed(grid, p)
        f.data *= np.exp(1j * spec.noise * _smooth_noise(grid, rng))
        return _rescaled(f, p.mass_target)
    if spec.kind == "file":
        _, f = app_io.read_snapshot(spec.path)
        if f.grid.n != grid.n or f.grid.L != grid.L:
            raise ConfigError(
                f"snapshot grid {f.grid.n}/{f.grid.L} does not match run grid "
                f"{grid.n}/{grid.L}")
        return _rescaled(f, p.mass_target)
    raise ConfigError(f"unknown init kind {spec.kind!r}")


def _rescaled(f: ComplexField, target: float) -> ComplexField:
    from .functionals import mass
    m = mass(f)
    if m <= 0.0:
        raise ConfigError("initial state has zero mass")
    f.data *= np.sqrt(target / m)
    return f


def _smooth_noise(grid: Grid, rng: np.random.Generator, kc: int = 4) -> np.ndarray:
    """Band-limited real random field with unit-scale amplitude."""
    coeff = np.zeros(grid.shape, dtype=np.complex128)
    low = tuple(slice(0, kc) for _ in range(grid.d))
    block = rng.standard_normal((kc,) * grid.d) + 1j * rng.standard_normal((kc,) * grid.d)
    coeff[low] = block
    fieldr = np.fft.ifftn(coeff, norm="ortho").real
    peak = np.max(np.abs(fieldr))
    return fieldr / peak if peak > 0 else fieldr
