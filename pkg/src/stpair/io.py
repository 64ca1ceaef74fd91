"""Eigenvalue files, synthetic Sato-Tate data, experiment configs and reports.

Eigenvalue files hold one JSON object per line::

    {"level": 1, "weight": 12, "label": "delta", "normalized": false,
     "coefficients": {"2": -24, "3": 252}}

With ``normalized`` false the values are the integer coefficients c(p) and
are normalized exactly before the single rounding to a double.  Reports are
CSV files whose leading ``#`` lines record the configuration, seed and
software versions; output is byte-identical for a fixed configuration.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from . import __version__
from .angles import HeckeAngleSequence, normalize_eigenvalue, st_cdf_inverse
from .arith.sieve import first_primes, sieve
from .errors import ConfigError, DataError, DeligneViolation, LevelDividesPrime, ParseError

CSV_COLUMNS = ("s", "value", "count", "norm_pi", "norm_L", "norm_A")
ESTIMATORS = ("global", "local", "rescaled", "smoothed", "average")
SOURCES = ("synthetic", "newform", "file")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _parse_record(obj: Any, line: int) -> HeckeAngleSequence:
    if not isinstance(obj, dict):
        raise ParseError("record must be a JSON object", line)
    try:
        level = obj["level"]
        weight = obj["weight"]
        coeffs = obj["coefficients"]
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}", line) from None
    label = str(obj.get("label", f"record{line}"))
    normalized = obj.get("normalized", True)
    if not isinstance(level, int) or level < 1:
        raise ParseError(f"level must be a positive integer, got {level!r}", line)
    if not isinstance(weight, int) or weight < 0 or weight % 2:
        raise ParseError(f"weight must be a nonnegative even integer, got {weight!r}", line)
    if not isinstance(normalized, bool):
        raise ParseError("normalized must be true or false", line)
    if not isinstance(coeffs, dict):
        raise ParseError("coefficients must be an object keyed by prime", line)
    primes: List[int] = []
    values: List[float] = []
    for key, raw in coeffs.items():
        try:
            p = int(key)
        except ValueError:
            raise ParseError(f"coefficient key {key!r} is not an integer", line) from None
        if not _is_prime(p):
            raise ParseError(f"coefficient key {p} is not prime", line)
        if level % p == 0:
            raise LevelDividesPrime(f"line {line}: prime {p} divides the level {level} ({label})")
        if normalized:
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise ParseError(f"a_{p} must be a number", line)
            a = float(raw)
            if abs(a) > 2.0 + 1e-9:
                raise DeligneViolation(f"line {line}: |a_{p}| = {abs(a)} > 2 in {label}")
        else:
            if isinstance(raw, bool) or not isinstance(raw, int):
                raise ParseError(f"c_{p} must be an integer when normalized is false", line)
            if weight < 2:
                raise ParseError("integer coefficients need a weight of at least 2", line)
            if raw * raw > 4 * p ** (weight - 1):
                raise DeligneViolation(
                    f"line {line}: |c_{p}| = {abs(raw)} > 2 p^((k-1)/2) in {label}"
                )
            a = normalize_eigenvalue(raw, p, weight)
        primes.append(p)
        values.append(a)
    order = np.argsort(primes, kind="stable")
    primes_arr = np.asarray(primes, dtype=np.int64)[order]
    if primes_arr.size > 1 and np.any(np.diff(primes_arr) == 0):
        raise ParseError("duplicate prime in coefficients", line)
    values_arr = np.clip(np.asarray(values, dtype=float)[order], -2.0, 2.0)
    return HeckeAngleSequence.from_eigenvalues(level, weight, label, primes_arr, values_arr)


def ingest(path: Union[str, Path]) -> List[HeckeAngleSequence]:
    """Read an eigenvalue file; blank lines are skipped."""
    out: List[HeckeAngleSequence] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, text in enumerate(fh, start=1):
            text = text.strip()
            if not text:
                continue
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line_no) from None
            out.append(_parse_record(obj, line_no))
    return out


def emit(sequences: Sequence[HeckeAngleSequence], path: Union[str, Path]) -> Path:
    """Write normalized eigenvalues, one record per sequence."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for seq in sequences:
            record = {
                "level": int(seq.level),
                "weight": int(seq.weight),
                "label": seq.label,
                "normalized": True,
                "coefficients": {str(int(p)): float(a) for p, a in zip(seq.primes, seq.eigenvalues)},
            }
            fh.write(json.dumps(record) + "\n")
    return path


def synth_sato_tate(n: int, seed: int = 0, primes: Optional[np.ndarray] = None,
                    label: Optional[str] = None) -> HeckeAngleSequence:
    """n i.i.d. Sato-Tate angles on the first n primes (or on ``primes``)."""
    if n < 1:
        raise ConfigError("n must be at least 1")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    thetas = np.asarray(st_cdf_inverse(u), dtype=float).reshape(-1)
    if primes is None:
        primes = first_primes(n)
    elif len(primes) != n:
        raise ConfigError("need exactly one prime per angle")
    return HeckeAngleSequence(1, 0, label or f"synthetic-seed{seed}", primes, thetas)


def synth_family(count: int, n: int, seed: int = 0,
                 primes: Optional[np.ndarray] = None) -> List[HeckeAngleSequence]:
    """Independent synthetic sequences from spawned seeds."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [
        synth_sato_tate(n, int(child.generate_state(1)[0]), primes, f"synthetic-{seed}-{i}")
        for i, child in enumerate(children)
    ]


def newform_sequence(level: int, weight: int, x: int) -> HeckeAngleSequence:
    """Angles of a one-dimensional level-1 newform, or the level 11 curve, up to x."""
    from .arith.forms import LEVEL_ONE_WEIGHTS, curve_ap, level_one_newform

    if level == 1 and weight in LEVEL_ONE_WEIGHTS:
        form = level_one_newform(weight, x)
        primes = sieve(max(x, 2)).primes
        a = [normalize_eigenvalue(form[int(p)], int(p), weight) for p in primes]
        return HeckeAngleSequence.from_eigenvalues(1, weight, f"1.{weight}.a", primes, a)
    if level == 11 and weight == 2:
        primes = sieve(max(x, 2), 11).primes
        a = [normalize_eigenvalue(curve_ap(int(p)), int(p), 2) for p in primes]
        return HeckeAngleSequence.from_eigenvalues(11, 2, "11.2.a", primes, a)
    raise ConfigError(
        f"no built-in eigenvalue source for level {level}, weight {weight}; use an eigenvalue file"
    )


# -- experiment configuration -------------------------------------------------


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "fejer"
    B_rho: float = 1.0
    B_g: float = 1.0
    normalized: bool = False

    def build(self):
        from .smoothing import make_kernel

        return make_kernel(self.kind, self.B_rho, self.normalized), make_kernel(
            self.kind, self.B_g, self.normalized
        )


def _parse_grid(spec) -> tuple:
    if isinstance(spec, dict):
        try:
            grid = np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
        except (KeyError, TypeError, ValueError):
            raise ConfigError("s_grid object needs numeric start, stop and num") from None
        return tuple(float(v) for v in grid)
    if isinstance(spec, str):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError("s-grid must look like start:stop:num")
        try:
            return _parse_grid({"start": parts[0], "stop": parts[1], "num": parts[2]})
        except ConfigError:
            raise
    if isinstance(spec, (list, tuple)):
        try:
            return tuple(float(v) for v in spec)
        except (TypeError, ValueError):
            raise ConfigError("s_grid entries must be numbers") from None
    raise ConfigError("s_grid must be a list, an object or start:stop:num")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one run needs.

    Attributes:
        x: prime bound.
        level, weight: family or form.
        psi: window centre.
        L: window parameter, or "auto" for max(2, round(log log x)).
        s_grid: ascending s values.
        kernel: test functions for the smoothed statistics.
        seed: RNG seed for synthetic data.
        estimator: global, local, rescaled, smoothed or average.
        source: synthetic, newform or file (pair estimators only).
        input_path: eigenvalue file when source is "file".
        output: report path (CSV); a TSV copy is written next to it.
    """

    x: int = 1000
    level: int = 1
    weight: int = 12
    psi: float = 0.25
    L: Union[float, str] = "auto"
    s_grid: tuple = (0.5, 1.0, 1.5, 2.0)
    kernel: KernelSpec = field(default_factory=KernelSpec)
    seed: int = 0
    estimator: str = "global"
    source: str = "synthetic"
    input_path: Optional[str] = None
    output: str = "report.csv"

    def __post_init__(self):
        if not isinstance(self.x, int) or self.x < 2:
            raise ConfigError(f"x must be an integer >= 2, got {self.x!r}")
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"estimator must be one of {', '.join(ESTIMATORS)}")
        if self.source not in SOURCES:
            raise ConfigError(f"source must be one of {', '.join(SOURCES)}")
        if self.source == "file" and not self.input_path:
            raise ConfigError("source 'file' needs input_path")
        if self.kernel.kind not in ("fejer", "bump"):
            raise ConfigError("kernel kind must be fejer or bump")
        if not (self.kernel.B_rho > 0 and self.kernel.B_g > 0):
            raise ConfigError("kernel supports must be positive")
        if self.L != "auto":
            try:
                float(self.L)
            except (TypeError, ValueError):
                raise ConfigError("L must be a number or 'auto'") from None
        s = np.asarray(self.s_grid, dtype=float)
        if s.size == 0 or np.any(np.diff(s) < 0) or np.any(s < 0):
            raise ConfigError("s_grid must be nonempty, nonnegative and ascending")
        if self.estimator != "global":
            # validates psi and L together
            self.window()

    @property
    def resolved_L(self) -> float:
        from .paircorr import default_L

        return float(default_L(self.x)) if self.L == "auto" else float(self.L)

    def window(self):
        from .paircorr import LocalWindow

        return LocalWindow(float(self.psi), self.resolved_L)

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
        data = dict(obj)
        if "kernel" in data:
            k = data["kernel"]
            if not isinstance(k, dict):
                raise ConfigError("kernel must be an object")
            try:
                data["kernel"] = KernelSpec(**k)
            except TypeError as exc:
                raise ConfigError(f"bad kernel spec: {exc}") from None
        if "s_grid" in data:
            data["s_grid"] = _parse_grid(data["s_grid"])
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON ({exc.msg})") from None
        return cls.from_dict(obj)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["s_grid"] = list(self.s_grid)
        return out


def _header_lines(cfg: ExperimentConfig, extra: Optional[Dict[str, Any]] = None) -> List[str]:
    lines = [
        f"# stpair {__version__}",
        f"# numpy {np.__version__}",
        f"# python {sys.version_info.major}.{sys.version_info.minor}",
        f"# seed {cfg.seed}",
        "# config " + json.dumps(cfg.to_dict(), sort_keys=True),
    ]
    for key, value in (extra or {}).items():
        lines.append(f"# {key} {value}")
    return lines


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_report(report, cfg: ExperimentConfig, path: Union[str, Path],
                 extra: Optional[Dict[str, Any]] = None) -> List[Path]:
    """CSV plus a tab-separated twin for plotting."""
    path = Path(path)
    rows = []
    for s, value, count in zip(report.s, report.values, report.pair_counts):
        rows.append((_fmt(s), _fmt(value), _fmt(int(count)), _fmt(report.pi_N),
                     _fmt(report.L), _fmt(report.A)))
    header = _header_lines(cfg, {"estimator": report.kind, "points": report.count, **(extra or {})})
    written = []
    for target, sep in ((path, ","), (path.with_suffix(".tsv"), "\t")):
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            for line in header:
                fh.write(line + "\n")
            fh.write(sep.join(CSV_COLUMNS) + "\n")
            for row in rows:
                fh.write(sep.join(row) + "\n")
        written.append(target)
    return written


def write_breakdown(items: Dict[str, Any], cfg: ExperimentConfig,
                    path: Union[str, Path]) -> List[Path]:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in _header_lines(cfg):
            fh.write(line + "\n")
        fh.write("field,value\n")
        for key, value in items.items():
            fh.write(f"{key},{_fmt(value)}\n")
    return [path]


def _load_sequence(cfg: ExperimentConfig) -> HeckeAngleSequence:
    if cfg.source == "synthetic":
        primes = sieve(cfg.x, cfg.level).primes
        if primes.size == 0:
            raise ConfigError("no primes up to x")
        return synth_sato_tate(int(primes.size), cfg.seed, primes)
    if cfg.source == "newform":
        return newform_sequence(cfg.level, cfg.weight, cfg.x)
    seqs = ingest(cfg.input_path)
    if not seqs:
        raise DataError(f"{cfg.input_path} holds no records")
    return seqs[0]


def run_experiment(cfg: ExperimentConfig) -> List[Path]:
    """Run one configured estimator and write its report files."""
    from . import averaged, paircorr

    if cfg.estimator == "average":
        from .tracefm import TraceEngine

        rho, g = cfg.kernel.build()
        engine = TraceEngine(cfg.level, cfg.weight)
        b = averaged.averaged_R2_via_traces(engine, cfg.x, cfg.window(), g, rho)
        return write_breakdown(b.as_dict(), cfg, cfg.output)

    seq = _load_sequence(cfg)
    s = np.asarray(cfg.s_grid, dtype=float)
    if cfg.estimator == "global":
        report = paircorr.global_pair_correlation(seq, cfg.x, s)
    elif cfg.estimator == "local":
        report = paircorr.local_pair_correlation(seq, cfg.x, cfg.window(), s)
    elif cfg.estimator == "rescaled":
        report = paircorr.rescaled_local_pair_correlation(seq, cfg.x, cfg.window(), s)
    else:
        rho, g = cfg.kernel.build()
        w = cfg.window()
        value = paircorr.smoothed_pair_correlation(seq, cfg.x, w, rho, g)
        items = {
            "smoothed_R2": value,
            "predicted_limit": averaged.predicted_limit(w, g, rho),
            "pi_N": seq.pi_N(cfg.x),
            "L": w.L,
            "A": w.A,
        }
        return write_breakdown(items, cfg, cfg.output)
    return write_report(report, cfg, cfg.output, {"label": seq.label})
