"""Command-line verifier: run identity checks, convergence sweeps and write reports.

Configuration is a JSON object; every key is optional::

    {
      "n": 1, "N": 32, "d": 4, "seed": 7,
      "eigen_scale": 0.25, "gaussian_width": 0.35, "torus_radius": 4,
      "eigenvalues": null,
      "strategy": "grid_reduced",
      "orientation": 1,
      "suites": ["phase_space", "algebra", "rieffel", "weyl", "canonical"],
      "checks": null,
      "backend": null,
      "tolerances": {"m_morphism": 1e-7},
      "max_dense_entries": 67108864,
      "timing": false,
      "out": "reports"
    }

``eigenvalues`` fixes the matrix backend (a 2n x d list; random draws in
``[-eigen_scale, eigen_scale]`` otherwise) and ``strategy`` picks the
translation product used by the Weyl checks.  The checks are written for
one degree of freedom, so ``n`` must be 1.  ``orientation: -1`` runs the
suites with the pairing negated (the conjugate cocycle); the Weyl suite is
tied to the Schrodinger representation and is skipped there.

``checks`` restricts the run to the listed names, ``backend`` to checks of
one backend.  Wall times are recorded only with ``timing`` enabled, so
reports are byte-identical across runs by default.  Warnings raised while a
check runs are not printed; their category names go into the record's
``params["warnings"]``.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from . import checks as catalog

FORMATS = ("jsonl", "csv", "svg")
TRANSLATION_STRATEGIES = tuple(s.value for s in catalog.Strategy if s is not catalog.Strategy.SPECTRAL_EXACT)
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    """Invalid configuration (exit status 2)."""


@dataclass(frozen=True)
class SuiteConfig:
    n: int = 1
    N: int = 32
    d: int = 4
    seed: int = 7
    eigen_scale: float = 0.25
    gaussian_width: float = 0.35
    torus_radius: int = 4
    suites: tuple[str, ...] = catalog.SUITES
    checks: tuple[str, ...] | None = None
    backend: str | None = None
    tolerances: dict = field(default_factory=dict)
    max_dense_entries: int = 1 << 26
    timing: bool = False
    refinement: bool = True
    eigenvalues: tuple | None = None
    strategy: str = "grid_reduced"
    orientation: int = 1
    out: str = "reports"

    def __post_init__(self):
        for key in ("n", "N", "d", "seed", "torus_radius", "max_dense_entries"):
            value = getattr(self, key)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ConfigError(f"{key} must be a non-negative integer, got {value!r}")
        if self.N < 4 or self.N % 2:
            raise ConfigError(f"N must be an even integer >= 4, got {self.N}")
        if self.n != 1 or self.d < 1:
            raise ConfigError("the check catalog needs n = 1 and d >= 1")
        if self.eigenvalues is not None:
            ev = self.eigenvalues
            if len(ev) != 2 * self.n or any(len(row) != self.d for row in ev):
                raise ConfigError(f"eigenvalues must be a {2 * self.n} x {self.d} list")
            if not all(isinstance(x, (int, float)) and math.isfinite(x) for row in ev for x in row):
                raise ConfigError("eigenvalues must be finite numbers")
        if self.strategy not in TRANSLATION_STRATEGIES:
            raise ConfigError(f"strategy must be one of {TRANSLATION_STRATEGIES}")
        if self.orientation not in (1, -1) or isinstance(self.orientation, bool):
            raise ConfigError(f"orientation must be 1 or -1, got {self.orientation!r}")
        if self.seed >= 2**64:
            raise ConfigError("seed must fit in 64 bits")
        for key in ("eigen_scale", "gaussian_width"):
            if not isinstance(getattr(self, key), (int, float)) or getattr(self, key) <= 0:
                raise ConfigError(f"{key} must be a positive number")
        unknown = set(self.suites) - set(catalog.SUITES)
        if unknown:
            raise ConfigError(f"unknown suites {sorted(unknown)}")
        names = {c.name for c in catalog.CATALOG}
        for group in (self.checks or (), self.tolerances):
            bad = set(group) - names
            if bad:
                raise ConfigError(f"unknown checks {sorted(bad)}")
        for name, tol in self.tolerances.items():
            # zero is allowed: it makes every residual-bearing check fail
            if not isinstance(tol, (int, float)) or tol < 0 or math.isnan(tol):
                raise ConfigError(f"tolerance for {name} must be a non-negative number")
        backends = {c.backend for c in catalog.CATALOG}
        if self.backend is not None and self.backend not in backends:
            raise ConfigError(f"unknown backend {self.backend!r}; choose from {sorted(backends)}")

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown configuration keys {sorted(extra)}")
        data = dict(data)
        for key in ("suites", "checks"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        if data.get("eigenvalues") is not None:
            data["eigenvalues"] = tuple(tuple(row) for row in data["eigenvalues"])
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "SuiteConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc

    def replace(self, **changes) -> "SuiteConfig":
        return dataclasses.replace(self, **changes)

    def dense_entries(self) -> int:
        """Largest dense array the suite builds, in complex entries."""
        nodes = self.N ** (2 * self.n)
        weyl_fine = (2 * self.N) ** (2 * self.n)  # oversampled oracle matrices
        square = nodes * self.d**3  # batched products in the dense square product
        return max(weyl_fine, square)


@dataclass(frozen=True)
class CheckRecord:
    check: str
    anchor: str
    backend: str
    params: dict
    residual: float | None
    tol: float
    passed: bool
    seconds: float | None = None

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "anchor": self.anchor,
            "backend": self.backend,
            "params": self.params,
            "residual": self.residual,
            "tol": self.tol,
            "pass": self.passed,
            "seconds": self.seconds,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CheckRecord":
        return cls(
            data["check"], data["anchor"], data["backend"], data["params"],
            data["residual"], data["tol"], data["pass"], data["seconds"],
        )


@dataclass
class Report:
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def by_check(self) -> dict[str, list[CheckRecord]]:
        out: dict[str, list[CheckRecord]] = {}
        for r in self.records:
            out.setdefault(r.check, []).append(r)
        return out


def _selected(cfg: SuiteConfig) -> list[catalog.Check]:
    chosen = []
    for check in catalog.CATALOG:
        if check.suite not in cfg.suites:
            continue
        if cfg.checks is not None and check.name not in cfg.checks:
            continue
        if cfg.backend is not None and check.backend != cfg.backend:
            continue
        if check.refinement and not cfg.refinement:
            continue
        if cfg.orientation == -1 and check.suite == "weyl":
            continue
        chosen.append(check)
    return chosen


def _params_json(params: dict) -> dict:
    return {k: (float(v) if isinstance(v, float) else v) for k, v in sorted(params.items())}


def _guard(cfg: SuiteConfig) -> None:
    if cfg.dense_entries() > cfg.max_dense_entries:
        raise ConfigError(
            f"N={cfg.N}, d={cfg.d} needs {cfg.dense_entries()} dense entries (cap {cfg.max_dense_entries})"
        )


def run_suite(cfg: SuiteConfig) -> Report:
    """Run every selected check once; each measurement becomes one record."""
    _guard(cfg)
    report = Report()
    for check in _selected(cfg):
        ctx = catalog.CheckContext(
            n=cfg.n, N=cfg.N, d=cfg.d, seed=cfg.seed, eigen_scale=cfg.eigen_scale,
            gaussian_width=cfg.gaussian_width, torus_radius=cfg.torus_radius, name=check.name,
            eigenvalues=cfg.eigenvalues, strategy=catalog.Strategy(cfg.strategy), orientation=cfg.orientation,
        )
        tol = float(cfg.tolerances.get(check.name, check.tol))
        start = time.perf_counter()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                measurements = check.run(ctx)
            except Exception as exc:  # a crashing check is a failure, never dropped
                measurements = [catalog.Measurement(None, {"N": cfg.N}, error=f"{type(exc).__name__}: {exc}")]
        elapsed = time.perf_counter() - start if cfg.timing else None
        raised = sorted({w.category.__name__ for w in caught})
        for m in measurements:
            params = {"n": cfg.n, "N": cfg.N, "d": cfg.d, "seed": cfg.seed, **m.params}
            if cfg.orientation == -1:
                params["orientation"] = -1
            if m.error:
                params["error"] = m.error
            if raised:
                params["warnings"] = raised
            finite = m.residual is not None and math.isfinite(m.residual)
            residual = float(m.residual) if finite else None
            passed = finite and residual < tol
            report.records.append(CheckRecord(check.name, check.anchor, check.backend, _params_json(params), residual, tol, passed, elapsed))
    return report


def convergence_sweep(cfg: SuiteConfig, axis: str, values: list[int]) -> Report:
    """Run the suite at each value of ``N`` or ``d``; records carry the swept value in ``params``."""
    if axis not in ("N", "d"):
        raise ConfigError(f"sweep axis must be N or d, got {axis!r}")
    if not values or list(values) != sorted(values):
        raise ConfigError("sweep values must be a non-empty ascending list")
    single = len(values) == 1
    points = [cfg.replace(**{axis: int(value)}, refinement=cfg.refinement and single) for value in values]
    for point in points:  # refuse the whole sweep before spending time on it
        _guard(point)
    report = Report()
    for point in points:
        report.records.extend(run_suite(point).records)
    return report


def decay_table(report: Report, axis: str = "N") -> dict[str, list[tuple[float, float, float | None]]]:
    """Per check: ``(value, residual, ratio to the previous residual)`` rows."""
    table = {}
    for name, recs in report.by_check().items():
        rows = []
        prev = None
        for r in recs:
            if r.residual is None or axis not in r.params:
                continue
            ratio = prev / r.residual if prev and r.residual else None
            rows.append((r.params[axis], r.residual, ratio))
            prev = r.residual
        if rows:
            table[name] = rows
    return table


# ---------------------------------------------------------------- emitters


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report {path}: {exc}") from exc


def to_jsonl(report: Report) -> str:
    return "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in report.records)


def parse_jsonl(text: str) -> Report:
    return Report([CheckRecord.from_json(json.loads(line)) for line in text.splitlines() if line.strip()])


CSV_FIELDS = ("check", "anchor", "backend", "params", "residual", "tol", "pass", "seconds")


def to_csv(report: Report) -> str:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in report.records:
        row = r.to_json()
        row["params"] = json.dumps(row["params"], sort_keys=True)
        writer.writerow([row[k] for k in CSV_FIELDS])
    return buf.getvalue()


def to_svg(report: Report, axis: str = "N", width: int = 640, height: int = 400) -> str:
    """log10(residual) against the swept parameter, one polyline per check."""
    table = decay_table(report, axis)
    curves = {k: [(x, math.log10(max(y, 1e-300))) for x, y, _ in rows] for k, rows in table.items() if len(rows) > 1}
    pad = 40
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    if curves:
        xs = [x for pts in curves.values() for x, _ in pts]
        ys = [y for pts in curves.values() for _, y in pts]
        x0, x1 = min(xs), max(xs) if max(xs) > min(xs) else min(xs) + 1
        y0, y1 = min(ys), max(ys) if max(ys) > min(ys) else min(ys) + 1
        sx = lambda x: pad + (x - x0) / (x1 - x0) * (width - 2 * pad)  # noqa: E731
        sy = lambda y: height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)  # noqa: E731
        for name, pts in sorted(curves.items()):
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            lines.append(f'  <polyline data-check="{name}" fill="none" stroke="black" points="{coords}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str, path: str | Path, axis: str = "N") -> Path:
    path = Path(path)
    if fmt == "jsonl":
        _write(path, to_jsonl(report))
    elif fmt == "csv":
        _write(path, to_csv(report))
    elif fmt == "svg":
        _write(path, to_svg(report, axis))
    else:
        raise ConfigError(f"unknown format {fmt!r}; choose from {FORMATS}")
    return path


# ---------------------------------------------------------------- command line


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rieffelkit", description="Verify deformation and crossed-product identities on grids.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(q):
        q.add_argument("--config", help="JSON configuration file")
        q.add_argument("--seed", type=int, help="override the RNG seed")
        q.add_argument("--backend", help="only run checks of this backend")
        q.add_argument("--out", help="output directory (default: the config's out)")
        q.add_argument("--format", default="jsonl", choices=FORMATS)

    common(sub.add_parser("verify", help="run the identity suites"))
    sw = sub.add_parser("sweep", help="convergence sweep over N or d")
    common(sw)
    sw.add_argument("--axis", default="N", choices=("N", "d"))
    sw.add_argument("--values", required=True, help="comma-separated ascending values")
    rep = sub.add_parser("report", help="convert a JSON-lines report")
    rep.add_argument("input", help="JSON-lines report")
    rep.add_argument("--out", default="reports")
    rep.add_argument("--format", default="csv", choices=FORMATS)
    rep.add_argument("--axis", default="N", choices=("N", "d"))
    return p


def _config(args) -> SuiteConfig:
    cfg = SuiteConfig.load(args.config) if args.config else SuiteConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.backend is not None:
        changes["backend"] = args.backend
    if args.out is not None:
        changes["out"] = args.out
    return cfg.replace(**changes) if changes else cfg


def _summary(report: Report, out: Path) -> None:
    for r in report.records:
        status = "PASS" if r.passed else "FAIL"
        res = "n/a" if r.residual is None else f"{r.residual:.3e}"
        print(f"{status} {r.check} residual={res} tol={r.tol:.1e}")
    print(f"{len(report.records) - len(report.failures())}/{len(report.records)} passed; report: {out}")


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "report":
            try:
                report = parse_jsonl(Path(args.input).read_text())
            except (OSError, ValueError, KeyError) as exc:
                raise ConfigError(f"cannot read report {args.input}: {exc}") from exc
            out = emit_report(report, args.format, Path(args.out) / f"report.{args.format}", args.axis)
            print(out)
            return EXIT_OK
        cfg = _config(args)
        if args.command == "verify":
            report = run_suite(cfg)
            name = "verify"
        else:
            try:
                values = [int(v) for v in args.values.split(",")]
            except ValueError as exc:
                raise ConfigError(f"bad sweep values {args.values!r}") from exc
            report = convergence_sweep(cfg, args.axis, values)
            name = f"sweep_{args.axis}"
        out = emit_report(report, args.format, Path(cfg.out) / f"{name}.{args.format}", getattr(args, "axis", "N"))
    except (ConfigError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _summary(report, out)
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
