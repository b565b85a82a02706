"""Command-line surface: forecast scoring, divergence matrices, verification.

Subcommands::

    entroscore score forecasts.csv outcomes.csv [--rules ...] [--out ...]
    entroscore divergence p.csv q.csv [--rules ...] [--out ...]
    entroscore verify [--config cfg.ini] [--seed N] [--samples N] [--tol X]
    entroscore grid-score density.csv [--out ...]

CSV files carry a header row (forecast columns ``p1..pn``, outcome column
``outcome``; grid densities are headerless, one value per line).  Floats are
rendered with shortest round-trip ``repr``, infinities as ``inf``/``-inf``.
Exit codes: 0 success, 1 verification failure, 2 malformed input or config,
3 invalid density rows, 4 unknown rule.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import re
import sys

import numpy as np

from .bregman import (
    ASYMMETRIC_WITH_WITNESS,
    SYMMETRIC_GENERALIZED_QUADRATIC,
    symmetry_defect,
)
from .entropies import catalog_entropy
from .errors import EntroscoreError
from .geometry import ConvexDomainSpec, subdifferential_probe
from .grid import GridDensity, PeriodicGrid, fisher_entropy, hyvarinen_score
from .measure import MeasureSpace
from .scoring import (
    ScoringRule,
    expected_score,
    linear_score,
    make_psr,
    score_divergence,
    verify_euler,
    verify_propriety,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_DENSITY = 3
EXIT_RULE = 4

DEFAULT_RULES = "quadratic,spherical,shannon,power(1.5),power(3),pseudospherical(3)"
DEFAULT_SUITES = ("propriety", "euler", "symmetry")

_RULE_PATTERN = re.compile(r"^([a-z_]+)(?:\(([^()]*)\))?$")


class CliError(Exception):
    """Carries the exit code alongside the message."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        x = 0.0  # render -0.0 as 0.0
    return repr(x)


# -- rule construction --------------------------------------------------------


def build_rule(spec: str, space: MeasureSpace):
    """Resolve a rule spec like ``power(1.5)`` to (entropy, scoring rule).

    ``linear`` is the stock improper rule; its self-expected score is the
    quadratic entropy, which is what verification suites report against.
    """
    match = _RULE_PATTERN.match(spec.strip())
    if not match:
        raise CliError(EXIT_RULE, f"unknown rule {spec!r}")
    name, argument = match.group(1), match.group(2)
    if name == "linear":
        if argument:
            raise CliError(EXIT_RULE, "rule 'linear' takes no parameter")
        return catalog_entropy("quadratic", space), linear_score(space)
    gamma = None
    if argument is not None:
        try:
            gamma = float(argument)
        except ValueError:
            raise CliError(EXIT_RULE, f"bad parameter in rule {spec!r}") from None
    try:
        entropy = catalog_entropy(name, space, gamma=gamma)
    except EntroscoreError as exc:
        raise CliError(EXIT_RULE, f"cannot build rule {spec!r}: {exc}") from None
    return entropy, make_psr(entropy)


def _parse_rule_list(text: str) -> list[str]:
    specs = [part.strip() for part in text.split(",")]
    merged: list[str] = []
    for part in specs:
        # "power(1.5)" survives the comma split intact; reject empty chunks
        if not part:
            raise CliError(EXIT_RULE, "empty rule name in --rules")
        merged.append(part)
    return merged


# -- CSV input ----------------------------------------------------------------


def _read_rows(path: str) -> list[list[str]]:
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            return list(csv.reader(handle))
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"{path}: {exc.strerror or exc}") from None


def read_forecasts(path: str) -> np.ndarray:
    rows = _read_rows(path)
    if not rows:
        raise CliError(EXIT_INPUT, f"{path}:1: empty file")
    header = [cell.strip() for cell in rows[0]]
    n = len(header)
    if header != [f"p{i + 1}" for i in range(n)] or n == 0:
        raise CliError(EXIT_INPUT, f"{path}:1: header must be p1..pn")
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != n:
            raise CliError(EXIT_INPUT, f"{path}:{lineno}: expected {n} columns, got {len(row)}")
        try:
            data.append([float(cell) for cell in row])
        except ValueError:
            raise CliError(EXIT_INPUT, f"{path}:{lineno}: non-numeric value") from None
    if not data:
        raise CliError(EXIT_INPUT, f"{path}: no data rows")
    return np.array(data)


def read_outcomes(path: str, n_outcomes: int) -> list[int]:
    rows = _read_rows(path)
    if not rows or [cell.strip() for cell in rows[0]] != ["outcome"]:
        raise CliError(EXIT_INPUT, f"{path}:1: header must be 'outcome'")
    outcomes = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 1:
            raise CliError(EXIT_INPUT, f"{path}:{lineno}: expected a single column")
        try:
            value = int(row[0])
        except ValueError:
            raise CliError(EXIT_INPUT, f"{path}:{lineno}: non-integer outcome") from None
        if not 1 <= value <= n_outcomes:
            raise CliError(EXIT_INPUT, f"{path}:{lineno}: outcome {value} outside 1..{n_outcomes}")
        outcomes.append(value)
    return outcomes


def build_densities(matrix: np.ndarray, space: MeasureSpace, path: str):
    densities, bad = [], []
    for index, row in enumerate(matrix, start=1):
        try:
            densities.append(space.density(row))
        except EntroscoreError as exc:
            bad.append(f"row {index}: {exc}")
    if bad:
        raise CliError(EXIT_DENSITY, f"{path}: invalid density rows: " + "; ".join(bad))
    return densities


def _parse_weights(text: str, n: int) -> MeasureSpace:
    try:
        weights = [float(part) for part in text.split(",")]
    except ValueError:
        raise CliError(EXIT_INPUT, f"bad weights list {text!r}") from None
    if len(weights) != n:
        raise CliError(EXIT_INPUT, f"expected {n} weights, got {len(weights)}")
    try:
        return MeasureSpace(weights)
    except EntroscoreError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None


def _write_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


# -- score --------------------------------------------------------------------


def cmd_score(args) -> int:
    forecasts = read_forecasts(args.forecasts)
    n = forecasts.shape[1]
    outcomes = read_outcomes(args.outcomes, n)
    if len(outcomes) != forecasts.shape[0]:
        raise CliError(
            EXIT_INPUT,
            f"row count mismatch: {forecasts.shape[0]} forecasts vs {len(outcomes)} outcomes",
        )
    space = _parse_weights(args.weights, n) if args.weights else MeasureSpace(np.ones(n))
    specs = _parse_rule_list(args.rules)
    rules = [(spec, build_rule(spec, space)[1]) for spec in specs]
    densities = build_densities(forecasts, space, args.forecasts)

    header = ["id", "outcome"]
    for spec, _ in rules:
        header.extend([f"{spec}_score", f"{spec}_expected"])
    table: list[list[float]] = []
    for row_id, (density, outcome) in enumerate(zip(densities, outcomes), start=1):
        cells: list[float] = [row_id, outcome]
        for _, rule in rules:
            score_vector = rule.score(density)
            cells.append(float(score_vector.values[outcome - 1]))
            cells.append(expected_score(rule, density, density))
        table.append(cells)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for cells in table:
        writer.writerow([str(cells[0]), str(cells[1])] + [_fmt(x) for x in cells[2:]])
    means, inf_counts = [], []
    for col in range(2, len(header)):
        column = [row[col] for row in table]
        finite = [x for x in column if math.isfinite(x)]
        means.append(_fmt(math.fsum(finite) / len(finite)) if finite else "nan")
        inf_counts.append(str(sum(1 for x in column if math.isinf(x))))
    writer.writerow(["mean", ""] + means)
    writer.writerow(["inf_count", ""] + inf_counts)
    _write_text(buffer.getvalue(), args.out)
    return EXIT_OK


# -- divergence ----------------------------------------------------------------


def cmd_divergence(args) -> int:
    left = read_forecasts(args.p_file)
    right = read_forecasts(args.q_file)
    if left.shape[1] != right.shape[1]:
        raise CliError(EXIT_INPUT, "the two density files have different widths")
    n = left.shape[1]
    space = _parse_weights(args.weights, n) if args.weights else MeasureSpace(np.ones(n))
    specs = _parse_rule_list(args.rules)
    rules = [(spec, build_rule(spec, space)[1]) for spec in specs]
    p_rows = build_densities(left, space, args.p_file)
    q_rows = build_densities(right, space, args.q_file)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["rule", "p"] + [f"q{j + 1}" for j in range(len(q_rows))])
    for spec, rule in rules:
        for i, p in enumerate(p_rows, start=1):
            writer.writerow(
                [spec, f"p{i}"] + [_fmt(score_divergence(rule, p, q)) for q in q_rows]
            )
    _write_text(buffer.getvalue(), args.out)
    return EXIT_OK


# -- verify ---------------------------------------------------------------------


_EXPECTED_SYMMETRY = {
    "quadratic": SYMMETRIC_GENERALIZED_QUADRATIC,
    "weighted_quadratic": SYMMETRIC_GENERALIZED_QUADRATIC,
    "linear": SYMMETRIC_GENERALIZED_QUADRATIC,  # reported against the quadratic entropy
}


def _expected_symmetry(spec: str) -> str:
    base = spec.split("(")[0]
    return _EXPECTED_SYMMETRY.get(base, ASYMMETRIC_WITH_WITNESS)


def _parse_vector(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise CliError(EXIT_INPUT, f"bad vector {text!r} in config") from None


def _parse_vector_list(text: str) -> list[list[float]]:
    return [_parse_vector(chunk) for chunk in text.split(";") if chunk.strip()]


def load_verify_config(args):
    """Merge the INI config (if any) with command-line overrides."""
    settings = {
        "seed": 42,
        "samples": 1000,
        "weights": "1,1,1",
        "propriety_tol": 1e-10,
        "euler_tol": 1e-10,
        "suites": list(DEFAULT_SUITES),
    }
    rule_specs: list[tuple[str, dict]] = []
    probes: list[dict] = []
    if args.config:
        parser = configparser.ConfigParser()
        try:
            read = parser.read(args.config)
        except configparser.Error as exc:
            raise CliError(EXIT_INPUT, f"{args.config}: {exc}") from None
        if not read:
            raise CliError(EXIT_INPUT, f"{args.config}: cannot read config file")
        if parser.has_section("verify"):
            section = parser["verify"]
            try:
                settings["seed"] = section.getint("seed", settings["seed"])
                settings["samples"] = section.getint("samples", settings["samples"])
                settings["propriety_tol"] = section.getfloat("propriety_tol", settings["propriety_tol"])
                settings["euler_tol"] = section.getfloat("euler_tol", settings["euler_tol"])
            except ValueError as exc:
                raise CliError(EXIT_INPUT, f"{args.config}: [verify]: {exc}") from None
            if section.get("weights_file"):
                try:
                    with open(section["weights_file"], encoding="utf-8") as handle:
                        settings["weights"] = ",".join(line.strip() for line in handle if line.strip())
                except OSError as exc:
                    raise CliError(EXIT_INPUT, f"{section['weights_file']}: {exc.strerror}") from None
            else:
                settings["weights"] = section.get("weights", settings["weights"])
            if section.get("suites"):
                settings["suites"] = [s.strip() for s in section["suites"].split(",") if s.strip()]
        for section_name in parser.sections():
            if section_name.startswith("rule "):
                section = parser[section_name]
                try:
                    overrides = {
                        key: caster(key)
                        for key, caster in (
                            ("seed", section.getint),
                            ("samples", section.getint),
                            ("propriety_tol", section.getfloat),
                            ("euler_tol", section.getfloat),
                        )
                        if section.get(key) is not None
                    }
                except ValueError as exc:
                    raise CliError(EXIT_INPUT, f"{args.config}: [{section_name}]: {exc}") from None
                if overrides.get("samples", 1) < 1:
                    raise CliError(EXIT_INPUT, f"{args.config}: [{section_name}]: samples must be at least 1")
                rule_specs.append((section_name[len("rule "):].strip(), overrides))
            elif section_name.startswith("probe "):
                section = parser[section_name]
                probe = {
                    "name": section_name[len("probe "):].strip(),
                    "entropy": section.get("entropy", ""),
                    "gamma": section.getfloat("gamma", fallback=None),
                    "domain": section.get("domain", "orthant"),
                    "point": section.get("point", ""),
                    "candidates": section.get("candidates", ""),
                    "expect_verified": section.get("expect_verified", ""),
                    "expect_rejected": section.get("expect_rejected", ""),
                }
                probes.append(probe)
        if not rule_specs:
            raise CliError(EXIT_INPUT, f"{args.config}: no [rule ...] sections configured")
    else:
        rule_specs = [(spec, {}) for spec in _parse_rule_list(DEFAULT_RULES)]
    if args.seed is not None:
        settings["seed"] = args.seed
    if args.samples is not None:
        settings["samples"] = args.samples
    if args.tol is not None:
        settings["propriety_tol"] = args.tol
        settings["euler_tol"] = args.tol
    unknown = set(settings["suites"]) - set(DEFAULT_SUITES)
    if unknown:
        raise CliError(EXIT_INPUT, f"unknown suites: {', '.join(sorted(unknown))}")
    if settings["samples"] < 1:
        raise CliError(EXIT_INPUT, "samples must be at least 1")
    return settings, rule_specs, probes


_PROBE_DOMAINS = {
    "orthant": ConvexDomainSpec.nonnegative_orthant,
    "simplex": ConvexDomainSpec.simplex,
    "whole_space": ConvexDomainSpec.whole_space,
}


def _run_probe(probe: dict, space: MeasureSpace, seed: int) -> dict:
    if probe["domain"] not in _PROBE_DOMAINS:
        raise CliError(EXIT_INPUT, f"probe {probe['name']!r}: unknown domain {probe['domain']!r}")
    try:
        entropy = catalog_entropy(probe["entropy"], space, gamma=probe["gamma"])
    except EntroscoreError as exc:
        raise CliError(EXIT_INPUT, f"probe {probe['name']!r}: {exc}") from None
    domain = _PROBE_DOMAINS[probe["domain"]](space)
    point = space.cone(_parse_vector(probe["point"]))
    candidates = [space.dual(v) for v in _parse_vector_list(probe["candidates"])]
    result = subdifferential_probe(entropy, domain, point, candidates, seed=seed)
    report = result.as_dict()
    passed = True
    if probe["expect_verified"]:
        verified = {tuple(v) for v in report["verified"]}
        passed &= all(tuple(v) in verified for v in _parse_vector_list(probe["expect_verified"]))
    if probe["expect_rejected"]:
        rejected = {tuple(r["candidate"]) for r in report["rejected"]}
        passed &= all(tuple(v) in rejected for v in _parse_vector_list(probe["expect_rejected"]))
    report["pass"] = bool(passed)
    return report


def cmd_verify(args) -> int:
    settings, rule_specs, probes = load_verify_config(args)
    weights = _parse_vector(settings["weights"])
    space = _parse_weights(",".join(str(w) for w in weights), len(weights))
    # validate every rule before running anything
    rules: list[tuple[str, dict, object, ScoringRule]] = []
    for spec, overrides in rule_specs:
        entropy, rule = build_rule(spec, space)
        rules.append((spec, overrides, entropy, rule))

    report = {
        "config": {
            "seed": settings["seed"],
            "samples": settings["samples"],
            "weights": [float(w) for w in weights],
            "suites": settings["suites"],
            "rules": [spec for spec, _ in rule_specs],
        },
        "rules": {},
        "probes": {},
    }
    overall = True
    for spec, overrides, entropy, rule in rules:
        knobs = {**settings, **overrides}
        entry = {}
        if "propriety" in settings["suites"]:
            propriety = verify_propriety(
                rule, seed=knobs["seed"], samples=knobs["samples"],
                tol=knobs["propriety_tol"],
            )
            entry["propriety"] = propriety.as_dict()
            overall &= propriety.passed
        if "euler" in settings["suites"]:
            euler = verify_euler(
                rule, entropy, seed=knobs["seed"], samples=knobs["samples"],
                tol=knobs["euler_tol"],
            )
            entry["euler"] = euler.as_dict()
            overall &= euler.passed
        if "symmetry" in settings["suites"]:
            sym = symmetry_defect(entropy, seed=knobs["seed"], samples=min(knobs["samples"], 500))
            expected = _expected_symmetry(spec)
            sym_dict = sym.as_dict()
            sym_dict["expected"] = expected
            sym_dict["pass"] = sym.classification == expected
            entry["symmetry"] = sym_dict
            overall &= sym_dict["pass"]
        report["rules"][spec] = entry
    for probe in probes:
        probe_report = _run_probe(probe, space, settings["seed"])
        report["probes"][probe["name"]] = probe_report
        overall &= probe_report["pass"]
    report["pass"] = bool(overall)
    _write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if overall else EXIT_FAIL


# -- grid-score -----------------------------------------------------------------


def cmd_grid_score(args) -> int:
    try:
        with open(args.density, encoding="utf-8") as handle:
            lines = [line.strip() for line in handle]
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"{args.density}: {exc.strerror or exc}") from None
    values = []
    for lineno, line in enumerate(lines, start=1):
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise CliError(EXIT_INPUT, f"{args.density}:{lineno}: non-numeric value") from None
    if len(values) < 4:
        raise CliError(EXIT_INPUT, f"{args.density}: a periodic grid needs at least 4 values")
    bad = [str(i) for i, v in enumerate(values, start=1) if not v > 0]
    if bad:
        raise CliError(EXIT_DENSITY, f"{args.density}: nonpositive rows: {', '.join(bad)}")
    grid = PeriodicGrid(len(values))
    density = GridDensity(grid, values)
    score = hyvarinen_score(density)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["x", "score"])
    for x, s in zip(grid.points, score.values):
        writer.writerow([_fmt(x), _fmt(s)])
    writer.writerow(["fisher_entropy", _fmt(fisher_entropy(density))])
    _write_text(buffer.getvalue(), args.out)
    return EXIT_OK


# -- entry point ------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entroscore",
        description="Score forecasts, tabulate divergences, and verify rule properties.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score forecast rows against observed outcomes")
    p_score.add_argument("forecasts", help="CSV of probability vectors with header p1..pn")
    p_score.add_argument("outcomes", help="CSV of 1-based outcome indices with header 'outcome'")
    p_score.add_argument("--rules", default=DEFAULT_RULES)
    p_score.add_argument("--weights", default=None, help="comma-separated atom weights")
    p_score.add_argument("--out", default=None)
    p_score.set_defaults(func=cmd_score)

    p_div = sub.add_parser("divergence", help="divergence matrix between two density files")
    p_div.add_argument("p_file")
    p_div.add_argument("q_file")
    p_div.add_argument("--rules", default=DEFAULT_RULES)
    p_div.add_argument("--weights", default=None)
    p_div.add_argument("--out", default=None)
    p_div.set_defaults(func=cmd_divergence)

    p_verify = sub.add_parser("verify", help="run propriety/Euler/symmetry suites")
    p_verify.add_argument("--config", default=None, help="INI config with [rule ...] sections")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--samples", type=int, default=None)
    p_verify.add_argument("--tol", type=float, default=None)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_grid = sub.add_parser("grid-score", help="Hyvarinen score of a periodic grid density")
    p_grid.add_argument("density", help="CSV with one strictly positive value per line")
    p_grid.add_argument("--out", default=None)
    p_grid.set_defaults(func=cmd_grid_score)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"entroscore: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
