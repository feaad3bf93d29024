"""Command-line interface: evaluate sequences, attribute properties, run checks.

Commands: ``eval``, ``attribute``, ``check``, ``scenario``, ``compare``. The
positional file argument accepts either a path to an experiment file or the
name of a shipped fixture. Structured JSON output (stable key order) goes to
stdout; diagnostics go to stderr as structured records. Exit codes: 0 on
success, 1 when a requested check fails, 2 on input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .closure import (
    check_closure,
    check_repeatability,
    check_refinement_condition,
    random_prior_stochastics,
    random_prior_unitaries,
)
from .errors import OpseqError
from .experiment import ExperimentFile, parse_experiment
from .models import ALGEBRAIC_ATOL, CompositeModel, QuantumModel, amplitude, probability
from .outcomes import Outcome
from .properties import (
    ALL_SUBSETS,
    ATOMIC_ONLY,
    AttributionInput,
    ascription_record,
    attribute,
    determinism_verdict,
)
from .scenarios import FIXTURE_NAMES, SCENARIO_NAMES, fixture_text, run_scenario

__all__ = ["main", "dispatch", "build_parser"]


def _add_common(parser: argparse.ArgumentParser, *, suppress: bool) -> None:
    # The same flags are accepted before and after the subcommand; SUPPRESS on
    # the subparser copies keeps them from clobbering values parsed earlier.
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument(
        "--tolerance", type=float, default=default(None), help="override check tolerances"
    )
    parser.add_argument(
        "--seed", type=int, default=default(None), help="seed for randomized checks"
    )
    parser.add_argument("--format", choices=("json", "table"), default=default("json"))
    parser.add_argument(
        "--potentials",
        choices=(ALL_SUBSETS, ATOMIC_ONLY),
        default=default(ALL_SUBSETS),
        help="which refinements of a non-atomic outcome are ascribed potentially",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opseq",
        description="Operational calculus of measurement-outcome sequences.",
    )
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _add_common(p, suppress=True)
        return p

    p_eval = add_command("eval", "probability/amplitude of a named sequence")
    p_eval.add_argument("file", help="experiment file path or fixture name")
    p_eval.add_argument("sequence", help="sequence name")
    p_eval.add_argument("--model", choices=("auto", "quantum", "classical"), default="auto")

    p_attr = add_command("attribute", "property ascriptions for a named sequence")
    p_attr.add_argument("file")
    p_attr.add_argument("sequence")
    p_attr.add_argument("--regime", choices=("quantum", "classical"), default="quantum")
    p_attr.add_argument("--subject", default="system")

    p_check = add_command("check", "repeatability, refinement and closure checks")
    p_check.add_argument("file")
    p_check.add_argument("--trials", type=int, default=None, help="override random prior count")

    p_scen = add_command("scenario", "run a built-in scenario")
    p_scen.add_argument("name", choices=SCENARIO_NAMES)

    p_cmp = add_command("compare", "classical vs quantum valuations side by side")
    p_cmp.add_argument("file")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, payload = dispatch(ns.command, ns)
    except OpseqError as exc:
        _emit_error(ns, {"type": type(exc).__name__, "message": str(exc)})
        return 2
    except FileNotFoundError as exc:
        _emit_error(ns, {"type": "FileNotFoundError", "message": str(exc)})
        return 2
    if payload is not None:
        _emit(ns, payload)
    return code


def dispatch(command: str, ns) -> tuple[int, dict | None]:
    """Run one command; returns (exit code, structured payload)."""
    handlers = {
        "eval": _cmd_eval,
        "attribute": _cmd_attribute,
        "check": _cmd_check,
        "scenario": _cmd_scenario,
        "compare": _cmd_compare,
    }
    return handlers[command](ns)


# -- input handling -----------------------------------------------------------


def _load(ns, spec: str) -> ExperimentFile | None:
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            text = fh.read()
    elif spec in FIXTURE_NAMES:
        text = fixture_text(spec)
    else:
        _emit_error(ns, {"type": "InputError", "message": f"no such file or fixture: {spec!r}"})
        return None
    ef, diagnostics = parse_experiment(text)
    if ef is None:
        _emit_error(
            ns,
            {
                "type": "ParseError",
                "diagnostics": [
                    {"line": d.line, "col": d.col, "rule": d.rule, "message": d.message, "path": d.path}
                    for d in diagnostics
                ],
            },
        )
        return None
    return ef


def _named_sequence(ns, ef: ExperimentFile, name: str):
    if name not in ef.sequences:
        known = ", ".join(sorted(ef.sequences))
        _emit_error(ns, {"type": "InputError", "message": f"unknown sequence {name!r}; have: {known}"})
        return None
    return ef.sequences[name]


# -- commands -----------------------------------------------------------------


def _cmd_eval(ns) -> tuple[int, dict | None]:
    ef = _load(ns, ns.file)
    if ef is None:
        return 2, None
    seq = _named_sequence(ns, ef, ns.sequence)
    if seq is None:
        return 2, None
    kind = ns.model
    if kind == "auto":
        kind = "quantum" if ef.has_quantum else "classical"
    payload: dict = {"sequence": ns.sequence, "model": kind}
    if kind == "quantum":
        model = ef.quantum_model()
        z = amplitude(model, seq).value
        payload["amplitude"] = [z.real, z.imag]
        payload["probability"] = abs(z) ** 2
    else:
        payload["probability"] = probability(ef.classical_model(), seq)
    return 0, payload


def _cmd_attribute(ns) -> tuple[int, dict | None]:
    ef = _load(ns, ns.file)
    if ef is None:
        return 2, None
    seq = _named_sequence(ns, ef, ns.sequence)
    if seq is None:
        return 2, None
    inp = AttributionInput(ns.regime, seq, ef.kinds)
    ascriptions = attribute(inp, subject=ns.subject, potentials=ns.potentials)
    return 0, {
        "sequence": ns.sequence,
        "regime": ns.regime,
        "potentials": ns.potentials,
        "determinism": determinism_verdict(inp),
        "ascriptions": [ascription_record(a) for a in ascriptions],
    }


def _cmd_check(ns) -> tuple[int, dict | None]:
    ef = _load(ns, ns.file)
    if ef is None:
        return 2, None
    if not (ef.has_quantum or ef.has_classical):
        _emit_error(ns, {"type": "InputError", "message": "experiment declares no model to check"})
        return 2, None
    tol = ns.tolerance if ns.tolerance is not None else ALGEBRAIC_ATOL
    quantum = ef.has_quantum
    model = ef.quantum_model() if quantum else ef.classical_model()
    if isinstance(model, CompositeModel):
        model = model.joint_model()
    checks: list[dict] = []
    for label in sorted(ef.measurements):
        meas = ef.measurements[label]
        value = check_repeatability(model, meas)
        checks.append(
            {"check": f"repeatability:{label}", "value": value, "passed": abs(value - 1.0) <= tol}
        )
        for block in meas.outcomes:
            if block.is_atomic:
                continue
            for member in sorted(block.members):
                fine = Outcome(frozenset({member}), block.context_size)
                kwargs = {"label": label} if isinstance(model, QuantumModel) else {}
                ok = check_refinement_condition(model, block, fine, **kwargs)
                checks.append(
                    {
                        "check": f"refinement:{label}:{sorted(block.members)}>{member}",
                        "value": ok,
                        "passed": ok,
                    }
                )
    seed_used = None
    if ef.closure_spec is not None:
        spec = ef.closure_spec
        priors = {f"explicit:{i}": m for i, m in enumerate(spec.get("priors", []))}
        random_spec = spec.get("random_priors")
        if random_spec:
            count = ns.trials if ns.trials is not None else random_spec["count"]
            seed_used = ns.seed if ns.seed is not None else random_spec["seed"]
            maker = random_prior_unitaries if quantum else random_prior_stochastics
            for i, m in enumerate(maker(ef.dimension, count, seed_used)):
                priors[f"random:{i}"] = m
        report = check_closure(
            model, spec["preparation"], spec["probe"], priors, seed=seed_used
        )
        entry = {
            "check": "closure:max-deviation",
            "value": report.max_deviation,
            "passed": True,
        }
        if "expect" in spec:
            kind, bound = spec["expect"]
            if kind == "max_deviation_le":
                entry["passed"] = report.max_deviation <= (ns.tolerance or bound)
                entry["expected"] = {"max_deviation_le": bound}
            else:
                entry["passed"] = report.max_deviation > bound
                entry["expected"] = {"max_deviation_gt": bound}
        entry["worst_witness"] = list(report.witnesses[0]) if report.witnesses else None
        checks.append(entry)
    passed = all(c["passed"] for c in checks)
    payload = {"model": "quantum" if quantum else "classical", "checks": checks, "passed": passed}
    if seed_used is not None:
        payload["seed"] = seed_used
    return (0 if passed else 1), payload


def _cmd_scenario(ns) -> tuple[int, dict | None]:
    report = run_scenario(ns.name, ns.tolerance)
    results = [
        {
            "check": r.check,
            "computed": _jsonify(r.computed),
            "expected": _jsonify(r.expected),
            "tolerance": r.tolerance,
            "passed": r.passed,
        }
        for r in report.results
    ]
    payload = {"scenario": report.scenario, "results": results, "passed": report.passed}
    return (0 if report.passed else 1), payload


def _cmd_compare(ns) -> tuple[int, dict | None]:
    ef = _load(ns, ns.file)
    if ef is None:
        return 2, None
    if not ef.has_quantum or not ef.has_classical:
        _emit_error(
            ns,
            {
                "type": "InputError",
                "message": "compare needs both a quantum and a classical model in the file",
            },
        )
        return 2, None
    q = ef.quantum_model()
    c = ef.classical_model()
    rows = []
    for name in sorted(ef.sequences):
        seq = ef.sequences[name]
        try:
            pq = probability(q, seq)
            pc = probability(c, seq)
        except OpseqError as exc:
            rows.append({"sequence": name, "skipped": str(exc)})
            continue
        rows.append(
            {"sequence": name, "classical": pc, "quantum": pq, "difference": pq - pc}
        )
    return 0, {"rows": rows}


# -- output -------------------------------------------------------------------


def _jsonify(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    return value


def _emit(ns, payload: dict) -> None:
    if getattr(ns, "format", "json") == "table":
        sys.stdout.write(_render_table(payload))
    else:
        sys.stdout.write(json.dumps(_jsonify(payload), sort_keys=True, indent=2) + "\n")


def _emit_error(ns, payload: dict) -> None:
    sys.stderr.write(json.dumps({"error": _jsonify(payload)}, sort_keys=True, indent=2) + "\n")


def _render_table(payload: dict) -> str:
    lines: list[str] = []
    for key in sorted(payload):
        value = payload[key]
        if isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            columns = sorted({k for v in value for k in v})
            rows = [[_cell(v.get(c, "")) for c in columns] for v in value]
            widths = [
                max(len(c), *(len(r[i]) for r in rows)) for i, c in enumerate(columns)
            ]
            lines.append(key + ":")
            lines.append("  " + "  ".join(c.ljust(w) for c, w in zip(columns, widths)))
            for r in rows:
                lines.append("  " + "  ".join(cell.ljust(w) for cell, w in zip(r, widths)))
        else:
            lines.append(f"{key}: {_cell(value)}")
    return "\n".join(lines) + "\n"


def _cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (dict, list)):
        return json.dumps(_jsonify(value), sort_keys=True)
    return str(value)


if __name__ == "__main__":
    raise SystemExit(main())
