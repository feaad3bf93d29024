"""Experiment description files: positioned parsing, semantic validation, serialization.

The format is versioned JSON. Complex matrices are row-major arrays of
[re, im] pairs; classical transition matrices are row-major arrays of plain
numbers. Any matrix slot also accepts a generator expression string such as
"identity", "sg(theta, phi)", "rotation(theta)" or "qft(d)".

Parsing never throws on bad input: ``parse_experiment`` returns either a
resolved :class:`ExperimentFile` or a list of diagnostics, each carrying the
source line/column, a machine-readable rule id, and the JSON path of the
offending node. A hand-rolled recursive-descent JSON reader supplies the
positions that the stdlib decoder cannot.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    CrossRefError,
    DimensionMismatchError,
    EmptyBlockError,
    PartitionError,
    UnknownGeneratorError,
)
from .generators import generator
from .models import ClassicalModel, CompositeModel, QuantumModel
from .outcomes import Measurement, make_measurement
from .sequences import FINAL_NOT_ATOMIC, Sequence, SequenceRecord, validate

__all__ = ["Diagnostic", "ExperimentFile", "parse_experiment", "serialize_experiment", "VERSION"]

VERSION = 1

# Matrix tolerance for user-entered matrices (accumulated-error class); exact
# generator output lands well inside it.
MATRIX_ATOL = 1e-9

RULE_SYNTAX = "syntax"
RULE_SCHEMA = "schema"
RULE_VERSION = "version"
RULE_PARTITION = "partition"
RULE_UNKNOWN_GENERATOR = "unknown-generator"
RULE_UNITARITY = "unitarity"
RULE_STOCHASTICITY = "stochasticity"
RULE_CROSS_REF = "cross-ref"
RULE_OUTCOME_BLOCK = "outcome-block"


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    rule: str
    message: str
    path: str

    def __str__(self) -> str:
        return f"{self.line}:{self.col} [{self.rule}] {self.path}: {self.message}"


class _SyntaxFailure(Exception):
    def __init__(self, line: int, col: int, message: str):
        self.line, self.col, self.message = line, col, message
        super().__init__(message)


class _PosReader:
    """Minimal JSON reader that records the source position of every node."""

    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.line = 1
        self.col = 1
        self.positions: dict[tuple, tuple[int, int]] = {}

    def fail(self, message: str):
        raise _SyntaxFailure(self.line, self.col, message)

    def peek(self) -> str:
        return self.text[self.i] if self.i < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.i]
        self.i += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip_ws(self) -> None:
        while self.peek() and self.peek() in " \t\r\n":
            self.advance()

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            self.fail(f"expected {ch!r}")
        self.advance()

    def parse(self):
        self.skip_ws()
        value = self.parse_value(())
        self.skip_ws()
        if self.i != len(self.text):
            self.fail("trailing data after document")
        return value

    def parse_value(self, path: tuple):
        self.positions[path] = (self.line, self.col)
        ch = self.peek()
        if ch == "{":
            return self.parse_object(path)
        if ch == "[":
            return self.parse_array(path)
        if ch == '"':
            return self.parse_string()
        if ch in "-0123456789":
            return self.parse_number()
        for word, value in (("true", True), ("false", False), ("null", None)):
            if self.text.startswith(word, self.i):
                for _ in word:
                    self.advance()
                return value
        self.fail("unexpected character" if ch else "unexpected end of input")

    def parse_object(self, path: tuple) -> dict:
        self.expect("{")
        out: dict = {}
        self.skip_ws()
        if self.peek() == "}":
            self.advance()
            return out
        while True:
            self.skip_ws()
            if self.peek() != '"':
                self.fail("expected object key string")
            key_pos = (self.line, self.col)
            key = self.parse_string()
            if key in out:
                raise _SyntaxFailure(*key_pos, f"duplicate key {key!r}")
            self.skip_ws()
            self.expect(":")
            self.skip_ws()
            out[key] = self.parse_value(path + (key,))
            self.skip_ws()
            if self.peek() == ",":
                self.advance()
                continue
            self.expect("}")
            return out

    def parse_array(self, path: tuple) -> list:
        self.expect("[")
        out: list = []
        self.skip_ws()
        if self.peek() == "]":
            self.advance()
            return out
        while True:
            self.skip_ws()
            out.append(self.parse_value(path + (len(out),)))
            self.skip_ws()
            if self.peek() == ",":
                self.advance()
                continue
            self.expect("]")
            return out

    _ESCAPES = {'"': '"', "\\": "\\", "/": "/", "b": "\b", "f": "\f", "n": "\n", "r": "\r", "t": "\t"}

    def parse_string(self) -> str:
        self.expect('"')
        chars: list[str] = []
        while True:
            ch = self.peek()
            if not ch:
                self.fail("unterminated string")
            if ch == '"':
                self.advance()
                return "".join(chars)
            if ch == "\\":
                self.advance()
                esc = self.peek()
                if esc in self._ESCAPES:
                    chars.append(self._ESCAPES[esc])
                    self.advance()
                elif esc == "u":
                    self.advance()
                    hexdigits = ""
                    for _ in range(4):
                        if self.peek() not in "0123456789abcdefABCDEF":
                            self.fail("bad unicode escape")
                        hexdigits += self.advance()
                    chars.append(chr(int(hexdigits, 16)))
                else:
                    self.fail(f"bad escape \\{esc}")
            elif ch in "\n\r":
                self.fail("newline in string")
            else:
                chars.append(self.advance())

    def parse_number(self):
        start = self.i
        if self.peek() == "-":
            self.advance()
        if not self.peek().isdigit():
            self.fail("malformed number")
        while self.peek().isdigit():
            self.advance()
        is_float = False
        if self.peek() == ".":
            is_float = True
            self.advance()
            if not self.peek().isdigit():
                self.fail("malformed number")
            while self.peek().isdigit():
                self.advance()
        if self.peek() in "eE":
            is_float = True
            self.advance()
            if self.peek() in "+-":
                self.advance()
            if not self.peek().isdigit():
                self.fail("malformed number")
            while self.peek().isdigit():
                self.advance()
        token = self.text[start : self.i]
        return float(token) if is_float else int(token)


class _Validator:
    """Walks the parsed document, collecting diagnostics and resolved objects."""

    TOP_KEYS = {
        "version",
        "title",
        "dimension",
        "measurements",
        "kinds",
        "evolutions",
        "transitions",
        "sequences",
        "composite",
        "closure",
    }

    def __init__(self, data, positions: dict[tuple, tuple[int, int]]):
        self.data = data
        self.positions = positions
        self.diagnostics: list[Diagnostic] = []
        self.canonical: dict = {}
        self.measurements: dict[str, Measurement] = {}
        # Labels whose declaration already failed; references to them are not
        # reported again.
        self.broken_labels: set[str] = set()
        self.kinds: dict[str, str] = {}
        self.sequences: dict[str, Sequence] = {}
        self.bases: dict[str, np.ndarray] = {}
        self.evolutions: dict[int, np.ndarray] = {}
        self.transitions: dict[int, np.ndarray] = {}
        self.composite: CompositeModel | None = None
        self.closure_spec: dict | None = None
        self.dimension: int | None = None

    def pos(self, path: tuple) -> tuple[int, int]:
        while path and path not in self.positions:
            path = path[:-1]
        return self.positions.get(path, (1, 1))

    def report(self, path: tuple, rule: str, message: str) -> None:
        line, col = self.pos(path)
        self.diagnostics.append(Diagnostic(line, col, rule, message, _path_str(path)))

    # -- helpers ----------------------------------------------------------

    def _complex_matrix(self, value, dim: int, path: tuple) -> np.ndarray | None:
        """Resolve a generator string or [re, im]-pair matrix of shape dim x dim."""
        if isinstance(value, str):
            try:
                return generator(value, dim)
            except UnknownGeneratorError as exc:
                self.report(path, RULE_UNKNOWN_GENERATOR, str(exc))
            except DimensionMismatchError as exc:
                self.report(path, RULE_SCHEMA, str(exc))
            return None
        if not isinstance(value, list) or len(value) != dim:
            self.report(path, RULE_SCHEMA, f"expected a {dim}x{dim} matrix or generator string")
            return None
        mat = np.zeros((dim, dim), dtype=complex)
        for r, row in enumerate(value):
            if not isinstance(row, list) or len(row) != dim:
                self.report(path + (r,), RULE_SCHEMA, f"expected a row of {dim} [re, im] pairs")
                return None
            for c, entry in enumerate(row):
                if (
                    not isinstance(entry, list)
                    or len(entry) != 2
                    or not all(isinstance(x, (int, float)) for x in entry)
                ):
                    self.report(path + (r, c), RULE_SCHEMA, "complex entries are [re, im] pairs")
                    return None
                mat[r, c] = complex(entry[0], entry[1])
        return mat

    def _real_matrix(self, value, dim: int, path: tuple) -> np.ndarray | None:
        if not isinstance(value, list) or len(value) != dim:
            self.report(path, RULE_SCHEMA, f"expected a {dim}x{dim} matrix of numbers")
            return None
        mat = np.zeros((dim, dim))
        for r, row in enumerate(value):
            if not isinstance(row, list) or len(row) != dim or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in row
            ):
                self.report(path + (r,), RULE_SCHEMA, f"expected a row of {dim} numbers")
                return None
            mat[r] = row
        return mat

    def _check_unitary(self, mat: np.ndarray, path: tuple, what: str) -> bool:
        gram = mat.conj().T @ mat
        dev = float(np.max(np.abs(gram - np.eye(mat.shape[0]))))
        if dev > MATRIX_ATOL:
            self.report(
                path,
                RULE_UNITARITY,
                f"{what}: Gram deviation from identity {dev:.3e} exceeds {MATRIX_ATOL:g}",
            )
            return False
        return True

    def _check_stochastic(self, mat: np.ndarray, path: tuple, what: str) -> bool:
        ok = True
        if np.any(mat < -MATRIX_ATOL):
            self.report(path, RULE_STOCHASTICITY, f"{what} has negative entries")
            ok = False
        dev = float(np.max(np.abs(mat.sum(axis=0) - 1.0)))
        if dev > MATRIX_ATOL:
            self.report(
                path, RULE_STOCHASTICITY, f"{what}: column sums deviate from 1 by {dev:.3e}"
            )
            ok = False
        return ok

    def _tick_map(self, value, path: tuple) -> list[tuple[int, object, tuple]]:
        """Validate a {tick-string: entry} mapping; returns (tick, entry, path) triples."""
        out = []
        if not isinstance(value, dict):
            self.report(path, RULE_SCHEMA, "expected an object keyed by tick")
            return out
        for key, entry in value.items():
            try:
                tick = int(key)
            except ValueError:
                self.report(path + (key,), RULE_SCHEMA, f"tick key {key!r} is not an integer")
                continue
            out.append((tick, entry, path + (key,)))
        return out

    # -- sections ---------------------------------------------------------

    def run(self) -> None:
        data = self.data
        if not isinstance(data, dict):
            self.report((), RULE_SCHEMA, "document root must be an object")
            return
        for key in data:
            if key not in self.TOP_KEYS:
                self.report((key,), RULE_SCHEMA, f"unknown key {key!r}")
        version = data.get("version")
        if version != VERSION:
            self.report(("version",), RULE_VERSION, f"expected version {VERSION}, got {version!r}")
            return
        self.canonical["version"] = VERSION
        if "title" in data:
            if not isinstance(data["title"], str):
                self.report(("title",), RULE_SCHEMA, "title must be a string")
            else:
                self.canonical["title"] = data["title"]

        is_composite = "composite" in data
        if is_composite:
            if "dimension" in data:
                self.report(("dimension",), RULE_SCHEMA, "composite files take dims from 'composite'")
            self._run_composite(data["composite"])
        else:
            dim = data.get("dimension")
            if not isinstance(dim, int) or dim < 1:
                self.report(("dimension",), RULE_SCHEMA, "dimension must be a positive integer")
                return
            self.dimension = dim
            self.canonical["dimension"] = dim
        if self.dimension is None:
            return

        self._run_measurements(data.get("measurements", {}), explicit_basis=not is_composite)
        if not is_composite:
            self._run_evolutions(data.get("evolutions", {}))
            self._run_transitions(data.get("transitions", {}))
        elif "evolutions" in data or "transitions" in data:
            key = "evolutions" if "evolutions" in data else "transitions"
            self.report((key,), RULE_SCHEMA, "composite files carry dynamics in 'composite'")
        self._run_kinds(data.get("kinds", {}))
        self._run_sequences(data.get("sequences", {}))
        if "closure" in data:
            self._run_closure(data["closure"])

    def _run_measurements(self, section, *, explicit_basis: bool) -> None:
        if not section and "measurements" not in self.data:
            return
        path = ("measurements",)
        if not isinstance(section, dict):
            self.report(path, RULE_SCHEMA, "measurements must be an object")
            return
        canonical = {}
        for label, body in section.items():
            mpath = path + (label,)
            if not isinstance(body, dict):
                self.report(mpath, RULE_SCHEMA, "measurement body must be an object")
                continue
            unknown = set(body) - ({"blocks", "basis"} if explicit_basis else {"blocks"})
            for key in unknown:
                self.report(mpath + (key,), RULE_SCHEMA, f"unknown measurement key {key!r}")
            blocks = body.get("blocks")
            if not isinstance(blocks, list) or not all(
                isinstance(b, list) and all(isinstance(x, int) for x in b) for b in blocks
            ):
                self.report(mpath + ("blocks",), RULE_SCHEMA, "blocks must be a list of id lists")
                continue
            try:
                meas = make_measurement(label, self.dimension, [set(b) for b in blocks])
            except (PartitionError, EmptyBlockError, ValueError) as exc:
                self.report(mpath + ("blocks",), RULE_PARTITION, str(exc))
                self.broken_labels.add(label)
                continue
            self.measurements[label] = meas
            entry: dict = {"blocks": [sorted(o.members) for o in meas.outcomes]}
            if explicit_basis and "basis" in body:
                mat = self._complex_matrix(body["basis"], self.dimension, mpath + ("basis",))
                if mat is not None and self._check_unitary(mat, mpath + ("basis",), f"basis {label!r}"):
                    self.bases[label] = mat
                    entry["basis"] = _matrix_entry(body["basis"], mat)
            canonical[label] = entry
        self.canonical["measurements"] = canonical

    def _run_evolutions(self, section) -> None:
        if not section and "evolutions" not in self.data:
            return
        canonical = {}
        for tick, entry, epath in self._tick_map(section, ("evolutions",)):
            mat = self._complex_matrix(entry, self.dimension, epath)
            if mat is not None and self._check_unitary(mat, epath, f"evolution at tick {tick}"):
                self.evolutions[tick] = mat
                canonical[str(tick)] = _matrix_entry(entry, mat)
        self.canonical["evolutions"] = canonical

    def _run_transitions(self, section) -> None:
        if not section and "transitions" not in self.data:
            return
        canonical = {}
        for tick, entry, epath in self._tick_map(section, ("transitions",)):
            mat = self._real_matrix(entry, self.dimension, epath)
            if mat is not None and self._check_stochastic(mat, epath, f"transition at tick {tick}"):
                self.transitions[tick] = mat
                canonical[str(tick)] = [[float(x) for x in row] for row in mat]
        self.canonical["transitions"] = canonical

    def _run_kinds(self, section) -> None:
        if not section and "kinds" not in self.data:
            return
        canonical = {}
        path = ("kinds",)
        if not isinstance(section, dict):
            self.report(path, RULE_SCHEMA, "kinds must be an object")
            return
        for label, kind in section.items():
            if label not in self.measurements:
                if label not in self.broken_labels:
                    self.report(path + (label,), RULE_CROSS_REF, f"unknown measurement {label!r}")
                continue
            if not isinstance(kind, str):
                self.report(path + (label,), RULE_SCHEMA, "kind must be a string")
                continue
            self.kinds[label] = kind
            canonical[label] = kind
        self.canonical["kinds"] = canonical

    def _run_sequences(self, section) -> None:
        if not section and "sequences" not in self.data:
            return
        canonical = {}
        path = ("sequences",)
        if not isinstance(section, dict):
            self.report(path, RULE_SCHEMA, "sequences must be an object")
            return
        for name, records in section.items():
            spath = path + (name,)
            if not isinstance(records, list) or not records:
                self.report(spath, RULE_SCHEMA, "a sequence is a nonempty list of records")
                continue
            recs = []
            entry = []
            ok = True
            for i, raw in enumerate(records):
                rpath = spath + (i,)
                if (
                    not isinstance(raw, list)
                    or len(raw) != 3
                    or not isinstance(raw[0], int)
                    or not isinstance(raw[1], str)
                    or not isinstance(raw[2], list)
                    or not all(isinstance(x, int) for x in raw[2])
                ):
                    self.report(rpath, RULE_SCHEMA, "record must be [tick, measurement, members]")
                    ok = False
                    break
                tick, label, members = raw
                meas = self.measurements.get(label)
                if meas is None:
                    if label not in self.broken_labels:
                        self.report(rpath + (1,), RULE_CROSS_REF, f"unknown measurement {label!r}")
                    ok = False
                    break
                try:
                    outcome = meas.block(members)
                except KeyError as exc:
                    self.report(rpath + (2,), RULE_OUTCOME_BLOCK, str(exc.args[0]))
                    ok = False
                    break
                recs.append(SequenceRecord(tick, meas, outcome))
                entry.append([tick, label, sorted(outcome.members)])
            if not ok:
                continue
            seq = Sequence(tuple(recs))
            bad = [v for v in validate(seq) if v.rule != FINAL_NOT_ATOMIC]
            if bad:
                for v in bad:
                    self.report(spath + (v.index,), v.rule, f"record {v.index}: {v.rule}")
                continue
            self.sequences[name] = seq
            canonical[name] = entry
        self.canonical["sequences"] = canonical

    def _run_composite(self, section) -> None:
        path = ("composite",)
        if not isinstance(section, dict):
            self.report(path, RULE_SCHEMA, "composite must be an object")
            return
        for key in set(section) - {"dims", "subsystems", "joint_evolutions"}:
            self.report(path + (key,), RULE_SCHEMA, f"unknown composite key {key!r}")
        dims = section.get("dims")
        if (
            not isinstance(dims, list)
            or len(dims) != 2
            or not all(isinstance(d, int) and d >= 1 for d in dims)
        ):
            self.report(path + ("dims",), RULE_SCHEMA, "dims must be two positive integers")
            return
        subsystems = section.get("subsystems")
        if not isinstance(subsystems, dict) or len(subsystems) != 2:
            self.report(path + ("subsystems",), RULE_SCHEMA, "exactly two subsystems required")
            return
        names = list(subsystems)
        parts: list[QuantumModel] = []
        canonical_subs: dict = {}
        for name, d in zip(names, dims):
            spath = path + ("subsystems", name)
            body = subsystems[name]
            if not isinstance(body, dict):
                self.report(spath, RULE_SCHEMA, "subsystem body must be an object")
                return
            for key in set(body) - {"measurements", "evolutions"}:
                self.report(spath + (key,), RULE_SCHEMA, f"unknown subsystem key {key!r}")
            bases: dict[str, np.ndarray] = {}
            sub_canonical: dict = {"measurements": {}}
            meas_section = body.get("measurements", {})
            if not isinstance(meas_section, dict):
                self.report(spath + ("measurements",), RULE_SCHEMA, "measurements must be an object")
                return
            for label, mbody in meas_section.items():
                mpath = spath + ("measurements", label)
                if not isinstance(mbody, dict) or "basis" not in mbody:
                    self.report(mpath, RULE_SCHEMA, "subsystem measurements declare a basis")
                    continue
                mat = self._complex_matrix(mbody["basis"], d, mpath + ("basis",))
                if mat is not None and self._check_unitary(mat, mpath + ("basis",), f"basis {label!r}"):
                    bases[label] = mat
                    sub_canonical["measurements"][label] = {
                        "basis": _matrix_entry(mbody["basis"], mat)
                    }
            evolutions: dict[int, np.ndarray] = {}
            if "evolutions" in body:
                sub_canonical["evolutions"] = {}
                for tick, entry, epath in self._tick_map(body["evolutions"], spath + ("evolutions",)):
                    mat = self._complex_matrix(entry, d, epath)
                    if mat is not None and self._check_unitary(mat, epath, f"evolution at tick {tick}"):
                        evolutions[tick] = mat
                        sub_canonical["evolutions"][str(tick)] = _matrix_entry(entry, mat)
            if not self.diagnostics:
                parts.append(QuantumModel(d, bases, evolutions, atol=MATRIX_ATOL))
            canonical_subs[name] = sub_canonical

        joint_dim = dims[0] * dims[1]
        joint: dict[int, np.ndarray] = {}
        canonical_joint: dict = {}
        if "joint_evolutions" in section:
            for tick, entry, epath in self._tick_map(
                section["joint_evolutions"], path + ("joint_evolutions",)
            ):
                mat = self._complex_matrix(entry, joint_dim, epath)
                if mat is not None and self._check_unitary(mat, epath, f"joint evolution at tick {tick}"):
                    joint[tick] = mat
                    canonical_joint[str(tick)] = _matrix_entry(entry, mat)

        self.dimension = joint_dim
        self.canonical["composite"] = {
            "dims": [int(d) for d in dims],
            "subsystems": canonical_subs,
        }
        if "joint_evolutions" in section:
            self.canonical["composite"]["joint_evolutions"] = canonical_joint
        if len(parts) == 2 and not self.diagnostics:
            self.composite = CompositeModel(parts[0], parts[1], joint, atol=MATRIX_ATOL)
            # Joint measurement labels resolve through tensor-product bases.
            self.bases = dict(self.composite.joint_model().bases)

    def _run_closure(self, section) -> None:
        path = ("closure",)
        if not isinstance(section, dict):
            self.report(path, RULE_SCHEMA, "closure must be an object")
            return
        allowed = {"preparation", "probe", "priors", "random_priors", "expect"}
        for key in set(section) - allowed:
            self.report(path + (key,), RULE_SCHEMA, f"unknown closure key {key!r}")
        spec: dict = {}
        prep = section.get("preparation")
        if (
            not isinstance(prep, list)
            or len(prep) != 2
            or not isinstance(prep[0], str)
            or not isinstance(prep[1], list)
        ):
            self.report(path + ("preparation",), RULE_SCHEMA, "preparation is [label, members]")
            return
        meas = self.measurements.get(prep[0])
        if meas is None:
            self.report(path + ("preparation", 0), RULE_CROSS_REF, f"unknown measurement {prep[0]!r}")
            return
        try:
            outcome = meas.block(prep[1])
        except KeyError as exc:
            self.report(path + ("preparation", 1), RULE_OUTCOME_BLOCK, str(exc.args[0]))
            return
        spec["preparation"] = (meas, outcome)
        probe_label = section.get("probe")
        if not isinstance(probe_label, str) or probe_label not in self.measurements:
            self.report(path + ("probe",), RULE_CROSS_REF, f"unknown probe measurement {probe_label!r}")
            return
        spec["probe"] = self.measurements[probe_label]
        canonical: dict = {
            "preparation": [prep[0], sorted(outcome.members)],
            "probe": probe_label,
        }
        priors = []
        if "priors" in section:
            raw = section["priors"]
            if not isinstance(raw, list):
                self.report(path + ("priors",), RULE_SCHEMA, "priors must be a list of matrices")
                return
            canonical["priors"] = []
            for i, entry in enumerate(raw):
                ppath = path + ("priors", i)
                if self.transitions and not self.bases:
                    mat = self._real_matrix(entry, self.dimension, ppath)
                    if mat is not None and self._check_stochastic(mat, ppath, f"prior {i}"):
                        priors.append(mat)
                        canonical["priors"].append([[float(x) for x in row] for row in mat])
                else:
                    mat = self._complex_matrix(entry, self.dimension, ppath)
                    if mat is not None and self._check_unitary(mat, ppath, f"prior {i}"):
                        priors.append(mat)
                        canonical["priors"].append(_matrix_entry(entry, mat))
        spec["priors"] = priors
        if "random_priors" in section:
            raw = section["random_priors"]
            if (
                not isinstance(raw, dict)
                or not isinstance(raw.get("count"), int)
                or not isinstance(raw.get("seed"), int)
            ):
                self.report(path + ("random_priors",), RULE_SCHEMA, "random_priors is {count, seed}")
                return
            spec["random_priors"] = {"count": raw["count"], "seed": raw["seed"]}
            canonical["random_priors"] = dict(spec["random_priors"])
        expect = section.get("expect")
        if expect is not None:
            if (
                not isinstance(expect, dict)
                or len(expect) != 1
                or next(iter(expect)) not in ("max_deviation_le", "max_deviation_gt")
                or not isinstance(next(iter(expect.values())), (int, float))
            ):
                self.report(
                    path + ("expect",),
                    RULE_SCHEMA,
                    "expect is {max_deviation_le: x} or {max_deviation_gt: x}",
                )
                return
            key, bound = next(iter(expect.items()))
            spec["expect"] = (key, float(bound))
            canonical["expect"] = {key: float(bound)}
        self.closure_spec = spec
        self.canonical["closure"] = canonical


def _matrix_entry(raw, mat: np.ndarray):
    """Canonical form of a complex matrix slot: the generator string or [re, im] rows."""
    if isinstance(raw, str):
        return raw.strip()
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


def _path_str(path: tuple) -> str:
    if not path:
        return "$"
    parts = []
    for p in path:
        parts.append(f"[{p}]" if isinstance(p, int) else ("." + p if parts else p))
    return "".join(parts)


class ExperimentFile:
    """A validated experiment document plus the module objects it resolves to.

    Equality compares the canonical data, which is what ``serialize`` writes;
    parse -> serialize -> parse is the identity on that structure.
    """

    def __init__(self, validator: _Validator):
        self.data = validator.canonical
        self.dimension = validator.dimension
        self.measurements = dict(validator.measurements)
        self.kinds = dict(validator.kinds)
        self.sequences = dict(validator.sequences)
        self._bases = validator.bases
        self._evolutions = validator.evolutions
        self._transitions = validator.transitions
        self._composite = validator.composite
        self.closure_spec = validator.closure_spec

    def __eq__(self, other) -> bool:
        return isinstance(other, ExperimentFile) and self.data == other.data

    def __repr__(self) -> str:
        title = self.data.get("title", "<untitled>")
        return f"ExperimentFile({title!r}, d={self.dimension})"

    @property
    def has_quantum(self) -> bool:
        return bool(self._bases) or self._composite is not None

    @property
    def has_classical(self) -> bool:
        return "transitions" in self.data

    def quantum_model(self) -> QuantumModel | CompositeModel:
        if self._composite is not None:
            return self._composite
        if not self._bases:
            raise CrossRefError("experiment declares no quantum model")
        return QuantumModel(self.dimension, self._bases, self._evolutions, atol=MATRIX_ATOL)

    def classical_model(self) -> ClassicalModel:
        if not self.has_classical:
            raise CrossRefError("experiment declares no classical model")
        return ClassicalModel(self.dimension, self._transitions, atol=MATRIX_ATOL)

    def composite_model(self) -> CompositeModel:
        if self._composite is None:
            raise CrossRefError("experiment declares no composite model")
        return self._composite

    def sequence(self, name: str) -> Sequence:
        if name not in self.sequences:
            raise KeyError(f"unknown sequence {name!r}")
        return self.sequences[name]

    def serialize(self) -> str:
        return serialize_experiment(self)


def parse_experiment(text: str) -> tuple[ExperimentFile | None, list[Diagnostic]]:
    """Parse and validate; returns (file, []) on success or (None, diagnostics)."""
    reader = _PosReader(text)
    try:
        data = reader.parse()
    except _SyntaxFailure as exc:
        return None, [Diagnostic(exc.line, exc.col, RULE_SYNTAX, exc.message, "$")]
    validator = _Validator(data, reader.positions)
    validator.run()
    if validator.diagnostics:
        return None, sorted(validator.diagnostics, key=lambda d: (d.line, d.col, d.rule))
    return ExperimentFile(validator), []


def serialize_experiment(ef: ExperimentFile) -> str:
    """Canonical text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(ef.data, sort_keys=True, indent=2) + "\n"
