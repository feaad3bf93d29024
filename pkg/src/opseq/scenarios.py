"""Built-in worked scenarios, runnable end-to-end and exported as experiment files.

Five scenarios ship: a spin-pair chain at right angles (``sg_chain``), the same
chain with the intermediate detector coarse-grained away (``sg_coarse``), a
minimal two-path interference set-up with injectable branch phase
(``double_slit``), a two-subsystem configuration-swap set-up with an entangling
step (``entangled_pair``), and a moving body observed through overlapping
region detectors versus exact cells (``zeno_arrow``). Every scenario carries
frozen expected values with tolerances; ``run_scenario`` evaluates them all and
reports pass/fail per check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib.resources import files
from typing import Callable

import numpy as np

from .errors import UnknownScenarioError
from .generators import generator
from .models import (
    CompositeModel,
    QuantumModel,
    amplitude,
    probability,
    series_product_check,
)
from .outcomes import atomic_measurement, coarse_measurement
from .properties import (
    ALL_SUBSETS,
    AttributionInput,
    Kind,
    Modality,
    QUANTUM,
    attribute,
)
from .sequences import Sequence, parallel, sequence

__all__ = [
    "Expectation",
    "CheckResult",
    "ScenarioReport",
    "Scenario",
    "SCENARIO_NAMES",
    "FIXTURE_NAMES",
    "build_scenario",
    "run_scenario",
    "fringe_table",
    "zeno_report",
    "fixture_document",
    "fixture_text",
    "DOUBLE_SLIT_PHASE",
]

SCENARIO_NAMES = ("sg_chain", "sg_coarse", "double_slit", "entangled_pair", "zeno_arrow")
FIXTURE_NAMES = SCENARIO_NAMES + ("closure_witness",)

SG_X_EXPR = f"sg({math.pi / 2!r}, 0.0)"
DOUBLE_SLIT_PHASE = math.pi / 3
BRANCH_PROBABILITY = 0.25  # equal-modulus two-path branches

# Antisymmetric configuration-swap branch amplitude modulus: 1 / (2*sqrt(2)).
SWAP_BRANCH_MODULUS = 0.3535533905932738


@dataclass(frozen=True)
class Expectation:
    """A named check: ``compute`` yields (computed, expected) when run."""

    name: str
    compute: Callable[[], tuple[object, object]]
    tolerance: float | None = None  # None means exact equality


@dataclass(frozen=True)
class CheckResult:
    check: str
    computed: object
    expected: object
    tolerance: float | None
    passed: bool


@dataclass(frozen=True)
class ScenarioReport:
    scenario: str
    results: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


@dataclass(frozen=True)
class Scenario:
    name: str
    model: object
    sequences: dict[str, Sequence]
    expected: tuple[Expectation, ...]


def _evaluate(e: Expectation, tolerance: float | None) -> CheckResult:
    computed, expected = e.compute()
    tol = tolerance if tolerance is not None else e.tolerance
    if tol is None or isinstance(computed, bool):
        passed = computed == expected
        tol = None if isinstance(computed, bool) else tol
    else:
        passed = abs(computed - expected) <= tol
    return CheckResult(e.name, computed, expected, tol, passed)


def run_scenario(name: str, tolerance: float | None = None) -> ScenarioReport:
    """Evaluate every expected check of a scenario, optionally at an overridden tolerance."""
    scn = build_scenario(name)
    return ScenarioReport(scn.name, tuple(_evaluate(e, tolerance) for e in scn.expected))


def build_scenario(name: str) -> Scenario:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownScenarioError(
            f"unknown scenario {name!r}; available: {', '.join(SCENARIO_NAMES)}"
        ) from None
    return builder()


# -- spin-pair chain ---------------------------------------------------------


def _sg_model() -> QuantumModel:
    return QuantumModel(2, {"SGz": np.eye(2), "SGx": generator(SG_X_EXPR, 2)})


def _build_sg_chain() -> Scenario:
    model = _sg_model()
    sgz, sgx = atomic_measurement("SGz", 2), atomic_measurement("SGx", 2)
    seqs: dict[str, Sequence] = {
        "seq1": sequence((1, sgz, 0), (3, sgx, 0)),
    }
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                seqs[f"path_{a}{b}{c}"] = sequence((1, sgz, a), (3, sgx, b), (5, sgz, c))

    expected = [
        Expectation("seq1-probability", lambda: (probability(model, seqs["seq1"]), 0.5), 1e-12)
    ]

    def series_check(a: int, b: int, c: int) -> Callable[[], tuple[float, float]]:
        def compute():
            first = sequence((1, sgz, a), (3, sgx, b))
            second = sequence((3, sgx, b), (5, sgz, c))
            return series_product_check(model, first, second)

        return compute

    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                expected.append(Expectation(f"series-product-{a}{b}{c}", series_check(a, b, c), 1e-12))
    return Scenario("sg_chain", model, seqs, tuple(expected))


# -- coarse-grained intermediate detector ------------------------------------


def _build_sg_coarse() -> Scenario:
    model = _sg_model()
    sgz, sgx = atomic_measurement("SGz", 2), atomic_measurement("SGx", 2)
    sgx_all = coarse_measurement("SGx", 2, {0, 1})
    seqs = {
        "branch_plus": sequence((1, sgz, 0), (3, sgx, 0), (5, sgz, 0)),
        "branch_minus": sequence((1, sgz, 0), (3, sgx, 1), (5, sgz, 0)),
        "coarse": sequence((1, sgz, 0), (3, sgx_all, {0, 1}), (5, sgz, 0)),
    }

    def decomposition():
        return parallel(seqs["branch_plus"], seqs["branch_minus"]) == seqs["coarse"], True

    def additivity():
        z_coarse = complex(amplitude(model, seqs["coarse"]).value)
        z_sum = complex(amplitude(model, seqs["branch_plus"]).value) + complex(
            amplitude(model, seqs["branch_minus"]).value
        )
        return z_coarse, z_sum

    def excess():
        p_coarse = probability(model, seqs["coarse"])
        p_sum = probability(model, seqs["branch_plus"]) + probability(model, seqs["branch_minus"])
        # Removing the intermediate detector restores certainty: the coarse
        # probability is 1 while the branch probabilities sum to 1/2.
        return abs(p_coarse - p_sum), 0.5

    expected = (
        Expectation("parallel-decomposition", decomposition),
        Expectation("amplitude-additivity", additivity, 1e-12),
        Expectation("coarse-probability", lambda: (probability(model, seqs["coarse"]), 1.0), 1e-12),
        Expectation("interference-excess", excess, 1e-9),
    )
    return Scenario("sg_coarse", model, seqs, expected)


# -- two-path interference ----------------------------------------------------


def _phase_unitary(phase: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * phase)]).astype(complex)


def _double_slit_model(phase: float) -> QuantumModel:
    bases = {
        "emit": generator(SG_X_EXPR, 2),
        "slits": np.eye(2),
        "screen": generator(SG_X_EXPR, 2),
    }
    return QuantumModel(2, bases, {3: _phase_unitary(phase)})


def _double_slit_sequences() -> dict[str, Sequence]:
    emit = atomic_measurement("emit", 2)
    slits = atomic_measurement("slits", 2)
    screen = atomic_measurement("screen", 2)
    both = coarse_measurement("slits", 2, {0, 1})
    return {
        "branch_1": sequence((1, emit, 0), (3, slits, 0), (5, screen, 0)),
        "branch_2": sequence((1, emit, 0), (3, slits, 1), (5, screen, 0)),
        "fringe": sequence((1, emit, 0), (3, both, {0, 1}), (5, screen, 0)),
    }


def fringe_table(phases) -> list[tuple[float, float]]:
    """Detection probability of the two-path coarse sequence per branch phase."""
    seqs = _double_slit_sequences()
    out = []
    for phase in phases:
        model = _double_slit_model(float(phase))
        out.append((float(phase), probability(model, seqs["fringe"])))
    return out


def _build_double_slit() -> Scenario:
    model = _double_slit_model(DOUBLE_SLIT_PHASE)
    seqs = _double_slit_sequences()
    p = BRANCH_PROBABILITY

    def fringe_probability():
        return probability(model, seqs["fringe"]), 2 * p * (1 + math.cos(DOUBLE_SLIT_PHASE))

    def table_error():
        phases = np.linspace(0.0, 2 * math.pi, 17)
        table = fringe_table(phases)
        worst = max(abs(prob - 2 * p * (1 + math.cos(phase))) for phase, prob in table)
        return worst, 0.0

    def monotone():
        phases = np.linspace(0.0, math.pi, 9)
        values = [prob for _, prob in fringe_table(phases)]
        return all(b <= a + 1e-12 for a, b in zip(values, values[1:])), True

    def destructive():
        model_pi = _double_slit_model(math.pi)
        return probability(model_pi, seqs["fringe"]), 0.0

    def which_way_sum():
        # With detectors at the paths the screen statistics are additive: the
        # cross term vanishes and the sum is phase-independent.
        total = probability(model, seqs["branch_1"]) + probability(model, seqs["branch_2"])
        return total, 2 * p

    def cross_term():
        p_fringe = probability(model, seqs["fringe"])
        p_sum = probability(model, seqs["branch_1"]) + probability(model, seqs["branch_2"])
        return abs(p_fringe - p_sum), 2 * p * abs(math.cos(DOUBLE_SLIT_PHASE))

    expected = (
        Expectation("fringe-probability", fringe_probability, 1e-12),
        Expectation("fringe-table-max-error", table_error, 1e-12),
        Expectation("fringe-monotone-on-0-pi", monotone),
        Expectation("destructive-at-pi", destructive, 1e-12),
        Expectation("which-way-sum", which_way_sum, 1e-12),
        Expectation("interference-cross-term", cross_term, 1e-9),
    )
    return Scenario("double_slit", model, seqs, expected)


# -- entangled pair -----------------------------------------------------------


def _entangler() -> np.ndarray:
    """Unitary sending the (0,0) product configuration to the antisymmetric swap pair."""
    s = 1.0 / math.sqrt(2.0)
    return np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [s, 0.0, s, 0.0],
            [-s, 0.0, s, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        dtype=complex,
    )


def _entangled_parts(with_rotations: bool) -> tuple[QuantumModel, QuantumModel]:
    bases = {"pos": np.eye(2), "diag": generator(SG_X_EXPR, 2)}
    if with_rotations:
        part_a = QuantumModel(2, bases, {1: generator("rotation(0.7)", 2), 3: generator("rotation(0.4)", 2)})
        part_b = QuantumModel(2, bases, {1: generator("rotation(0.3)", 2), 3: generator("rotation(0.9)", 2)})
    else:
        part_a = QuantumModel(2, bases)
        part_b = QuantumModel(2, bases)
    return part_a, part_b


def _entangled_sequences() -> dict[str, Sequence]:
    pos = atomic_measurement("pos", 4)
    diag = atomic_measurement("diag", 4)
    swap = coarse_measurement("pos", 4, {1, 2})
    seqs = {
        f"branch_{i}{j}": sequence((1, pos, 0), (3, pos, 2 * i + j), (5, diag, 0))
        for i in (0, 1)
        for j in (0, 1)
    }
    seqs["swap_pair"] = sequence((1, pos, 0), (3, swap, {1, 2}), (5, diag, 0))
    return seqs


def _branch_matrix(model, seqs) -> np.ndarray:
    return np.array(
        [
            [complex(amplitude(model, seqs[f"branch_{i}{j}"]).value) for j in (0, 1)]
            for i in (0, 1)
        ]
    )


def _build_entangled_pair() -> Scenario:
    part_a, part_b = _entangled_parts(with_rotations=False)
    model = CompositeModel(part_a, part_b, {1: _entangler()})
    seqs = _entangled_sequences()

    def additivity():
        z_coarse = complex(amplitude(model, seqs["swap_pair"]).value)
        z_sum = complex(amplitude(model, seqs["branch_01"]).value) + complex(
            amplitude(model, seqs["branch_10"]).value
        )
        return z_coarse, z_sum

    def swap_probability():
        # The antisymmetric pair interferes destructively at the symmetric
        # final outcome.
        return probability(model, seqs["swap_pair"]), 0.0

    def second_singular():
        sv = np.linalg.svd(_branch_matrix(model, seqs), compute_uv=False)
        return float(sv[1]), SWAP_BRANCH_MODULUS

    def factorization():
        from .models import split_joint_sequence

        free = CompositeModel(*_entangled_parts(with_rotations=True))
        worst = 0.0
        for i in (0, 1):
            for j in (0, 1):
                seq = seqs[f"branch_{i}{j}"]
                z_joint = complex(amplitude(free, seq).value)
                seq_a, seq_b = split_joint_sequence(seq, free.dims)
                z_a = complex(amplitude(free.part_a, seq_a).value)
                z_b = complex(amplitude(free.part_b, seq_b).value)
                worst = max(worst, abs(z_joint - z_a * z_b))
        return worst, 0.0

    def noninteracting_rank():
        free = CompositeModel(*_entangled_parts(with_rotations=True))
        sv = np.linalg.svd(_branch_matrix(free, seqs), compute_uv=False)
        return float(sv[1]), 0.0

    expected = (
        Expectation("swap-amplitude-additivity", additivity, 1e-12),
        Expectation("swap-pair-probability", swap_probability, 1e-12),
        Expectation("branch-matrix-second-singular", second_singular, 1e-9),
        Expectation("noninteracting-factorization", factorization, 1e-12),
        Expectation("noninteracting-second-singular", noninteracting_rank, 1e-9),
    )
    return Scenario("entangled_pair", model, seqs, expected)


# -- the arrow ----------------------------------------------------------------

ARROW_CELLS = 12
ARROW_REGION_WIDTH = 3
ARROW_TICKS = (1, 2, 3, 4, 5)


def _shift(d: int) -> np.ndarray:
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def _arrow_model() -> QuantumModel:
    steps = {t: _shift(ARROW_CELLS) for t in ARROW_TICKS[:-1]}
    return QuantumModel(ARROW_CELLS, {"cell": np.eye(ARROW_CELLS)}, steps)


def _arrow_sequences() -> dict[str, Sequence]:
    cell = atomic_measurement("cell", ARROW_CELLS)
    atomic_chain = sequence(*((t, cell, t) for t in ARROW_TICKS))
    regions = []
    for t in ARROW_TICKS[1:-1]:
        block = set(range(t - 1, t - 1 + ARROW_REGION_WIDTH))
        regions.append((t, coarse_measurement("cell", ARROW_CELLS, block), block))
    region_chain = sequence(
        (ARROW_TICKS[0], cell, ARROW_TICKS[0]),
        *((t, meas, block) for t, meas, block in regions),
        (ARROW_TICKS[-1], cell, ARROW_TICKS[-1]),
    )
    return {"atomic_chain": atomic_chain, "region_chain": region_chain}


def _arrow_attribution(seq: Sequence) -> list:
    inp = AttributionInput(QUANTUM, seq, {"cell": "position"})
    return attribute(inp, subject="arrow", potentials=ALL_SUBSETS)


def _build_zeno_arrow() -> Scenario:
    model = _arrow_model()
    seqs = _arrow_sequences()

    def chain_probability(name: str):
        return lambda: (probability(model, seqs[name]), 1.0)

    def atomic_no_evolutive():
        asc = _arrow_attribution(seqs["atomic_chain"])
        return all(a.kind is not Kind.EVOLUTIVE for a in asc), True

    def region_ticks():
        return [r.time for r in seqs["region_chain"] if not r.outcome.is_atomic]

    def region_evolutive_every_tick():
        asc = _arrow_attribution(seqs["region_chain"])
        have = {a.time_tag.tick for a in asc if a.kind is Kind.EVOLUTIVE}
        return set(region_ticks()) <= have, True

    def region_actuals():
        asc = _arrow_attribution(seqs["region_chain"])
        actual_regions = {
            a.time_tag.tick
            for a in asc
            if a.kind is Kind.ICP and a.modality is Modality.ACTUAL and not a.value.is_atomic
        }
        return set(region_ticks()) <= actual_regions, True

    def region_potential_count():
        asc = _arrow_attribution(seqs["region_chain"])
        counts = {
            t: sum(
                1
                for a in asc
                if a.time_tag.tick == t and a.modality is Modality.POTENTIAL
            )
            for t in region_ticks()
        }
        return sorted(set(counts.values())), [2**ARROW_REGION_WIDTH - 2]

    expected = (
        Expectation("atomic-chain-probability", chain_probability("atomic_chain"), 1e-12),
        Expectation("region-chain-probability", chain_probability("region_chain"), 1e-12),
        Expectation("atomic-chain-no-evolutive", atomic_no_evolutive),
        Expectation("region-chain-evolutive-every-tick", region_evolutive_every_tick),
        Expectation("region-chain-actual-regions", region_actuals),
        Expectation("region-chain-potential-count", region_potential_count),
    )
    return Scenario("zeno_arrow", model, seqs, expected)


def zeno_report() -> dict:
    """Juxtapose the exact-cell chain against the region chain, tick by tick."""
    seqs = _arrow_sequences()
    report: dict = {}
    for name in ("atomic_chain", "region_chain"):
        asc = _arrow_attribution(seqs[name])
        rows = []
        for rec in seqs[name]:
            at_tick = [a for a in asc if a.time_tag.tick == rec.time]
            rows.append(
                {
                    "tick": rec.time,
                    "outcome": sorted(rec.outcome.members),
                    "evolutive_present": any(a.kind is Kind.EVOLUTIVE for a in at_tick),
                    "actual_values": [
                        sorted(a.value.members)
                        for a in at_tick
                        if a.kind is Kind.ICP and a.modality is Modality.ACTUAL
                    ],
                    "potential_count": sum(
                        1 for a in at_tick if a.modality is Modality.POTENTIAL
                    ),
                }
            )
        report[name] = rows
    report["summary"] = [
        "exact-cell chain: every observation pins the body to a point, and no"
        " evolutive property is ascribed at any tick",
        "region chain: each observation leaves a region possessed actually, its"
        " subregions possessed potentially, and an evolutive property present,"
        " so one can meaningfully speak of motion in an instant",
    ]
    return report


_BUILDERS = {
    "sg_chain": _build_sg_chain,
    "sg_coarse": _build_sg_coarse,
    "double_slit": _build_double_slit,
    "entangled_pair": _build_entangled_pair,
    "zeno_arrow": _build_zeno_arrow,
}


# -- fixture export -----------------------------------------------------------


def _pairs(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat, dtype=complex)]


def _blocks(meas) -> list:
    return [sorted(o.members) for o in meas.outcomes]


_UNIFORM_2 = [[0.5, 0.5], [0.5, 0.5]]


def fixture_document(name: str) -> dict:
    """The experiment-file document for a scenario (canonical structure)."""
    if name == "sg_chain":
        doc = {
            "version": 1,
            "title": "Spin-pair chain at right angles",
            "dimension": 2,
            "measurements": {
                "SGz": {"blocks": [[0], [1]], "basis": "identity"},
                "SGx": {"blocks": [[0], [1]], "basis": SG_X_EXPR},
            },
            "kinds": {"SGz": "spin-z", "SGx": "spin-x"},
            "sequences": {"seq1": [[1, "SGz", [0]], [3, "SGx", [0]]]},
            "closure": {
                "preparation": ["SGz", [0]],
                "probe": "SGx",
                "random_priors": {"count": 50, "seed": 5},
                "expect": {"max_deviation_le": 1e-12},
            },
        }
        for a in (0, 1):
            for b in (0, 1):
                for c in (0, 1):
                    doc["sequences"][f"path_{a}{b}{c}"] = [
                        [1, "SGz", [a]],
                        [3, "SGx", [b]],
                        [5, "SGz", [c]],
                    ]
        return doc
    if name == "sg_coarse":
        return {
            "version": 1,
            "title": "Coarse-grained intermediate detector",
            "dimension": 2,
            "measurements": {
                "SGz": {"blocks": [[0], [1]], "basis": "identity"},
                "SGx": {"blocks": [[0], [1]], "basis": SG_X_EXPR},
                "SGx_all": {"blocks": [[0, 1]]},
            },
            "kinds": {"SGz": "spin-z", "SGx": "spin-x", "SGx_all": "spin-x"},
            "transitions": {"1": _UNIFORM_2, "3": _UNIFORM_2},
            "sequences": {
                "branch_plus": [[1, "SGz", [0]], [3, "SGx", [0]], [5, "SGz", [0]]],
                "branch_minus": [[1, "SGz", [0]], [3, "SGx", [1]], [5, "SGz", [0]]],
                "coarse": [[1, "SGz", [0]], [3, "SGx_all", [0, 1]], [5, "SGz", [0]]],
            },
        }
    if name == "double_slit":
        return {
            "version": 1,
            "title": "Two-path interference with injectable branch phase",
            "dimension": 2,
            "measurements": {
                "emit": {"blocks": [[0], [1]], "basis": SG_X_EXPR},
                "slits": {"blocks": [[0], [1]], "basis": "identity"},
                "slits_both": {"blocks": [[0, 1]]},
                "screen": {"blocks": [[0], [1]], "basis": SG_X_EXPR},
            },
            "kinds": {
                "emit": "position",
                "slits": "path",
                "slits_both": "path",
                "screen": "position",
            },
            "evolutions": {"3": _pairs(_phase_unitary(DOUBLE_SLIT_PHASE))},
            "transitions": {"1": _UNIFORM_2, "3": _UNIFORM_2},
            "sequences": {
                "branch_1": [[1, "emit", [0]], [3, "slits", [0]], [5, "screen", [0]]],
                "branch_2": [[1, "emit", [0]], [3, "slits", [1]], [5, "screen", [0]]],
                "fringe": [[1, "emit", [0]], [3, "slits_both", [0, 1]], [5, "screen", [0]]],
            },
        }
    if name == "entangled_pair":
        sub = {
            "measurements": {
                "pos": {"basis": "identity"},
                "pos_swap": {"basis": "identity"},
                "diag": {"basis": SG_X_EXPR},
            }
        }
        return {
            "version": 1,
            "title": "Configuration swap pair with entangling step",
            "composite": {
                "dims": [2, 2],
                "subsystems": {"A": sub, "B": sub},
                "joint_evolutions": {"1": _pairs(_entangler())},
            },
            "measurements": {
                "pos": {"blocks": [[0], [1], [2], [3]]},
                "pos_swap": {"blocks": [[0], [3], [1, 2]]},
                "diag": {"blocks": [[0], [1], [2], [3]]},
            },
            "kinds": {"pos": "position", "pos_swap": "position", "diag": "position"},
            "sequences": {
                "branch_00": [[1, "pos", [0]], [3, "pos", [0]], [5, "diag", [0]]],
                "branch_01": [[1, "pos", [0]], [3, "pos", [1]], [5, "diag", [0]]],
                "branch_10": [[1, "pos", [0]], [3, "pos", [2]], [5, "diag", [0]]],
                "branch_11": [[1, "pos", [0]], [3, "pos", [3]], [5, "diag", [0]]],
                "swap_pair": [[1, "pos", [0]], [3, "pos_swap", [1, 2]], [5, "diag", [0]]],
            },
        }
    if name == "zeno_arrow":
        seqs = _arrow_sequences()
        measurements: dict = {
            "cell": {
                "blocks": [[i] for i in range(ARROW_CELLS)],
                "basis": "identity",
            }
        }
        sequences: dict = {}
        for sname, seq in seqs.items():
            rows = []
            for rec in seq:
                if rec.outcome.is_atomic:
                    rows.append([rec.time, "cell", sorted(rec.outcome.members)])
                else:
                    label = f"region{rec.time}"
                    measurements[label] = {
                        "blocks": _blocks(rec.measurement),
                        "basis": "identity",
                    }
                    rows.append([rec.time, label, sorted(rec.outcome.members)])
            sequences[sname] = rows
        shift = _pairs(_shift(ARROW_CELLS))
        return {
            "version": 1,
            "title": "Moving body observed through overlapping regions",
            "dimension": ARROW_CELLS,
            "measurements": measurements,
            "kinds": {label: "position" for label in measurements},
            "evolutions": {str(t): shift for t in ARROW_TICKS[:-1]},
            "sequences": sequences,
        }
    if name == "closure_witness":
        theta = math.pi / 8
        probe = np.eye(3, dtype=complex)
        probe[0, 0] = math.cos(theta)
        probe[1, 0] = math.sin(theta)
        probe[0, 1] = -math.sin(theta)
        probe[1, 1] = math.cos(theta)
        swap01 = np.eye(3, dtype=complex)[[1, 0, 2]]
        return {
            "version": 1,
            "title": "Non-atomic preparation fails closure",
            "dimension": 3,
            "measurements": {
                "pos": {"blocks": [[0], [1], [2]], "basis": "identity"},
                "prep_pair": {"blocks": [[2], [0, 1]], "basis": "identity"},
                "probe": {"blocks": [[0], [1], [2]], "basis": _pairs(probe)},
            },
            "closure": {
                "preparation": ["prep_pair", [0, 1]],
                "probe": "probe",
                "priors": [_pairs(swap01)],
                "random_priors": {"count": 100, "seed": 11},
                "expect": {"max_deviation_gt": 0.01},
            },
        }
    raise UnknownScenarioError(f"no fixture named {name!r}")


def fixture_text(name: str) -> str:
    """The shipped fixture file's text."""
    return (files("opseq") / "fixtures" / f"{name}.json").read_text(encoding="utf-8")
