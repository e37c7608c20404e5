"""JSON encodings of the data model.

Complex matrices are flat row-major arrays of [re, im] pairs.  Floats are
emitted with Python's shortest round-trip repr, so parse(emit(x)) recovers x
exactly.  Parsers validate shapes and value ranges and raise
:class:`~tempocorr.errors.SchemaError` with the offending field path.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .correlations import (
    Behavior,
    ConvexDecomposition,
    DeterministicVertex,
    Scenario,
    context_order,
    digits_of_index,
    digits_string,
)
from .errors import SchemaError, TempocorrError
from .qmath import DensityMatrix, SystemModel, validate_instrument
from .witness import (
    CertificationReport,
    EffectParams,
    QubitStrategy,
    WitnessFunctional,
    WitnessTerm,
)


# --- matrices ---------------------------------------------------------------

def matrix_to_json(m: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(m, dtype=complex).reshape(-1)]


def matrix_from_json(data, path: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise SchemaError(path, "expected a nonempty array of [re, im] pairs")
    dim = math.isqrt(len(data))
    if dim * dim != len(data):
        raise SchemaError(path, f"{len(data)} entries do not form a square matrix")
    flat = np.empty(len(data), dtype=complex)
    for i, pair in enumerate(data):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, (int, float)) for v in pair)
        ):
            raise SchemaError(f"{path}[{i}]", "expected an [re, im] pair of numbers")
        flat[i] = complex(pair[0], pair[1])
    return flat.reshape(dim, dim)


# --- system models ------------------------------------------------------------

def system_model_to_json(sys: SystemModel) -> dict:
    return {
        "dim": sys.dim,
        "initial": matrix_to_json(sys.initial.matrix),
        "instruments": [
            {"kraus": [[matrix_to_json(k) for k in ops] for ops in inst.kraus_sets]}
            for inst in sys.instruments
        ],
    }


def system_model_from_json(data) -> SystemModel:
    if not isinstance(data, dict):
        raise SchemaError("$", "expected an object")
    dim = data.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError("dim", f"expected a positive integer, got {dim!r}")
    if "initial" not in data:
        raise SchemaError("initial", "missing")
    initial = matrix_from_json(data["initial"], "initial")
    if initial.shape != (dim, dim):
        raise SchemaError("initial", f"matrix is {initial.shape[0]}x{initial.shape[0]}, dim says {dim}")
    raw = data.get("instruments")
    if not isinstance(raw, list) or not raw:
        raise SchemaError("instruments", "expected a nonempty array")
    instruments = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict) or "kraus" not in entry:
            raise SchemaError(f"instruments[{i}]", "expected an object with a 'kraus' field")
        kraus = entry["kraus"]
        if not isinstance(kraus, list) or not kraus:
            raise SchemaError(f"instruments[{i}].kraus", "expected a nonempty array of outcomes")
        sets = []
        for r, ops in enumerate(kraus):
            if not isinstance(ops, list) or not ops:
                raise SchemaError(
                    f"instruments[{i}].kraus[{r}]", "expected a nonempty array of matrices"
                )
            mats = []
            for k, mat in enumerate(ops):
                m = matrix_from_json(mat, f"instruments[{i}].kraus[{r}][{k}]")
                if m.shape != (dim, dim):
                    raise SchemaError(
                        f"instruments[{i}].kraus[{r}][{k}]",
                        f"matrix is {m.shape[0]}x{m.shape[0]}, dim says {dim}",
                    )
                mats.append(m)
            sets.append(mats)
        try:
            instruments.append(validate_instrument(sets))
        except TempocorrError as exc:
            raise SchemaError(f"instruments[{i}]", str(exc)) from exc
    try:
        state = DensityMatrix(initial)
        return SystemModel(state, tuple(instruments))
    except TempocorrError as exc:
        raise SchemaError("initial", str(exc)) from exc


# --- behaviors -----------------------------------------------------------------

def _scenario_from_json(data) -> Scenario:
    for key in ("L", "R", "S"):
        if not isinstance(data.get(key), int):
            raise SchemaError(key, f"expected an integer, got {data.get(key)!r}")
    try:
        return Scenario(data["L"], data["R"], data["S"])
    except TempocorrError as exc:
        raise SchemaError("L/R/S", str(exc)) from exc


def behavior_to_json(b: Behavior) -> dict:
    s = b.scenario
    table = {}
    for srow in range(s.n_setting_seqs):
        key = digits_string(digits_of_index(srow, s.S, s.L))
        table[key] = [float(v) for v in b.table[srow]]
    return {"L": s.L, "R": s.R, "S": s.S, "table": table}


def behavior_from_json(data) -> Behavior:
    if not isinstance(data, dict):
        raise SchemaError("$", "expected an object")
    scenario = _scenario_from_json(data)
    raw = data.get("table")
    if not isinstance(raw, dict):
        raise SchemaError("table", "expected an object keyed by setting digits")
    table = np.zeros((scenario.n_setting_seqs, scenario.n_outcome_seqs))
    seen = set()
    for key, row in raw.items():
        if len(key) != scenario.L or any(c not in "0123456789" for c in key):
            raise SchemaError(f"table.{key}", f"key must be {scenario.L} setting digits")
        xs = tuple(int(c) for c in key)
        if any(x >= scenario.S for x in xs):
            raise SchemaError(f"table.{key}", f"setting digit out of range 0..{scenario.S - 1}")
        if not isinstance(row, list) or len(row) != scenario.n_outcome_seqs:
            raise SchemaError(
                f"table.{key}", f"expected {scenario.n_outcome_seqs} probabilities"
            )
        if not all(isinstance(v, (int, float)) for v in row):
            raise SchemaError(f"table.{key}", "probabilities must be numbers")
        srow = 0
        for x in xs:
            srow = srow * scenario.S + x
        table[srow] = row
        seen.add(srow)
    if len(seen) != scenario.n_setting_seqs:
        raise SchemaError("table", f"expected {scenario.n_setting_seqs} setting blocks, got {len(seen)}")
    return Behavior(scenario, table)


# --- vertices and decompositions --------------------------------------------------

def _assignment_to_json(v: DeterministicVertex) -> dict[str, int]:
    s = v.scenario
    out = {}
    for h in context_order(s):
        t = len(h)
        realized = v.realized_outcomes(h)
        key = f"t={t};x={digits_string(h)};a={digits_string(realized[:-1])}"
        out[key] = int(realized[-1])
    return out


def vertex_to_json(v: DeterministicVertex) -> dict:
    s = v.scenario
    return {"L": s.L, "R": s.R, "S": s.S, "assignment": _assignment_to_json(v)}


def _assignment_from_json(scenario: Scenario, data, path: str) -> DeterministicVertex:
    if not isinstance(data, dict):
        raise SchemaError(path, "expected an object of context -> outcome")
    outcomes = []
    partial: dict[tuple[int, ...], int] = {}
    for h in context_order(scenario):
        t = len(h)
        realized = tuple(partial[h[: u + 1]] for u in range(t - 1))
        key = f"t={t};x={digits_string(h)};a={digits_string(realized)}"
        if key not in data:
            raise SchemaError(f"{path}.{key}", "missing context")
        a = data[key]
        if not isinstance(a, int) or not 0 <= a < scenario.R:
            raise SchemaError(f"{path}.{key}", f"outcome must be in 0..{scenario.R - 1}, got {a!r}")
        partial[h] = a
        outcomes.append(a)
    expected = scenario.n_contexts
    if len(data) != expected:
        raise SchemaError(path, f"expected {expected} contexts, got {len(data)}")
    return DeterministicVertex(scenario, tuple(outcomes))


def vertex_from_json(data) -> DeterministicVertex:
    if not isinstance(data, dict):
        raise SchemaError("$", "expected an object")
    scenario = _scenario_from_json(data)
    return _assignment_from_json(scenario, data.get("assignment"), "assignment")


def decomposition_to_json(d: ConvexDecomposition) -> dict:
    s = d.scenario
    return {
        "L": s.L,
        "R": s.R,
        "S": s.S,
        "terms": [
            {"weight": float(w), "assignment": _assignment_to_json(v)} for w, v in d.terms
        ],
    }


def decomposition_from_json(data) -> ConvexDecomposition:
    if not isinstance(data, dict):
        raise SchemaError("$", "expected an object")
    scenario = _scenario_from_json(data)
    raw = data.get("terms")
    if not isinstance(raw, list) or not raw:
        raise SchemaError("terms", "expected a nonempty array")
    terms = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict) or not isinstance(entry.get("weight"), (int, float)):
            raise SchemaError(f"terms[{i}]", "expected an object with numeric 'weight'")
        v = _assignment_from_json(scenario, entry.get("assignment"), f"terms[{i}].assignment")
        terms.append((float(entry["weight"]), v))
    try:
        return ConvexDecomposition(tuple(terms))
    except TempocorrError as exc:
        raise SchemaError("terms", str(exc)) from exc


# --- witnesses ----------------------------------------------------------------------

def functional_to_json(f: WitnessFunctional) -> dict:
    return {
        "L": 2,
        "R": f.scenario.R,
        "S": f.scenario.S,
        "name": f.name,
        "terms": [
            {
                "a": digits_string(t.outcomes),
                "x": digits_string(t.settings),
                "coeff": float(t.coeff),
            }
            for t in f.terms
        ],
    }


def functional_from_json(data) -> WitnessFunctional:
    if not isinstance(data, dict):
        raise SchemaError("$", "expected an object")
    if data.get("L") != 2:
        raise SchemaError("L", f"witness functionals need L=2, got {data.get('L')!r}")
    scenario = Scenario(2, int(data.get("R", 2)), int(data.get("S", 2)))
    raw = data.get("terms")
    if not isinstance(raw, list) or not raw:
        raise SchemaError("terms", "expected a nonempty array")
    terms = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise SchemaError(f"terms[{i}]", "expected an object")
        a, x, coeff = entry.get("a"), entry.get("x"), entry.get("coeff")
        if not isinstance(a, str) or len(a) != 2 or not a.isdigit():
            raise SchemaError(f"terms[{i}].a", "expected two outcome digits")
        if not isinstance(x, str) or len(x) != 2 or not x.isdigit():
            raise SchemaError(f"terms[{i}].x", "expected two setting digits")
        if not isinstance(coeff, (int, float)):
            raise SchemaError(f"terms[{i}].coeff", "expected a number")
        ab = (int(a[0]), int(a[1]))
        xy = (int(x[0]), int(x[1]))
        if max(ab) >= scenario.R:
            raise SchemaError(f"terms[{i}].a", f"outcome digit out of range 0..{scenario.R - 1}")
        if max(xy) >= scenario.S:
            raise SchemaError(f"terms[{i}].x", f"setting digit out of range 0..{scenario.S - 1}")
        terms.append(WitnessTerm(ab, xy, float(coeff)))
    return WitnessFunctional(str(data.get("name", "custom")), scenario, tuple(terms))


def strategy_to_json(s: QubitStrategy) -> dict:
    return {
        "initial": [float(v) for v in s.initial],
        "post": {
            f"a={a};x={x}": [float(v) for v in s.post[a, x]] for a in (0, 1) for x in (0, 1)
        },
        "effects": [
            {"a": float(e.a), "b": float(e.b), "axis": [float(v) for v in e.axis]}
            for e in s.effects
        ],
    }


def _vector3_from_json(data, path: str) -> np.ndarray:
    if (
        not isinstance(data, list)
        or len(data) != 3
        or not all(isinstance(v, (int, float)) for v in data)
    ):
        raise SchemaError(path, "expected three numbers")
    return np.asarray(data, dtype=float)


def strategy_from_json(data) -> QubitStrategy:
    if not isinstance(data, dict):
        raise SchemaError("$", "expected an object")
    initial = _vector3_from_json(data.get("initial"), "initial")
    raw_post = data.get("post")
    if not isinstance(raw_post, dict):
        raise SchemaError("post", "expected an object keyed by 'a=..;x=..'")
    post = np.zeros((2, 2, 3))
    for a in (0, 1):
        for x in (0, 1):
            key = f"a={a};x={x}"
            if key not in raw_post:
                raise SchemaError(f"post.{key}", "missing")
            post[a, x] = _vector3_from_json(raw_post[key], f"post.{key}")
    raw_eff = data.get("effects")
    if not isinstance(raw_eff, list) or len(raw_eff) != 2:
        raise SchemaError("effects", "expected exactly two effect parameter sets")
    effects = []
    for i, entry in enumerate(raw_eff):
        if not isinstance(entry, dict):
            raise SchemaError(f"effects[{i}]", "expected an object")
        a, b = entry.get("a"), entry.get("b")
        if not isinstance(a, (int, float)) or not isinstance(b, (int, float)):
            raise SchemaError(f"effects[{i}]", "'a' and 'b' must be numbers")
        axis = _vector3_from_json(entry.get("axis"), f"effects[{i}].axis")
        try:
            effects.append(EffectParams(float(a), float(b), axis))
        except TempocorrError as exc:
            raise SchemaError(f"effects[{i}]", str(exc)) from exc
    try:
        return QubitStrategy(initial, post, tuple(effects))
    except TempocorrError as exc:
        raise SchemaError("$", str(exc)) from exc


# --- reports -------------------------------------------------------------------------

def report_to_json(r: CertificationReport) -> dict:
    return {
        "scenario": {"L": r.scenario.L, "R": r.scenario.R, "S": r.scenario.S},
        "verdict": r.verdict,
        "epsilon_lower": r.epsilon_lower,
        "tolerance": r.tolerance,
        "witnesses": [
            {
                "name": e.name,
                "value": e.value,
                "bound": e.bound,
                "bound_kind": e.bound_kind,
                "analytic_cap": e.analytic_cap,
                "verdict": e.verdict,
                "epsilon_lower": e.epsilon_lower,
                "epsilon_cap": e.epsilon_cap,
                "epsilon_certified": e.epsilon_certified,
            }
            for e in r.entries
        ],
    }


def dumps(obj) -> str:
    """Stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
