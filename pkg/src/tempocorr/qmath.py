"""Small dense complex linear algebra and validated quantum objects.

States, effects and instruments live on spaces of dimension 2..~200 and are
stored as plain numpy arrays wrapped in frozen dataclasses.  Every object is
validated once on construction and immutable afterwards, so all operations
here are pure and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    NormTooLarge,
    NotHermitian,
    NotTracePreserving,
    ParamOutOfRange,
    SpectrumOutOfRange,
    TraceNotOne,
    WrongDimension,
)

# Tolerances.  Everything downstream is <= a few hundred rows dense at double
# precision, so 1e-9 leaves three orders of magnitude over accumulated rounding.
HERMITICITY_TOL = 1e-9        # max-entry deviation from the conjugate transpose
TRACE_TOL = 1e-9              # |tr(rho) - 1|
TRACE_PRESERVING_TOL = 1e-9   # max-entry deviation of sum K^dag K from identity
PSD_TOL = 1e-9                # eigenvalue slack below 0 (and above 1 for effects)
ZERO_PROB_TOL = 1e-12         # probabilities below this count as zero

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a)
    out.setflags(write=False)
    return out


def as_complex_matrix(m) -> np.ndarray:
    """Coerce to a square complex matrix with finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise WrongDimension(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise WrongDimension("matrix contains NaN or infinite entries")
    return a


def hermiticity_defect(m: np.ndarray) -> float:
    """Max-entry deviation of ``m`` from its conjugate transpose."""
    return float(np.max(np.abs(m - m.conj().T)))


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, ascending."""
    return np.linalg.eigvalsh(m)


def trace_norm(m: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix, as the sum of absolute eigenvalues."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(m))))


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix."""
    vals, vecs = np.linalg.eigh(m)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def ket(i: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


def ketbra(i: int, j: int, dim: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def projector(vec: np.ndarray) -> np.ndarray:
    """Rank-1 projector onto a (normalized) state vector."""
    v = np.asarray(vec, dtype=complex)
    return np.outer(v, v.conj())


# --- validated quantum objects -----------------------------------------------

@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace positive semidefinite matrix, validated on construction."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        defect = hermiticity_defect(m)
        if defect > HERMITICITY_TOL:
            raise NotHermitian(f"state deviates from Hermiticity by {defect:.3e} > {HERMITICITY_TOL}")
        tr = m.trace().real
        if abs(tr - 1.0) > TRACE_TOL:
            raise TraceNotOne(f"state trace {tr!r} deviates from 1 by {abs(tr - 1.0):.3e} > {TRACE_TOL}")
        low = float(hermitian_eigenvalues(m)[0])
        if low < -PSD_TOL:
            raise SpectrumOutOfRange(f"state has eigenvalue {low:.3e} below -{PSD_TOL}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Effect:
    """Hermitian matrix with spectrum in [0, 1]; built via :func:`validate_effect`."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(as_complex_matrix(self.matrix)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Instrument:
    """One measurement: a tuple of Kraus-operator collections, one per outcome.

    Built via :func:`validate_instrument`, which also computes the induced
    effects ``E_r = sum_k K_{r,k}^dag K_{r,k}``.
    """

    kraus_sets: tuple[tuple[np.ndarray, ...], ...]
    effects: tuple[Effect, ...]

    @property
    def dim(self) -> int:
        return self.kraus_sets[0][0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.kraus_sets)


@dataclass(frozen=True)
class SystemModel:
    """Initial state plus one instrument per measurement setting.

    Using the same setting twice in a sequence reuses the identical
    instrument, which is what makes measurements repeatable.
    """

    initial: DensityMatrix
    instruments: tuple[Instrument, ...]

    def __post_init__(self):
        object.__setattr__(self, "instruments", tuple(self.instruments))
        if not self.instruments:
            raise DimensionMismatch("a system model needs at least one instrument")
        d = self.initial.dim
        for s, inst in enumerate(self.instruments):
            if inst.dim != d:
                raise DimensionMismatch(
                    f"instrument {s} acts on dimension {inst.dim}, state has dimension {d}"
                )
        r = self.instruments[0].n_outcomes
        for s, inst in enumerate(self.instruments):
            if inst.n_outcomes != r:
                raise DimensionMismatch(
                    f"instrument {s} has {inst.n_outcomes} outcomes, expected {r}"
                )

    @property
    def dim(self) -> int:
        return self.initial.dim

    @property
    def n_settings(self) -> int:
        return len(self.instruments)

    @property
    def n_outcomes(self) -> int:
        return self.instruments[0].n_outcomes


def validate_effect(m) -> Effect:
    """Check Hermiticity and spectrum in [-tol, 1+tol], returning an Effect."""
    a = as_complex_matrix(m)
    defect = hermiticity_defect(a)
    if defect > HERMITICITY_TOL:
        raise NotHermitian(f"effect deviates from Hermiticity by {defect:.3e} > {HERMITICITY_TOL}")
    vals = hermitian_eigenvalues(a)
    low, high = float(vals[0]), float(vals[-1])
    if low < -PSD_TOL:
        raise SpectrumOutOfRange(f"effect has eigenvalue {low:.6e} below -{PSD_TOL}")
    if high > 1.0 + PSD_TOL:
        raise SpectrumOutOfRange(f"effect has eigenvalue {high:.6e} above 1+{PSD_TOL}")
    return Effect(a)


def validate_instrument(kraus_sets) -> Instrument:
    """Validate trace preservation of a Kraus family grouped by outcome.

    ``kraus_sets[r]`` is the nonempty list of Kraus operators of outcome ``r``.
    The operator sum over all outcomes must be the identity within tolerance,
    and each induced effect must satisfy the effect constraints.
    """
    if not kraus_sets:
        raise WrongDimension("instrument needs at least one outcome")
    normalized: list[tuple[np.ndarray, ...]] = []
    dim = None
    for r, ops in enumerate(kraus_sets):
        ops = [as_complex_matrix(k) for k in ops]
        if not ops:
            raise WrongDimension(f"outcome {r} has no Kraus operators")
        for k in ops:
            if dim is None:
                dim = k.shape[0]
            elif k.shape[0] != dim:
                raise DimensionMismatch(
                    f"outcome {r} has a {k.shape[0]}x{k.shape[0]} Kraus operator, expected dim {dim}"
                )
        normalized.append(tuple(_frozen(k) for k in ops))

    total = np.zeros((dim, dim), dtype=complex)
    effects = []
    for ops in normalized:
        induced = np.zeros((dim, dim), dtype=complex)
        for k in ops:
            induced += k.conj().T @ k
        total += induced
        effects.append(validate_effect(induced))

    defect = float(np.max(np.abs(total - np.eye(dim))))
    if defect > TRACE_PRESERVING_TOL:
        raise NotTracePreserving(
            f"sum of K^dag K deviates from identity by {defect:.6e} > {TRACE_PRESERVING_TOL}"
        )
    return Instrument(tuple(normalized), tuple(effects))


def apply_kraus_map(kraus_ops, mat: np.ndarray) -> np.ndarray:
    """Apply ``sum_k K m K^dag`` to a (possibly subnormalized) matrix."""
    out = np.zeros_like(mat)
    for k in kraus_ops:
        out += k @ mat @ k.conj().T
    return out


class InstrumentApplication(NamedTuple):
    subnormalized: np.ndarray
    probability: float
    post_state: DensityMatrix | None


def apply_instrument(rho: DensityMatrix, inst: Instrument, outcome: int) -> InstrumentApplication:
    """One measurement branch: subnormalized update, its trace, and the
    renormalized post-state (None when the branch probability is ~0)."""
    if inst.dim != rho.dim:
        raise DimensionMismatch(f"instrument dim {inst.dim} != state dim {rho.dim}")
    if not 0 <= outcome < inst.n_outcomes:
        raise DimensionMismatch(f"outcome {outcome} out of range 0..{inst.n_outcomes - 1}")
    sub = apply_kraus_map(inst.kraus_sets[outcome], rho.matrix)
    prob = float(sub.trace().real)
    post = DensityMatrix(sub / prob) if prob > ZERO_PROB_TOL else None
    return InstrumentApplication(sub, prob, post)


# --- Bloch parametrization (qubits) ------------------------------------------

def as_bloch_vector(alpha) -> np.ndarray:
    """Coerce to a real 3-vector inside the closed unit ball."""
    v = np.asarray(alpha, dtype=float)
    if v.shape != (3,):
        raise WrongDimension(f"Bloch vector must have shape (3,), got {v.shape}")
    norm = float(np.linalg.norm(v))
    if norm > 1.0 + PSD_TOL:
        raise NormTooLarge(f"Bloch norm {norm!r} exceeds 1 by {norm - 1.0:.3e} > {PSD_TOL}")
    return v


def bloch_to_density(alpha) -> DensityMatrix:
    """Qubit state (identity + alpha . sigma) / 2."""
    v = as_bloch_vector(alpha)
    m = 0.5 * (np.eye(2, dtype=complex) + v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z)
    return DensityMatrix(m)


def density_to_bloch(rho: DensityMatrix) -> np.ndarray:
    """Bloch components tr(rho sigma_i) of a qubit state."""
    if rho.dim != 2:
        raise WrongDimension(f"Bloch decomposition needs a 2x2 state, got dim {rho.dim}")
    return np.array([float((rho.matrix @ p).trace().real) for p in PAULI])


def effect_from_params(a: float, b: float, axis) -> Effect:
    """Binary-outcome qubit effect ``a (identity + b axis . sigma)``.

    Requires ``0 <= b <= 1`` and ``0 <= a <= 1/(1+b)`` so that both the effect
    and its complement have spectrum inside [0, 1]; ``axis`` must be a unit
    vector.
    """
    if not -PSD_TOL <= b <= 1.0 + PSD_TOL:
        raise ParamOutOfRange(f"b={b!r} outside [0, 1]")
    if not -PSD_TOL <= a <= 1.0 / (1.0 + b) + PSD_TOL:
        raise ParamOutOfRange(f"a={a!r} outside [0, 1/(1+b)] = [0, {1.0 / (1.0 + b)!r}]")
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,):
        raise ParamOutOfRange(f"axis must have shape (3,), got {n.shape}")
    norm = float(np.linalg.norm(n))
    if abs(norm - 1.0) > 1e-9:
        raise ParamOutOfRange(f"axis norm {norm!r} deviates from 1 by {abs(norm - 1.0):.3e}")
    m = a * (np.eye(2, dtype=complex) + b * (n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z))
    return validate_effect(m)


# --- random objects (seeded; used by property tests and sampling searches) ----

def random_pure_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-random state vector."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density_matrix(rng: np.random.Generator, dim: int) -> DensityMatrix:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / m.trace().real)


def random_instrument(
    rng: np.random.Generator, dim: int, n_outcomes: int, kraus_per_outcome: int = 1
) -> Instrument:
    """Random valid instrument: raw Gaussian blocks right-normalized so the
    Kraus operators sum to a trace-preserving map."""
    raw = [
        [rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)) for _ in range(kraus_per_outcome)]
        for _ in range(n_outcomes)
    ]
    total = np.zeros((dim, dim), dtype=complex)
    for ops in raw:
        for k in ops:
            total += k.conj().T @ k
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.conj().T
    return validate_instrument([[k @ inv_sqrt for k in ops] for ops in raw])


def random_system_model(
    rng: np.random.Generator, dim: int, n_settings: int, n_outcomes: int, kraus_per_outcome: int = 1
) -> SystemModel:
    return SystemModel(
        random_density_matrix(rng, dim),
        tuple(random_instrument(rng, dim, n_outcomes, kraus_per_outcome) for _ in range(n_settings)),
    )
