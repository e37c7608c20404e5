"""Qubit dimension witnesses for length-2 sequences of two binary measurements.

Four linear functionals B1..B4 pick out the unit entries of the four
(2,2,2) vertices that no qubit reaches.  Their qubit maxima are

- B1 <= 3 (analytic, tight),
- B3 <= C3 ~ 3.18623, the root of a degree-10 polynomial (analytic),
- B2 <= 3.5 analytic, with the true maximum numerically supported to be 3,
- B4 <= 2 + sqrt(2) analytic, numerically supported to equal C3.

Exceeding an analytic bound certifies that the measured system is not a
qubit, and quantifies how far it is from one: a system whose states and
instrument outputs stay within trace distance eps of a two-dimensional
subspace obeys B_i <= C_i + 12 eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .correlations import (
    QUBIT_UNREACHABLE_UNIT_ENTRIES,
    Behavior,
    Scenario,
    check_membership,
)
from .errors import (
    DimensionMismatch,
    DomainError,
    InvalidStrategy,
    NoValidRoot,
    NotAMember,
    NotAProjector,
    ParamOutOfRange,
    ScenarioMismatch,
)
from .qmath import (
    SystemModel,
    apply_kraus_map,
    bloch_to_density,
    effect_from_params,
    ket,
    psd_sqrt,
    trace_norm,
    validate_instrument,
)

DEFAULT_SEED = 1729

C1_VALUE = 3.0
B2_ANALYTIC_CAP = 3.5
B4_ANALYTIC_CAP = 2.0 + math.sqrt(2.0)
B1_PROJECTIVE_MAX = 1.5 + math.sqrt(2.0)


class WitnessTerm(NamedTuple):
    outcomes: tuple[int, int]
    settings: tuple[int, int]
    coeff: float


@dataclass(frozen=True)
class WitnessFunctional:
    """Sparse linear functional on length-2 behaviors."""

    name: str
    scenario: Scenario
    terms: tuple[WitnessTerm, ...]

    def __post_init__(self):
        if self.scenario.L != 2:
            raise ScenarioMismatch("witness functionals are defined for L=2 scenarios")
        norm = tuple(
            WitnessTerm(
                (int(t[0][0]), int(t[0][1])), (int(t[1][0]), int(t[1][1])), float(t[2])
            )
            for t in self.terms
        )
        object.__setattr__(self, "terms", norm)


def builtin_functionals() -> dict[str, WitnessFunctional]:
    """B1..B4, each the four unit entries of the vertex e1..e4 it targets."""
    scenario = Scenario(2, 2, 2)
    out = {}
    for i, name in enumerate(("e1", "e2", "e3", "e4"), start=1):
        terms = tuple(
            WitnessTerm(ab, xy, 1.0) for ab, xy in QUBIT_UNREACHABLE_UNIT_ENTRIES[name]
        )
        out[f"B{i}"] = WitnessFunctional(f"B{i}", scenario, terms)
    return out


def evaluate(f: WitnessFunctional, b: Behavior) -> float:
    """Linear evaluation sum_terms coeff * p(ab|xy)."""
    if b.scenario != f.scenario:
        raise ScenarioMismatch(
            f"behavior scenario {b.scenario} does not match functional scenario {f.scenario}"
        )
    return float(sum(t.coeff * b.prob(t.outcomes, t.settings) for t in f.terms))


# --- qubit strategies --------------------------------------------------------------
#
# For L=2 the most general qubit value of a witness is reached by
# measure-and-prepare instruments, so a strategy needs only: the input Bloch
# vector, one post-measurement Bloch vector per (first outcome, setting), and
# binary effects a_s (1 + b_s n_s . sigma) per setting.  The witness value
# is then a closed form in these parameters and no simulation is needed.

@dataclass(frozen=True)
class EffectParams:
    """Parameters of a binary qubit effect a (1 + b axis . sigma)."""

    a: float
    b: float
    axis: np.ndarray

    def __post_init__(self):
        ax = np.array(np.asarray(self.axis, dtype=float))
        ax.setflags(write=False)
        object.__setattr__(self, "axis", ax)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if ax.shape != (3,):
            raise InvalidStrategy(f"effect axis must have shape (3,), got {ax.shape}")
        if abs(float(np.linalg.norm(ax)) - 1.0) > 1e-9:
            raise InvalidStrategy(f"effect axis norm {np.linalg.norm(ax)!r} is not 1")
        if not -1e-12 <= self.b <= 1.0 + 1e-12:
            raise InvalidStrategy(f"b={self.b!r} outside [0, 1]")
        if not -1e-12 <= self.a <= 1.0 / (1.0 + self.b) + 1e-12:
            raise InvalidStrategy(f"a={self.a!r} outside [0, 1/(1+b)]")


@dataclass(frozen=True)
class QubitStrategy:
    """Input state, post-measurement states, and effects of a qubit protocol.

    ``post[a, x]`` is the Bloch vector prepared after the first measurement
    with setting x gave outcome a.
    """

    initial: np.ndarray
    post: np.ndarray
    effects: tuple[EffectParams, EffectParams]

    def __post_init__(self):
        init = np.array(np.asarray(self.initial, dtype=float))
        post = np.array(np.asarray(self.post, dtype=float))
        if init.shape != (3,):
            raise InvalidStrategy(f"initial Bloch vector must have shape (3,), got {init.shape}")
        if post.shape != (2, 2, 3):
            raise InvalidStrategy(f"post array must have shape (2, 2, 3), got {post.shape}")
        if float(np.linalg.norm(init)) > 1.0 + 1e-9:
            raise InvalidStrategy(f"initial Bloch norm {np.linalg.norm(init)!r} exceeds 1")
        norms = np.linalg.norm(post, axis=2)
        if float(norms.max()) > 1.0 + 1e-9:
            raise InvalidStrategy(f"post Bloch norm {norms.max()!r} exceeds 1")
        if len(self.effects) != 2:
            raise InvalidStrategy("strategy needs exactly two effect parameter sets")
        init.setflags(write=False)
        post.setflags(write=False)
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "post", post)
        object.__setattr__(self, "effects", tuple(self.effects))


def _outcome_prob(eff: EffectParams, outcome: int, bloch) -> float:
    p0 = eff.a * (1.0 + eff.b * float(np.dot(eff.axis, bloch)))
    return p0 if outcome == 0 else 1.0 - p0


def _require_binary_pair_scenario(f: WitnessFunctional) -> None:
    if f.scenario != Scenario(2, 2, 2):
        raise ScenarioMismatch(
            f"qubit strategies cover the (2,2,2) scenario, functional has {f.scenario}"
        )


def strategy_value(f: WitnessFunctional, s: QubitStrategy) -> float:
    """Exact witness value of a strategy from the closed-form probabilities."""
    _require_binary_pair_scenario(f)
    total = 0.0
    for (a, b), (x, y), coeff in f.terms:
        p_first = _outcome_prob(s.effects[x], a, s.initial)
        p_second = _outcome_prob(s.effects[y], b, s.post[a, x])
        total += coeff * p_first * p_second
    return total


def random_strategy(rng: np.random.Generator) -> QubitStrategy:
    """Strategy with Bloch vectors uniform in the ball and random effects."""

    def ball(shape):
        v = rng.normal(size=shape + (3,))
        v /= np.linalg.norm(v, axis=-1, keepdims=True)
        radius = rng.uniform(size=shape + (1,)) ** (1.0 / 3.0)
        return v * radius

    effects = []
    for _ in range(2):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        b = rng.uniform()
        a = rng.uniform() / (1.0 + b)
        effects.append(EffectParams(a, b, axis))
    return QubitStrategy(ball(())[()], ball((2, 2)), tuple(effects))


def strategy_system_model(s: QubitStrategy) -> SystemModel:
    """Measure-and-prepare system whose length-2 behavior equals the strategy.

    For each setting the instrument measures the binary effect and re-prepares
    the designated post-measurement state, so the same instrument serves at
    both time steps.
    """
    instruments = []
    for x, eff in enumerate(s.effects):
        e0 = effect_from_params(eff.a, eff.b, eff.axis).matrix
        kraus_sets = []
        for outcome, effect in ((0, e0), (1, np.eye(2, dtype=complex) - e0)):
            target = bloch_to_density(s.post[outcome, x]).matrix
            vals, vecs = np.linalg.eigh(target)
            root = psd_sqrt(effect)
            ops = []
            for j in range(2):
                if vals[j] <= 1e-14:
                    continue
                for k in range(2):
                    ops.append(math.sqrt(float(vals[j])) * np.outer(vecs[:, j], root[k, :]))
            if not ops:
                ops = [np.zeros((2, 2), dtype=complex)]
            kraus_sets.append(ops)
        instruments.append(validate_instrument(kraus_sets))
    return SystemModel(bloch_to_density(s.initial), tuple(instruments))


# --- closed-form state elimination and the restart optimizer -----------------------

def _effect_triples(theta):
    """Decode the 8 search parameters into two (a, b, axis) triples."""
    out = []
    for i in (0, 4):
        u = min(max(float(theta[i]), 0.0), 1.0)
        b = min(max(float(theta[i + 1]), 0.0), 1.0)
        t, p = float(theta[i + 2]), float(theta[i + 3])
        st = math.sin(t)
        axis = (st * math.cos(p), st * math.sin(p), math.cos(t))
        out.append((u / (1.0 + b), b, axis))
    return tuple(out)


def _post_coefficients(terms, effects):
    """Per (first outcome, setting): constant part and linear coefficient
    vector of the second-step contribution, maximized at the unit vector
    along the coefficient."""
    base = {(a, x): 0.0 for a in (0, 1) for x in (0, 1)}
    wvec = {(a, x): [0.0, 0.0, 0.0] for a in (0, 1) for x in (0, 1)}
    for (a, b), (x, y), coeff in terms:
        ay, by, ny = effects[y]
        sign = 1.0 if b == 0 else -1.0
        base[(a, x)] += coeff * (ay if b == 0 else 1.0 - ay)
        w = wvec[(a, x)]
        for i in range(3):
            w[i] += sign * coeff * ay * by * ny[i]
    return base, wvec


def _state_optimal_value(terms, effects) -> float:
    """Witness value with every Bloch vector replaced by its optimizer.

    Post-measurement vectors enter linearly with the nonnegative weight
    p(a|x), so each one independently aligns with its coefficient vector;
    substituting those optima leaves an affine function of the input vector,
    again maximized by alignment.
    """
    base, wvec = _post_coefficients(terms, effects)
    const = 0.0
    v = [0.0, 0.0, 0.0]
    for x in (0, 1):
        ax, bx, nx = effects[x]
        w0, w1 = wvec[(0, x)], wvec[(1, x)]
        top0 = base[(0, x)] + math.sqrt(w0[0] ** 2 + w0[1] ** 2 + w0[2] ** 2)
        top1 = base[(1, x)] + math.sqrt(w1[0] ** 2 + w1[1] ** 2 + w1[2] ** 2)
        diff = top0 - top1
        const += top1 + diff * ax
        for i in range(3):
            v[i] += diff * ax * bx * nx[i]
    return const + math.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)


def _reconstruct_strategy(terms, effects, tie_initial, tie_post) -> QubitStrategy:
    """Explicit optimal states for fixed effects; zero coefficient vectors
    keep the supplied tie-break vectors."""
    base, wvec = _post_coefficients(terms, effects)
    post = np.array(tie_post, dtype=float, copy=True)
    tops = {}
    for a in (0, 1):
        for x in (0, 1):
            w = np.array(wvec[(a, x)])
            norm = float(np.linalg.norm(w))
            if norm > 1e-15:
                post[a, x] = w / norm
            tops[(a, x)] = base[(a, x)] + float(np.dot(w, post[a, x]))
    v = np.zeros(3)
    for x in (0, 1):
        ax, bx, nx = effects[x]
        v += (tops[(0, x)] - tops[(1, x)]) * ax * bx * np.asarray(nx)
    initial = np.asarray(tie_initial, dtype=float)
    if float(np.linalg.norm(v)) > 1e-15:
        initial = v / np.linalg.norm(v)
    eff_params = tuple(EffectParams(a, b, np.asarray(n)) for a, b, n in effects)
    return QubitStrategy(initial, post, eff_params)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 200
    seed: int = DEFAULT_SEED
    max_iterations: int = 2000
    initial_step: float = 0.25
    xtol: float = 1e-10
    ftol: float = 1e-13


@dataclass(frozen=True)
class OptimizationResult:
    value: float
    strategy: QubitStrategy
    restart_index: int


def optimize_qubit(f: WitnessFunctional, cfg: OptimizerConfig = OptimizerConfig()) -> OptimizationResult:
    """Best qubit value of a witness by seeded random-restart search.

    Only the 8 effect parameters are searched numerically (Nelder-Mead on a
    deterministic initial simplex); all Bloch vectors are eliminated in
    closed form at every objective evaluation, so the search space is exactly
    the achievable qubit set and every reported value is a valid lower bound
    on the qubit maximum.  Results are deterministic for a fixed seed, with
    ties between restarts resolved toward the lower restart index.
    """
    if cfg.restarts < 1:
        raise ParamOutOfRange(f"restarts must be >= 1, got {cfg.restarts}")
    _require_binary_pair_scenario(f)
    terms = tuple((t.outcomes, t.settings, t.coeff) for t in f.terms)

    def objective(theta):
        return -_state_optimal_value(terms, _effect_triples(theta))

    best = None
    for k, seq in enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)):
        rng = np.random.default_rng(seq)
        theta0 = np.array(
            [
                rng.uniform(), rng.uniform(), rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi),
                rng.uniform(), rng.uniform(), rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi),
            ]
        )
        tie_initial = rng.normal(size=3)
        tie_initial /= np.linalg.norm(tie_initial)
        tie_post = rng.normal(size=(2, 2, 3))
        tie_post /= np.linalg.norm(tie_post, axis=2, keepdims=True)

        simplex = np.vstack([theta0, theta0 + cfg.initial_step * np.eye(8)])
        res = minimize(
            objective,
            theta0,
            method="Nelder-Mead",
            options={
                "maxiter": cfg.max_iterations,
                "xatol": cfg.xtol,
                "fatol": cfg.ftol,
                "initial_simplex": simplex,
                "adaptive": True,
            },
        )
        value = -float(res.fun)
        if best is None or value > best[0]:
            best = (value, res.x, tie_initial, tie_post, k)

    _value, theta, tie_initial, tie_post, index = best
    strategy = _reconstruct_strategy(terms, _effect_triples(theta), tie_initial, tie_post)
    return OptimizationResult(strategy_value(f, strategy), strategy, index)


# --- closed-form profiles ----------------------------------------------------------

def _check_domain(x, name, lo, hi):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < lo - 1e-12) or np.any(arr > hi + 1e-12):
        raise DomainError(f"{name} must lie in [{lo}, {hi}]")
    return np.clip(arr, lo, hi)


def b1_projective_profile(cos_gamma):
    """Best B1 value over states when both effects are projective, as a
    function of the cosine of the angle between the measurement axes.

    Peaks at 3/2 + sqrt(2) for orthogonal axes, strictly below the bound 3,
    which is reached only by non-projective measurements.
    """
    x = _check_domain(cos_gamma, "cos_gamma", -1.0, 1.0)
    xx = 2.0 + np.sqrt(np.clip(2.0 - 2.0 * x, 0.0, None))
    value = xx / 4.0 * (2.0 + np.sqrt(np.clip(2.0 + 2.0 * x, 0.0, None)))
    return value if value.ndim else float(value)


def b3_profile(cos_gamma):
    """Best B3 value over states for projective effects (which are optimal)."""
    x = _check_domain(cos_gamma, "cos_gamma", -1.0, 1.0)
    x0 = 2.0 + np.sqrt(np.clip(2.0 + 2.0 * x, 0.0, None))
    x1 = 2.0 + np.sqrt(np.clip(2.0 - 2.0 * x, 0.0, None))
    value = 0.25 * (x0 + x1 + np.sqrt(np.clip(x0**2 + x1**2 + 2.0 * x0 * x1 * x, 0.0, None)))
    return value if value.ndim else float(value)


def b3_profile_derivative(x: float) -> float:
    """d(b3_profile)/d(cos_gamma), defined on the open interval (-1, 1)."""
    if not -1.0 < x < 1.0:
        raise DomainError("derivative of the B3 profile is defined on (-1, 1)")
    x0 = 2.0 + math.sqrt(2.0 + 2.0 * x)
    x1 = 2.0 + math.sqrt(2.0 - 2.0 * x)
    d0 = 1.0 / math.sqrt(2.0 + 2.0 * x)
    d1 = -1.0 / math.sqrt(2.0 - 2.0 * x)
    radicand = x0 * x0 + x1 * x1 + 2.0 * x0 * x1 * x
    droot = (x0 * d0 + x1 * d1 + (d0 * x1 + x0 * d1) * x + x0 * x1) / math.sqrt(radicand)
    return 0.25 * (d0 + d1 + droot)


def b4_envelope(p, cos_gamma):
    """Two-parameter envelope of B4 after optimizing all states.

    ``p`` scales the rank-1 part of the first measurement; ``p = 1`` makes
    all effects rank 1, where the envelope coincides with the B3 profile.
    The envelope never exceeds 2 + sqrt(2).
    """
    pp = _check_domain(p, "p", 0.0, 1.0)
    x = _check_domain(cos_gamma, "cos_gamma", -1.0, 1.0)
    pp, x = np.broadcast_arrays(pp, x)
    x0 = 1.0 + pp + np.sqrt(np.clip(pp**2 + 1.0 + 2.0 * pp * x, 0.0, None))
    x1 = 3.0 - pp + np.sqrt(np.clip(pp**2 + 1.0 - 2.0 * pp * x, 0.0, None))
    value = 0.25 * (
        (2.0 - pp) * x0
        + x1
        + np.sqrt(np.clip((pp * x0) ** 2 + x1**2 + 2.0 * pp * x0 * x1 * x, 0.0, None))
    )
    return value if value.ndim else float(value)


# --- certified bounds --------------------------------------------------------------

# Degree-10 polynomial whose relevant root locates the maximum of the B3
# profile; nested form kept verbatim, coefficients expanded from it by exact
# integer arithmetic.

def nested_polynomial(x: float) -> float:
    return 1 - x * (
        42
        - x * (-531 - 4 * x * (380 - x * (-24 - x * (-762 - x * (481 - 8 * x * (19 - 4 * x * (-3 + 2 * (1 + x) * x)))))))
    )


@lru_cache(maxsize=1)
def expanded_polynomial_coefficients() -> tuple[int, ...]:
    """Ascending integer coefficients of the nested degree-10 polynomial."""

    def times_x(c):
        return [0] + c

    def scale(c, k):
        return [k * v for v in c]

    def const_minus(k, c):
        out = [-v for v in c]
        out[0] += k
        return out

    q = [-3, 2, 2]                       # -3 + 2 (1 + x) x
    q = const_minus(19, scale(times_x(q), 4))
    q = const_minus(481, scale(times_x(q), 8))
    q = const_minus(-762, times_x(q))
    q = const_minus(-24, times_x(q))
    q = const_minus(380, times_x(q))
    q = const_minus(-531, scale(times_x(q), 4))
    q = const_minus(42, times_x(q))
    q = const_minus(1, times_x(q))
    return tuple(q)


def _poly_eval(coeffs, x: float) -> float:
    v = 0.0
    for c in reversed(coeffs):
        v = v * x + c
    return v


def _bisect_root(coeffs, lo: float, hi: float, width: float = 1e-12) -> float:
    flo = _poly_eval(coeffs, lo)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        fm = _poly_eval(coeffs, mid)
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class C3Bound:
    """Maximum qubit value of B3 with its certificate data."""

    value: float
    cos_gamma_star: float
    certified: bool
    polynomial_roots: tuple[float, ...]


@dataclass(frozen=True)
class C1Bound:
    """Qubit bound for B1 (3, analytic) and the projective sub-maximum."""

    value: float
    projective_maximum: float


def c1_bound() -> C1Bound:
    return C1Bound(C1_VALUE, B1_PROJECTIVE_MAX)


@lru_cache(maxsize=1)
def c3_bound(subintervals: int = 10_000) -> C3Bound:
    """Locate C3 as the certified root of the degree-10 polynomial.

    All real roots in [-1, 1] are isolated by sign-change scanning and
    bisection; squaring steps in the derivation of the polynomial created
    spurious roots, so a root only counts when the unsquared derivative of
    the B3 profile vanishes there.  The surviving root with the largest
    profile value, checked against both boundary values, is the bound.
    """
    coeffs = expanded_polynomial_coefficients()
    xs = np.linspace(-1.0, 1.0, subintervals + 1)
    vals = [_poly_eval(coeffs, float(t)) for t in xs]
    roots = []
    for i in range(subintervals):
        if vals[i] == 0.0:
            roots.append(float(xs[i]))
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(_bisect_root(coeffs, float(xs[i]), float(xs[i + 1])))
    if vals[-1] == 0.0:
        roots.append(1.0)

    candidates = [
        r for r in roots if -1.0 < r < 1.0 and abs(b3_profile_derivative(r)) <= 1e-8
    ]
    if not candidates:
        raise NoValidRoot(
            "no polynomial root satisfies the derivative condition; roots: "
            + ", ".join(f"{r:.12g}" for r in roots)
        )
    star = max(candidates, key=b3_profile)
    value = b3_profile(star)

    certified = (
        abs(nested_polynomial(star)) <= 1e-6
        and abs(nested_polynomial(star) - _poly_eval(coeffs, star)) <= 1e-10
        and abs(b3_profile_derivative(star)) <= 1e-8
        and b3_profile(1.0) <= 3.0 + 1e-12
        and b3_profile(-1.0) <= 3.0 + 1e-12
    )
    return C3Bound(value, star, certified, tuple(roots))


# --- distance from a qubit ---------------------------------------------------------

@dataclass(frozen=True)
class EpsilonBound:
    """Lower bound (B - C)/12 on the trace distance from a two-dimensional
    subspace, and the largest value (4 - C)/12 this scheme can certify."""

    lower: float
    cap: float


def epsilon_lower_bound(b_value: float, c_value: float) -> EpsilonBound:
    if not -1e-9 <= b_value <= 4.0 + 1e-9:
        raise ParamOutOfRange(f"witness value {b_value!r} outside [0, 4]")
    return EpsilonBound(max(0.0, (b_value - c_value) / 12.0), (4.0 - c_value) / 12.0)


@dataclass(frozen=True)
class EpsilonSearchConfig:
    restarts: int = 8
    seed: int = DEFAULT_SEED
    max_iterations: int = 250
    xtol: float = 1e-9


def _rank1_projection_deviation(kraus, proj, psi) -> float:
    # single Kraus branch: output is rank 1, trace norm in closed form
    phi = kraus @ psi
    v = proj @ phi
    w = phi - v
    wn = float(np.vdot(w, w).real)
    vn = float(np.vdot(v, v).real)
    return math.sqrt(wn) * math.sqrt(wn + 4.0 * vn)


def _branch_deviation(kraus_ops, proj, psi) -> float:
    if len(kraus_ops) == 1:
        return _rank1_projection_deviation(kraus_ops[0], proj, psi)
    rho = apply_kraus_map(kraus_ops, np.outer(psi, psi.conj()))
    return trace_norm(proj @ rho @ proj - rho)


def _max_branch_deviation(kraus_ops, proj, cfg, rng) -> float:
    """Largest trace-norm leakage of one instrument branch out of the
    subspace, over pure inputs.  The leakage is convex in the state, so the
    maximum sits at a pure state; local ascent from spectral and random
    starts gives a convergent estimate, not a certified global bound."""
    dim = proj.shape[0]
    complement = np.eye(dim) - proj
    starts = [ket(i, dim) for i in range(dim)]
    leak = np.zeros((dim, dim), dtype=complex)
    for k in kraus_ops:
        m = k.conj().T @ complement @ k
        leak += m
        starts.append(np.linalg.eigh(m)[1][:, -1])
    starts.append(np.linalg.eigh(leak)[1][:, -1])
    for _ in range(cfg.restarts):
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        starts.append(v / np.linalg.norm(v))

    def negf(xr):
        v = xr[:dim] + 1j * xr[dim:]
        n = float(np.linalg.norm(v))
        if n < 1e-12:
            return 0.0
        return -_branch_deviation(kraus_ops, proj, v / n)

    best = 0.0
    for s in starts:
        x0 = np.concatenate([s.real, s.imag])
        res = minimize(
            negf,
            x0,
            method="Nelder-Mead",
            options={"maxiter": cfg.max_iterations, "xatol": cfg.xtol, "fatol": 1e-13, "adaptive": True},
        )
        best = max(best, -float(res.fun))
    return best


def system_epsilon(
    sys: SystemModel, proj, cfg: EpsilonSearchConfig = EpsilonSearchConfig()
) -> float:
    """Estimated trace-norm deviation of a system from a rank-2 subspace.

    Takes the maximum of the initial-state deviation and, per instrument
    branch, the largest deviation of the branch output over all input states.
    """
    p = np.asarray(proj, dtype=complex)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise NotAProjector(f"projector must be square, got shape {p.shape}")
    if float(np.max(np.abs(p - p.conj().T))) > 1e-9:
        raise NotAProjector("projector is not Hermitian")
    if float(np.max(np.abs(p @ p - p))) > 1e-8:
        raise NotAProjector("projector is not idempotent")
    rank = int(round(float(p.trace().real)))
    if rank != 2:
        raise NotAProjector(f"projector has rank {rank}, expected 2")
    if p.shape[0] != sys.dim:
        raise DimensionMismatch(f"projector dim {p.shape[0]} != system dim {sys.dim}")

    rng = np.random.default_rng(cfg.seed)
    best = trace_norm(p @ sys.initial.matrix @ p - sys.initial.matrix)
    for inst in sys.instruments:
        for kraus_ops in inst.kraus_sets:
            best = max(best, _max_branch_deviation(kraus_ops, p, cfg, rng))
    return best


# --- certification reports ----------------------------------------------------------

VERDICT_TOL = 1e-9


@dataclass(frozen=True)
class WitnessVerdict:
    """Per-witness certification entry.

    ``bound`` is the qubit bound the value is compared against;
    ``bound_kind`` records whether that bound is analytic or only numerically
    supported, and ``analytic_cap`` is the proven cap used for certified
    claims (equal to ``bound`` for B1 and B3).  ``epsilon_lower`` applies the
    (B - C)/12 relation to ``bound``; ``epsilon_certified`` applies it to the
    analytic cap.
    """

    name: str
    value: float
    bound: float
    bound_kind: str
    analytic_cap: float
    violates_bound: bool
    certified_dimension_above_2: bool
    epsilon_lower: float
    epsilon_cap: float
    epsilon_certified: float

    @property
    def verdict(self) -> str:
        if self.certified_dimension_above_2:
            return "dimension > 2"
        if self.violates_bound:
            return "dimension > 2 (numerically supported)"
        return "qubit-compatible"


@dataclass(frozen=True)
class CertificationReport:
    scenario: Scenario
    entries: tuple[WitnessVerdict, ...]
    verdict: str
    epsilon_lower: float
    tolerance: float

    def to_text(self) -> str:
        lines = [
            f"{'witness':8s} {'value':>16s} {'bound':>16s} {'kind':>22s} "
            f"{'verdict':>34s} {'eps lower':>12s}",
        ]
        for e in self.entries:
            lines.append(
                f"{e.name:8s} {e.value:16.12g} {e.bound:16.12g} {e.bound_kind:>22s} "
                f"{e.verdict:>34s} {e.epsilon_lower:12.6g}"
            )
        lines.append(f"overall: {self.verdict}, certified epsilon >= {self.epsilon_lower:.12g}")
        return "\n".join(lines)


def certify(b: Behavior, tol: float = VERDICT_TOL) -> CertificationReport:
    """Evaluate all four witnesses on a (2,2,2) behavior and report verdicts.

    B1 and B3 are compared against their analytic qubit bounds; B2 and B4
    against their numerically supported maxima, with the proven caps 3.5 and
    2 + sqrt(2) reserved for certified statements.
    """
    if b.scenario != Scenario(2, 2, 2):
        raise ScenarioMismatch(f"certification needs the (2,2,2) scenario, got {b.scenario}")
    report = check_membership(b)
    if not report.is_member:
        raise NotAMember("behavior is not in the polytope:\n" + report.summary(), report)

    c3 = c3_bound().value
    plan = (
        ("B1", C1_VALUE, "analytic", C1_VALUE),
        ("B2", 3.0, "numerically supported", B2_ANALYTIC_CAP),
        ("B3", c3, "analytic", c3),
        ("B4", c3, "numerically supported", B4_ANALYTIC_CAP),
    )
    functionals = builtin_functionals()
    entries = []
    for name, bound, kind, cap in plan:
        value = evaluate(functionals[name], b)
        eps = epsilon_lower_bound(value, bound)
        eps_cert = epsilon_lower_bound(value, cap)
        entries.append(
            WitnessVerdict(
                name=name,
                value=value,
                bound=bound,
                bound_kind=kind,
                analytic_cap=cap,
                violates_bound=value > bound + tol,
                certified_dimension_above_2=value > cap + tol,
                epsilon_lower=eps.lower,
                epsilon_cap=eps.cap,
                epsilon_certified=eps_cert.lower,
            )
        )
    certified = [e for e in entries if e.certified_dimension_above_2]
    verdict = "dimension > 2" if certified else "qubit-compatible"
    eps_overall = max((e.epsilon_certified for e in entries), default=0.0)
    return CertificationReport(b.scenario, tuple(entries), verdict, eps_overall, tol)
