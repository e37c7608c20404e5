"""The classical temporal-correlation polytope.

A behavior is the full table of conditional probabilities
``p(a1..aL | x1..xL)`` for sequences of L measurements with S settings and R
outcomes per time step.  Membership in the polytope means positivity,
normalization, and the arrow-of-time constraints: marginals of earlier
outcomes do not depend on later setting choices.  The extreme points are the
0/1-valued behaviors, which are in bijection with assignments of one outcome
to every setting history, and every member behavior decomposes as a convex
combination of them.

Index conventions, used throughout the package: a setting sequence
``(x1..xL)`` is stored as the base-S integer with x1 as the most significant
digit, and outcome sequences likewise in base R.  Setting-history contexts
are ordered by time step first and lexicographically within a step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    NotAMember,
    ShapeMismatch,
    TooManyVertices,
    UnnormalizedConditional,
)

MEMBERSHIP_TOL = 1e-9
ZERO_MEASURE_TOL = 1e-12
DEFAULT_VERTEX_CAP = 10**6

# Guard for exact vertex counting: bit length of the count stays below this.
_MAX_COUNT_BITS = 1 << 24


def index_of_digits(seq, base: int) -> int:
    """Integer for a digit sequence, first entry most significant."""
    i = 0
    for d in seq:
        i = i * base + d
    return i


def digits_of_index(i: int, base: int, length: int) -> tuple[int, ...]:
    out = [0] * length
    for k in range(length - 1, -1, -1):
        i, out[k] = divmod(i, base)
    return tuple(out)


def digits_string(seq) -> str:
    return "".join(str(d) for d in seq)


@dataclass(frozen=True)
class Scenario:
    """Sequence length L, outcomes per measurement R, settings per step S."""

    L: int
    R: int
    S: int

    def __post_init__(self):
        if self.L < 1:
            raise ShapeMismatch(f"sequence length must be >= 1, got {self.L}")
        if self.R < 2 or self.S < 2:
            raise ShapeMismatch(f"need R >= 2 and S >= 2, got R={self.R}, S={self.S}")
        bits = self.n_contexts * self.S.bit_length() * self.R.bit_length()
        if bits > _MAX_COUNT_BITS:
            raise ShapeMismatch("scenario too large for exact vertex counting")

    @property
    def n_setting_seqs(self) -> int:
        return self.S**self.L

    @property
    def n_outcome_seqs(self) -> int:
        return self.R**self.L

    @property
    def n_contexts(self) -> int:
        return sum(self.S**t for t in range(1, self.L + 1))


@lru_cache(maxsize=None)
def _context_order(L: int, S: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for t in range(1, L + 1):
        out.extend(itertools.product(range(S), repeat=t))
    return tuple(out)


@lru_cache(maxsize=None)
def _context_positions(L: int, S: int) -> dict[tuple[int, ...], int]:
    return {h: i for i, h in enumerate(_context_order(L, S))}


def context_order(scenario: Scenario) -> tuple[tuple[int, ...], ...]:
    """All setting histories, ordered by length then lexicographically."""
    return _context_order(scenario.L, scenario.S)


@dataclass(frozen=True)
class Behavior:
    """Dense probability table, rows = setting sequences, columns = outcome
    sequences.  Only the shape is enforced here; probabilistic validity is
    the job of :func:`check_membership`."""

    scenario: Scenario
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        want = (self.scenario.n_setting_seqs, self.scenario.n_outcome_seqs)
        if t.shape != want:
            raise ShapeMismatch(f"table shape {t.shape} does not match scenario {want}")
        if not np.all(np.isfinite(t)):
            raise ShapeMismatch("table contains NaN or infinite entries")
        t = np.array(t)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def prob(self, outcomes, settings) -> float:
        """Entry p(outcomes | settings) for digit sequences of length L."""
        s = self.scenario
        return float(self.table[index_of_digits(settings, s.S), index_of_digits(outcomes, s.R)])


def uniform_behavior(scenario: Scenario) -> Behavior:
    table = np.full(
        (scenario.n_setting_seqs, scenario.n_outcome_seqs), 1.0 / scenario.n_outcome_seqs
    )
    return Behavior(scenario, table)


# --- membership ----------------------------------------------------------------

@dataclass(frozen=True)
class MembershipReport:
    """Violations of positivity, normalization, and arrow-of-time equalities.

    An empty report means the behavior lies in the temporal-correlation
    polytope.  Arrow-of-time entries record, per truncation level t and per
    (setting prefix, outcome prefix), the spread of the marginal over the
    future settings.
    """

    scenario: Scenario
    tolerance: float
    negativity: tuple[tuple[int, int, float], ...]
    normalization: tuple[tuple[int, float], ...]
    arrow_of_time: tuple[tuple[int, str, str, float], ...]

    @property
    def is_member(self) -> bool:
        return not (self.negativity or self.normalization or self.arrow_of_time)

    def summary(self) -> str:
        if self.is_member:
            return "member: positivity, normalization and arrow-of-time constraints all hold"
        lines = []
        for srow, ocol, v in self.negativity:
            lines.append(f"negative entry p[{srow},{ocol}] = {v:.6e}")
        for srow, total in self.normalization:
            lines.append(f"setting block {srow} sums to {total!r} (deviation {abs(total-1.0):.3e})")
        for t, xs, As, dev in self.arrow_of_time:
            lines.append(
                f"arrow-of-time violation at level {t}, settings {xs}, outcomes {As}: spread {dev:.6e}"
            )
        return "\n".join(lines)


def check_membership(b: Behavior, tol: float = MEMBERSHIP_TOL) -> MembershipReport:
    """Full polytope membership report for a behavior."""
    s = b.scenario
    L, R, S = s.L, s.R, s.S
    table = b.table

    neg = []
    rows, cols = np.nonzero(table < -tol)
    for i, j in zip(rows.tolist(), cols.tolist()):
        neg.append((i, j, float(table[i, j])))

    norm = []
    sums = table.sum(axis=1)
    for i in np.nonzero(np.abs(sums - 1.0) > tol)[0].tolist():
        norm.append((i, float(sums[i])))

    aot = []
    arr = table.reshape((S,) * L + (R,) * L)
    for t in range(1, L):
        # marginal over outcomes after step t, shape (S,)*L + (R,)*t
        m = arr.sum(axis=tuple(range(L + t, 2 * L)))
        future = tuple(range(t, L))
        dev = m.max(axis=future) - m.min(axis=future)
        for idx in np.argwhere(dev > tol):
            xs, As = idx[:t], idx[t:]
            aot.append((t, digits_string(xs), digits_string(As), float(dev[tuple(idx)])))

    return MembershipReport(s, tol, tuple(neg), tuple(norm), tuple(aot))


def _require_member(b: Behavior, tol: float) -> None:
    report = check_membership(b, tol)
    if not report.is_member:
        raise NotAMember("behavior is not in the polytope:\n" + report.summary(), report)


def marginal(b: Behavior, t: int, tol: float = MEMBERSHIP_TOL) -> Behavior:
    """Length-t truncation, summing out the later outcomes.

    Well defined only on members: the arrow-of-time constraints make the
    result independent of the later settings (fixed to 0 here).
    """
    s = b.scenario
    if not 1 <= t < s.L:
        raise ShapeMismatch(f"truncation level must be in 1..{s.L - 1}, got {t}")
    _require_member(b, tol)
    L, R, S = s.L, s.R, s.S
    arr = b.table.reshape((S,) * L + (R,) * L)
    m = arr.sum(axis=tuple(range(L + t, 2 * L)))
    m = m[(slice(None),) * t + (0,) * (L - t)]
    small = Scenario(t, R, S)
    return Behavior(small, m.reshape(small.n_setting_seqs, small.n_outcome_seqs))


# --- factorization into a conditional chain -------------------------------------

@dataclass(frozen=True)
class ConditionalChain:
    """Step-wise conditionals p(a_t | a_1..a_{t-1}, x_1..x_t).

    ``levels[t-1]`` has shape (S^t, R^(t-1), R), indexed by the setting
    prefix, the outcome prefix, and the outcome at step t.  Every slice over
    the last axis is a probability distribution, including on histories the
    behavior never reaches (those are set uniform by :func:`factorize`).
    """

    scenario: Scenario
    levels: tuple[np.ndarray, ...]

    def __post_init__(self):
        s = self.scenario
        if len(self.levels) != s.L:
            raise ShapeMismatch(f"expected {s.L} levels, got {len(self.levels)}")
        frozen = []
        for t, lvl in enumerate(self.levels, start=1):
            a = np.asarray(lvl, dtype=float)
            want = (s.S**t, s.R ** (t - 1), s.R)
            if a.shape != want:
                raise ShapeMismatch(f"level {t} has shape {a.shape}, expected {want}")
            a = np.array(a)
            a.setflags(write=False)
            frozen.append(a)
        object.__setattr__(self, "levels", tuple(frozen))


def factorize(b: Behavior, tol: float = MEMBERSHIP_TOL) -> ConditionalChain:
    """Chain of conditionals whose product reproduces the behavior.

    Conditionals on zero-measure histories are set to the uniform
    distribution, so every level is a valid stochastic table and
    :func:`compose_from_conditionals` inverts this exactly.
    """
    s = b.scenario
    _require_member(b, tol)
    L, R, S = s.L, s.R, s.S

    # marginal tables m_t of shape (S^t, R^t), future settings fixed to 0
    arr = b.table.reshape((S,) * L + (R,) * L)
    marginals = []
    for t in range(1, L + 1):
        m = arr.sum(axis=tuple(range(L + t, 2 * L)))
        m = m[(slice(None),) * t + (0,) * (L - t)]
        marginals.append(m.reshape(S**t, R**t))

    levels = []
    for t in range(1, L + 1):
        m_t = marginals[t - 1].reshape(S**t, R ** (t - 1), R)
        if t == 1:
            parent = np.ones((S, 1))
        else:
            parent = marginals[t - 2][np.repeat(np.arange(S ** (t - 1)), S)]
            parent = parent.reshape(S**t, R ** (t - 1))
        with np.errstate(divide="ignore", invalid="ignore"):
            cond = m_t / parent[:, :, None]
        unreachable = parent <= ZERO_MEASURE_TOL
        cond[unreachable, :] = 1.0 / R
        cond = np.clip(cond, 0.0, None)
        levels.append(cond)
    return ConditionalChain(s, tuple(levels))


def compose_from_conditionals(chain: ConditionalChain) -> Behavior:
    """Behavior defined by the product of step conditionals.

    The result satisfies the arrow-of-time constraints by construction.
    """
    s = chain.scenario
    L, R, S = s.L, s.R, s.S
    for t, lvl in enumerate(chain.levels, start=1):
        if float(lvl.min()) < -ZERO_MEASURE_TOL:
            raise UnnormalizedConditional(f"level {t} has a negative conditional {lvl.min()!r}")
        sums = lvl.sum(axis=2)
        dev = float(np.max(np.abs(sums - 1.0)))
        if dev > MEMBERSHIP_TOL:
            raise UnnormalizedConditional(f"level {t} conditionals deviate from sum 1 by {dev:.3e}")

    table = np.ones((s.n_setting_seqs, s.n_outcome_seqs))
    for srow in range(s.n_setting_seqs):
        xs = digits_of_index(srow, S, L)
        for ocol in range(s.n_outcome_seqs):
            As = digits_of_index(ocol, R, L)
            p = 1.0
            for t in range(1, L + 1):
                xi = index_of_digits(xs[:t], S)
                ai = index_of_digits(As[: t - 1], R)
                p *= chain.levels[t - 1][xi, ai, As[t - 1]]
                if p == 0.0:
                    break
            table[srow, ocol] = p
    return Behavior(s, table)


def random_conditional_chain(rng: np.random.Generator, scenario: Scenario) -> ConditionalChain:
    """Dirichlet-uniform random chain; composing it gives a random member."""
    levels = []
    for t in range(1, scenario.L + 1):
        shape = (scenario.S**t, scenario.R ** (t - 1), scenario.R)
        g = rng.gamma(1.0, size=shape)
        levels.append(g / g.sum(axis=2, keepdims=True))
    return ConditionalChain(scenario, tuple(levels))


# --- deterministic vertices ------------------------------------------------------

@dataclass(frozen=True)
class DeterministicVertex:
    """Extreme point: one fixed outcome per setting history.

    ``outcomes[i]`` is the outcome assigned to ``context_order(scenario)[i]``;
    histories are identified with their realized outcome prefix, so distinct
    assignments induce distinct 0/1 behaviors.
    """

    scenario: Scenario
    outcomes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(int(a) for a in self.outcomes))
        s = self.scenario
        if len(self.outcomes) != s.n_contexts:
            raise ShapeMismatch(
                f"assignment has {len(self.outcomes)} entries, expected {s.n_contexts}"
            )
        if any(not 0 <= a < s.R for a in self.outcomes):
            raise ShapeMismatch("assignment contains an out-of-range outcome")

    @property
    def index(self) -> int:
        """Position in the documented lexicographic enumeration order."""
        return index_of_digits(self.outcomes, self.scenario.R)

    @classmethod
    def from_index(cls, scenario: Scenario, k: int) -> "DeterministicVertex":
        return cls(scenario, digits_of_index(k, scenario.R, scenario.n_contexts))

    def outcome_for(self, history) -> int:
        """Assigned outcome after the setting history ``(x1..xt)``."""
        pos = _context_positions(self.scenario.L, self.scenario.S)
        return self.outcomes[pos[tuple(history)]]

    def realized_outcomes(self, settings) -> tuple[int, ...]:
        """Outcome sequence produced when measuring ``settings`` in order."""
        return tuple(self.outcome_for(settings[: t + 1]) for t in range(len(settings)))


def count_vertices(scenario: Scenario) -> int:
    """Number of extreme points, (R^S)^(1 + S + ... + S^(L-1)), exactly."""
    exponent = sum(scenario.S**i for i in range(scenario.L))
    return (scenario.R**scenario.S) ** exponent


def enumerate_vertices(
    scenario: Scenario, cap: int = DEFAULT_VERTEX_CAP
) -> list[DeterministicVertex]:
    """All vertices in lexicographic assignment order; errors above ``cap``."""
    n = count_vertices(scenario)
    if n > cap:
        raise TooManyVertices(n, cap)
    return [
        DeterministicVertex(scenario, outcomes)
        for outcomes in itertools.product(range(scenario.R), repeat=scenario.n_contexts)
    ]


def vertex_behavior(v: DeterministicVertex) -> Behavior:
    """The 0/1 probability table induced by a deterministic assignment."""
    s = v.scenario
    table = np.zeros((s.n_setting_seqs, s.n_outcome_seqs))
    for srow in range(s.n_setting_seqs):
        xs = digits_of_index(srow, s.S, s.L)
        table[srow, index_of_digits(v.realized_outcomes(xs), s.R)] = 1.0
    return Behavior(s, table)


def vertex_from_unit_entries(scenario: Scenario, entries) -> DeterministicVertex:
    """Vertex of an L=2 scenario from its unit entries ((a, b), (x, y)).

    ``entries`` must contain one entry per setting pair and be consistent on
    the shared first step.
    """
    if scenario.L != 2:
        raise ShapeMismatch("unit-entry construction is defined for L=2 scenarios")
    first: dict[int, int] = {}
    second: dict[tuple[int, int], int] = {}
    for (a, b), (x, y) in entries:
        if x in first and first[x] != a:
            raise ShapeMismatch(f"inconsistent first-step outcome for setting {x}")
        first[x] = a
        second[(x, y)] = b
    if set(first) != set(range(scenario.S)) or set(second) != set(
        itertools.product(range(scenario.S), repeat=2)
    ):
        raise ShapeMismatch("unit entries must cover every setting pair exactly once")
    outcomes = [first[x] for x in range(scenario.S)]
    outcomes += [second[xy] for xy in itertools.product(range(scenario.S), repeat=2)]
    return DeterministicVertex(scenario, tuple(outcomes))


# The four vertices of the (2,2,2) scenario that no qubit reaches; their unit
# entries double as the coefficient patterns of the builtin witnesses.
QUBIT_UNREACHABLE_UNIT_ENTRIES: dict[str, tuple[tuple[tuple[int, int], tuple[int, int]], ...]] = {
    "e1": (((0, 0), (0, 0)), ((0, 0), (1, 1)), ((0, 1), (0, 1)), ((0, 1), (1, 0))),
    "e2": (((0, 1), (0, 0)), ((0, 1), (1, 1)), ((0, 0), (0, 1)), ((0, 0), (1, 0))),
    "e3": (((0, 1), (0, 0)), ((0, 0), (1, 1)), ((0, 1), (0, 1)), ((0, 1), (1, 0))),
    "e4": (((0, 1), (0, 0)), ((0, 1), (1, 1)), ((0, 1), (0, 1)), ((0, 0), (1, 0))),
}


def named_vertex(name: str) -> DeterministicVertex:
    """One of the named (2,2,2) vertices e1..e4."""
    try:
        entries = QUBIT_UNREACHABLE_UNIT_ENTRIES[name]
    except KeyError:
        raise ShapeMismatch(f"unknown vertex name {name!r}; known: e1, e2, e3, e4") from None
    return vertex_from_unit_entries(Scenario(2, 2, 2), entries)


# --- relabeling symmetries --------------------------------------------------------

@dataclass(frozen=True)
class RelabelingGroup:
    """Symmetry group acting on vertices by relabeling.

    Each element is a pair (setting permutation, per-setting outcome
    permutations); the setting permutation is applied identically at every
    time step and the outcome permutation of a measurement follows it to
    every slot where that measurement is used.
    """

    scenario: Scenario
    elements: tuple[tuple[tuple[int, ...], tuple[tuple[int, ...], ...]], ...]

    @classmethod
    def full(cls, scenario: Scenario) -> "RelabelingGroup":
        """All setting permutations combined with independent per-setting
        outcome permutations; order S! * (R!)^S."""
        elems = tuple(
            (sp, ops)
            for sp in itertools.permutations(range(scenario.S))
            for ops in itertools.product(
                itertools.permutations(range(scenario.R)), repeat=scenario.S
            )
        )
        return cls(scenario, elems)

    @classmethod
    def identity(cls, scenario: Scenario) -> "RelabelingGroup":
        sp = tuple(range(scenario.S))
        op = tuple(range(scenario.R))
        return cls(scenario, ((sp, (op,) * scenario.S),))

    @classmethod
    def uniform_outcome(cls, scenario: Scenario) -> "RelabelingGroup":
        """Setting permutations with one global outcome permutation applied to
        every measurement; order S! * R!.  Kept for comparison: on (2,2,2)
        this coarser group leaves more than 10 classes."""
        elems = tuple(
            (sp, (op,) * scenario.S)
            for sp in itertools.permutations(range(scenario.S))
            for op in itertools.permutations(range(scenario.R))
        )
        return cls(scenario, elems)

    @property
    def order(self) -> int:
        return len(self.elements)


def relabel_vertex(v: DeterministicVertex, element) -> DeterministicVertex:
    """Image of a vertex under one relabeling element."""
    setting_perm, outcome_perms = element
    s = v.scenario
    inverse = [0] * s.S
    for i, p in enumerate(setting_perm):
        inverse[p] = i
    pos = _context_positions(s.L, s.S)
    out = []
    for h in context_order(s):
        src = tuple(inverse[x] for x in h)
        out.append(outcome_perms[h[-1]][v.outcomes[pos[src]]])
    return DeterministicVertex(s, tuple(out))


@dataclass(frozen=True)
class VertexClassification:
    """Orbit partition of the vertex set under a relabeling group.

    Orbits are tuples of vertex indices (in enumeration order), sorted by
    their smallest member, which also serves as the canonical representative.
    """

    scenario: Scenario
    orbits: tuple[tuple[int, ...], ...]

    @property
    def n_orbits(self) -> int:
        return len(self.orbits)

    @property
    def representatives(self) -> tuple[DeterministicVertex, ...]:
        return tuple(DeterministicVertex.from_index(self.scenario, orb[0]) for orb in self.orbits)

    def orbit_of(self, index: int) -> int:
        for k, orb in enumerate(self.orbits):
            if index in orb:
                return k
        raise ShapeMismatch(f"vertex index {index} outside the classified range")


def classify_vertices(
    scenario: Scenario,
    group: RelabelingGroup | None = None,
    cap: int = DEFAULT_VERTEX_CAP,
) -> VertexClassification:
    """Partition all vertices into relabeling orbits (full group by default)."""
    if group is None:
        group = RelabelingGroup.full(scenario)
    if group.scenario != scenario:
        raise ShapeMismatch("relabeling group belongs to a different scenario")
    n = count_vertices(scenario)
    if n > cap:
        raise TooManyVertices(n, cap)

    ctxs = context_order(scenario)
    pos = _context_positions(scenario.L, scenario.S)
    # per element: source position per context, and the outcome map per context
    actions = []
    for setting_perm, outcome_perms in group.elements:
        inverse = [0] * scenario.S
        for i, p in enumerate(setting_perm):
            inverse[p] = i
        src = [pos[tuple(inverse[x] for x in h)] for h in ctxs]
        omap = [outcome_perms[h[-1]] for h in ctxs]
        actions.append((src, omap))

    orbits = []
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        v = digits_of_index(start, scenario.R, scenario.n_contexts)
        orbit = set()
        for src, omap in actions:
            img = tuple(omap[i][v[src[i]]] for i in range(len(ctxs)))
            orbit.add(index_of_digits(img, scenario.R))
        for k in orbit:
            seen[k] = True
        orbits.append(tuple(sorted(orbit)))
    return VertexClassification(scenario, tuple(orbits))


# --- convex decomposition ---------------------------------------------------------

@dataclass(frozen=True)
class ConvexDecomposition:
    """Convex combination of deterministic vertices."""

    terms: tuple[tuple[float, DeterministicVertex], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "terms", tuple((float(w), v) for w, v in self.terms)
        )
        if not self.terms:
            raise ShapeMismatch("decomposition needs at least one vertex")
        total = 0.0
        for w, _v in self.terms:
            if w < -ZERO_MEASURE_TOL:
                raise ShapeMismatch(f"negative weight {w!r}")
            total += w
        if abs(total - 1.0) > MEMBERSHIP_TOL:
            raise ShapeMismatch(f"weights sum to {total!r}, not 1")

    @property
    def scenario(self) -> Scenario:
        return self.terms[0][1].scenario


def mixture_behavior(decomp: ConvexDecomposition) -> Behavior:
    """Weighted sum of the vertex behaviors."""
    s = decomp.scenario
    table = np.zeros((s.n_setting_seqs, s.n_outcome_seqs))
    for w, v in decomp.terms:
        table += w * vertex_behavior(v).table
    return Behavior(s, table)


def decompose_behavior(
    b: Behavior, tol: float = MEMBERSHIP_TOL, cap: int = DEFAULT_VERTEX_CAP
) -> ConvexDecomposition:
    """Write a member behavior as a convex combination of vertices.

    The weight of a vertex is the product, over every setting history, of the
    conditional probability (from :func:`factorize`) of the vertex's assigned
    outcome given the vertex's own realized outcome prefix.  Vertices of zero
    weight are omitted.
    """
    s = b.scenario
    chain = factorize(b, tol)
    vertices = enumerate_vertices(s, cap)
    ctxs = context_order(s)
    pos = _context_positions(s.L, s.S)

    terms = []
    for v in vertices:
        w = 1.0
        for i, h in enumerate(ctxs):
            t = len(h)
            a_prefix = 0
            for u in range(1, t):
                a_prefix = a_prefix * s.R + v.outcomes[pos[h[:u]]]
            w *= float(chain.levels[t - 1][index_of_digits(h, s.S), a_prefix, v.outcomes[i]])
            if w == 0.0:
                break
        if w > ZERO_MEASURE_TOL:
            terms.append((w, v))
    total = sum(w for w, _ in terms)
    terms = [(w / total, v) for w, v in terms]
    return ConvexDecomposition(tuple(terms))
