"""Restart-based samplers for cores and sigma-modular diagrams.

A sample is drawn by walking the reversed shape sequence against the exact
counting tables, then materializing arcs left to right; whenever a freshly
created arc stacks onto the previous one the whole attempt is discarded and
the walk restarts from scratch. Every per-step weight list is checked to sum
to the state's table entry, so a corrupted table aborts loudly.

All randomness flows through a seedable random.Random via getrandbits; the
drawn integers are exact (bit rejection), never floating point. Batch
sampling derives one sub-seed per sample index, so results depend only on
(seed, count), not on scheduling.
"""
from __future__ import annotations

import hashlib
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import _kernels_py
from ._backend import get_kernels
from .diagram import Diagram, WeightedCore, classify, expand, stack_decomposition
from .errors import GiveUpError
from .shapes import Shape
from .tableau import StarSequence, forward_pass
from .tables import CoreTable, WeightedTable

draw_below = _kernels_py.draw_below


@dataclass
class SamplerStats:
    attempts: int = 0
    restarts: int = 0
    successes: int = 0

    def merge(self, other: "SamplerStats") -> None:
        self.attempts += other.attempts
        self.restarts += other.restarts
        self.successes += other.successes


@dataclass
class SamplerSession:
    """Owns the RNG and statistics for one sampling activity.

    Tables are shared read-only; max_restarts bounds the restarts allowed
    per returned sample (0 means unlimited). With validate=True every attempt is
    drawn through the pure step-by-step path, fully materialized, and checked
    against the class validators (identical output stream, much slower).
    """

    rng: random.Random
    core_table: CoreTable | None = None
    weighted_table: WeightedTable | None = None
    max_restarts: int = 0
    validate: bool = False
    backend: str | None = None
    stats: SamplerStats = field(default_factory=SamplerStats)


def session_from_seed(seed: int, core_table=None, weighted_table=None,
                      max_restarts: int = 0, validate: bool = False,
                      backend: str | None = None) -> SamplerSession:
    return SamplerSession(random.Random(seed), core_table, weighted_table,
                          max_restarts, validate, backend)


def derive_subseed(master_seed: int, index: int) -> int:
    """Stable per-sample seed; independent of platform hash randomization."""
    digest = hashlib.sha256(
        f"modiagen:batch:{master_seed}:{index}".encode()).digest()
    return int.from_bytes(digest[:16], "big")


def draw_weighted_choice(weights, rng: random.Random) -> int:
    """Index i with probability weights[i] / sum(weights), exactly.

    Draws a uniform integer below the total from random bits by rejection
    and selects by cumulative sums. Raises on an all-zero or empty list.
    """
    total = 0
    for w in weights:
        if w < 0:
            raise ValueError("negative weight")
        total += w
    if total == 0:
        raise ValueError("all weights are zero")
    r = draw_below(total, rng.getrandbits)
    for i, w in enumerate(weights):
        if r < w:
            return i
        r -= w
    raise AssertionError("unreachable: cumulative scan exhausted")


# ---------------------------------------------------------------------------
# sequence-level sampling (pure path, also the validate-mode workhorse)

def sample_star_sequence(table: CoreTable, n: int, rng: random.Random) -> StarSequence:
    """Draw one complete shape sequence for the core process.

    Walks states (remaining, shape) from (n, empty) down to (0, empty); the
    recorded sequence is returned in forward order. One flat exact draw per
    step over (nothing, insertions, extractions).
    """
    if table.n < n:
        raise ValueError(f"table built for n={table.n} < {n}")
    space = table.space
    seq: list[Shape] = [()] * (n + 1)
    o = space.ordinal(())
    for trem in range(n, 0, -1):
        seq[trem] = space.shape(o)
        ti1 = table.t[trem - 1]
        gi1 = table.g[trem - 1]
        weights = [ti1[o]]
        targets = [o]
        for _, o2 in space.removes[o]:
            weights.append(ti1[o2])
            targets.append(o2)
        for _, o2 in space.adds[o]:
            weights.append(ti1[o2] - gi1[o2])
            targets.append(o2)
        if sum(weights) != table.t[trem][o]:
            raise AssertionError(
                f"transition weights do not sum to t[{trem}] at state {o}")
        o = targets[draw_weighted_choice(weights, rng)]
    seq[0] = space.shape(o)
    if seq[0] != ():
        raise AssertionError("walk did not end at the empty shape")
    return tuple(seq)


@dataclass(frozen=True)
class WeightedStarSequence:
    """Forward shape sequence of a weighted core plus per-extraction sizes.

    weights maps the forward position of each removal step to its stack
    size s >= sigma; the expanded length adds 2(s-1) positions per arc.
    """

    shapes: StarSequence
    weights: dict[int, int]

    def expanded_length(self) -> int:
        return len(self.shapes) - 1 + sum(2 * (s - 1) for s in self.weights.values())


def sample_weighted_sequence(table: WeightedTable, n: int, sigma: int,
                             rng: random.Random) -> WeightedStarSequence:
    """Draw one weighted shape sequence with total expanded length n."""
    if table.n < n:
        raise ValueError(f"table built for n={table.n} < {n}")
    if sigma != table.sigma:
        raise ValueError(f"table built for sigma={table.sigma}, not {sigma}")
    space = table.space
    steps, _ = _kernels_py.weighted_steps(
        n, sigma, space.ordinal(()), table.w, table.v, table.s2,
        space.add_off, space.add_row, space.add_tgt,
        space.rem_off, space.rem_row, space.rem_tgt, rng.getrandbits)
    shapes: list[Shape] = [()]
    weights: dict[int, int] = {}
    cur = space.ordinal(())
    for pos, (code, row, size) in enumerate(steps, start=1):
        if code == 1:
            for j, o2 in space.adds[cur]:
                if j == row:
                    cur = o2
                    break
        elif code == 2:
            for j, o2 in space.removes[cur]:
                if j == row:
                    cur = o2
                    break
            weights[pos] = size
        shapes.append(space.shape(cur))
    seq = WeightedStarSequence(tuple(shapes), weights)
    if seq.expanded_length() != n:
        raise AssertionError(
            f"expanded length {seq.expanded_length()} != n = {n}")
    return seq


# ---------------------------------------------------------------------------
# diagram-level sampling with restarts

def _stacking_rejects(arcs_in_order) -> bool:
    """lastpair check: a new arc only ever stacks onto the previous one."""
    for prev, cur in zip(arcs_in_order, arcs_in_order[1:]):
        if prev[0] == cur[0] + 1 and prev[1] == cur[1] - 1:
            return True
    return False


def _core_attempt_validated(table: CoreTable, n: int, rng: random.Random):
    seq = sample_star_sequence(table, n, rng)
    arcs = forward_pass(seq)
    lastpair_reject = _stacking_rejects(arcs)
    diagram = Diagram(n, frozenset(arcs))
    core_reject = not all(len(s) == 1 for s in stack_decomposition(diagram))
    if lastpair_reject != core_reject:
        raise AssertionError(
            "stack-restart detections disagree: lastpair="
            f"{lastpair_reject}, core check={core_reject}")
    return (not lastpair_reject), diagram


def sample_core(n: int, k: int, session: SamplerSession) -> Diagram:
    """Uniform-style core sample; restarts until the walk yields a core."""
    table = session.core_table
    if table is None or table.n != n or table.k != k:
        raise ValueError(f"session has no core table for (n={n}, k={k})")
    kern = get_kernels(session.backend)
    space = table.space
    restarts_here = 0
    while True:
        session.stats.attempts += 1
        if session.validate:
            accepted, diagram = _core_attempt_validated(table, n, session.rng)
            if accepted:
                session.stats.successes += 1
                flags = classify(diagram, k, 1)
                if not (flags.is_k_noncrossing and flags.is_core):
                    raise AssertionError(f"sampled non-core {diagram}")
                return diagram
        else:
            accepted, arcs, _ = kern.core_attempt(
                n, k, space.ordinal(()), table.t, table.g,
                space.add_off, space.add_row, space.add_tgt,
                space.rem_off, space.rem_row, space.rem_tgt,
                session.rng.getrandbits)
            if accepted:
                session.stats.successes += 1
                return Diagram(n, frozenset(arcs))
        session.stats.restarts += 1
        restarts_here += 1
        if session.max_restarts and restarts_here > session.max_restarts:
            raise GiveUpError(
                f"gave up after {restarts_here} failed attempts (n={n}, k={k})",
                stats=session.stats)


def _modular_attempt_validated(table: WeightedTable, n: int, sigma: int,
                               k: int, rng: random.Random):
    seq = sample_weighted_sequence(table, n, sigma, rng)
    arcs = forward_pass(seq.shapes)
    m = len(seq.shapes) - 1
    lastpair_reject = _stacking_rejects(arcs)
    core_reject = not all(
        len(s) == 1
        for s in stack_decomposition(Diagram(m, frozenset(arcs))))
    if lastpair_reject != core_reject:
        raise AssertionError(
            "stack-restart detections disagree: lastpair="
            f"{lastpair_reject}, core check={core_reject}")
    if lastpair_reject:
        return False, None
    warcs = [(p, q, seq.weights[q]) for p, q in arcs]
    diagram = expand(WeightedCore(m, frozenset(warcs)))
    flags = classify(diagram, k, sigma)
    if diagram.n != n or not (flags.is_k_noncrossing and flags.is_sigma_modular):
        raise AssertionError(f"sampled invalid modular diagram {diagram}")
    return True, diagram


def sample_modular(n: int, k: int, sigma: int,
                   session: SamplerSession) -> Diagram:
    """Uniform-style sigma-modular sample via its weighted core."""
    table = session.weighted_table
    if table is None or table.n != n or table.k != k or table.sigma != sigma:
        raise ValueError(
            f"session has no weighted table for (n={n}, k={k}, sigma={sigma})")
    kern = get_kernels(session.backend)
    space = table.space
    restarts_here = 0
    while True:
        session.stats.attempts += 1
        if session.validate:
            accepted, diagram = _modular_attempt_validated(
                table, n, sigma, k, session.rng)
            if accepted:
                session.stats.successes += 1
                return diagram
        else:
            accepted, m, warcs, _ = kern.modular_attempt(
                n, sigma, k, space.ordinal(()), table.w, table.v, table.s2,
                space.add_off, space.add_row, space.add_tgt,
                space.rem_off, space.rem_row, space.rem_tgt,
                session.rng.getrandbits)
            if accepted:
                session.stats.successes += 1
                return expand(WeightedCore(m, frozenset(warcs)))
        session.stats.restarts += 1
        restarts_here += 1
        if session.max_restarts and restarts_here > session.max_restarts:
            raise GiveUpError(
                f"gave up after {restarts_here} failed attempts "
                f"(n={n}, k={k}, sigma={sigma})", stats=session.stats)


def run_attempts(table: CoreTable | WeightedTable, attempts: int,
                 rng: random.Random, backend: str | None = None) -> int:
    """Run independent single attempts (no restart loop); returns successes."""
    kern = get_kernels(backend)
    space = table.space
    empty = space.ordinal(())
    successes = 0
    if isinstance(table, CoreTable):
        for _ in range(attempts):
            ok, _, _ = kern.core_attempt(
                table.n, table.k, empty, table.t, table.g,
                space.add_off, space.add_row, space.add_tgt,
                space.rem_off, space.rem_row, space.rem_tgt, rng.getrandbits)
            successes += ok
    else:
        for _ in range(attempts):
            ok, _, _, _ = kern.modular_attempt(
                table.n, table.sigma, table.k, empty,
                table.w, table.v, table.s2,
                space.add_off, space.add_row, space.add_tgt,
                space.rem_off, space.rem_row, space.rem_tgt, rng.getrandbits)
            successes += ok
    return successes


# ---------------------------------------------------------------------------
# batch sampling

@dataclass
class BatchResult:
    diagrams: list[Diagram]
    per_sample_attempts: list[int]
    stats: SamplerStats


def sample_batch(table: CoreTable | WeightedTable, count: int, seed: int,
                 parallelism: int = 1, max_restarts: int = 0,
                 validate: bool = False,
                 backend: str | None = None) -> BatchResult:
    """Draw `count` samples, one derived sub-seed per sample index.

    Results depend only on (table parameters, count, seed); parallelism just
    distributes the independent per-sample sessions over threads.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    is_core = isinstance(table, CoreTable)

    def one(index: int):
        rng = random.Random(derive_subseed(seed, index))
        session = SamplerSession(
            rng,
            core_table=table if is_core else None,
            weighted_table=None if is_core else table,
            max_restarts=max_restarts, validate=validate, backend=backend)
        if is_core:
            diagram = sample_core(table.n, table.k, session)
        else:
            diagram = sample_modular(table.n, table.k, table.sigma, session)
        return diagram, session.stats

    if parallelism > 1 and count > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(one, range(count)))
    else:
        results = [one(i) for i in range(count)]

    out = BatchResult([], [], SamplerStats())
    for diagram, stats in results:
        out.diagrams.append(diagram)
        out.per_sample_attempts.append(stats.attempts)
        out.stats.merge(stats)
    return out
