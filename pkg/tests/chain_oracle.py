"""Exact-distribution oracle for the samplers.

Enumerates every complete walk of the reversed Markov chain with exact
Fraction probabilities (straight from the transition-weight ratios), maps
each walk to its diagram, and splits accepted from rejected mass. This is
analytic: no random numbers, so it is an independent check of what the
sampling loop should produce.
"""
from fractions import Fraction

from modiagen.diagram import Diagram, WeightedCore, expand, stack_decomposition
from modiagen.shapes import ADD, NOTHING
from modiagen.tableau import forward_pass
from modiagen.tables import (CoreTable, WeightedTable, core_transition_weights,
                             weighted_transition_weights)


def _is_core_arcs(n, arcs):
    return all(len(s) == 1
               for s in stack_decomposition(Diagram(n, frozenset(arcs))))


def core_chain_distribution(table: CoreTable, n: int):
    """(accepted: {Diagram: Fraction}, success_probability: Fraction)."""
    dist = {}
    fail = Fraction(0)

    def rec(trem, shape, fwd_steps, prob):
        nonlocal fail
        if trem == 0:
            assert shape == ()
            seq = _steps_to_sequence(n, fwd_steps)
            arcs = forward_pass(seq)
            diagram = Diagram(n, frozenset(arcs))
            if _is_core_arcs(n, arcs):
                dist[diagram] = dist.get(diagram, Fraction(0)) + prob
            else:
                fail += prob
            return
        weights = core_transition_weights(table, trem, shape)
        total = sum(w for _, _, w in weights)
        for move, nshape, w in weights:
            if w > 0:
                rec(trem - 1, nshape, fwd_steps + [(move, nshape)],
                    prob * Fraction(w, total))

    rec(n, (), [], Fraction(1))
    return dist, 1 - fail


def _steps_to_sequence(n, fwd_steps):
    # drawing order is reversed: the draw for forward position p records the
    # pre-move shape lambda^{p-1}, and position n is drawn first
    shapes = [nshape for _, nshape in reversed(fwd_steps)]
    shapes.append(())
    assert len(shapes) == n + 1 and shapes[0] == ()
    return tuple(shapes)


def weighted_chain_distribution(table: WeightedTable, n: int):
    """(accepted: {Diagram: Fraction}, success_probability: Fraction)."""
    sigma = table.sigma
    dist = {}
    fail = Fraction(0)

    def finish(fwd_steps, prob):
        nonlocal fail
        shapes = []
        weights = {}
        for pos, (move, nshape, size) in enumerate(reversed(fwd_steps), 1):
            shapes.append(nshape)  # pre-move shape lambda^{pos-1}
            if size is not None:
                weights[pos] = size
        shapes.append(())
        seq = tuple(shapes)
        arcs = forward_pass(seq)
        m = len(seq) - 1
        if not _is_core_arcs(m, arcs):
            fail += prob
            return
        warcs = frozenset((p, q, weights[q]) for p, q in arcs)
        diagram = expand(WeightedCore(m, warcs))
        assert diagram.n == n
        dist[diagram] = dist.get(diagram, Fraction(0)) + prob

    def rec(trem, shape, fwd_steps, prob):
        if trem == 0:
            assert shape == ()
            finish(fwd_steps, prob)
            return
        weights = weighted_transition_weights(table, trem, shape)
        total = sum(w for _, _, _, w in weights)
        for move, nshape, size, w in weights:
            if w <= 0:
                continue
            if move.kind == ADD:
                nt = trem - 2 * size + 1
            else:
                nt = trem - 1
            rec(nt, nshape, fwd_steps + [(move, nshape, size)],
                prob * Fraction(w, total))

    rec(n, (), [], Fraction(1))
    return dist, 1 - fail
