"""Diagram data model and validators.

A diagram is a partial matching on vertices 1..n drawn on a line: every
vertex lies in at most one arc (i, j) with i < j. Weighted cores carry an
integer stack size on every arc and expand back to plain diagrams.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Diagram:
    n: int
    arcs: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be >= 0")
        object.__setattr__(self, "arcs", frozenset(tuple(a) for a in self.arcs))
        seen = set()
        for i, j in self.arcs:
            if not (1 <= i < j <= self.n):
                raise ValueError(f"arc ({i},{j}) outside 1..{self.n}")
            if i in seen or j in seen:
                raise ValueError(f"vertex degree exceeds one at arc ({i},{j})")
            seen.add(i)
            seen.add(j)

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)

    def mirror(self) -> "Diagram":
        """Reverse the vertex order (i -> n+1-i on both endpoints)."""
        return Diagram(self.n, frozenset(
            (self.n + 1 - j, self.n + 1 - i) for i, j in self.arcs))


@dataclass(frozen=True)
class WeightedCore:
    """Core diagram whose arcs carry stack sizes s >= sigma."""

    m: int
    arcs: frozenset[tuple[int, int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "arcs", frozenset(tuple(a) for a in self.arcs))
        base = Diagram(self.m, frozenset((i, j) for i, j, _ in self.arcs))
        if any(s < 1 for _, _, s in self.arcs):
            raise ValueError("stack sizes must be >= 1")
        if not all(len(st.arcs) == 1 for st in stack_decomposition(base)):
            raise ValueError("weighted core has stacking arcs")

    def base_diagram(self) -> Diagram:
        return Diagram(self.m, frozenset((i, j) for i, j, _ in self.arcs))

    def expanded_length(self) -> int:
        return self.m + sum(2 * (s - 1) for _, _, s in self.arcs)


@dataclass(frozen=True)
class Stack:
    """Maximal run of parallel arcs ((i,j),(i+1,j-1),...)."""

    arcs: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.arcs)

    @property
    def outermost(self) -> tuple[int, int]:
        return self.arcs[0]


@dataclass(frozen=True)
class ClassFlags:
    is_k_noncrossing: bool
    is_core: bool
    is_sigma_modular: bool


def find_k_crossing(diagram: Diagram, k: int):
    """Some set of k mutually crossing arcs, or None.

    Exhaustive over arc k-subsets in lexicographic order; intended as a
    desk-scale oracle, not a production path.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    arcs = diagram.sorted_arcs()
    for sub in itertools.combinations(arcs, k):
        starts = [a[0] for a in sub]
        ends = [a[1] for a in sub]
        if all(starts[x] < starts[x + 1] for x in range(k - 1)) \
                and all(ends[x] < ends[x + 1] for x in range(k - 1)) \
                and starts[-1] < ends[0]:
            return set(sub)
    return None


def stack_decomposition(diagram: Diagram) -> list[Stack]:
    """Partition of the arc set into maximal stacks, outermost arc first."""
    arcset = diagram.arcs
    out = []
    for i, j in sorted(arcset):
        if (i - 1, j + 1) in arcset:
            continue  # interior of a stack started earlier
        run = [(i, j)]
        while (run[-1][0] + 1, run[-1][1] - 1) in arcset:
            run.append((run[-1][0] + 1, run[-1][1] - 1))
        out.append(Stack(tuple(run)))
    return out


def classify(diagram: Diagram, k: int, sigma: int) -> ClassFlags:
    """Validator flags straight from the definitions."""
    if k < 2 or sigma < 1:
        raise ValueError("need k >= 2 and sigma >= 1")
    stacks = stack_decomposition(diagram)
    return ClassFlags(
        is_k_noncrossing=find_k_crossing(diagram, k) is None,
        is_core=all(len(s) == 1 for s in stacks),
        is_sigma_modular=all(len(s) >= sigma for s in stacks),
    )


def collapse(diagram: Diagram, sigma: int) -> WeightedCore:
    """Map a sigma-modular diagram to its weighted core.

    Every maximal stack of length s keeps its outermost arc, weighted s; the
    2(s-1) interior endpoints are deleted and the rest relabeled densely.
    """
    stacks = stack_decomposition(diagram)
    if any(len(s) < sigma for s in stacks):
        raise ValueError("diagram is not sigma-modular")
    deleted = set()
    for st in stacks:
        for a in st.arcs[1:]:
            deleted.add(a[0])
            deleted.add(a[1])
    relabel = {}
    nxt = 1
    for vtx in range(1, diagram.n + 1):
        if vtx not in deleted:
            relabel[vtx] = nxt
            nxt += 1
    arcs = frozenset(
        (relabel[st.outermost[0]], relabel[st.outermost[1]], len(st))
        for st in stacks)
    return WeightedCore(nxt - 1, arcs)


def expand(core: WeightedCore) -> Diagram:
    """Inverse of collapse: inflate each weighted arc into a parallel stack.

    Endpoint v of an arc with weight s becomes s consecutive positions; the
    stack pairs them outermost-first so that collapse(expand(w)) == w.
    """
    width = {}
    for i, j, s in core.arcs:
        width[i] = s
        width[j] = s
    start = {}
    pos = 1
    for vtx in range(1, core.m + 1):
        start[vtx] = pos
        pos += width.get(vtx, 1)
    arcs = set()
    for i, j, s in core.arcs:
        for d in range(s):
            arcs.add((start[i] + d, start[j] + s - 1 - d))
    return Diagram(pos - 1, frozenset(arcs))
