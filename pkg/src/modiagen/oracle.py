"""Brute-force ground truth at desk scale plus the chi-square harness.

Everything here is oracle-grade: exhaustive, exact, and deliberately naive.
The enumeration cap keeps accidental big-n calls from running for hours.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from scipy.stats import chi2 as _chi2

from .diagram import Diagram, classify, find_k_crossing, stack_decomposition
from .errors import OracleCapError
from .tables import compositions_count

DEFAULT_CAP = 14

CLASSES = ("all", "k_noncrossing", "core", "sigma_modular")


def involution_count(n: int) -> int:
    """Number of partial matchings on n vertices: I(n) = I(n-1) + (n-1) I(n-2)."""
    a, b = 1, 1  # I(0), I(1)
    if n <= 1:
        return 1
    for m in range(2, n + 1):
        a, b = b, b + (m - 1) * a
    return b


def motzkin_number(n: int) -> int:
    """M(n) via M(n) = M(n-1) + sum_j M(j) M(n-2-j); counts noncrossing matchings."""
    m = [1] * (n + 1)
    for i in range(1, n + 1):
        val = m[i - 1]
        for j in range(i - 1):
            val += m[j] * m[i - 2 - j]
        m[i] = val
    return m[n]


def enumerate_diagrams(n: int, cap: int = DEFAULT_CAP) -> Iterator[Diagram]:
    """Every partial matching on n vertices, exactly once, deterministically.

    The smallest unmatched vertex is taken isolated first, then paired with
    each later vertex in ascending order.
    """
    if n > cap:
        raise OracleCapError(f"n={n} exceeds enumeration cap {cap}")

    def rec(vertices: tuple[int, ...], acc: list[tuple[int, int]]):
        if not vertices:
            yield frozenset(acc)
            return
        first, rest = vertices[0], vertices[1:]
        yield from rec(rest, acc)
        for idx, partner in enumerate(rest):
            acc.append((first, partner))
            yield from rec(rest[:idx] + rest[idx + 1:], acc)
            acc.pop()

    for arcs in rec(tuple(range(1, n + 1)), []):
        yield Diagram(n, arcs)


def count_class(n: int, k: int, sigma: int | None, cls: str,
                cap: int = DEFAULT_CAP) -> int:
    """Exhaustive count of one diagram class.

    `core` and `sigma_modular` both include the k-noncrossing requirement.
    """
    if cls not in CLASSES:
        raise ValueError(f"class must be one of {CLASSES}")
    if cls == "sigma_modular" and (sigma is None or sigma < 1):
        raise ValueError("sigma_modular needs sigma >= 1")
    total = 0
    for diagram in enumerate_diagrams(n, cap):
        if cls == "all":
            total += 1
            continue
        flags = classify(diagram, k, sigma if sigma else 1)
        if not flags.is_k_noncrossing:
            continue
        if cls == "k_noncrossing":
            total += 1
        elif cls == "core" and flags.is_core:
            total += 1
        elif cls == "sigma_modular" and flags.is_sigma_modular:
            total += 1
    return total


def enumerate_class(n: int, k: int, sigma: int | None, cls: str,
                    cap: int = DEFAULT_CAP) -> list[Diagram]:
    """Materialized class members in canonical order (lex on sorted arcs)."""
    if cls not in CLASSES:
        raise ValueError(f"class must be one of {CLASSES}")
    out = []
    for diagram in enumerate_diagrams(n, cap):
        if cls != "all":
            flags = classify(diagram, k, sigma if sigma else 1)
            if not flags.is_k_noncrossing:
                continue
            if cls == "core" and not flags.is_core:
                continue
            if cls == "sigma_modular" and not flags.is_sigma_modular:
                continue
        out.append(diagram)
    out.sort(key=lambda d: d.sorted_arcs())
    return out


def grid_counts(n: int, ks=(2, 3, 4), sigmas=(1, 2, 3),
                cap: int = DEFAULT_CAP) -> dict:
    """One enumeration pass counting every (class, k, sigma) combination.

    Returns {'all': int, ('k_noncrossing', k): int, ('core', k): int,
    ('sigma_modular', k, sigma): int}.
    """
    counts: dict = {"all": 0}
    for k in ks:
        counts[("k_noncrossing", k)] = 0
        counts[("core", k)] = 0
        for sg in sigmas:
            counts[("sigma_modular", k, sg)] = 0
    for diagram in enumerate_diagrams(n, cap):
        counts["all"] += 1
        stacks = stack_decomposition(diagram)
        minlen = min((len(s) for s in stacks), default=None)
        allone = all(len(s) == 1 for s in stacks)
        for k in ks:
            if find_k_crossing(diagram, k) is not None:
                continue
            counts[("k_noncrossing", k)] += 1
            if allone:
                counts[("core", k)] += 1
            for sg in sigmas:
                if minlen is None or minlen >= sg:
                    counts[("sigma_modular", k, sg)] += 1
    return counts


@dataclass
class EnumerationReport:
    n: int
    k: int
    sigma: int
    counts: dict[str, int]
    diagrams: list[Diagram] | None = None


def enumeration_report(n: int, k: int, sigma: int, cap: int = DEFAULT_CAP,
                       keep_diagrams: bool = False) -> EnumerationReport:
    """One enumeration pass classifying everything at once."""
    counts = {c: 0 for c in CLASSES}
    kept = [] if keep_diagrams else None
    for diagram in enumerate_diagrams(n, cap):
        counts["all"] += 1
        flags = classify(diagram, k, sigma)
        if flags.is_k_noncrossing:
            counts["k_noncrossing"] += 1
            if flags.is_core:
                counts["core"] += 1
            if flags.is_sigma_modular:
                counts["sigma_modular"] += 1
        if kept is not None:
            kept.append(diagram)
    if counts["all"] != involution_count(n):
        raise AssertionError(
            f"enumeration produced {counts['all']} diagrams, expected "
            f"I({n}) = {involution_count(n)}")
    if kept is not None:
        kept.sort(key=lambda d: d.sorted_arcs())
    return EnumerationReport(n, k, sigma, counts, kept)


def weighted_core_census(n: int, k: int, sigma: int,
                         cap: int = DEFAULT_CAP) -> int:
    """Independent count of sigma-weighted cores with expanded length n.

    Sums, over k-noncrossing cores of every length m <= n with a arcs, the
    number of weight assignments (s_1..s_a >= sigma) adding 2(s-1) per arc
    up to the target length.
    """
    if n > cap:
        raise OracleCapError(f"n={n} exceeds enumeration cap {cap}")
    total = 0
    for m in range(n, -1, -2):  # n - m must stay even
        for diagram in enumerate_diagrams(m, cap):
            if find_k_crossing(diagram, k) is not None:
                continue
            stacks = stack_decomposition(diagram)
            if any(len(s) > 1 for s in stacks):
                continue
            arcs = len(diagram.arcs)
            if arcs == 0:
                total += 1 if m == n else 0
                continue
            total += compositions_count(arcs + (n - m) // 2, arcs, sigma)
    return total


@dataclass
class ChiSquareReport:
    statistic: float
    degrees_of_freedom: int
    critical: float
    alpha: float
    passed: bool
    inconclusive: bool
    min_expected: float


def chi_square_uniformity(observed: dict, total_samples: int,
                          alpha: float = 1e-3) -> ChiSquareReport:
    """Goodness of fit of observed counts against the uniform distribution.

    observed maps every member of the enumerated target set to its sample
    count (zeros included); expected counts below 5 make the test
    inconclusive rather than pass/fail.
    """
    d = len(observed)
    if d < 2:
        raise ValueError("need at least two outcomes")
    counts = list(observed.values())
    if sum(counts) != total_samples:
        raise ValueError("observed counts do not sum to total_samples")
    expected = total_samples / d
    statistic = sum((c - expected) ** 2 for c in counts) / expected
    critical = float(_chi2.isf(alpha, d - 1))
    inconclusive = expected < 5
    return ChiSquareReport(
        statistic=statistic,
        degrees_of_freedom=d - 1,
        critical=critical,
        alpha=alpha,
        passed=bool(statistic <= critical) and not inconclusive,
        inconclusive=inconclusive,
        min_expected=expected,
    )
