"""Counting tables: recursions, transition weights, identities, persistence."""
import itertools

import pytest

from modiagen.errors import CacheError
from modiagen.oracle import count_class, enumerate_diagrams, motzkin_number
from modiagen.shapes import ADD, NOTHING, REMOVE
from modiagen.tables import (build_core_table, build_weighted_table,
                             compositions_count, core_transition_weights,
                             load_core_table, load_weighted_table, save_table,
                             weighted_transition_weights)


def brute_compositions(s, parts, sigma):
    return sum(1 for tup in itertools.product(range(sigma, s + 1), repeat=parts)
               if sum(tup) == s)


def test_compositions_count_examples():
    assert compositions_count(4, 2, 2) == 1  # only (2,2)
    assert compositions_count(5, 2, 2) == 2  # (2,3), (3,2)
    for s in (1, 2, 5, 9):
        assert compositions_count(s, 1, 1) == 1
        if s >= 3:
            assert compositions_count(s, 1, 3) == 1
    assert compositions_count(3, 2, 2) == 0


def test_compositions_count_vs_enumeration():
    for s in range(0, 10):
        for parts in range(1, 5):
            for sigma in range(1, 4):
                assert compositions_count(s, parts, sigma) == \
                    brute_compositions(s, parts, sigma)


def test_core_table_small_values():
    for k in (2, 3, 4):
        assert build_core_table(2, k).t_at(2, ()) == 2
    t2 = build_core_table(4, 2)
    assert t2.total() == 8
    assert build_core_table(4, 3).total() == 9
    # the unique length-3 prefix whose next extraction stacks
    assert build_core_table(4, 2).g_at(3, (1,)) == 1


@pytest.mark.parametrize("k", [2, 3, 4])
def test_core_totals_match_oracle(k):
    for n in range(0, 11):
        assert build_core_table(n, k).total() == \
            count_class(n, k, None, "core")


def test_core_transition_examples(core_10_2):
    t1 = build_core_table(1, 2)
    moves = core_transition_weights(t1, 1, ())
    assert [(m.kind, w) for m, _, w in moves if w > 0] == [(NOTHING, 1)]

    t2 = build_core_table(2, 2)
    moves = core_transition_weights(t2, 2, ())
    assert [(m.kind, s, w) for m, s, w in moves] == \
        [(NOTHING, (), 1), (ADD, (1,), 1)]
    assert sum(w for _, _, w in moves) == t2.t_at(2, ())

    moves = core_transition_weights(core_10_2, 3, (1,))
    assert [(m.kind, s, w) for m, s, w in moves] == \
        [(NOTHING, (1,), 2), (REMOVE, (), 2), (ADD, (2,), 1)]
    assert sum(w for _, _, w in moves) == 5 == core_10_2.t_at(3, (1,))


def test_core_transition_rejects_zero_state(core_10_2):
    with pytest.raises(ValueError):
        core_transition_weights(core_10_2, 1, (4,))  # t[1,[4]] = 0


@pytest.mark.parametrize("k,sigma", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_core_transition_normalization_all_states(k, sigma):
    n = 8
    table = build_core_table(n, k)
    for i in range(1, n + 1):
        for o in range(len(table.space)):
            if table.t[i][o] == 0:
                continue
            moves = core_transition_weights(table, i, table.space.shape(o))
            assert all(w >= 0 for _, _, w in moves)
            assert sum(w for _, _, w in moves) == table.t[i][o]


def test_weighted_table_small_values():
    w = build_weighted_table(6, 2, 2)
    for i in range(0, 4):  # below 2*sigma only the all-nothing walk fits
        assert w.w_at(i, ()) == 1
    assert w.w_at(4, ()) == 2
    assert w.w_at(5, ()) == 4
    assert w.w_at(6, ()) == 8


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("sigma", [1, 2, 3])
def test_weighted_totals_match_oracle(k, sigma):
    for n in range(0, 11):
        assert build_weighted_table(n, k, sigma).total() == \
            count_class(n, k, sigma, "sigma_modular")


def test_sigma_one_k2_is_motzkin():
    for n in range(0, 13):
        assert build_weighted_table(n, 2, 1).total() == motzkin_number(n)


def test_weighted_transition_examples(weighted_8_2_2):
    w1 = build_weighted_table(1, 2, 2)
    moves = weighted_transition_weights(w1, 1, ())
    assert [(m.kind, w) for m, _, _, w in moves if w > 0] == [(NOTHING, 1)]

    moves = weighted_transition_weights(weighted_8_2_2, 4, ())
    nonzero = [(m.kind, shp, s, w) for m, shp, s, w in moves if w > 0]
    assert nonzero == [(NOTHING, (), None, 1), (ADD, (1,), 2, 1)]

    moves = weighted_transition_weights(weighted_8_2_2, 6, ())
    nonzero = [(m.kind, shp, s, w) for m, shp, s, w in moves if w > 0]
    assert nonzero == [(NOTHING, (), None, 4),
                       (ADD, (1,), 2, 3),
                       (ADD, (1,), 3, 1)]
    assert sum(w for _, _, _, w in moves) == 8 == weighted_8_2_2.w_at(6, ())


@pytest.mark.parametrize("k,sigma", [(2, 1), (2, 2), (3, 2), (3, 3)])
def test_weighted_transition_normalization_all_states(k, sigma):
    n = 8
    table = build_weighted_table(n, k, sigma)
    for i in range(1, n + 1):
        for o in range(len(table.space)):
            if table.w[i][o] == 0:
                continue
            moves = weighted_transition_weights(table, i, table.space.shape(o))
            assert all(w >= 0 for _, _, _, w in moves)
            assert sum(w for _, _, _, w in moves) == table.w[i][o]


@pytest.mark.parametrize("k", [2, 3])
def test_g_closed_form_identity(k):
    # t[x] - g[x] == sum_p (-1)^p t[x - 2p], per cell
    n = 10
    table = build_core_table(n, k)
    for x in range(0, n + 1):
        for o in range(len(table.space)):
            rhs, p, sign = 0, 0, 1
            while x - 2 * p >= 0:
                rhs += sign * table.t[x - 2 * p][o]
                p += 1
                sign = -sign
            assert table.t[x][o] - table.g[x][o] == rhs


@pytest.mark.parametrize("k,sigma", [(2, 1), (2, 2), (3, 2), (3, 3)])
def test_grouped_composition_identity(k, sigma):
    # sum_s (w-v)[t-2s+1] == sum_s sum_l (-1)^(l-1) p(s,l,sigma) w[t-2s+1]
    n = 10
    table = build_weighted_table(n, k, sigma)
    for t in range(0, n + 1):
        for o in range(len(table.space)):
            lhs = rhs = 0
            s = sigma
            while 2 * s <= t + 1:
                x = t - 2 * s + 1
                lhs += table.w[x][o] - table.v[x][o]
                for parts in range(1, s // sigma + 1):
                    rhs += (-1) ** (parts - 1) * \
                        compositions_count(s, parts, sigma) * table.w[x][o]
                s += 1
            assert lhs == rhs


def test_table_entry_bounds():
    table = build_core_table(10, 3)
    for i in range(0, 11):
        for o in range(len(table.space)):
            assert table.t[i][o] >= 0
            assert 0 <= table.g[i][o] <= (table.t[i - 2][o] if i >= 2 else 0)
    wt = build_weighted_table(10, 3, 2)
    for i in range(0, 11):
        for o in range(len(wt.space)):
            bound = sum(wt.w[i - 2 * sp][o]
                        for sp in range(wt.sigma, i // 2 + 1))
            assert 0 <= wt.v[i][o] <= bound
            assert wt.w[i][o] - wt.v[i][o] >= 0


def test_s2_matches_definition():
    wt = build_weighted_table(9, 3, 2)
    for i in range(0, 10):
        for o in range(len(wt.space)):
            expected = sum(wt.w[y][o] - wt.v[y][o]
                           for y in range(i, -1, -2))
            assert wt.s2[i][o] == expected


def test_zero_extension_reads():
    table = build_core_table(6, 3)
    assert table.t_at(-1, ()) == 0
    assert table.t_at(3, (9, 9)) == 0
    wt = build_weighted_table(6, 2, 2)
    assert wt.w_at(-2, ()) == 0
    assert wt.w_at(2, (5,)) == 0


def test_out_of_range_transitions_rejected(core_8_3):
    with pytest.raises(ValueError):
        core_transition_weights(core_8_3, 0, ())
    with pytest.raises(ValueError):
        core_transition_weights(core_8_3, 9, ())


# persistence ---------------------------------------------------------------

def test_core_cache_roundtrip(tmp_path):
    table = build_core_table(6, 3)
    save_table(table, str(tmp_path))
    loaded = load_core_table(str(tmp_path), 6, 3)
    assert loaded is not None
    assert loaded.t == table.t and loaded.g == table.g
    assert load_core_table(str(tmp_path), 7, 3) is None  # different key


def test_weighted_cache_roundtrip(tmp_path):
    table = build_weighted_table(7, 2, 2)
    save_table(table, str(tmp_path))
    loaded = load_weighted_table(str(tmp_path), 7, 2, 2)
    assert loaded is not None
    assert loaded.w == table.w and loaded.v == table.v
    assert loaded.s2 == table.s2  # rebuilt on load
    assert load_weighted_table(str(tmp_path), 7, 2, 3) is None


def test_corrupted_cache_rejected(tmp_path):
    table = build_core_table(6, 2)
    path = save_table(table, str(tmp_path))
    text = open(path).read()
    # flip one digit inside the t matrix
    broken = text.replace('"2"', '"3"', 1)
    assert broken != text
    with open(path, "w") as fh:
        fh.write(broken)
    with pytest.raises(CacheError):
        load_core_table(str(tmp_path), 6, 2)


def test_truncated_cache_rejected(tmp_path):
    table = build_weighted_table(6, 2, 2)
    path = save_table(table, str(tmp_path))
    import json
    doc = json.load(open(path))
    doc["w"] = doc["w"][:3]
    json.dump(doc, open(path, "w"))
    with pytest.raises(CacheError):
        load_weighted_table(str(tmp_path), 6, 2, 2)


def test_wrong_version_rejected(tmp_path):
    table = build_core_table(5, 2)
    path = save_table(table, str(tmp_path))
    import json
    doc = json.load(open(path))
    doc["format_version"] = 999
    json.dump(doc, open(path, "w"))
    with pytest.raises(CacheError):
        load_core_table(str(tmp_path), 5, 2)
