import dataclasses

import pytest

from gapnum.digraph import get_digraph
from gapnum.geometry import Kind
from gapnum.solver import validate_tiling
from gapnum.structure import (
    SearchBudgetExceeded,
    cylinder_search,
    longest_t_absorption,
    max_gapless_run,
    t_components,
    validate_cylinder,
)


@pytest.mark.parametrize("w,k", [(1, 0), (3, 2), (5, 6), (7, 8), (9, 16)])
def test_gapless_runs(w, k):
    g = get_digraph(w)
    r = max_gapless_run(w, digraph=g)
    assert r.max_gapless_columns == k and not r.unbounded
    t = r.tiling(g)
    assert validate_tiling(t).ok
    gap_cols = {p.anchor.col for p in t.placements if p.kind is Kind.MONOMINO}
    assert not gap_cols & set(range(r.first_column, r.first_column + k))


@pytest.mark.parametrize("w", [2, 4, 6])
def test_gapless_runs_unbounded(w):
    g = get_digraph(w)
    r = max_gapless_run(w, digraph=g)
    assert r.unbounded
    path = r.witness_path
    assert all(g.is_t[e] for e in path)
    assert g.dst[path[-1]] == g.src[path[0]]
    assert sum(int(g.cols[e]) for e in path) > 0


def test_longest_absorption_refuses_cycles():
    with pytest.raises(ValueError):
        longest_t_absorption(get_digraph(4))
    assert t_components(get_digraph(9)) == []


@pytest.mark.parametrize("w,p,mu", [(3, 3, 1), (5, 5, 1), (7, 7, 1), (4, 4, 0), (6, 4, 0), (2, 8, 0), (9, 17, 5)])
def test_cylinders_found(w, p, mu):
    g = get_digraph(w)
    wit = cylinder_search(w, p, mu, digraph=g)
    assert wit is not None
    assert (wit.width, wit.period) == (w, p) and wit.monominoes <= mu
    assert validate_cylinder(g, wit).ok
    assert (4 * (len(wit.cycle) - wit.monominoes) + wit.monominoes) == w * p


def test_three_by_three_cycle_shape():
    g = get_digraph(3)
    wit = cylinder_search(3, 3, 1, digraph=g)
    kinds = sorted(g.edge_kind(e).value for e in wit.cycle)
    assert kinds == ["M", "T", "T"]


@pytest.mark.parametrize("w,p,mu", [(9, 17, 0), (3, 3, 0), (5, 5, 0), (5, 4, 3), (7, 6, 1), (6, 2, 0), (2, 6, 0)])
def test_cylinders_absent(w, p, mu):
    assert cylinder_search(w, p, mu) is None


def test_broken_witness_is_rejected():
    g = get_digraph(5)
    wit = cylinder_search(5, 5, 1, digraph=g)
    short = dataclasses.replace(wit, cycle=wit.cycle[:-1])
    assert not validate_cylinder(g, short).ok
    wrong = dataclasses.replace(wit, period=wit.period + 1)
    assert not validate_cylinder(g, wrong).ok
    assert not validate_cylinder(g, dataclasses.replace(wit, cycle=[])).ok


def test_budget_is_reported_not_swallowed():
    with pytest.raises(SearchBudgetExceeded):
        cylinder_search(9, 17, 1, max_work=1000)


def test_search_arguments():
    with pytest.raises(ValueError):
        cylinder_search(3, 0, 1)
    with pytest.raises(ValueError):
        cylinder_search(3, 3, -1)


def test_bounded_runs_rule_out_gapless_cylinders():
    for w in (3, 5, 7):
        assert not max_gapless_run(w).unbounded
        assert all(cylinder_search(w, p, 0) is None for p in range(1, 30))
