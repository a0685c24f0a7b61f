import json
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import erdos_renyi, graphs
from oracles import chromatic_number, greedy_sdo_trace, level_histogram
from ppcolor.coloring import (
    BudgetError,
    Coloring,
    PrioritizationStrategy,
    PriorityAssignment,
    ValidityError,
    check_coloring,
    chromatic_number_bruteforce,
    color_to_priority,
    enumerate_prioritizations,
    greedy_color,
    levels_for,
    min_levels,
    orient_edges,
    prioritize,
    random_permutation,
    reorder_levels,
)
from ppcolor.graph import CouplingGraph, GraphError, compute_levels


def star(leaves):
    return CouplingGraph.from_edges(leaves + 1, [(1, j) for j in range(2, leaves + 2)])


class TestGreedyColor:
    def test_edgeless(self):
        c = greedy_color(CouplingGraph(6, frozenset()))
        assert c.n_colors == 1 and set(c.color.values()) == {1}

    def test_triangle(self):
        assert greedy_color(CouplingGraph.complete(3)).color == {1: 1, 2: 2, 3: 3}

    def test_five_cycle_hand_trace(self):
        c = greedy_color(CouplingGraph.cycle(5))
        assert c.color == {1: 1, 2: 2, 3: 1, 4: 2, 5: 3}
        assert c.n_colors == 3

    def test_degree_breaks_saturation_ties(self):
        # vertex 3 has the largest degree and must be colored first
        g = CouplingGraph.from_edges(5, [(3, 1), (3, 2), (3, 4), (4, 5)])
        assert greedy_color(g).color[3] == 1

    @given(graphs(max_n=14))
    def test_matches_selection_rule(self, g):
        assert greedy_color(g).color == greedy_sdo_trace(g.n, g.edges)

    @given(graphs(max_n=14))
    def test_valid_contiguous_and_bounded(self, g):
        c = greedy_color(g)
        check_coloring(c, g)
        assert set(c.color.values()) == set(range(1, c.n_colors + 1))
        assert c.n_colors <= g.max_degree() + 1

    def test_valid_on_large_random_graphs(self):
        rng = random.Random(7)
        for _ in range(1000):
            g = erdos_renyi(rng.randint(1, 64), rng.random(), rng)
            c = greedy_color(g)
            assert all(c.color[a] != c.color[b] for a, b in g.edges)
            assert c.n_colors <= g.max_degree() + 1

    @given(graphs(max_n=12))
    def test_repeated_calls_serialize_identically(self, g):
        dumps = {json.dumps(greedy_color(g).color, sort_keys=True) for _ in range(4)}
        assert len(dumps) == 1

    def test_bipartite_graphs_get_two_colors(self):
        assert greedy_color(CouplingGraph.path(8)).n_colors == 2
        assert greedy_color(CouplingGraph.cycle(6)).n_colors == 2
        assert greedy_color(star(5)).n_colors == 2


class TestChromaticNumber:
    def test_examples(self):
        assert chromatic_number_bruteforce(CouplingGraph.complete(4)) == 4
        assert chromatic_number_bruteforce(CouplingGraph.cycle(5)) == 3
        assert chromatic_number_bruteforce(star(4)) == 2
        assert chromatic_number_bruteforce(CouplingGraph(3, frozenset())) == 1

    def test_random_trees(self):
        rng = random.Random(3)
        for _ in range(50):
            n = rng.randint(2, 12)
            g = CouplingGraph.from_edges(n, [(rng.randint(1, v - 1), v) for v in range(2, n + 1)])
            assert chromatic_number_bruteforce(g) == 2

    @given(graphs(max_n=7))
    def test_matches_exhaustive_product(self, g):
        assert chromatic_number_bruteforce(g) == chromatic_number(g.n, g.edges)

    def test_budget(self):
        with pytest.raises(BudgetError):
            chromatic_number_bruteforce(CouplingGraph(13, frozenset()))

    def test_min_levels(self):
        assert min_levels(CouplingGraph.path(6)) == 2
        assert min_levels(CouplingGraph.complete(6)) == 6
        assert min_levels(CouplingGraph.cycle(5)) == 3


class TestPriorities:
    def test_color_to_priority(self):
        assert color_to_priority(Coloring({1: 1, 2: 2, 3: 1}, 2)).priority == {1: 1, 3: 2, 2: 3}
        assert color_to_priority(Coloring({1: 1, 2: 1, 3: 1}, 1)).priority == {1: 1, 2: 2, 3: 3}
        assert color_to_priority(Coloring({1: 1, 2: 2, 3: 3}, 3)).priority == {1: 1, 2: 2, 3: 3}

    def test_invalid_coloring_rejected(self):
        with pytest.raises(ValidityError):
            check_coloring(Coloring({1: 1, 2: 1}, 1), CouplingGraph.path(2))

    def test_orient_examples(self):
        g = CouplingGraph.path(3)
        assert orient_edges(g, PriorityAssignment({1: 1, 2: 3, 3: 2})).arcs == {(1, 2), (3, 2)}
        d = orient_edges(CouplingGraph.complete(3), PriorityAssignment({1: 1, 2: 2, 3: 3}))
        assert d.arcs == {(1, 2), (1, 3), (2, 3)}
        chain = orient_edges(CouplingGraph.path(8), PriorityAssignment({i: i for i in range(1, 9)}))
        assert compute_levels(chain).n_levels == 8

    def test_orient_rejects_equal_neighbor_priorities(self):
        with pytest.raises(ValidityError):
            orient_edges(CouplingGraph.path(2), PriorityAssignment({1: 1, 2: 1}))

    def test_equal_priorities_allowed_between_non_neighbors(self):
        d = orient_edges(CouplingGraph.path(3), PriorityAssignment({1: 1, 2: 2, 3: 1}))
        assert d.arcs == {(1, 2), (3, 2)}

    @given(graphs(max_n=12))
    def test_color_priority_levels_equal_colors(self, g):
        c = greedy_color(g)
        p = color_to_priority(c)
        assert sorted(p.priority.values()) == list(g.vertices)
        assert levels_for(g, p) == c.n_colors


class TestReorder:
    def test_star_center_moves_first(self):
        g = star(4)
        c = Coloring({1: 2, 2: 1, 3: 1, 4: 1, 5: 1}, 2)
        assert reorder_levels(c, g).color[1] == 1

    def test_equal_profiles_keep_order(self):
        g = CouplingGraph.complete(3)
        c = greedy_color(g)
        assert reorder_levels(c, g) == c
        m = CouplingGraph.from_edges(4, [(1, 2), (3, 4)])
        c = Coloring({1: 1, 2: 2, 3: 1, 4: 2}, 2)
        assert reorder_levels(c, m) == c

    @given(graphs(max_n=12))
    def test_preserves_classes_and_validity(self, g):
        c = greedy_color(g)
        r = reorder_levels(c, g)
        check_coloring(r, g)
        assert r.n_colors == c.n_colors
        assert sorted(map(sorted, r.classes())) == sorted(map(sorted, c.classes()))
        assert levels_for(g, color_to_priority(r)) == c.n_colors


class TestPrioritize:
    def test_constant(self):
        p = prioritize(PrioritizationStrategy("constant"), CouplingGraph.path(4))
        assert p.priority == {1: 1, 2: 2, 3: 3, 4: 4}

    def test_constraint(self):
        p = prioritize(PrioritizationStrategy("constraint"), CouplingGraph.path(3), {1: 0, 2: 2, 3: 1})
        assert p.priority == {2: 1, 3: 2, 1: 3}

    def test_constraint_ties_by_id(self):
        p = prioritize(PrioritizationStrategy("constraint"), CouplingGraph.path(3), {1: 1, 2: 1, 3: 1})
        assert p.priority == {1: 1, 2: 2, 3: 3}

    def test_constraint_needs_counts(self):
        with pytest.raises(GraphError):
            prioritize(PrioritizationStrategy("constraint"), CouplingGraph.path(3))
        with pytest.raises(GraphError):
            prioritize(PrioritizationStrategy("constraint"), CouplingGraph.path(3), {1: 0})

    def test_random_needs_seed(self):
        with pytest.raises(ValueError):
            PrioritizationStrategy("random")

    def test_random_is_seeded_permutation(self):
        g = CouplingGraph.complete(6)
        a = prioritize(PrioritizationStrategy("random", 5), g)
        assert a == prioritize(PrioritizationStrategy("random", 5), g)
        assert sorted(a.priority.values()) == list(range(1, 7))
        seen = {tuple(random_permutation(list(range(1, 7)), s)) for s in range(200)}
        assert len(seen) > 150

    def test_random_permutation_is_roughly_uniform(self):
        counts = {}
        for s in range(6000):
            k = tuple(random_permutation([1, 2, 3], s))
            counts[k] = counts.get(k, 0) + 1
        assert len(counts) == 6
        assert all(abs(c - 1000) < 150 for c in counts.values())

    @pytest.mark.parametrize("n", range(2, 13))
    def test_paths(self, n):
        g = CouplingGraph.path(n)
        assert levels_for(g, prioritize(PrioritizationStrategy("coloring"), g)) == 2
        assert levels_for(g, prioritize(PrioritizationStrategy("constant"), g)) == n


class TestEnumerate:
    def test_examples(self):
        assert enumerate_prioritizations(CouplingGraph.path(3)) == {2: 4, 3: 2}
        assert enumerate_prioritizations(CouplingGraph.complete(3)) == {3: 6}
        assert enumerate_prioritizations(CouplingGraph(3, frozenset())) == {1: 6}

    def test_budget(self):
        with pytest.raises(BudgetError):
            enumerate_prioritizations(CouplingGraph(10, frozenset()))

    @settings(max_examples=40)
    @given(graphs(max_n=6))
    def test_matches_oracle(self, g):
        assert enumerate_prioritizations(g) == level_histogram(g.n, g.edges)

    @settings(max_examples=25)
    @given(graphs(max_n=7))
    def test_sandwich(self, g):
        hist = enumerate_prioritizations(g)
        chi = chromatic_number_bruteforce(g)
        assert min(hist) == chi
        assert sum(hist.values()) == math.factorial(g.n)
        assert chi <= greedy_color(g).n_colors <= g.max_degree() + 1
