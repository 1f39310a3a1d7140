import itertools

import pytest

from nibp.maxcut import (Graph, approximation_ratio, complete_graph, cut_value, cycle_graph,
                         erdos_renyi, exact_ground_energy, maxcut_hamiltonian, read_edge_list,
                         write_edge_list)


def brute_max_cut(g):
    return max(cut_value(g, "".join(b)) for b in itertools.product("01", repeat=g.n))


@pytest.mark.parametrize("g, energy", [(cycle_graph(5), -1.5), (complete_graph(3), -0.5),
                                       (cycle_graph(4), -2.0), (complete_graph(4), -1.0)])
def test_ground_energies(g, energy):
    e, bits = exact_ground_energy(maxcut_hamiltonian(g))
    assert e == energy
    assert e == (len(g.edges) - 2 * brute_max_cut(g)) / 2
    assert cut_value(g, bits) == brute_max_cut(g)


def test_random_graphs_match_cut_formula():
    for seed in range(30):
        g = erdos_renyi(5, seed)
        e, _ = exact_ground_energy(maxcut_hamiltonian(g))
        assert e == (len(g.edges) - 2 * brute_max_cut(g)) / 2


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Graph(2, [(0, 2)])
    assert Graph(3, [(2, 0)]).edges == ((0, 2),)


def test_edge_list_round_trip(tmp_path):
    g = erdos_renyi(6, 3)
    path = tmp_path / "g.txt"
    write_edge_list(g, path)
    assert read_edge_list(path) == g
    # isolated trailing nodes survive through the header
    h = Graph(4, [(0, 1)])
    assert Graph.from_edge_list(h.to_edge_list()) == h


def test_erdos_renyi_is_seeded():
    assert erdos_renyi(5, 11) == erdos_renyi(5, 11)
    assert len({erdos_renyi(5, s).edges for s in range(20)}) > 1


def test_ratio_missing_for_edgeless():
    assert approximation_ratio(-1.0, -2.0) == 0.5
    assert approximation_ratio(0.0, 0.0) != approximation_ratio(0.0, 0.0)  # NaN


def test_edge_frequency():
    hits = sum(bool(erdos_renyi(2, s).edges) for s in range(10_000))
    assert abs(hits / 10_000 - 0.5) <= 0.02
    mean = sum(len(erdos_renyi(5, s).edges) for s in range(4000)) / 4000
    assert mean == pytest.approx(5.0, abs=0.15)


def test_triangle_and_edgeless_hamiltonians():
    h = maxcut_hamiltonian(complete_graph(3))
    assert h.num_terms == 3 and set(h.terms.values()) == {0.5} and h.trace == 0
    empty = maxcut_hamiltonian(Graph(4, []))
    assert not empty.terms
    assert exact_ground_energy(empty)[0] == 0.0


def test_ratio_examples():
    assert approximation_ratio(-1.5, -1.5) == 1.0
    assert approximation_ratio(0.0, -1.5) == 0.0
    assert approximation_ratio(-1.2, -1.5) == pytest.approx(0.8)
