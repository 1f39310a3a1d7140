import numpy as np
import pytest
from scipy.linalg import expm

from nibp import ansatz as az
from nibp import state as sv
from nibp.channels import NoiseSpec
from nibp.maxcut import Graph, complete_graph, cycle_graph, erdos_renyi, maxcut_hamiltonian
from nibp.pauli import PauliSum


def test_factor_exponential_matches_expm(rng):
    h = PauliSum(2, {"XZ": 0.4, "YY": -0.3, "ZI": 0.1})
    f = az.Factor(h, 0)
    np.testing.assert_allclose(f.exp(0.7), expm(-0.7j * h.to_matrix()), atol=1e-12)
    g = az.Factor(PauliSum(1, {"Y": 0.5}), 0)
    np.testing.assert_allclose(g.exp(1.3), expm(-1.3j * g.generator.to_matrix()), atol=1e-14)


def test_factor_validation():
    with pytest.raises(ValueError):
        az.Factor(PauliSum(1, {"X": 1.0}, 0.5), 0)
    with pytest.raises(ValueError):
        az.Factor(PauliSum(1, {"X": 1.0}), 0, np.array([[1, 1], [0, 1]], dtype=complex))


def test_param_ids_must_be_contiguous():
    f = az.Factor(PauliSum(1, {"X": 1.0}), 1)
    with pytest.raises(ValueError):
        az.Ansatz(1, ((f,),), ("a",))


def test_noise_count_and_groups():
    a = az.build_qaoa(cycle_graph(4), 2, native_layers=True)
    assert a.layer_count == 2 * (2 + 1)  # two edge colours plus the mixer, per round
    assert a.noise_insertions == a.layer_count + 1
    assert a.group_sizes() == {0: 4, 1: 4, 2: 4, 3: 4}
    assert a.metadata["k_P"] == 2 and a.metadata["b_M"] == 4
    with pytest.raises(IndexError):
        a.factor((99, 0))


def test_edge_coloring_is_proper():
    for seed in range(20):
        g = erdos_renyi(6, seed)
        if not g.edges:
            continue
        colors = az.edge_coloring(g)
        assert sorted(e for c in colors for e in c) == list(g.edges)
        for c in colors:
            nodes = [v for e in c for v in e]
            assert len(nodes) == len(set(nodes))
    assert len(az.edge_coloring(cycle_graph(5))) == 3


def test_native_and_compact_qaoa_agree_without_noise(rng):
    g = complete_graph(4)
    theta = rng.uniform(-np.pi, np.pi, 4)
    hp = maxcut_hamiltonian(g)
    compact = az.build_qaoa(g, 2)
    native = az.build_qaoa(g, 2, native_layers=True)
    a = sv.expectation(az.evolve(compact, theta), hp)
    b = sv.expectation(az.evolve(native, theta), hp)
    assert a == pytest.approx(b, abs=1e-12)


def test_qaoa_p1_closed_form():
    # single edge: <ZZ>/2 after one round from |++> is -sin(4 beta) sin(gamma) / 2 ... checked by expm
    g = Graph(2, [(0, 1)])
    a = az.build_qaoa(g, 1)
    gam, beta = 0.4, 0.3
    hp, hm = maxcut_hamiltonian(g).to_matrix(), PauliSum(2, {"XI": 1.0, "IX": 1.0}).to_matrix()
    psi = expm(-1j * beta * hm) @ expm(-1j * gam * hp) @ np.full(4, 0.5)
    want = float(np.real(psi.conj() @ hp @ psi))
    assert sv.expectation(az.evolve(a, [gam, beta]), maxcut_hamiltonian(g)) == pytest.approx(want)


def test_cnot_ladder():
    u = az.cnot_ladder(3)
    # |100> -> |110> -> |111>
    assert np.argmax(np.abs(u[:, 0b100])) == 0b111
    sv.check_unitary(u)


def test_hardware_efficient_structure():
    a = az.build_hardware_efficient(3, 4, seed=1, rotation="random")
    assert a.n_params == 12 and a.layer_count == 4
    assert a.layers[0][0].fixed_gate is not None
    assert all(f.fixed_gate is None for f in a.layers[0][1:])
    assert sorted(a.group_sizes().values()) == [1] * 12


def test_ucc_generator_signs():
    a = az.build_ucc_like(2, [{"XY": 1.0, "YX": -1.0}])
    assert a.layer_count == 2 and a.group_sizes() == {0: 2}
    assert a.metadata["N_hat"] == [2]
    # exp(+i t mu sigma) is stored as exp(-i t (-mu) sigma)
    assert dict(a.layers[0][0].generator.terms).popitem()[1] == -1.0
    with pytest.raises(ValueError):
        az.build_ucc_like(2, [{"XY": 0.5}])


def test_evolve_checks_inputs():
    a = az.single_qubit_rx()
    with pytest.raises(ValueError):
        az.evolve(a, [0.1, 0.2])
    with pytest.raises(ValueError):
        az.evolve(a, [0.1], sv.from_computational("00"))
    with pytest.raises(ValueError):
        az.evolve(a, [0.1], backend="gpu")


def test_noise_pipeline_order_by_hand():
    # N o U o N applied explicitly as 2x2 matrices
    a = az.single_qubit_rx()
    spec = NoiseSpec.uniform(1, 0.8, 0.6, 0.7)
    th = 0.9
    u = expm(-0.5j * th * np.array([[0, 1], [1, 0]]))

    def chan(m):
        c = (np.trace(m) + 0j) * np.eye(2) / 2
        x, y, z = (np.array(p) for p in ([[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]))
        for q, p in zip((0.8, 0.6, 0.7), (x, y, z)):
            c = c + q * np.trace(m @ p) * p / 2
        return c

    rho = np.diag([1.0 + 0j, 0])
    want = chan(u @ chan(rho) @ u.conj().T)
    got = az.evolve(a, [th], noise=spec).matrix
    np.testing.assert_allclose(got, want, atol=1e-14)


def test_identity_at_zero_angles():
    a = az.build_qaoa(cycle_graph(3), 1)
    for layer in a.layers:
        np.testing.assert_allclose(az.layer_unitary(layer, np.zeros(2)), np.eye(8), atol=1e-15)


def test_x_rotation_matrix():
    th = 0.83
    f = az.Factor(PauliSum(1, {"X": 0.5}), 0)
    x = np.array([[0, 1], [1, 0]])
    np.testing.assert_allclose(f.exp(th), np.cos(th / 2) * np.eye(2) - 1j * np.sin(th / 2) * x,
                               atol=1e-15)


def test_commuting_factors_order_free():
    f1 = az.Factor(PauliSum(2, {"ZZ": 0.5}), 0)
    f2 = az.Factor(PauliSum(2, {"ZI": 1.0}), 1)
    th = [0.4, -1.1]
    np.testing.assert_allclose(az.layer_unitary((f1, f2), th), az.layer_unitary((f2, f1), th),
                               atol=1e-12)


def test_qaoa_shapes():
    a = az.build_qaoa(cycle_graph(5), 1, native_layers=True)
    assert (a.metadata["k_P"], a.metadata["k_M"], a.noise_insertions) == (3, 1, 5)
    b = az.build_qaoa(cycle_graph(5), 1)
    assert (b.layer_count, b.noise_insertions) == (2, 3)
    t = az.build_qaoa(complete_graph(3), 1, native_layers=True)
    assert len(t.group(0)) == 3 and t.metadata["b_P"] == 3
    with pytest.raises(ValueError):
        az.build_qaoa(cycle_graph(3), 0)


def test_five_cycle_needs_three_colours():
    # exhaustive: no proper 2-colouring of the edges of an odd cycle exists
    import itertools
    edges = cycle_graph(5).edges
    two = [c for c in itertools.product((0, 1), repeat=5)
           if all(c[i] != c[j] for i in range(5) for j in range(i + 1, 5)
                  if set(edges[i]) & set(edges[j]))]
    assert not two


def test_hardware_efficient_counts():
    a = az.build_hardware_efficient(2, 1)
    assert a.n_params == 2 and a.metadata["cnot_count"] == 1
    assert az.build_hardware_efficient(4, 3).n_params == 12
    x = az.build_hardware_efficient(3, 2, seed=8, rotation="random")
    y = az.build_hardware_efficient(3, 2, seed=8, rotation="random")
    assert x.describe() == y.describe()


def test_ucc_examples():
    a = az.build_ucc_like(4, [{"YZZX": 1.0}])
    assert a.group_sizes() == {0: 1}
    b = az.build_ucc_like(2, [{"XY": 1.0, "YX": 1.0}])
    assert b.group_sizes() == {0: 2} and b.noise_insertions == 3


def test_trotter_error_is_second_order():
    gen = [{"XY": 1.0, "ZY": -1.0}]
    on = az.build_ucc_like(2, gen, trotter=True)
    off = az.build_ucc_like(2, gen, trotter=False)

    def unitary(a, th):
        u = np.eye(4, dtype=complex)
        for layer in a.layers:
            u = az.layer_unitary(layer, [th]) @ u
        return u

    errs = [np.max(np.abs(unitary(on, t) - unitary(off, t))) for t in (1e-2, 1e-3)]
    assert errs[0] / errs[1] == pytest.approx(100, rel=0.05)


def test_noise_limits(rng):
    a = az.build_random(2, 3, rng)
    theta = rng.uniform(-np.pi, np.pi, a.n_params)
    clean = az.evolve(a, theta).matrix
    near = az.evolve(a, theta, noise=NoiseSpec.uniform(2, 1 - 1e-12)).matrix
    np.testing.assert_allclose(near, clean, atol=1e-9)
    dead = az.evolve(a, theta, noise=NoiseSpec.uniform(2, 0.0)).matrix
    np.testing.assert_allclose(dead, np.eye(4) / 4, atol=1e-15)


def test_single_qubit_bloch_vector():
    q, th = 0.9, 0.7
    s = az.evolve(az.single_qubit_rx(), [th], noise=NoiseSpec.uniform(1, q), backend="pauli")
    np.testing.assert_allclose(sv.bloch_vector(s), [0, -q * q * np.sin(th), q * q * np.cos(th)],
                               atol=1e-15)
