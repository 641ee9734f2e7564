import numpy as np
import pytest

from netgate import design
from netgate.graph import decompose, from_edges

from conftest import path_graph


def ring_graph(n):
    u = np.arange(n)
    return from_edges(u, (u + 1) % n, n)


def test_draw_single_cluster_shares_one_bit(toy_graph):
    part = decompose(toy_graph, np.zeros(9, dtype=int))
    d = design.draw(part, 0.5, np.random.default_rng(0))
    assert len(set(d.unit_bits.tolist())) == 1
    assert d.unit_bits[0] == int(d.cluster_bits[0])


def test_draw_deterministic_for_fixed_seed():
    part = decompose(ring_graph(95), np.arange(95))
    a = design.draw(part, 0.1, np.random.default_rng(42))
    b = design.draw(part, 0.1, np.random.default_rng(42))
    assert np.array_equal(a.cluster_bits, b.cluster_bits)


def test_draw_rejects_bad_proportion(toy_partition):
    for p in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            design.draw(toy_partition, p, np.random.default_rng(0))


def test_draw_treated_fraction_concentrates():
    # binomial concentration: mean of 10k draws of (sum t_k)/K around p
    part = decompose(ring_graph(95), np.arange(95))
    rng = np.random.default_rng(7)
    fractions = [design.draw(part, 0.3, rng).cluster_bits.mean() for _ in range(10_000)]
    assert 0.29 <= np.mean(fractions) <= 0.31


def test_exposure_under_global_treatment(toy_graph):
    z = np.ones(9, dtype=np.int8)
    for i in range(9):
        assert design.exposure(toy_graph, z, i, 1) == 1
        assert design.exposure(toy_graph, z, i, 0) == 0


def test_exposure_tri_ring_boundary(toy_graph, toy_partition):
    # cluster A = {0,1,2} treated, B and C control
    z = design.expand(toy_partition, np.array([True, False, False]))
    assert design.exposure(toy_graph, z, 1, 1) == 1  # interior of A
    assert design.exposure(toy_graph, z, 2, 1) == 0  # neighbor 3 is control


def test_exposure_isolated_node_uses_own_bit():
    g = from_edges(np.array([0]), np.array([1]), 3)  # node 2 isolated
    z = np.array([1, 1, 0])
    assert design.exposure(g, z, 2, 0) == 1
    assert design.exposure(g, z, 2, 1) == 0


def test_interior_exposure_equals_own_bit(toy_graph, toy_partition):
    rng = np.random.default_rng(3)
    for _ in range(50):
        d = design.draw(toy_partition, 0.4, rng)
        for i in toy_partition.interior_nodes():
            assert design.exposure(toy_graph, d.unit_bits, i, 1) == (d.unit_bits[i] == 1)
            assert design.exposure(toy_graph, d.unit_bits, i, 0) == (d.unit_bits[i] == 0)


def test_exposure_vector_matches_scalar(toy_graph, toy_partition):
    rng = np.random.default_rng(5)
    d = design.draw(toy_partition, 0.5, rng)
    for level in (0, 1):
        vec = design.exposure_vector(toy_graph, d.unit_bits, level)
        scalars = [design.exposure(toy_graph, d.unit_bits, i, level) for i in range(9)]
        assert vec.tolist() == scalars


def test_exposure_probability_values(toy_partition):
    assert design.exposure_probability(toy_partition, 0.1, 1, 1) == pytest.approx(0.1)
    assert design.exposure_probability(toy_partition, 0.5, 0, 1) == pytest.approx(0.25)
    assert design.exposure_probability(toy_partition, 0.3, 0, 0) == pytest.approx(0.49)


def test_exposure_probability_matches_enumeration(toy_graph, toy_partition):
    # exact identity: sum over atoms of exposure * probability == p^c / (1-p)^c
    for p in (0.2, 0.5, 0.77):
        freq1 = np.zeros(9)
        freq0 = np.zeros(9)
        for atom in design.enumerate_assignments(toy_partition, p):
            z = design.expand(toy_partition, atom.cluster_bits)
            freq1 += atom.probability * design.exposure_vector(toy_graph, z, 1)
            freq0 += atom.probability * design.exposure_vector(toy_graph, z, 0)
        for i in range(9):
            assert freq1[i] == pytest.approx(
                design.exposure_probability(toy_partition, p, i, 1), abs=1e-12
            )
            assert freq0[i] == pytest.approx(
                design.exposure_probability(toy_partition, p, i, 0), abs=1e-12
            )


def test_empirical_exposure_frequency_converges(toy_graph, toy_partition):
    m = 20_000
    rng = np.random.default_rng(11)
    p = 0.4
    counts = np.zeros(9)
    for _ in range(m):
        d = design.draw(toy_partition, p, rng)
        counts += design.exposure_vector(toy_graph, d.unit_bits, 1)
    for i in range(9):
        q = design.exposure_probability(toy_partition, p, i, 1)
        assert abs(counts[i] / m - q) <= 4 * np.sqrt(q * (1 - q) / m)


def test_enumerate_single_cluster():
    part = decompose(ring_graph(3), np.zeros(3, dtype=int))
    atoms = list(design.enumerate_assignments(part, 0.3))
    assert len(atoms) == 2
    assert atoms[0].cluster_bits.tolist() == [False]
    assert atoms[0].probability == pytest.approx(0.7)
    assert atoms[1].probability == pytest.approx(0.3)


def test_enumerate_uniform_at_half(toy_partition):
    atoms = list(design.enumerate_assignments(toy_partition, 0.5))
    assert len(atoms) == 8
    assert all(a.probability == pytest.approx(0.125) for a in atoms)


def test_enumerate_all_treated_probability(toy_partition):
    atoms = {tuple(a.cluster_bits.tolist()): a.probability for a in design.enumerate_assignments(toy_partition, 0.1)}
    assert atoms[(True, True, True)] == pytest.approx(0.001)


def test_enumerate_probabilities_sum_to_one(toy_partition):
    total = sum(a.probability for a in design.enumerate_assignments(toy_partition, 0.23))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_enumerate_guard():
    part = decompose(path_graph(21), np.arange(21))
    with pytest.raises(ValueError):
        next(design.enumerate_assignments(part, 0.5))
