"""Network validation, connectivity, eigenpairs, and centrality."""

import numpy as np
import pytest

from infospread import netdiff
from infospread.errors import (
    ConvergenceError,
    DimensionError,
    EntryRangeError,
    HorizonError,
    ZeroMatrixError,
)


# -- independent oracles ------------------------------------------------

def closure_connected(w) -> bool:
    """Brute-force strong connectivity via Floyd-Warshall closure."""
    n = len(w)
    reach = [[w[i][j] > 0 or i == j for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                reach[i][j] = reach[i][j] or (reach[i][k] and reach[k][j])
    return all(reach[i][j] for i in range(n) for j in range(n))


def hearing_oracle(w: np.ndarray, T: int) -> np.ndarray:
    """Sum of matrix powers computed independently per term."""
    return sum(np.linalg.matrix_power(w, t) for t in range(1, T + 1))


def is_primitive(w: np.ndarray) -> bool:
    """Wielandt bound: primitive iff the support of w^((n-1)^2 + 1) is full."""
    n = w.shape[0]
    b = (w > 0).astype(np.int64)
    power = np.eye(n, dtype=np.int64)
    for _ in range((n - 1) ** 2 + 1):
        power = np.minimum(power @ b, 1)
    return bool(power.all())


def primitive_networks(count: int, max_n: int = 8):
    """First `count` random strongly-connected primitive networks."""
    nets = []
    seed = 0
    while len(nets) < count:
        seed += 1
        n = 3 + seed % (max_n - 2)
        net = netdiff.generate_random_network(n, 0.6, seed)
        if netdiff.strongly_connected(net) and is_primitive(net.w):
            nets.append(net)
    return nets


# -- validation ---------------------------------------------------------

def test_validate_accepts_boundary_weights():
    net = netdiff.validate_network([[0, 1], [1, 0]])
    assert net.n == 2
    assert net.w[0, 1] == 1.0


def test_validate_accepts_three_cycle():
    net = netdiff.validate_network([[0, 0.5, 0], [0, 0, 0.5], [0.5, 0, 0]])
    assert net.n == 3


def test_validate_rejects_out_of_range_entry():
    with pytest.raises(EntryRangeError):
        netdiff.validate_network([[0, 1.2], [0, 0]])


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), -0.1])
def test_validate_rejects_nonfinite_and_negative(bad):
    with pytest.raises(EntryRangeError):
        netdiff.validate_network([[0, bad], [0, 0]])


def test_validate_rejects_non_square():
    with pytest.raises(DimensionError):
        netdiff.validate_network([[0, 1, 0], [0, 0, 1]])


def test_validate_rejects_empty():
    with pytest.raises(DimensionError):
        netdiff.validate_network(np.zeros((0, 0)))


def test_network_matrix_is_frozen():
    net = netdiff.validate_network([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        net.w[0, 0] = 0.5


# -- strong connectivity ------------------------------------------------

def test_cycle_is_strongly_connected():
    net = netdiff.validate_network([[0, .5, 0], [0, 0, .5], [.5, 0, 0]])
    assert netdiff.strongly_connected(net)


def test_directed_line_is_not_strongly_connected():
    net = netdiff.validate_network([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert not netdiff.strongly_connected(net)


def test_single_node_is_strongly_connected():
    assert netdiff.strongly_connected(netdiff.validate_network([[0]]))


def test_strong_connectivity_matches_closure_exhaustive_n3():
    for mask in range(2 ** 9):
        w = np.array([(mask >> k) & 1 for k in range(9)], dtype=float)
        w = w.reshape(3, 3)
        net = netdiff.validate_network(w)
        assert netdiff.strongly_connected(net) == closure_connected(w.tolist())


@pytest.mark.parametrize("n", [4, 5])
def test_strong_connectivity_matches_closure_random(n):
    rng = np.random.default_rng(n)
    for _ in range(300):
        w = (rng.random((n, n)) < 0.3) * rng.random((n, n))
        net = netdiff.validate_network(w)
        assert netdiff.strongly_connected(net) == closure_connected(w.tolist())


# -- leading eigenpair --------------------------------------------------

def test_symmetric_swap_eigenpair():
    pair = netdiff.leading_eigenpair(netdiff.validate_network([[0, 1], [1, 0]]))
    assert pair.eigenvalue == pytest.approx(1.0, abs=1e-12)
    assert pair.eigenvector == pytest.approx([0.5, 0.5], abs=1e-12)


def test_doubly_stochastic_eigenpair():
    pair = netdiff.leading_eigenpair(
        netdiff.validate_network([[0.5, 0.5], [0.5, 0.5]]))
    assert pair.eigenvalue == pytest.approx(1.0, abs=1e-12)
    assert pair.eigenvector == pytest.approx([0.5, 0.5], abs=1e-12)


def test_random_networks_match_dense_eigensolver():
    for net in primitive_networks(25):
        pair = netdiff.leading_eigenpair(net, tol=1e-12, max_iter=100000)
        oracle = max(abs(np.linalg.eigvals(net.w)))
        assert abs(pair.eigenvalue - oracle) < 1e-8
        assert pair.eigenvector.min() >= -1e-10
        assert pair.eigenvector.sum() == pytest.approx(1.0, abs=1e-12)
        assert pair.residual <= 1e-12


def test_zero_matrix_raises():
    with pytest.raises(ZeroMatrixError):
        netdiff.leading_eigenpair(netdiff.validate_network([[0, 0], [0, 0]]))


def test_periodic_matrix_reports_convergence_error():
    net = netdiff.validate_network([[0, 1], [0.5, 0]])
    with pytest.raises(ConvergenceError) as err:
        netdiff.leading_eigenpair(net, tol=1e-12, max_iter=10000)
    assert err.value.eigenvalue is not None
    assert err.value.residual is not None


def test_nilpotent_matrix_converges_to_zero_eigenvalue():
    pair = netdiff.leading_eigenpair(netdiff.validate_network([[0, 1], [0, 0]]))
    assert pair.eigenvalue == 0.0


# -- hearing matrix and centrality ---------------------------------------

LINE = [[0, 1, 0], [0, 0, 1], [0, 0, 0]]


def test_hearing_line_example():
    net = netdiff.validate_network(LINE)
    expected = [[0, 1, 1], [0, 0, 1], [0, 0, 0]]
    assert netdiff.hearing_matrix(net, 2).tolist() == expected


def test_hearing_horizon_one_is_the_matrix():
    net = netdiff.generate_random_network(5, 0.7, seed=3)
    assert np.array_equal(netdiff.hearing_matrix(net, 1), net.w)


def test_hearing_zero_matrix():
    net = netdiff.validate_network(np.zeros((4, 4)))
    assert not netdiff.hearing_matrix(net, 5).any()


def test_hearing_rejects_bad_horizon():
    net = netdiff.validate_network(LINE)
    for bad in (0, -1, 1.5):
        with pytest.raises(HorizonError):
            netdiff.hearing_matrix(net, bad)


def test_hearing_overflow_reports_term():
    net = netdiff.validate_network(np.ones((2, 2)))
    with pytest.raises(OverflowError) as err:
        netdiff.hearing_matrix(net, 2000)
    assert "t=" in str(err.value)


def test_hearing_telescopes():
    for seed in range(5):
        net = netdiff.generate_random_network(6, 0.5, seed=seed)
        for T in range(1, 6):
            delta = netdiff.hearing_matrix(net, T + 1) - netdiff.hearing_matrix(net, T)
            power = np.linalg.matrix_power(net.w, T + 1)
            assert np.max(np.abs(delta - power)) <= 1e-12


def test_centrality_line_example():
    net = netdiff.validate_network(LINE)
    assert netdiff.diffusion_centrality(net, 2).tolist() == [2, 1, 0]


def test_centrality_horizon_one_is_row_sums_exactly():
    net = netdiff.generate_random_network(7, 0.6, seed=11)
    assert np.array_equal(netdiff.diffusion_centrality(net, 1), net.w.sum(axis=1))


def test_centrality_complete_graph_single_period():
    p = 0.37
    w = np.full((3, 3), p)
    np.fill_diagonal(w, 0.0)
    dc = netdiff.diffusion_centrality(netdiff.validate_network(w), 1)
    assert dc == pytest.approx([2 * p] * 3, rel=1e-15)


def test_centrality_matches_power_oracle():
    rng = np.random.default_rng(0)
    for _ in range(30):
        n = int(rng.integers(2, 9))
        T = int(rng.integers(1, 7))
        net = netdiff.generate_random_network(n, 0.6, int(rng.integers(1 << 30)))
        oracle = hearing_oracle(net.w, T) @ np.ones(n)
        assert np.max(np.abs(netdiff.diffusion_centrality(net, T) - oracle)) <= 1e-10


def test_centrality_report_consistent():
    net = netdiff.generate_random_network(5, 0.8, seed=2)
    report = netdiff.centrality_report(net, 4)
    assert np.array_equal(report.centrality, report.hearing.sum(axis=1))
    assert report.hearing.min() >= 0.0


# -- generator and CSV round trip -----------------------------------------

def test_generator_density_zero_is_empty():
    net = netdiff.generate_random_network(4, 0.0, seed=7)
    assert not net.w.any()


def test_generator_density_one_fills_off_diagonal():
    net = netdiff.generate_random_network(4, 1.0, seed=7)
    off = ~np.eye(4, dtype=bool)
    assert np.all(net.w[off] > 0.0)
    assert np.all(net.w[off] <= 1.0)
    assert not net.w[np.eye(4, dtype=bool)].any()


def test_generator_deterministic():
    a = netdiff.generate_random_network(6, 0.5, seed=123)
    b = netdiff.generate_random_network(6, 0.5, seed=123)
    assert np.array_equal(a.w, b.w)


def test_csv_round_trip(tmp_path):
    net = netdiff.generate_random_network(6, 0.5, seed=9)
    path = tmp_path / "net.csv"
    netdiff.write_network_csv(path, net)
    back = netdiff.read_network_csv(path)
    assert np.array_equal(back.w, net.w)


def test_csv_rejects_ragged_rows(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("0,1\n0\n")
    with pytest.raises(DimensionError):
        netdiff.read_network_csv(path)


def test_csv_rejects_non_numeric(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0,x\n0,0\n")
    with pytest.raises(EntryRangeError):
        netdiff.read_network_csv(path)
