import io

import numpy as np
import pytest

from pagl.graphs import Graph, simplify
from pagl.stats import (
    cumulative_degree,
    cumulative_edges,
    d_nn_profile,
    degree_histogram,
    edge_degree_matrix,
    histogram_from_degrees,
    log_grid,
    rho_surface,
    write_degrees_tsv,
    write_dnn_tsv,
    write_edges_tsv,
)


def path3():
    return simplify(Graph(3, [(0, 1), (1, 2)]))


def random_simple(seed, n=40, rows=250):
    rng = np.random.default_rng(seed)
    return simplify(Graph(n, rng.integers(0, n, size=(rows, 2))))


class TestHistogram:
    def test_path(self):
        h = degree_histogram(path3())
        assert h.as_dict() == {1: 2, 2: 1}
        assert h.n_vertices == 3 and h.isolated == 0

    def test_isolated_bucket(self):
        h = histogram_from_degrees([0, 0, 0])
        assert h.as_dict() == {0: 3}
        assert h.counts == {}

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            histogram_from_degrees([1, -1])

    def test_tail_counts(self):
        t = cumulative_degree(degree_histogram(path3()))
        assert t.as_dict() == {0: 3, 1: 1, 2: 0}
        assert t.at([0, 1, 2, 99]).tolist() == [3, 1, 0, 0]


class TestEdgeDegreeMatrix:
    def test_path_cells(self):
        x = edge_degree_matrix(path3())
        assert x.as_dict() == {(1, 2): 2, (2, 1): 2}
        assert x.value(1, 2) == 2 and x.value(2, 2) == 0

    def test_diagonal_doubled(self):
        # single edge between two degree-1 vertices lands on the diagonal
        x = edge_degree_matrix(simplify(Graph(2, [(0, 1)])))
        assert x.as_dict() == {(1, 1): 2}
        assert x.total_edges == 1

    def test_unordered_cells_halve_diagonal(self):
        x = edge_degree_matrix(simplify(Graph(2, [(0, 1)])))
        hi, lo, w = x.unordered_cells()
        assert (hi.tolist(), lo.tolist(), w.tolist()) == ([1], [1], [1])

    def test_marginal_identity(self):
        # sum_d2 X(d, d2) = d * (#vertices of degree d)
        s = random_simple(0)
        x = edge_degree_matrix(s)
        h = degree_histogram(s).as_dict()
        vals, sums = x.marginals()
        for d, total in zip(vals.tolist(), sums.tolist()):
            assert total == d * h[d]

    def test_total_is_symmetric_sum(self):
        s = random_simple(1)
        x = edge_degree_matrix(s)
        assert x.total_edges == s.num_edges


class TestTailEdgeCounts:
    def test_path_values(self):
        t = cumulative_edges(edge_degree_matrix(path3()))
        assert int(t.at(0, 0)) == 2
        assert int(t.at(1, 0)) == 2
        assert int(t.at(0, 1)) == 2  # symmetric in the arguments
        assert int(t.at(1, 1)) == 0

    def test_rho_at_degree_pairs(self):
        h = cumulative_degree(degree_histogram(path3()))
        t = cumulative_edges(edge_degree_matrix(path3()))
        assert t.at(0, 0) / (h.at(0) * h.at(0)) == pytest.approx(2 / 9)
        assert t.at(1, 0) / (h.at(1) * h.at(0)) == pytest.approx(2 / 3)

    def test_brute_force_identity(self):
        s = random_simple(2)
        x = edge_degree_matrix(s)
        t = cumulative_edges(x)
        cells = x.as_dict()
        for d1 in range(0, 12, 3):
            for d2 in range(0, 12, 3):
                brute = sum(
                    w
                    for (a, b), w in cells.items()
                    if a >= b and max(a, b) > max(d1, d2) and min(a, b) > min(d1, d2)
                )
                assert int(t.at(d1, d2)) == brute


class TestLogGrid:
    def test_powers_of_two(self):
        assert log_grid(2.0, 20).points.tolist() == [2, 4, 8, 16]

    def test_dense_small(self):
        assert log_grid(1.01, 3).points.tolist() == [1, 2, 3]

    def test_strictly_increasing_capped(self):
        g = log_grid(1.01, 2500)
        p = g.points
        assert (np.diff(p) > 0).all()
        assert p[0] == 1 and p[-1] <= 2500

    def test_alpha_guard(self):
        with pytest.raises(ValueError):
            log_grid(1.0, 100)


class TestRhoSurface:
    def test_path_surface(self):
        s = path3()
        grid = log_grid(1.5, 2)  # points [1, 2]
        surf = rho_surface(degree_histogram(s), edge_degree_matrix(s), grid)
        assert surf.cum_deg.tolist() == [1, 0]
        assert surf.cum_edges.tolist() == [[0, 0], [0, 0]]
        assert surf.x_exact[1, 0] == 2 and surf.x_exact[0, 1] == 2
        assert surf.rho[0, 0] == 0.0
        assert surf.defined().tolist() == [[True, False], [False, False]]

    def test_matches_tail_evaluator(self):
        s = random_simple(3)
        h = degree_histogram(s)
        x = edge_degree_matrix(s)
        grid = log_grid(1.2, int(np.diff(s.indptr).max()))
        surf = rho_surface(h, x, grid)
        t = cumulative_edges(x)
        pts = grid.points
        expect = t.at(pts[:, None], pts[None, :])
        assert (surf.cum_edges == expect).all()
        assert (surf.cum_deg == cumulative_degree(h).at(pts)).all()


class TestNeighborDegree:
    def test_path_profile(self):
        p = d_nn_profile(edge_degree_matrix(path3()))
        assert p.as_dict() == {1: 2.0, 2: 1.0}

    def test_handshake_identity(self):
        # dnn(d) * rowsum(d), summed over d, recovers sum of d2*X cells
        s = random_simple(4)
        x = edge_degree_matrix(s)
        p = d_nn_profile(x)
        _, rowsums = x.marginals()
        assert float((p.dnn * rowsums).sum()) == pytest.approx(
            float((x.d2 * x.x).sum())
        )


class TestEmitters:
    def test_degrees_tsv(self):
        buf = io.StringIO()
        write_degrees_tsv(degree_histogram(path3()), buf)
        assert buf.getvalue() == "d\tcount\tcumulative\n1\t2\t1\n2\t1\t0\n"

    def test_edges_tsv(self):
        s = path3()
        surf = rho_surface(
            degree_histogram(s), edge_degree_matrix(s), log_grid(1.5, 2)
        )
        buf = io.StringIO()
        write_edges_tsv(surf, buf)
        assert buf.getvalue() == "d1\td2\tX\tXcum\trho\n1\t1\t0\t0\t0.0\n"

    def test_dnn_tsv(self):
        buf = io.StringIO()
        write_dnn_tsv(d_nn_profile(edge_degree_matrix(path3())), buf)
        assert buf.getvalue() == "d\tdnn\n1\t2.0\n2\t1.0\n"

    def test_path_sink(self, tmp_path):
        target = tmp_path / "deg.tsv"
        write_degrees_tsv(degree_histogram(path3()), target)
        assert target.read_text().startswith("d\tcount\tcumulative\n")
