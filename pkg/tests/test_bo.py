from fractions import Fraction

import numpy as np
import pytest

from pagl import _kernels
from pagl.buckley_osthus import (
    BOParams,
    AttachmentState,
    attachment_distribution,
    generate_bo,
    generate_bo_chain,
    generate_bo_samples,
    merge_blocks,
)
from pagl.graphs import Graph


def state_after(targets):
    st = AttachmentState()
    for t in targets:
        st.apply_step(t)
    return st


class TestAttachmentDistribution:
    def test_step2_exact_a1(self):
        # after the forced loop: deg(0)=2, denom (a+1)*2-1 = 3
        st = state_after([0])
        assert attachment_distribution(st, Fraction(1)) == [
            Fraction(2, 3),
            Fraction(1, 3),
        ]

    def test_step2_exact_a_half(self):
        # denom = (3/2)*2 - 1 = 2; masses 3/2 and 1/2
        st = state_after([0])
        assert attachment_distribution(st, Fraction(1, 2)) == [
            Fraction(3, 4),
            Fraction(1, 4),
        ]

    def test_sums_to_one_exactly(self):
        st = state_after([0, 0, 1, 2])
        for a in (Fraction(1, 3), Fraction(2), Fraction(7, 5)):
            assert sum(attachment_distribution(st, a)) == 1

    def test_rejects_nonpositive_a(self):
        with pytest.raises(ValueError):
            attachment_distribution(state_after([0]), 0)

    def test_state_tracks_degrees(self):
        st = state_after([0, 0, 1])
        assert st.degrees == [3, 2, 1]
        assert st.excess_list == [0, 0, 1]
        assert sum(st.degrees) == 2 * st.t


class TestChain:
    def test_first_step_is_loop(self):
        g = generate_bo_chain(0.7, 1, seed=0)
        assert g.n == 1
        assert g.edges.tolist() == [[0, 0]]

    def test_edge_k_starts_at_k(self):
        g = generate_bo_chain(0.5, 200, seed=3)
        assert g.edges[:, 0].tolist() == list(range(200))
        assert (g.edges[:, 1] <= g.edges[:, 0]).all()

    def test_step2_frequency_a1(self):
        # P(target 0 at step 2) = 2/3; 2e5 trials, tol ~ 4 standard errors
        hits = sum(
            generate_bo_chain(1.0, 2, seed=k).edges[1, 1] == 0
            for k in range(200_000)
        )
        assert hits / 200_000 == pytest.approx(2 / 3, abs=0.005)

    def test_kernel_variants_identical(self):
        rng = np.random.default_rng(11)
        n = 5000
        r, q = rng.random(n), rng.random(n)
        t_active = np.empty(n, dtype=np.int32)
        t_py = np.empty(n, dtype=np.int32)
        _kernels.chain_step(t_active, 0, r, q, 0.4)
        _kernels.chain_step_py(t_py, 0, r, q, 0.4)
        assert (t_active == t_py).all()

    def test_python_kernel_full_path(self, monkeypatch):
        compiled = generate_bo_chain(0.8, 3000, seed=5)
        monkeypatch.setattr(_kernels, "chain_step", _kernels.chain_step_py)
        assert generate_bo_chain(0.8, 3000, seed=5) == compiled

    def test_bad_args(self):
        with pytest.raises(ValueError):
            generate_bo_chain(0.5, 0, seed=0)
        with pytest.raises(ValueError):
            generate_bo_chain(-1.0, 10, seed=0)


class TestMerge:
    def test_hand_example(self):
        chain = Graph(4, [(0, 0), (1, 0), (2, 1), (3, 2)])
        merged = merge_blocks(chain, 2)
        assert merged.n == 2
        assert merged.edges.tolist() == [[0, 0], [0, 0], [1, 0], [1, 1]]

    def test_m1_is_identity(self):
        g = generate_bo_chain(0.5, 50, seed=1)
        assert merge_blocks(g, 1) == g

    def test_rejects_indivisible(self):
        with pytest.raises(ValueError):
            merge_blocks(Graph(3, [(0, 1)]), 2)


class TestGenerate:
    def test_shape(self):
        g = generate_bo(BOParams(a=0.5, m=3, n=100, seed=2))
        assert g.n == 100
        assert g.num_edges == 300

    def test_deterministic(self):
        p = BOParams(a=0.3, m=2, n=500, seed=9)
        assert generate_bo(p) == generate_bo(p)

    def test_seed_changes_graph(self):
        a = generate_bo(BOParams(a=0.3, m=2, n=500, seed=9))
        b = generate_bo(BOParams(a=0.3, m=2, n=500, seed=10))
        assert a != b

    def test_params_validation(self):
        with pytest.raises(ValueError):
            BOParams(a=0.0, m=1, n=10)
        with pytest.raises(ValueError):
            BOParams(a=0.5, m=0, n=10)
        with pytest.raises(ValueError):
            BOParams(a=0.5, m=1, n=0)

    def test_chain_length_overflow(self):
        with pytest.raises(ValueError):
            BOParams(a=0.5, m=2**16, n=2**16)

    def test_samples_thread_invariant(self):
        p = BOParams(a=0.5, m=2, n=300, seed=4)
        serial = generate_bo_samples(p, 6, threads=1)
        threaded = generate_bo_samples(p, 6, threads=4)
        assert serial == threaded
        assert len({g.edges.tobytes() for g in serial}) == 6
