import numpy as np
import pytest

from config.errors import DomainError
from interactions.schemas import InteractionDataset
from models.bpr import TripleBatch, bpr_grad, bpr_loss, bpr_objective
from models.params import ModelKind, ModelParams, init_params, load_checkpoint, save_checkpoint
from models.scoring import normalized_adjacency, propagate_lightgcn, score, score_users
from tests.helpers import perturbed


def numeric_grad(params, graph, triples, h=1e-6):
    grads = {}
    for table in ("user_emb", "item_emb"):
        arr = getattr(params, table)
        g = np.zeros_like(arr)
        for r in range(arr.shape[0]):
            for c in range(arr.shape[1]):
                up = bpr_objective(perturbed(params, table, r, c, h), graph, triples)
                down = bpr_objective(perturbed(params, table, r, c, -h), graph, triples)
                g[r, c] = (up - down) / (2 * h)
        grads[table] = g
    return grads["user_emb"], grads["item_emb"]


def random_triples(rng, graph, n, zero_some=True):
    users = rng.integers(graph.num_users, size=n)
    pos = rng.integers(graph.num_items, size=n)
    neg = rng.integers(graph.num_items, size=n)
    w = rng.random(n)
    if zero_some:
        w[rng.random(n) < 0.2] = 0.0
    return TripleBatch(users, pos, neg, w)


class TestInitParams:

    def test_shapes(self):
        p = init_params(2, 3, 4, ModelKind.MF, seed=1)
        assert p.user_emb.shape == (2, 4) and p.item_emb.shape == (3, 4)

    def test_deterministic(self):
        a = init_params(5, 7, 8, seed=3)
        b = init_params(5, 7, 8, seed=3)
        np.testing.assert_array_equal(a.user_emb, b.user_emb)
        np.testing.assert_array_equal(a.item_emb, b.item_emb)

    def test_mean_and_std(self):
        p = init_params(1000, 10, 100, seed=0)
        assert abs(p.user_emb.mean()) < 4 * 0.1 / np.sqrt(1e5)
        assert p.user_emb.std() == pytest.approx(0.1, rel=0.02)

    def test_mf_forces_zero_layers(self):
        assert init_params(2, 2, 2, ModelKind.MF, layers=3).layers == 0


class TestScoring:

    def test_mf_dot(self):
        p = ModelParams(user_emb=np.array([[1.0, 2.0]]), item_emb=np.array([[3.0, 4.0]]))
        assert score(p, None, 0, 0) == 11.0

    def test_out_of_range(self):
        p = init_params(2, 2, 2)
        with pytest.raises(DomainError):
            score(p, None, 2, 0)
        with pytest.raises(DomainError):
            score(p, None, 0, -1)

    def test_lightgcn_zero_layers_is_mf(self, small_graph):
        mf = init_params(4, 6, 3, ModelKind.MF, seed=2)
        gcn = ModelParams(mf.user_emb, mf.item_emb, kind=ModelKind.LIGHTGCN, layers=0)
        np.testing.assert_array_equal(score_users(mf, None, [0, 1, 2, 3]), score_users(gcn, small_graph, [0, 1, 2, 3]))
        out = propagate_lightgcn(gcn, small_graph)
        np.testing.assert_array_equal(out.user_out, gcn.user_emb)

    def test_single_edge(self):
        graph = InteractionDataset.from_pairs([(0, 0)], num_users=1, num_items=1)
        p = ModelParams(np.array([[1.0, 0.0]]), np.array([[0.0, 3.0]]), kind=ModelKind.LIGHTGCN, layers=1)
        assert normalized_adjacency(graph).toarray()[0, 1] == pytest.approx(1.0)
        out = propagate_lightgcn(p, graph)
        np.testing.assert_allclose(out.user_out[0], [0.5, 1.5])

    def test_regular_graph_row_sums(self):
        graph = InteractionDataset.from_pairs([(0, 0), (0, 1), (1, 0), (1, 1)])
        np.testing.assert_allclose(np.asarray(normalized_adjacency(graph).sum(axis=1)).ravel(), 1.0)

    def test_isolated_node_has_zero_row(self):
        graph = InteractionDataset.from_pairs([(0, 0)], num_users=2, num_items=2)
        adj = normalized_adjacency(graph).toarray()
        assert not adj[1].any() and not adj[3].any()

    def test_dense_matrix_power_oracle(self, rng):
        graph = InteractionDataset.from_pairs([(0, 0), (0, 1), (1, 1)], num_users=2, num_items=2)
        p = ModelParams(rng.normal(size=(2, 3)), rng.normal(size=(2, 3)), kind=ModelKind.LIGHTGCN, layers=2)

        a = np.zeros((4, 4))
        for u, i in graph:
            a[u, 2 + i] = a[2 + i, u] = 1.0
        d = np.diag(1.0 / np.sqrt(a.sum(axis=1)))
        a_hat = d @ a @ d
        e0 = np.vstack([p.user_emb, p.item_emb])
        expected = (e0 + a_hat @ e0 + a_hat @ a_hat @ e0) / 3.0

        out = propagate_lightgcn(p, graph)
        np.testing.assert_allclose(out.user_out, expected[:2], atol=1e-12)
        np.testing.assert_allclose(out.item_out, expected[2:], atol=1e-12)
        s = score(p, graph, 1, 0)
        assert s == pytest.approx(float(expected[1] @ expected[2]))

    @pytest.mark.parametrize("layers", [1, 2, 3])
    def test_propagation_is_linear(self, small_graph, rng, layers):
        def propagated(user_emb, item_emb):
            p = ModelParams(user_emb, item_emb, kind=ModelKind.LIGHTGCN, layers=layers)
            out = propagate_lightgcn(p, small_graph)
            return np.vstack([out.user_out, out.item_out])

        ux, ix = rng.normal(size=(4, 3)), rng.normal(size=(6, 3))
        uy, iy = rng.normal(size=(4, 3)), rng.normal(size=(6, 3))
        a, b = 2.5, -0.75
        np.testing.assert_allclose(
            propagated(a * ux + b * uy, a * ix + b * iy),
            a * propagated(ux, ix) + b * propagated(uy, iy),
            atol=1e-12,
        )


class TestBprLoss:

    def test_equal_scores(self):
        assert bpr_loss(0.3, 0.3) == pytest.approx(np.log(2.0))

    def test_unit_margin(self):
        assert bpr_loss(1.0, 0.0) == pytest.approx(0.313262, abs=1e-6)

    def test_extremes_stay_finite(self):
        assert bpr_loss(1000.0, 0.0) == pytest.approx(0.0, abs=1e-12)
        assert bpr_loss(0.0, 1000.0) == pytest.approx(1000.0)

    def test_swap_identity(self, rng):
        pos, neg = rng.normal(scale=5.0, size=500), rng.normal(scale=5.0, size=500)
        np.testing.assert_allclose(bpr_loss(pos, neg) - bpr_loss(neg, pos), neg - pos, atol=1e-12)


class TestBprGrad:

    def test_hand_example(self):
        p = ModelParams(np.array([[1.0, 0.0]]), np.array([[0.0, 1.0], [0.0, 0.0]]))
        gu, gi = bpr_grad(p, None, [(0, 0, 1, 1.0)]).dense(1, 2)
        np.testing.assert_allclose(gu[0], [0.0, -0.5])
        np.testing.assert_allclose(gi[0], [-0.5, 0.0])
        np.testing.assert_allclose(gi[1], [0.5, 0.0])

    def test_zero_weights(self, rng):
        p = init_params(3, 4, 2, seed=0, l2=0.1)
        assert bpr_grad(p, None, [(0, 1, 2, 0.0), (1, 0, 3, 0.0)]).is_zero()

    def test_untouched_rows_are_zero(self):
        p = init_params(5, 8, 3, seed=0, l2=0.01)
        gu, gi = bpr_grad(p, None, [(1, 2, 5, 1.0)]).dense(5, 8)
        assert not np.delete(gu, 1, axis=0).any()
        assert not np.delete(gi, [2, 5], axis=0).any()

    def test_mf_matches_finite_differences(self, small_graph):
        rng = np.random.default_rng(0)
        for _ in range(50):
            p = ModelParams(rng.normal(size=(4, 3)), rng.normal(size=(6, 3)), l2=rng.choice([0.0, 0.05]))
            triples = random_triples(rng, small_graph, 6)
            if not np.any(triples.weights > 0):
                triples.weights[0] = 1.0
            gu, gi = bpr_grad(p, None, triples).dense(4, 6)
            nu, ni = numeric_grad(p, None, triples)
            np.testing.assert_allclose(gu, nu, rtol=1e-4, atol=1e-8)
            np.testing.assert_allclose(gi, ni, rtol=1e-4, atol=1e-8)

    @pytest.mark.parametrize("layers", [1, 2])
    def test_lightgcn_matches_finite_differences(self, small_graph, layers):
        rng = np.random.default_rng(layers)
        for _ in range(25):
            p = ModelParams(rng.normal(size=(4, 3)), rng.normal(size=(6, 3)),
                            kind=ModelKind.LIGHTGCN, layers=layers, l2=0.01)
            triples = random_triples(rng, small_graph, 5, zero_some=False)
            gu, gi = bpr_grad(p, small_graph, triples).dense(4, 6)
            nu, ni = numeric_grad(p, small_graph, triples)
            np.testing.assert_allclose(gu, nu, rtol=1e-4, atol=1e-8)
            np.testing.assert_allclose(gi, ni, rtol=1e-4, atol=1e-8)

    def test_denominator_scales_data_term(self):
        p = init_params(3, 4, 2, seed=1)
        triples = [(0, 1, 2, 1.0), (1, 0, 3, 1.0)]
        mean = bpr_grad(p, None, triples).dense(3, 4)
        summed = bpr_grad(p, None, triples, denominator=1.0).dense(3, 4)
        np.testing.assert_allclose(summed[0], 2.0 * mean[0])


class TestCheckpoint:

    def test_save_and_load(self, tmp_path):
        p = init_params(3, 5, 4, ModelKind.LIGHTGCN, seed=2, layers=2, l2=1e-3)
        path = save_checkpoint(p, str(tmp_path / "ckpt.npz"))
        q = load_checkpoint(path)
        assert q.kind == ModelKind.LIGHTGCN and q.layers == 2 and q.l2 == pytest.approx(1e-3)
        np.testing.assert_array_equal(p.user_emb, q.user_emb)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DomainError):
            load_checkpoint(str(tmp_path / "nope.npz"))

    def test_non_finite_rejected(self, tmp_path):
        p = init_params(3, 5, 4, seed=1)
        p.item_emb[2, 1] = np.nan
        path = save_checkpoint(p, str(tmp_path / "bad.npz"))
        with pytest.raises(DomainError):
            load_checkpoint(path)
