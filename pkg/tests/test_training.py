import math

import numpy as np
import pytest

from sg2v.errors import ArgumentError, ConfigError
from sg2v.graphs import GraphDataset
from sg2v.synthetic import make_two_family_corpus, random_labeled_graph
from sg2v.training import (
    EmbeddingModel,
    TrainingConfig,
    init_model,
    load_embeddings,
    nsg_loss_and_grad,
    radial_context,
    radial_skipgram_step,
    sample_negatives,
    save_embeddings,
    train,
)
from sg2v.wl import build_subgraph_vocab


def p3_vocab(p3):
    return build_subgraph_vocab(GraphDataset.from_graphs("p3", [p3]), 1)


class TestRadialContext:
    def test_middle_node_degree_one(self, p3, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)
        ctx = radial_context(1, 1, p3, 1, vocab)
        named = sorted(vocab.canonicals[i] for i in ctx)
        assert named == ["A", "A", "A(B)", "A(B)"]

    def test_end_node_degree_zero(self, p3, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)
        ctx = radial_context(0, 0, p3, 1, vocab)
        named = sorted(vocab.canonicals[i] for i in ctx)
        assert named == ["B", "B(A,A)"]

    def test_isolated_node(self, single_node_a):
        ds = GraphDataset.from_graphs("k1", [single_node_a])
        vocab = build_subgraph_vocab(ds, 2)
        for d in range(3):
            assert radial_context(0, d, single_node_a, 2, vocab) == []

    def test_degree_out_of_range(self, p3, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)
        with pytest.raises(ArgumentError):
            radial_context(0, 2, p3, 1, vocab)

    def test_degree_bounds_property(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            g = random_labeled_graph(rng)
            ds = GraphDataset.from_graphs("r", [g])
            D = int(rng.integers(0, 4))
            vocab = build_subgraph_vocab(ds, D)
            for v in g.nodes:
                for d in range(D + 1):
                    for sid in radial_context(v, d, g, D, vocab):
                        allowed = {dd for dd in (d - 1, d, d + 1) if 0 <= dd <= D}
                        assert int(vocab.degrees[sid]) in allowed


class TestSampleNegatives:
    def test_zero_k(self, p3, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)
        assert sample_negatives(vocab, [0], 1, 0, np.random.default_rng(0)) == []

    def test_vocab_of_one(self, single_node_a):
        ds = GraphDataset.from_graphs("k1", [single_node_a])
        vocab = build_subgraph_vocab(ds, 0)
        assert sample_negatives(vocab, [], 0, 5, np.random.default_rng(0)) == []

    def test_only_one_eligible(self, p3, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)  # 4 entries
        got = sample_negatives(vocab, [1, 2], 0, 10, np.random.default_rng(0))
        assert got == [3]

    def test_exclusion_exhaustive_small_vocabs(self):
        rng = np.random.default_rng(2)
        graphs = [random_labeled_graph(rng, max_nodes=6, graph_id=i) for i in range(4)]
        ds = GraphDataset.from_graphs("many", graphs)
        vocab = build_subgraph_vocab(ds, 1)
        assert len(vocab) <= 50
        for trial in range(200):
            target = int(rng.integers(len(vocab)))
            ctx = [int(rng.integers(len(vocab))) for _ in range(int(rng.integers(0, 6)))]
            negs = sample_negatives(vocab, ctx, target, 5, rng)
            assert len(negs) == len(set(negs))
            assert not (set(negs) & (set(ctx) | {target}))

    def test_distribution_uses_power(self, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)
        cdf1 = vocab.noise_cdf(0.75)
        cdf2 = vocab.noise_cdf(1.0)
        assert cdf1.shape == cdf2.shape == (4,)
        assert not np.allclose(cdf1, cdf2)


class TestLossAndGrad:
    def _model(self, vocab_size=6, dim=5, seed=0, zero_output=True):
        rng = np.random.default_rng(seed)
        cfg = TrainingConfig(max_degree=1, dim=dim, neg_count=3)
        inp = rng.normal(scale=0.5, size=(vocab_size, dim))
        out = np.zeros((vocab_size, dim)) if zero_output else rng.normal(
            scale=0.5, size=(vocab_size, dim)
        )
        return EmbeddingModel(input=inp, output=out, vocab=None, config=cfg)

    def test_zero_output_gives_log2_per_term(self):
        model = self._model()
        k = 3
        loss, grads = nsg_loss_and_grad(model, 0, 1, [2, 3, 4][:k])
        assert loss == pytest.approx((1 + k) * math.log(2), rel=1e-12)
        # positive-pair gradient pushes the context row toward the target
        assert np.allclose(grads.context, -0.5 * model.input[0])

    def test_scalar_closed_form(self):
        cfg = TrainingConfig(max_degree=0, dim=1, neg_count=0)
        model = EmbeddingModel(
            input=np.array([[1.0]]), output=np.array([[1.0]]), vocab=None, config=cfg
        )
        loss, _ = nsg_loss_and_grad(model, 0, 0, [])
        assert loss == pytest.approx(math.log(1 + math.exp(-1)), rel=1e-12)

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(7)
        eps = 1e-4
        for _ in range(100):
            dim = int(rng.integers(2, 7))
            size = int(rng.integers(4, 9))
            model = EmbeddingModel(
                input=rng.normal(scale=0.7, size=(size, dim)),
                output=rng.normal(scale=0.7, size=(size, dim)),
                vocab=None,
                config=TrainingConfig(max_degree=1, dim=dim),
            )
            ids = rng.choice(size, size=4, replace=False)
            target, ctx, negs = int(ids[0]), int(ids[1]), [int(ids[2]), int(ids[3])]
            _, grads = nsg_loss_and_grad(model, target, ctx, negs)

            def loss_at(matrix, row, col, delta, which):
                saved = matrix[row, col]
                matrix[row, col] = saved + delta
                value, _ = nsg_loss_and_grad(model, target, ctx, negs)
                matrix[row, col] = saved
                return value

            checks = [(model.input, target, grads.target)]
            checks.append((model.output, ctx, grads.context))
            for pos, neg_id in enumerate(negs):
                checks.append((model.output, neg_id, grads.negatives[pos]))
            for matrix, row, analytic in checks:
                numeric = np.array(
                    [
                        (loss_at(matrix, row, c, eps, None) - loss_at(matrix, row, c, -eps, None))
                        / (2 * eps)
                        for c in range(dim)
                    ]
                )
                denom = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12)
                assert np.linalg.norm(analytic - numeric) / denom <= 1e-4


class TestSkipgramStep:
    def test_empty_context_is_noop(self, p3, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)
        cfg = TrainingConfig(max_degree=1, dim=4, neg_count=2, seed=0)
        model = init_model(vocab, cfg, np.random.default_rng(0))
        before = model.input.copy()
        loss = radial_skipgram_step(model, 0, [], 0.1, np.random.default_rng(1))
        assert loss == 0.0
        assert np.array_equal(model.input, before)

    def test_first_step_from_zero_output(self, p3, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)
        cfg = TrainingConfig(max_degree=1, dim=4, neg_count=2, seed=0)
        model = init_model(vocab, cfg, np.random.default_rng(0))
        loss = radial_skipgram_step(model, 0, [2], 0.1, np.random.default_rng(1))
        assert loss == pytest.approx(3 * math.log(2), rel=1e-9)
        assert np.any(model.output[2] != 0.0)

    def test_repeat_with_same_rng_is_bitwise_identical(self, p3, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)
        cfg = TrainingConfig(max_degree=1, dim=4, neg_count=2, seed=0)
        results = []
        for _ in range(2):
            model = init_model(vocab, cfg, np.random.default_rng(3))
            radial_skipgram_step(model, 0, [1, 2, 2], 0.05, np.random.default_rng(9))
            results.append((model.input.copy(), model.output.copy()))
        assert np.array_equal(results[0][0], results[1][0])
        assert np.array_equal(results[0][1], results[1][1])

    def test_bad_learning_rate(self, p3, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)
        cfg = TrainingConfig(max_degree=1, dim=4)
        model = init_model(vocab, cfg, np.random.default_rng(0))
        with pytest.raises(ArgumentError):
            radial_skipgram_step(model, 0, [1], 0.0, np.random.default_rng(0))


class TestTrain:
    def test_no_neighbors_means_no_updates(self, single_node_a):
        ds = GraphDataset.from_graphs("k1", [single_node_a])
        vocab = build_subgraph_vocab(ds, 0)
        cfg = TrainingConfig(max_degree=0, dim=6, epochs=1, seed=5)
        model = train(ds, vocab, cfg)
        expected = (np.random.default_rng(5).random((1, 6)) - 0.5) / 6
        assert np.array_equal(model.input, expected)
        assert not np.any(model.output)
        assert model.epoch_losses == [0.0]

    def test_deterministic_bitwise(self):
        ds = make_two_family_corpus(per_family=4)
        vocab = build_subgraph_vocab(ds, 1)
        cfg = TrainingConfig(max_degree=1, dim=8, epochs=3, seed=13)
        a = train(ds, vocab, cfg)
        b = train(ds, vocab, cfg)
        assert np.array_equal(a.input, b.input)
        assert np.array_equal(a.output, b.output)
        assert a.epoch_losses == b.epoch_losses

    def test_loss_decreases(self):
        ds = make_two_family_corpus(per_family=6)
        vocab = build_subgraph_vocab(ds, 1)
        cfg = TrainingConfig(max_degree=1, dim=8, epochs=10, seed=0)
        model = train(ds, vocab, cfg)
        assert model.epoch_losses[-1] < model.epoch_losses[0]
        assert np.isfinite(model.input).all() and np.isfinite(model.output).all()

    def test_degree_mismatch(self, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)
        cfg = TrainingConfig(max_degree=2, dim=4, epochs=1)
        with pytest.raises(ConfigError):
            train(p3_dataset, vocab, cfg)

    def test_cooccurring_pairs_more_similar_than_cross_family(self):
        ds = make_two_family_corpus(per_family=10)
        vocab = build_subgraph_vocab(ds, 1)
        cfg = TrainingConfig(max_degree=1, dim=8, epochs=20, seed=1)
        model = train(ds, vocab, cfg)

        cooccurring = set()
        family_of: dict[int, str] = {}
        for g in ds.graphs:
            from sg2v.wl import encoding_id_table

            table = encoding_id_table(g, vocab)
            for d, row in enumerate(table):
                for v, target in enumerate(row):
                    family_of[target] = g.class_label
                    for c in radial_context(v, d, g, 1, vocab):
                        if c != target:
                            cooccurring.add((min(target, c), max(target, c)))

        def cos(a, b):
            return float(
                model.input[a] @ model.input[b]
                / (np.linalg.norm(model.input[a]) * np.linalg.norm(model.input[b]))
            )

        co_mean = np.mean([cos(a, b) for a, b in cooccurring])
        stars = [i for i, fam in family_of.items() if fam == "star"]
        paths = [i for i, fam in family_of.items() if fam == "path"]
        cross_mean = np.mean([cos(a, b) for a in stars for b in paths])
        assert co_mean > cross_mean

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            TrainingConfig(dim=0)
        with pytest.raises(ConfigError):
            TrainingConfig(epochs=0)
        with pytest.raises(ConfigError):
            TrainingConfig(lr_initial=0.01, lr_min=0.1)
        with pytest.raises(ConfigError):
            TrainingConfig(neg_count=-1)


class TestEmbeddingFile:
    def test_round_trip_bitwise(self, tmp_path, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)
        cfg = TrainingConfig(max_degree=1, dim=5, epochs=2, seed=2)
        model = train(p3_dataset, vocab, cfg)
        path = tmp_path / "emb.txt"
        save_embeddings(model, str(path))
        again = load_embeddings(str(path))
        assert np.array_equal(model.input, again)

    def test_header_line(self, tmp_path, p3_dataset):
        vocab = build_subgraph_vocab(p3_dataset, 1)
        cfg = TrainingConfig(max_degree=1, dim=5, epochs=1, seed=2)
        model = train(p3_dataset, vocab, cfg)
        path = tmp_path / "emb.txt"
        save_embeddings(model, str(path))
        first = path.read_text().splitlines()[0]
        assert first == "4 5"
