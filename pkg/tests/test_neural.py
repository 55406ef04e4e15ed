"""
Tests for the numpy neural kernel.
"""
import math

import numpy as np
import pytest

from emoforge.errors import DataFormatError, DimensionError, NumericError, StateError, TrainingError
from emoforge.neural import (AdamState, ContextualEncoder, Dataset, EarlyStopping, LayerSpec, ModelGraph,
                             adam_step, build_hybrid, build_indexer, classifier_specs, encode_contextual,
                             grad_check, hybrid_forward, predict_proba, softmax, softmax_cross_entropy,
                             train_supervised, weighted_cross_entropy)
from emoforge.neural.encoder import encoder_specs
from emoforge.schemas.schema import EncoderConfig, HybridConfig, TrainConfig

pytestmark = pytest.mark.unit

DOCS = [["ক", "খ", "গ"], ["খ", "গ"], ["ঘ", "ক"], ["চ", "ছ", "জ", "ক"], ["ঘ"], ["ছ", "জ"]]
LABELS = np.array([0, 1, 2, 3, 4, 5])


def _graph(*specs, seed=0):
    return ModelGraph(list(specs), seed=seed, dtype=np.float64)


def _separable(n=16, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 2))
    X[:, 0] = np.where(np.arange(n) % 2 == 0, 1.0, -1.0) * (1.0 + rng.random(n))
    y = (X[:, 0] > 0).astype(np.int64)
    return X, y


class TestLayers:
    """Test individual layer behaviour."""

    def test_dense_identity(self):
        graph = _graph(LayerSpec(kind="dense", input_dim=3, units=3))
        graph.set_params({"0.W": np.eye(3), "0.b": np.zeros(3)})
        x = np.array([[1.0, -2.0, 3.0]])
        assert np.array_equal(graph.forward(x)[0], x)

    def test_conv_width_one_identity(self):
        graph = _graph(LayerSpec(kind="conv1d", input_dim=2, filters=2, kernel_width=1))
        graph.set_params({"0.W": np.eye(2), "0.b": np.zeros(2)})
        x = np.arange(12, dtype=float).reshape(2, 3, 2)
        assert np.array_equal(graph.forward(x)[0], x)

    @pytest.mark.parametrize("mode", ["train", "infer"])
    def test_dropout_zero_rate(self, mode):
        graph = _graph(LayerSpec(kind="dropout", rate=0.0))
        x = np.ones((2, 3))
        out, _ = graph.forward(x, mode=mode, rng=np.random.default_rng(0))
        assert np.array_equal(out, x)

    def test_dropout_infer_is_identity(self):
        graph = _graph(LayerSpec(kind="dropout", rate=0.5))
        x = np.ones((4, 4))
        assert np.array_equal(graph.forward(x, mode="infer")[0], x)

    def test_dense_backward(self):
        graph = _graph(LayerSpec(kind="dense", input_dim=2, units=3))
        x = np.array([[1.0, 2.0]])
        g = np.array([[0.5, -1.0, 2.0]])
        graph.forward(x, mode="train")
        grads = graph.backward(g)
        assert np.allclose(grads["0.W"], x.T @ g)
        assert np.allclose(grads["0.b"], g[0])

    def test_backward_needs_train_forward(self):
        graph = _graph(LayerSpec(kind="dense", input_dim=2, units=2))
        graph.forward(np.ones((1, 2)), mode="infer")
        with pytest.raises(StateError):
            graph.backward(np.ones((1, 2)))

    def test_incompatible_stack(self):
        with pytest.raises(DimensionError) as exc_info:
            _graph(LayerSpec(kind="dense", input_dim=3, units=4), LayerSpec(kind="dense", input_dim=5, units=2))
        assert exc_info.value.layer_index == 1

    def test_wrong_input_width(self):
        graph = _graph(LayerSpec(kind="dense", input_dim=3, units=2))
        with pytest.raises(DimensionError):
            graph.forward(np.ones((1, 4)))

    def test_spec_requires_fields(self):
        with pytest.raises(ValueError):
            LayerSpec(kind="dense", units=3)

    def test_max_pool_respects_mask(self):
        graph = _graph(LayerSpec(kind="max_pool1d", pool_width=2))
        x = np.array([[[1.0], [5.0], [9.0]]])
        mask = np.array([[True, True, False]])
        out, out_mask = graph.forward(x, mask)
        assert out[0, :, 0].tolist() == [5.0, 0.0]
        assert out_mask.tolist() == [[True, False]]

    def test_rnn_ignores_padding(self):
        graph = _graph(LayerSpec(kind="lstm_cell", input_dim=2, units=3), seed=1)
        x = np.random.default_rng(0).normal(size=(1, 2, 2))
        padded = np.concatenate([x, np.full((1, 2, 2), 7.0)], axis=1)
        mask = np.array([[True, True, False, False]])
        assert np.allclose(graph.forward(x)[0], graph.forward(padded, mask)[0])

    def test_graph_round_trip(self):
        graph = _graph(LayerSpec(kind="dense", input_dim=2, units=3, activation="tanh"),
                       LayerSpec(kind="dense", input_dim=3, units=2), seed=5)
        restored = ModelGraph.from_dict(graph.to_dict())
        x = np.array([[0.3, -0.7]])
        assert np.allclose(restored.forward(x)[0], graph.forward(x)[0])

    def test_graph_version_check(self):
        data = _graph(LayerSpec(kind="dense", input_dim=2, units=2)).to_dict()
        data["version"] = "other/0"
        with pytest.raises(DataFormatError):
            ModelGraph.from_dict(data)


class TestLosses:
    """Test softmax and cross-entropy."""

    def test_softmax_symmetric(self):
        assert np.allclose(softmax(np.array([0.0, 0.0])), [0.5, 0.5])

    def test_softmax_values(self):
        assert np.allclose(softmax(np.array([1.0, 2.0, 3.0])), [0.090031, 0.244728, 0.665241], atol=1e-6)

    def test_softmax_shift_invariant(self):
        z = np.array([0.3, -1.2, 2.5])
        assert np.allclose(softmax(z + 100.0), softmax(z))

    def test_softmax_rejects_nan(self):
        with pytest.raises(NumericError):
            softmax(np.array([0.0, np.nan]))

    def test_cross_entropy_certain(self):
        assert abs(weighted_cross_entropy(np.array([0.0, 1.0]), 1)) <= 1e-11

    def test_cross_entropy_uniform(self):
        assert weighted_cross_entropy(np.full(8, 1 / 8), 3) == pytest.approx(math.log(8), abs=1e-9)

    def test_cross_entropy_linear_in_weight(self):
        probs = np.array([0.2, 0.8])
        assert weighted_cross_entropy(probs, 0, 2.0) == 2 * weighted_cross_entropy(probs, 0, 1.0)

    def test_cross_entropy_label_range(self):
        with pytest.raises(IndexError):
            weighted_cross_entropy(np.array([0.5, 0.5]), 2)

    def test_fused_gradient(self):
        _, grad = softmax_cross_entropy(np.array([[0.0, 0.0]]), np.array([0]))
        assert np.allclose(grad, [[-0.5, 0.5]])


class TestAdam:
    """Test adam_step."""

    def test_zero_gradient(self):
        params = {"w": np.array([1.0, -2.0])}
        adam_step(params, {"w": np.zeros(2)}, AdamState.for_params(params), TrainConfig())
        assert np.array_equal(params["w"], [1.0, -2.0])

    def test_first_step_magnitude(self):
        params = {"w": np.array([1.0, -2.0, 0.5])}
        config = TrainConfig(learning_rate=0.01)
        adam_step(params, {"w": np.array([3.0, -0.2, 40.0])}, AdamState.for_params(params), config)
        assert np.allclose(params["w"], [1.0 - 0.01, -2.0 + 0.01, 0.5 - 0.01], atol=1e-8)

    def test_shape_mismatch(self):
        params = {"w": np.zeros(2)}
        with pytest.raises(DimensionError):
            adam_step(params, {"w": np.zeros(3)}, AdamState.for_params(params), TrainConfig())


class TestTraining:
    """Test early stopping and supervised training."""

    def test_early_stopping_rule(self):
        stopper = EarlyStopping(patience=5)
        losses = [1.0, 0.9, 0.95, 0.96, 0.97, 0.98, 0.99, 1.0, 1.01]
        stopped_at = None
        for epoch, loss in enumerate(losses, start=1):
            stopper.update(loss, epoch)
            if stopper.should_stop:
                stopped_at = epoch
                break
        assert stopped_at == 7
        assert stopper.best_epoch == 2

    def test_restores_best_epoch(self):
        X, y = _separable()
        model = _graph(LayerSpec(kind="dense", input_dim=2, units=8))
        data = Dataset(X, y)
        config = TrainConfig(learning_rate=0.05, batch_size=16, max_epochs=30, patience=3)
        model, history = train_supervised(model, data, data, config, clock=lambda: 0.0)
        best = min(history.val_losses)
        assert history.epochs[history.best_epoch - 1].val_loss == best

    def test_separable_toy_set(self):
        X, y = _separable()
        model = _graph(LayerSpec(kind="dense", input_dim=2, units=8, activation="tanh"),
                       LayerSpec(kind="dense", input_dim=8, units=8), seed=3)
        data = Dataset(X, y)
        config = TrainConfig(learning_rate=0.05, batch_size=16, max_epochs=200, patience=200)
        model, _ = train_supervised(model, data, data, config)
        assert np.array_equal(predict_proba(model, data).argmax(axis=1), y)

    def test_deterministic(self):
        X, y = _separable()
        data = Dataset(X, y)
        config = TrainConfig(learning_rate=0.01, batch_size=4, max_epochs=5)
        histories = []
        for _ in range(2):
            model = _graph(LayerSpec(kind="dense", input_dim=2, units=4, activation="tanh"),
                           LayerSpec(kind="dropout", rate=0.2),
                           LayerSpec(kind="dense", input_dim=4, units=8), seed=2)
            _, history = train_supervised(model, data, data, config, clock=lambda: 0.0)
            histories.append(history.to_list())
        assert histories[0] == histories[1]

    def test_divergence_reports_epoch(self):
        """Test overflowing logits surface as a training error for the epoch."""
        X = np.full((4, 4), 1e120)
        y = np.array([0, 1, 0, 1])
        layers = [LayerSpec(kind="dense", input_dim=4, units=4) for _ in range(7)]
        model = _graph(*layers, LayerSpec(kind="dense", input_dim=4, units=8), seed=1)
        data = Dataset(X, y)
        config = TrainConfig(learning_rate=1e30, batch_size=1, max_epochs=3)
        with pytest.raises(TrainingError) as exc_info:
            train_supervised(model, data, data, config)
        assert exc_info.value.epoch == 1
        assert isinstance(exc_info.value.__cause__, NumericError)

    def test_dataset_lengths(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((3, 2)), np.zeros(2))


class TestGradCheck:
    """Compare analytic gradients with central differences."""

    def test_dense_only(self):
        X, y = _separable(6)
        model = _graph(LayerSpec(kind="dense", input_dim=2, units=5, activation="tanh"),
                       LayerSpec(kind="dense", input_dim=5, units=8), seed=4)
        weights = np.linspace(0.5, 1.5, 6)
        assert grad_check(model, Dataset(X, y, weights), eps=1e-5) < 1e-6

    @pytest.mark.parametrize("architecture", ["rnn", "lstm"])
    def test_recurrent_over_sequences(self, architecture):
        config = HybridConfig(hidden=3, dropout=0.0)
        model = ModelGraph(classifier_specs(architecture, "sequence", config, input_dim=2), seed=1)
        rng = np.random.default_rng(2)
        inputs = rng.normal(size=(3, 4, 2))
        mask = np.array([[1, 1, 1, 1], [1, 1, 0, 0], [1, 0, 0, 0]], dtype=bool)
        assert grad_check(model, Dataset(inputs, [0, 3, 7], mask=mask)) < 1e-4

    def test_vector_input_repeat(self):
        config = HybridConfig(hidden=3, filters=3, embedding_dim=4, repeat_positions=3)
        model = ModelGraph(classifier_specs("lstm", "vector", config, input_dim=4), seed=6)
        inputs = np.random.default_rng(3).normal(size=(2, 4))
        assert grad_check(model, Dataset(inputs, [1, 2])) < 1e-4

    def test_hybrid(self):
        config = HybridConfig(embedding_dim=4, filters=3, hidden=3, kernel_width=3, pool_width=2)
        indexer = build_indexer(DOCS, EncoderConfig(max_len=8, model_dim=4))
        model = build_hybrid(config, vocab_size=indexer.size, seed=2)
        ids, mask = indexer.encode([["ক", "খ"], ["ঘ", "চ"]])
        assert grad_check(model, Dataset(ids, [2, 5], mask=mask)) < 1e-3

    def test_encoder_block(self):
        config = EncoderConfig(max_len=8, model_dim=4, heads=2, blocks=1, ff_dim=6)
        indexer = build_indexer(DOCS, config)
        model = ModelGraph(encoder_specs(config, indexer.size), seed=3)
        ids, mask = indexer.encode(DOCS[:3])
        assert grad_check(model, Dataset(ids, LABELS[:3], mask=mask), max_params=300) < 1e-3


class TestEncoder:
    """Test the contextual encoder."""

    @pytest.fixture
    def small_config(self):
        return EncoderConfig(max_len=12, model_dim=8, heads=2, blocks=1, ff_dim=16)

    def test_default_dimension(self):
        encoder = ContextualEncoder.build(build_indexer(DOCS, EncoderConfig()))
        assert encode_contextual(["ক", "খ"], encoder).shape == (64,)

    def test_padding_invariance(self, small_config):
        encoder = ContextualEncoder.build(build_indexer(DOCS, small_config), small_config)
        short = encoder.encode([["ক", "খ"]])[0]
        padded = encode_contextual(["ক", "খ"], encoder)
        batched = encoder.encode([["ক", "খ"], ["চ", "ছ", "জ", "ক", "ঘ"]])[0]
        assert np.allclose(short, padded, atol=1e-5)
        assert np.allclose(short, batched, atol=1e-5)

    def test_seeds_differ(self, small_config):
        indexer = build_indexer(DOCS, small_config)
        first = encode_contextual(["ক", "খ"], ContextualEncoder.build(indexer, small_config))
        other = small_config.model_copy(update={"seed": small_config.seed + 1})
        second = encode_contextual(["ক", "খ"], ContextualEncoder.build(indexer, other))
        cosine = first @ second / (np.linalg.norm(first) * np.linalg.norm(second))
        assert cosine < 0.999

    def test_unknown_tokens_map_to_unk(self, small_config):
        indexer = build_indexer(DOCS, small_config)
        assert indexer.ids(["ক", "অজানা"])[2] == 1

    def test_fit_and_round_trip(self, small_config):
        encoder = ContextualEncoder.build(build_indexer(DOCS, small_config), small_config)
        encoder.fit(DOCS, LABELS, DOCS, LABELS, TrainConfig(max_epochs=2, batch_size=4))
        assert 1 <= len(encoder.history.epochs) <= 2
        restored = ContextualEncoder.from_dict(encoder.to_dict())
        assert np.allclose(restored.encode(DOCS), encoder.encode(DOCS))
        values, mask = encoder.encode_sequences(DOCS)
        assert values.shape == (len(DOCS), 5, 8)
        assert np.all(values[~mask] == 0)
        assert set(encoder.head_params()) == {"W", "b"}


class TestHybrid:
    """Test the hybrid classifier."""

    def test_distribution(self):
        config = HybridConfig(embedding_dim=8, filters=4, hidden=4)
        indexer = build_indexer(DOCS, EncoderConfig())
        model = build_hybrid(config, vocab_size=indexer.size)
        probs = hybrid_forward(["ক", "খ", "গ"], model, indexer)
        assert probs.shape == (8,)
        assert abs(probs.sum() - 1.0) < 1e-9
        assert np.array_equal(probs, hybrid_forward(["ক", "খ", "গ"], model, indexer))

    def test_eight_outputs_enforced(self):
        with pytest.raises(ValueError):
            HybridConfig(num_classes=3)

    def test_token_input_needs_vocab(self):
        with pytest.raises(ValueError):
            classifier_specs("hybrid", "tokens")
