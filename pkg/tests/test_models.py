import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from dlcm.core.errors import ConfigError, ContractError, TrainingError
from dlcm.data_io import assemble_top_n
from dlcm.gradcore import Tensor, check_gradients, precision
from dlcm.losses import LossInput, compute_loss
from dlcm.models import (
    DlcmRanker,
    ModelParams,
    abstraction_forward,
    build_model,
    dlcm_forward,
    dlcm_score,
    dnn_score,
    gru_encode,
    init_dlcm_params,
    lidnn_score,
    linear_train,
    load_checkpoint,
    masked_scores,
    save_checkpoint,
)
from dlcm.models.linear import hinge_gradient, hinge_loss

from conftest import make_group


def zeroed(params, *names):
    arrays = params.arrays()
    for name in names:
        arrays[name] = np.zeros_like(arrays[name])
    return ModelParams.from_arrays(arrays)


class TestLinearRanker:
    def test_learns_positive_weight_to_zero_loss(self):
        groups = [make_group(f"q{i}", np.arange(5.0)[:, None], [0, 1, 2, 3, 4]) for i in range(3)]
        ranker = linear_train(groups, epochs=60, lr=0.1, seed=0)
        assert ranker.w[0] > 0
        diffs = np.array([[1.0], [2.0], [3.0], [4.0]])
        assert hinge_loss(ranker.w, diffs, 1.0) == 0.0

    def test_separated_pair_has_zero_gradient(self):
        assert_array_equal(hinge_gradient(np.array([1.0]), np.array([[1.0]]), 1.0), [0.0])

    def test_identical_features_contribute_nothing(self):
        assert_array_equal(hinge_gradient(np.array([0.0, 0.0]), np.zeros((1, 2)), 1.0), [0.0, 0.0])

    def test_no_discordant_pairs(self):
        groups = [make_group("q", np.ones((3, 2)), [2, 2, 2])]
        with pytest.raises(TrainingError):
            linear_train(groups)

    def test_deterministic_under_seed(self, small_groups):
        first = linear_train(small_groups, epochs=3, seed=5)
        second = linear_train(small_groups, epochs=3, seed=5)
        assert_array_equal(first.w, second.w)


class TestDnn:
    def test_pointwise_properties(self, rng):
        model = build_model("dnn", 3, 4, hidden=(8,), seed=1)
        x = rng.normal(size=(4, 3))
        x[3] = x[1]
        scores = dnn_score(Tensor(x), model.params).data
        assert scores[3] == pytest.approx(scores[1], rel=1e-6)
        perm = np.array([2, 0, 3, 1])
        assert_allclose(dnn_score(Tensor(x[perm]), model.params).data, scores[perm], rtol=1e-6)

    def test_zero_weights_give_zero_scores(self, rng):
        model = build_model("dnn", 3, 4, hidden=(8,), seed=1)
        params = zeroed(model.params, *model.params.names())
        assert_array_equal(dnn_score(Tensor(rng.normal(size=(4, 3))), params).data, 0.0)


class TestLidnn:
    def test_identity_weights_recover_inputs(self):
        params = ModelParams.from_arrays({"lidnn.W0": np.eye(2), "lidnn.b0": np.zeros(2)})
        group = make_group("q", [[0.75], [0.25]], [1, 0])
        ranked = assemble_top_n(group, [1.0, 0.0], 2)
        assert_array_equal(lidnn_score(ranked, params).data, [0.75, 0.25])

    def test_input_width_is_n_times_features(self):
        model = build_model("lidnn", 3, 5, hidden=(7,), seed=0)
        assert model.params["lidnn.W0"].shape == (7, 15)
        assert model.params["lidnn.W1"].shape == (5, 7)


class TestDlcm:
    def test_beta_zero_is_identity(self, rng):
        params = init_dlcm_params(4, 0, 2, rng)
        x = Tensor(rng.normal(size=(3, 4)))
        assert abstraction_forward(x, params) is x

    def test_zero_abstraction_appends_zeros(self, rng):
        params = init_dlcm_params(3, 2, 1, rng)
        params = zeroed(params, "abstraction.W0", "abstraction.b0", "abstraction.W1", "abstraction.b1")
        x = rng.normal(size=(4, 3))
        out = abstraction_forward(Tensor(x), params).data
        assert_array_equal(out[:, :3], x.astype(np.float32))
        assert_array_equal(out[:, 3:], 0.0)

    def test_zero_inputs_stay_at_the_fixed_point(self, rng):
        params = init_dlcm_params(3, 0, 1, rng)
        outputs, state = gru_encode(Tensor(np.zeros((5, 3))), params)
        assert_array_equal(outputs.data, 0.0)
        assert_array_equal(state.data, 0.0)

    def test_zero_weights_single_step(self, rng):
        params = zeroed(init_dlcm_params(3, 0, 1, rng), "gru.Wx", "gru.Ws", "gru.Wux", "gru.Wus", "gru.Wrx", "gru.Wrs")
        outputs, _ = gru_encode([Tensor(rng.normal(size=3))], params)
        assert_array_equal(outputs.data, 0.0)

    def test_empty_sequence_rejected(self, rng):
        with pytest.raises(ContractError):
            gru_encode([], init_dlcm_params(3, 0, 1, rng))

    def test_outputs_bounded_by_convex_combination(self, rng):
        params = init_dlcm_params(4, 0, 1, rng)
        outputs, _ = gru_encode(Tensor(rng.normal(scale=3.0, size=(12, 4))), params)
        previous = 0.0
        for o in outputs.data:
            assert np.max(np.abs(o)) <= max(previous, 1.0) + 1e-6
            previous = np.max(np.abs(o))

    def test_outputs_depend_only_on_earlier_inputs(self, rng):
        params = init_dlcm_params(3, 0, 1, rng)
        sequence = rng.normal(size=(6, 3))
        full, state = gru_encode(Tensor(sequence), params)
        prefix, _ = gru_encode(Tensor(sequence[:4]), params)
        assert_allclose(full.data[:4], prefix.data, rtol=1e-6, atol=1e-7)
        changed = sequence.copy()
        changed[0] += 1.0
        _, other_state = gru_encode(Tensor(changed), params)
        assert not np.array_equal(state.data, other_state.data)

    def test_zero_local_function_gives_zero_scores(self, rng):
        x = Tensor(rng.normal(size=(4, 3)))
        params = init_dlcm_params(3, 0, 2, rng)
        assert_array_equal(dlcm_forward(x, zeroed(params, "phi.V")).data, 0.0)
        assert_array_equal(dlcm_forward(x, zeroed(params, "phi.W", "phi.b")).data, 0.0)

    def test_parameter_count_without_abstraction(self, rng):
        d, k = 5, 3
        params = init_dlcm_params(d, 0, k, rng)
        assert params.count() == 6 * d * d + d * k * d + d * k + k

    def test_forward_is_pure(self, rng):
        model = DlcmRanker.create(3, 5, 2, 2, rng)
        group = make_group("q", rng.normal(size=(4, 3)), [0, 1, 2, 3])
        ranked = assemble_top_n(group, [0.4, 0.3, 0.2, 0.1], 5)
        first = model.score(ranked).data
        assert first.tobytes() == model.score(ranked).data.tobytes()
        masked = masked_scores(ranked, model.score(ranked))
        assert masked[4] == -np.inf and np.all(np.isfinite(masked[:4]))


@pytest.mark.parametrize("kind, output_bias", [("dnn", "dnn.b1"), ("lidnn", "lidnn.b1")])
def test_feed_forward_output_bias_starts_positive(kind, output_bias):
    model = build_model(kind, 3, 4, hidden=(8,), seed=0)
    assert_array_equal(model.params[output_bias].data, 1.0)
    assert_array_equal(model.params[f"{kind}.b0"].data, 0.0)


@pytest.mark.parametrize("kind, extra", [("dnn", {"hidden": (8,)}), ("lidnn", {"hidden": (8,)}), ("dlcm", {"beta": 2, "k": 2})])
def test_flip_output_negates_scores(rng, kind, extra):
    model = build_model(kind, 3, 4, seed=0, **extra)
    group = make_group("q", rng.normal(size=(4, 3)), [0, 1, 2, 3])
    ranked = assemble_top_n(group, rng.normal(size=4), 4)
    before = model.score(ranked).data.copy()
    model.flip_output()
    assert_allclose(model.score(ranked).data, -before, rtol=1e-6, atol=1e-7)
    assert_array_equal(model.initial_list().score(ranked).data, 0.0)


def test_build_model_rejects_unknown_kind():
    with pytest.raises(ConfigError):
        build_model("forest", 3, 4)


class TestCheckpoint:
    def test_round_trip_is_bit_exact(self, tmp_path):
        model = build_model("dlcm", 3, 6, beta=2, k=2, seed=9)
        save_checkpoint(tmp_path / "m.json", model)
        loaded = load_checkpoint(tmp_path / "m.json")
        assert loaded.hyper() == model.hyper()
        for (name, a), (other, b) in zip(model.params.items(), loaded.params.items()):
            assert name == other
            assert a.data.tobytes() == b.data.tobytes()

    def test_linear_checkpoint(self, tmp_path, small_groups):
        ranker = linear_train(small_groups, epochs=2)
        save_checkpoint(tmp_path / "l.json", ranker)
        assert_array_equal(load_checkpoint(tmp_path / "l.json").w, ranker.w.astype(np.float32))

    def test_newer_version_rejected(self, tmp_path):
        model = build_model("dnn", 3, 4, hidden=(4,))
        save_checkpoint(tmp_path / "m.json", model)
        text = (tmp_path / "m.json").read_text().replace('"version": 1', '"version": 99')
        (tmp_path / "m.json").write_text(text)
        with pytest.raises(ConfigError, match="newer"):
            load_checkpoint(tmp_path / "m.json")

    def test_garbage_rejected(self, tmp_path):
        (tmp_path / "m.json").write_text("{}")
        with pytest.raises(ConfigError):
            load_checkpoint(tmp_path / "m.json")


SCORERS = {
    "dnn": lambda ranked, p: dnn_score(Tensor(ranked.padded_features()), p),
    "lidnn": lidnn_score,
    "dlcm": dlcm_score,
}


@pytest.mark.parametrize("kind", sorted(SCORERS))
@pytest.mark.parametrize("loss", ["listmle", "softrank", "attrank"])
def test_model_and_loss_gradients(kind, loss):
    rng = np.random.default_rng(len(kind) * 7 + len(loss))
    checked = 0
    while checked < 3:
        m, features = int(rng.integers(2, 7)), int(rng.integers(2, 5))
        model = build_model(kind, features, 6, hidden=(5,), beta=2, k=2, seed=int(rng.integers(1000)))
        group = make_group("q", rng.uniform(size=(m, features)), rng.integers(0, 5, size=m))
        ranked = assemble_top_n(group, rng.normal(size=m), 6)
        params = {name: value.astype(np.float64) for name, value in model.params.arrays().items()}

        def build(p):
            scores = SCORERS[kind](ranked, p)
            return compute_loss(loss, LossInput.from_ranked(ranked, scores), sigma=0.5)

        if loss == "attrank":
            with precision(np.float64):
                scores = SCORERS[kind](ranked, {k: Tensor(v) for k, v in params.items()}).data[:m]
            if np.any(np.abs(scores) < 1e-2):
                continue
        result = check_gradients(build, params, step=1e-4)
        assert result.ok, result.failures[:3]
        checked += 1
