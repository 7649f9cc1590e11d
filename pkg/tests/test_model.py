import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppfl.crypto import seeded_rng
from ppfl.errors import ConfigError, InputError
from ppfl.model import (
    ModelSpec,
    OptimizerState,
    forward,
    init_params,
    loss_and_gradient,
    make_optimizer,
    optimizer_step,
)


def central_difference(f, x, h=1e-6):
    grad = np.zeros_like(x)
    for i in range(x.size):
        bump = np.zeros_like(x)
        bump[i] = h
        grad[i] = (f(x + bump) - f(x - bump)) / (2 * h)
    return grad


def relative_error(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)


def random_case(seed, kind):
    rng = np.random.default_rng(seed)
    spec = ModelSpec(
        kind=kind,
        input_dim=int(rng.integers(1, 6)),
        num_classes=int(rng.integers(2, 5)),
        hidden_dim=int(rng.integers(1, 5)),
    )
    params = rng.normal(0, 0.7, size=spec.num_params)
    n = int(rng.integers(1, 8))
    x = rng.normal(size=(n, spec.input_dim))
    y = rng.integers(0, spec.num_classes, size=n)
    return spec, params, x, y


def test_zero_params_give_uniform_probabilities():
    spec = ModelSpec("logistic", input_dim=3, num_classes=4)
    probs = forward(spec, np.zeros(spec.num_params), np.random.default_rng(0).normal(size=(5, 3)))
    assert np.allclose(probs, 0.25)


def test_dominant_class_wins():
    spec = ModelSpec("logistic", input_dim=2, num_classes=3)
    params = np.zeros(spec.num_params)
    params[-3] = 50.0  # bias of class 0
    x = np.random.default_rng(1).uniform(-1, 1, size=(20, 2))
    assert np.all(forward(spec, params, x).argmax(axis=1) == 0)


@pytest.mark.parametrize("kind", ["logistic", "mlp"])
def test_softmax_rows_sum_to_one(kind):
    rng = np.random.default_rng(2)
    spec = ModelSpec(kind, input_dim=4, num_classes=5, hidden_dim=3)
    params = rng.normal(size=spec.num_params)
    probs = forward(spec, params, rng.normal(size=(30, 4)))
    row_sums = np.array([sum(float(v) for v in row) for row in probs])
    assert np.all(np.abs(row_sums - 1.0) <= 1e-12)
    assert np.all((probs > 0) & (probs < 1))


def test_forward_dimension_errors():
    spec = ModelSpec("logistic", input_dim=3, num_classes=2)
    with pytest.raises(ConfigError):
        forward(spec, np.zeros(5), np.zeros((1, 3)))
    with pytest.raises(ConfigError):
        forward(spec, np.zeros(spec.num_params), np.zeros((1, 4)))


def test_model_spec_validation():
    with pytest.raises(ConfigError):
        ModelSpec("logistic", input_dim=0, num_classes=2)
    with pytest.raises(ConfigError):
        ModelSpec("mlp", input_dim=2, num_classes=1)
    with pytest.raises(ConfigError):
        ModelSpec("cnn")


def test_loss_values():
    spec = ModelSpec("logistic", input_dim=2, num_classes=2)
    x = np.array([[1.0, -1.0], [0.5, 2.0]])
    loss, _ = loss_and_gradient(spec, np.zeros(spec.num_params), x, [0, 1])
    assert loss == pytest.approx(np.log(2), abs=1e-15)

    confident = np.zeros(spec.num_params)
    confident[-2:] = [0.0, 60.0]
    loss, _ = loss_and_gradient(spec, confident, x, [1, 1])
    assert loss < 1e-20


def test_empty_batch_is_rejected():
    spec = ModelSpec("logistic", input_dim=2, num_classes=2)
    with pytest.raises(InputError):
        loss_and_gradient(spec, np.zeros(spec.num_params), np.zeros((0, 2)), [])


@pytest.mark.parametrize("kind", ["logistic", "mlp"])
@pytest.mark.parametrize("seed", range(10))
def test_gradient_matches_finite_differences(kind, seed):
    spec, params, x, y = random_case(seed, kind)
    _, grad = loss_and_gradient(spec, params, x, y)
    numeric = central_difference(lambda p: loss_and_gradient(spec, p, x, y)[0], params)
    assert relative_error(grad, numeric) < 1e-5


def test_sgd_steps():
    state = OptimizerState(kind="sgd", learning_rate=0.1)
    assert np.array_equal(optimizer_step(state, np.array([1.0]), np.array([0.0])), [1.0])
    out = optimizer_step(state, np.array([1.0]), np.array([2.0]))
    assert out == pytest.approx([0.8], abs=1e-15)
    assert state.step == 2


def test_adam_first_step_closed_form():
    g = np.array([0.3, -2.0, 1e-3, 0.0])
    params = np.array([1.0, 2.0, 3.0, 4.0])
    state = make_optimizer("adam", 0.001, 4)
    out = optimizer_step(state, params, g)
    # bias-corrected moments after one step are exactly g and g^2
    expected = params - 0.001 * g / (np.abs(g) + 1e-8)
    assert np.allclose(out, expected, rtol=0, atol=1e-10)
    assert state.step == 1


def test_adam_second_step_by_hand():
    state = make_optimizer("adam", 0.01, 1)
    p = optimizer_step(state, np.array([0.0]), np.array([1.0]))
    p = optimizer_step(state, p, np.array([-1.0]))
    m = 0.9 * 0.1 + 0.1 * -1.0
    v = 0.999 * 0.001 + 0.001 * 1.0
    m_hat, v_hat = m / (1 - 0.81), v / (1 - 0.999**2)
    expected = -0.01 * 1.0 / (1.0 + 1e-8) - 0.01 * m_hat / (np.sqrt(v_hat) + 1e-8)
    assert p[0] == pytest.approx(expected, abs=1e-14)


def test_optimizer_shape_mismatch():
    with pytest.raises(ConfigError):
        optimizer_step(make_optimizer("sgd", 0.1, 2), np.zeros(2), np.zeros(3))
    with pytest.raises(ConfigError):
        OptimizerState(kind="rmsprop")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_updates_stay_finite(seed):
    spec, params, x, y = random_case(seed, "mlp")
    state = make_optimizer("adam", 0.05, spec.num_params)
    for _ in range(5):
        _, grad = loss_and_gradient(spec, params, x, y)
        params = optimizer_step(state, params, grad)
    assert np.all(np.isfinite(params))
    assert params.size == spec.num_params


def test_mlp_init_is_seeded():
    spec = ModelSpec("mlp", input_dim=4, num_classes=3, hidden_dim=5)
    a = init_params(spec, seeded_rng(1, 3))
    b = init_params(spec, seeded_rng(1, 3))
    assert np.array_equal(a, b) and np.any(a != 0)
