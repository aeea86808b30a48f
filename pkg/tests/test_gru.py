"""Cell-level checks: the gate algebra has closed-form corners that pin the
implementation down before any training code runs."""

import numpy as np
import pytest

from iclearn.engine import gru


def zero_cell(input_dim, hidden):
    cell = gru.init_cell(input_dim, hidden, np.random.default_rng(0))
    return {k: np.zeros_like(v) for k, v in cell.items()}


def test_zero_params_halve_the_state():
    # z = sigmoid(0) = 0.5 and n = tanh(0) = 0, so h' = z*h = 0.5*h
    h = np.array([[2.0, -4.0, 6.0]])
    x = np.ones((1, 5))
    out = gru.gru_cell_forward(x, h, zero_cell(5, 3))
    np.testing.assert_allclose(out, 0.5 * h)


def test_zero_params_zero_state_stays_zero():
    out = gru.gru_cell_forward(np.ones((2, 4)), np.zeros((2, 3)), zero_cell(4, 3))
    np.testing.assert_allclose(out, 0.0)


def test_cell_matches_manual_gate_algebra():
    rng = np.random.default_rng(3)
    cell = gru.init_cell(4, 3, rng)
    x = rng.normal(size=(2, 4))
    h = rng.normal(size=(2, 3))

    def sig(v):
        return 1.0 / (1.0 + np.exp(-v))

    z = sig(x @ cell["Wz"].T + h @ cell["Uz"].T + cell["bz"])
    r = sig(x @ cell["Wr"].T + h @ cell["Ur"].T + cell["br"])
    n = np.tanh(x @ cell["Wn"].T + (r * h) @ cell["Un"].T + cell["bn"])
    expected = (1.0 - z) * n + z * h
    np.testing.assert_allclose(gru.gru_cell_forward(x, h, cell), expected, rtol=1e-12)


def test_init_cell_shapes_and_bias_zeros():
    cell = gru.init_cell(5, 3, np.random.default_rng(1))
    assert set(cell) == set(gru.GATE_KEYS)
    for gate in "zrn":
        assert cell[f"W{gate}"].shape == (3, 5)
        assert cell[f"U{gate}"].shape == (3, 3)
        np.testing.assert_array_equal(cell[f"b{gate}"], 0.0)


def test_sequence_forward_matches_step_loop():
    rng = np.random.default_rng(7)
    cell = gru.init_cell(2, 4, rng)
    x = rng.normal(size=(3, 6, 2))
    cache = gru.sequence_forward(cell, x)
    h = np.zeros((3, 4))
    for t in range(6):
        h = gru.gru_cell_forward(x[:, t], h, cell)
        np.testing.assert_allclose(cache.hs[:, t], h, rtol=1e-12)
    np.testing.assert_allclose(cache.final_state, h, rtol=1e-12)


def test_sequence_forward_reverse_consumes_backwards():
    rng = np.random.default_rng(9)
    cell = gru.init_cell(2, 3, rng)
    x = rng.normal(size=(1, 5, 2))
    rev = gru.sequence_forward(cell, x, reverse=True)
    fwd_on_flipped = gru.sequence_forward(cell, x[:, ::-1])
    np.testing.assert_allclose(rev.final_state, fwd_on_flipped.final_state, rtol=1e-12)
    # hs stays aligned with the original time axis
    np.testing.assert_allclose(rev.hs[:, 0], fwd_on_flipped.hs[:, -1], rtol=1e-12)


def test_sequence_forward_custom_initial_state():
    rng = np.random.default_rng(11)
    cell = gru.init_cell(3, 3, rng)
    x = np.zeros((2, 4, 3))
    h0 = rng.normal(size=(2, 3))
    cache = gru.sequence_forward(cell, x, h0=h0)
    h = h0
    for t in range(4):
        h = gru.gru_cell_forward(x[:, t], h, cell)
    np.testing.assert_allclose(cache.final_state, h, rtol=1e-12)


@pytest.mark.parametrize("reverse", [False, True])
def test_sequence_backward_matches_finite_differences(reverse):
    rng = np.random.default_rng(13)
    cell = gru.init_cell(2, 3, rng)
    x = rng.normal(size=(2, 4, 2))
    h0 = rng.normal(size=(2, 3))
    w = rng.normal(size=(2, 3))  # random linear functional of the final state

    def loss(c, xs):
        return float(np.sum(w * gru.sequence_forward(c, xs, reverse=reverse, h0=h0).final_state))

    cache = gru.sequence_forward(cell, x, reverse=reverse, h0=h0)
    d_x, d_h0, grads = gru.sequence_backward(cell, cache, None, w)

    step = 1e-6
    for key in gru.GATE_KEYS:
        flat = cell[key].ravel()
        gflat = grads[key].ravel()
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + step
            hi = loss(cell, x)
            flat[i] = saved - step
            lo = loss(cell, x)
            flat[i] = saved
            assert abs((hi - lo) / (2 * step) - gflat[i]) < 1e-6, key
    for i in range(x.size):
        flat = x.ravel()
        saved = flat[i]
        flat[i] = saved + step
        hi = loss(cell, x)
        flat[i] = saved - step
        lo = loss(cell, x)
        flat[i] = saved
        assert abs((hi - lo) / (2 * step) - d_x.ravel()[i]) < 1e-6
    assert d_h0.shape == h0.shape
