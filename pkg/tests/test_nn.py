import numpy as np
import pytest

from mcdnn.arch_dsl import infer_shapes, parse_arch
from mcdnn.errors import BadMagicError, ContainerError, GradientCheckError, TruncatedError
from mcdnn.nn import layers
from mcdnn.nn.column import backward_column, forward_column, init_column, loss_of, parameter_shapes
from mcdnn.nn.gradcheck import grad_check, self_test
from mcdnn.nn.serialization import column_from_bytes, column_to_bytes

from tests.conftest import TINY_ARCH

NET3 = "48x48-100C3-MP2-200C2-MP2-300C2-MP2-400C2-MP2-500N-3755N"


def naive_conv(x, w, b):
    m_out, m_in, k, _ = w.shape
    ho, wo = x.shape[1] - k + 1, x.shape[2] - k + 1
    out = np.zeros((m_out, ho, wo))
    for m in range(m_out):
        for y in range(ho):
            for xx in range(wo):
                total = b[m]
                for c in range(m_in):
                    for i in range(k):
                        for j in range(k):
                            total += x[c, y + i, xx + j] * w[m, c, i, j]
                out[m, y, xx] = total
    return out


def naive_pool(x, p):
    c, h, w = x.shape
    out = np.zeros((c, h // p, w // p))
    idx = np.zeros((c, h // p, w // p), dtype=int)
    for m in range(c):
        for y in range(h // p):
            for xx in range(w // p):
                best, best_idx = None, None
                for i in range(p):
                    for j in range(p):
                        v = x[m, y * p + i, xx * p + j]
                        if best is None or v > best:
                            best, best_idx = v, (m * h + y * p + i) * w + xx * p + j
                out[m, y, xx] = best
                idx[m, y, xx] = best_idx
    return out, idx


class TestConv:
    def test_unit_kernel_is_identity(self, rng):
        x = rng.normal(size=(1, 5, 4))
        out = layers.conv_forward(x, np.ones((1, 1, 1, 1)), np.zeros(1))
        np.testing.assert_array_equal(out, x)

    def test_sum_of_entries(self):
        x = np.array([[[1.0, 2.0], [3.0, 4.0]]])
        out = layers.conv_forward(x, np.ones((1, 1, 2, 2)), np.zeros(1))
        np.testing.assert_array_equal(out, [[[10.0]]])

    def test_matches_loop_oracle(self, rng):
        for _ in range(100):
            m_in, m_out, k = (int(v) for v in rng.integers(1, [4, 5, 5]))
            h, w_ = (int(v) for v in rng.integers(k, k + 6, size=2))
            x = rng.normal(size=(m_in, h, w_))
            w = rng.normal(size=(m_out, m_in, k, k))
            b = rng.normal(size=m_out)
            np.testing.assert_allclose(layers.conv_forward(x, w, b), naive_conv(x, w, b), atol=1e-6)

    def test_repeat_is_bit_identical(self, rng):
        x = rng.normal(size=(3, 9, 9)).astype(np.float32)
        w = rng.normal(size=(4, 3, 3, 3)).astype(np.float32)
        b = rng.normal(size=4).astype(np.float32)
        first = layers.conv_forward(x, w, b)
        for _ in range(5):
            np.testing.assert_array_equal(layers.conv_forward(x.copy(), w.copy(), b.copy()), first)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            layers.conv_forward(np.zeros((2, 5, 5)), np.zeros((1, 3, 2, 2)), np.zeros(1))

    def test_backward_dx_matches_finite_difference(self, rng):
        x = rng.normal(size=(2, 5, 5))
        w = rng.normal(size=(3, 2, 2, 2))
        b = rng.normal(size=3)
        dout = rng.normal(size=(3, 4, 4))
        dx, dw, db = layers.conv_backward(x, w, dout)
        eps = 1e-6
        for index in [(0, 0, 0), (1, 2, 3), (0, 4, 4)]:
            xp, xm = x.copy(), x.copy()
            xp[index] += eps
            xm[index] -= eps
            numeric = np.sum((layers.conv_forward(xp, w, b) - layers.conv_forward(xm, w, b)) * dout) / (2 * eps)
            assert numeric == pytest.approx(dx[index], rel=1e-6, abs=1e-8)
        np.testing.assert_allclose(db, dout.sum(axis=(1, 2)))

    def test_backward_without_dx(self, rng):
        dx, dw, _ = layers.conv_backward(rng.normal(size=(1, 4, 4)), rng.normal(size=(2, 1, 3, 3)),
                                         rng.normal(size=(2, 2, 2)), need_dx=False)
        assert dx is None and dw.shape == (2, 1, 3, 3)


class TestMaxPool:
    def test_simple(self):
        out, argmax = layers.maxpool_forward(np.array([[[1.0, 2.0], [3.0, 4.0]]]), 2)
        np.testing.assert_array_equal(out, [[[4.0]]])
        assert argmax.ravel().tolist() == [3]

    def test_first_index_wins_ties(self):
        out, argmax = layers.maxpool_forward(np.full((1, 2, 2), 7.0), 2)
        assert out.ravel().tolist() == [7.0]
        assert argmax.ravel().tolist() == [0]

    def test_matches_window_scan(self, rng):
        for _ in range(100):
            maps, p, rows, cols = (int(v) for v in rng.integers(1, [4, 4, 5, 5]))
            x = rng.normal(size=(maps, rows * p, cols * p))
            out, argmax = layers.maxpool_forward(x, p)
            expected, expected_idx = naive_pool(x, p)
            np.testing.assert_array_equal(out, expected)
            np.testing.assert_array_equal(argmax, expected_idx)

    def test_indivisible(self):
        with pytest.raises(ValueError):
            layers.maxpool_forward(np.zeros((1, 5, 4)), 2)

    def test_backward_routes_to_winner(self):
        x = np.array([[[1.0, 5.0], [3.0, 4.0]]])
        _, argmax = layers.maxpool_forward(x, 2)
        dx = layers.maxpool_backward(np.array([[[2.5]]]), argmax, x.shape)
        np.testing.assert_array_equal(dx, [[[0.0, 2.5], [0.0, 0.0]]])


class TestFull:
    def test_identity(self, rng):
        x = rng.normal(size=6)
        np.testing.assert_array_equal(layers.fc_forward(x, np.eye(6), np.zeros(6)), x)

    def test_small(self):
        out = layers.fc_forward(np.array([3.0, 4.0]), np.array([[1.0, 1.0]]), np.array([-7.0]))
        np.testing.assert_array_equal(out, [0.0])

    def test_matches_dot_products(self, rng):
        for _ in range(100):
            n_in, n_out = (int(v) for v in rng.integers(1, [13, 7]))
            x, w, b = rng.normal(size=n_in), rng.normal(size=(n_out, n_in)), rng.normal(size=n_out)
            expected = [sum(w[i, j] * x[j] for j in range(n_in)) + b[i] for i in range(n_out)]
            np.testing.assert_allclose(layers.fc_forward(x, w, b), expected, atol=1e-6)


class TestActivation:
    def test_origin(self):
        assert layers.activation(np.array(0.0)) == 0.0
        assert layers.activation_grad(np.array(0.0)) == 1.0

    def test_saturation(self):
        assert layers.activation(np.array(30.0)) == pytest.approx(1.0)
        assert layers.activation(np.array(-30.0)) == pytest.approx(-1.0)
        assert layers.activation_grad(np.array(30.0)) == pytest.approx(0.0, abs=1e-12)

    def test_grad_matches_finite_difference(self):
        eps = 1e-6
        numeric = (np.tanh(0.3 + eps) - np.tanh(0.3 - eps)) / (2 * eps)
        assert float(layers.activation_grad(np.array(0.3))) == pytest.approx(numeric, abs=1e-8)


class TestSoftmax:
    def test_symmetric(self):
        scores, loss, _ = layers.softmax_xent(np.array([0.0, 0.0]), 0)
        np.testing.assert_allclose(scores, [0.5, 0.5])
        assert loss == pytest.approx(np.log(2))

    def test_no_overflow(self):
        scores, loss, _ = layers.softmax_xent(np.array([1000.0, 0.0]), 0)
        assert np.all(np.isfinite(scores))
        np.testing.assert_allclose(scores, [1.0, 0.0], atol=1e-12)
        assert loss == pytest.approx(0.0, abs=1e-12)

    def test_dlogits_matches_finite_difference(self, rng):
        logits = rng.normal(size=5)
        _, _, grad = layers.softmax_xent(logits, 2)
        eps = 1e-6
        for i in range(5):
            up, down = logits.copy(), logits.copy()
            up[i] += eps
            down[i] -= eps
            numeric = (layers.softmax_xent(up, 2)[1] - layers.softmax_xent(down, 2)[1]) / (2 * eps)
            assert grad[i] == pytest.approx(numeric, abs=1e-6)

    def test_label_out_of_range(self):
        with pytest.raises(ValueError):
            layers.softmax_xent(np.zeros(3), 3)


class TestInit:
    def test_same_seed_same_bytes(self, tiny_spec):
        assert init_column(tiny_spec, 7).parameter_bytes() == init_column(tiny_spec, 7).parameter_bytes()

    def test_seeds_differ(self, tiny_spec):
        assert init_column(tiny_spec, 1).parameter_bytes() != init_column(tiny_spec, 2).parameter_bytes()

    def test_net3_shapes(self):
        spec = parse_arch(NET3)
        col = init_column(spec, 0)
        shapes = [(p.weight.shape, p.bias.shape) for p in col.params]
        assert shapes == parameter_shapes(spec)
        assert shapes[0] == ((100, 1, 3, 3), (100,))
        assert shapes[4] == ((500, 1600), (500,))
        total = sum(p.weight.size + p.bias.size for p in col.params)
        assert total == infer_shapes(spec).total_params

    def test_glorot_bounds(self, tiny_spec):
        col = init_column(tiny_spec, 3)
        limit = np.sqrt(6.0 / (1 * 9 + 2 * 9))
        assert np.abs(col.params[0].weight).max() <= limit
        assert all((p.bias == 0).all() for p in col.params)


def straight_line_scores(col, x):
    conv, fc1, fc2 = col.params
    h = np.tanh(naive_conv(x, conv.weight.astype(np.float64), conv.bias.astype(np.float64)))
    pooled, _ = naive_pool(h, 2)
    hidden = np.tanh(fc1.weight.astype(np.float64) @ pooled.reshape(-1) + fc1.bias)
    logits = fc2.weight.astype(np.float64) @ hidden + fc2.bias
    e = np.exp(logits - logits.max())
    return e / e.sum()


class TestColumn:
    def test_scores_are_simplex(self, tiny_spec, rng):
        col = init_column(tiny_spec, 0)
        scores = forward_column(col, rng.uniform(-1, 1, size=(1, 8, 8)))
        assert len(scores) == 3
        assert scores.is_simplex()

    def test_repeatable(self, tiny_spec, rng):
        col = init_column(tiny_spec, 0)
        x = rng.uniform(-1, 1, size=(1, 8, 8))
        np.testing.assert_array_equal(forward_column(col, x).values, forward_column(col, x).values)

    def test_matches_straight_line_arithmetic(self, tiny_spec, rng):
        col = init_column(tiny_spec, 5, dtype=np.float64)
        x = rng.uniform(-1, 1, size=(1, 8, 8))
        np.testing.assert_allclose(forward_column(col, x).values, straight_line_scores(col, x), atol=1e-6)

    def test_wrong_input_shape(self, tiny_spec):
        with pytest.raises(ValueError):
            forward_column(init_column(tiny_spec, 0), np.zeros((1, 9, 8)))

    def test_zero_output_layer(self, tiny_spec, rng):
        col = init_column(tiny_spec, 0, dtype=np.float64)
        col.params[-1].weight[:] = 0
        x = rng.uniform(-1, 1, size=(1, 8, 8))
        np.testing.assert_allclose(forward_column(col, x).values, [1 / 3] * 3)
        loss, grads = backward_column(col, x, 1)
        assert loss == pytest.approx(np.log(3))
        np.testing.assert_allclose(grads[-1].bias, [1 / 3, 1 / 3 - 1, 1 / 3])

    def test_gradient_shapes(self, tiny_spec, rng):
        col = init_column(tiny_spec, 0)
        _, grads = backward_column(col, rng.uniform(-1, 1, size=(1, 8, 8)), 0)
        assert [g.weight.shape for g in grads] == [p.weight.shape for p in col.params]

    def test_one_step_lowers_loss(self, tiny_spec, rng):
        col = init_column(tiny_spec, 2, dtype=np.float64)
        x = rng.uniform(-1, 1, size=(1, 8, 8))
        before, grads = backward_column(col, x, 2)
        for p, g in zip(col.params, grads):
            p.weight -= 0.01 * g.weight
            p.bias -= 0.01 * g.bias
        assert loss_of(col, x, 2) < before


@pytest.fixture
def flipped_conv(monkeypatch):
    original = layers.conv_backward

    def flipped(x, w, dout, need_dx=True):
        dx, dw, db = original(x, w, dout, need_dx)
        return dx, -dw, db

    monkeypatch.setattr(layers, "conv_backward", flipped)


class TestGradCheck:
    def test_tiny_column(self, tiny_spec):
        errors = []
        for seed in range(20):
            col = init_column(tiny_spec, seed)
            rng = np.random.default_rng([seed, 3])
            errors.append(grad_check(col, rng.uniform(-1, 1, size=(1, 8, 8)), seed % 3))
        assert all(e < 1e-4 for e in errors), max(errors)

    def test_column_left_untouched(self, tiny_spec, rng):
        col = init_column(tiny_spec, 1)
        before = col.parameter_bytes()
        grad_check(col, rng.uniform(-1, 1, size=(1, 8, 8)), 0)
        assert col.parameter_bytes() == before

    def test_sign_flipped_conv_backward_is_caught(self, tiny_spec, rng, flipped_conv):
        col = init_column(tiny_spec, 4)
        assert grad_check(col, rng.uniform(-1, 1, size=(1, 8, 8)), 1) > 1e-2

    @pytest.mark.parametrize("eps", [0.0, -1e-5])
    def test_invalid_eps(self, eps, tiny_spec):
        with pytest.raises(ValueError):
            grad_check(init_column(tiny_spec, 0), np.zeros((1, 8, 8)), 0, eps=eps)

    def test_self_test(self):
        assert self_test(seed=0) < 1e-4

    def test_self_test_reports_failure(self, flipped_conv):
        with pytest.raises(GradientCheckError):
            self_test(seed=0)


class TestSerialization:
    def test_roundtrip(self, tiny_spec):
        col = init_column(tiny_spec, 11)
        back = column_from_bytes(column_to_bytes(col))
        assert back.spec == col.spec
        assert back.seed == 11
        assert back.parameter_bytes() == col.parameter_bytes()

    def test_tag_survives(self):
        spec = parse_arch(TINY_ARCH + "-77")
        back = column_from_bytes(column_to_bytes(init_column(spec, 0)))
        assert back.spec.tag == "77"
        assert back.name == "77"

    def test_bad_magic(self, tiny_spec):
        data = column_to_bytes(init_column(tiny_spec, 0))
        with pytest.raises(BadMagicError):
            column_from_bytes(b"XXXX" + data[4:])

    def test_truncated(self, tiny_spec):
        data = column_to_bytes(init_column(tiny_spec, 0))
        with pytest.raises(TruncatedError):
            column_from_bytes(data[:-3])

    def test_trailing_bytes(self, tiny_spec):
        data = column_to_bytes(init_column(tiny_spec, 0))
        with pytest.raises(ContainerError):
            column_from_bytes(data + b"\x00")

    @pytest.mark.parametrize("byte", [b"Z", b"\xff"])
    def test_corrupt_architecture(self, tiny_spec, byte):
        data = bytearray(column_to_bytes(init_column(tiny_spec, 0)))
        data[10:11] = byte  # primeiro carácter da arquitetura
        with pytest.raises(ContainerError):
            column_from_bytes(bytes(data))
