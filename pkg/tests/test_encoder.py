import numpy as np
import pytest

from tscontrast import autodiff as ad
from tscontrast import encoder as enc


def _model(depth=2, hidden=8, out=4, dims=2):
    return enc.init_encoder(
        enc.EncoderConfig(input_dims=dims, hidden=hidden, output_dims=out, depth=depth), seed=3)


def test_config_validation():
    with pytest.raises(ValueError):
        enc.EncoderConfig(input_dims=0)
    with pytest.raises(ValueError):
        enc.EncoderConfig(input_dims=1, mask_mode="random")


def test_init_deterministic():
    a = _model()
    b = _model()
    for name in a.params:
        np.testing.assert_array_equal(a.params[name].data, b.params[name].data)


def test_encode_shape(rng):
    model = _model()
    x = rng.normal(size=(3, 10, 2))
    out = enc.encode(model, x)
    assert out.shape == (3, 10, 4)


def test_encode_rejects_bad_input(rng):
    model = _model()
    with pytest.raises(ValueError):
        enc.encode(model, rng.normal(size=(3, 10, 5)))


def test_binomial_mask_changes_output(rng):
    model = _model()
    x = rng.normal(size=(2, 12, 2))
    plain = enc.encode(model, x).data
    mask_rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(0)))
    masked = enc.encode(model, x, mask_mode="binomial", rng=mask_rng).data
    assert not np.array_equal(plain, masked)


def test_binomial_mask_needs_rng(rng):
    model = _model()
    with pytest.raises(ValueError):
        enc.encode(model, rng.normal(size=(1, 8, 2)), mask_mode="binomial")


def test_last_point_mask_local(rng):
    model = _model()
    x = rng.normal(size=(1, 16, 2))
    plain = enc.encode(model, x).data
    masked = enc.encode(model, x, mask_mode="last_point", mask_index=5).data
    assert not np.allclose(plain[0, 5], masked[0, 5])
    with pytest.raises(ValueError):
        enc.build_mask("last_point", 1, 16, mask_index=16)


def test_mask_index_default_is_last():
    mask = enc.build_mask("last_point", 2, 6)
    assert mask[0, 5, 0] == 0.0 and mask[0, :5, 0].sum() == 5


def test_pool_ladder_lengths(rng):
    r = ad.Tensor(rng.normal(size=(2, 8, 3)))
    lengths = [lvl.shape[1] for lvl in enc.pool_ladder(r, 2)]
    assert lengths == [8, 4, 2]
    lengths = [lvl.shape[1] for lvl in enc.pool_ladder(ad.Tensor(rng.normal(size=(2, 1, 3))), 2)]
    assert lengths == [1]
    lengths = [lvl.shape[1] for lvl in enc.pool_ladder(ad.Tensor(rng.normal(size=(2, 7, 3))), 3)]
    assert lengths == [7, 3]


def test_instance_repr_is_time_max(rng):
    x = rng.normal(size=(4, 9, 5))
    np.testing.assert_array_equal(enc.instance_repr(x), x.max(axis=1))
    np.testing.assert_array_equal(enc.instance_repr(ad.Tensor(x)), x.max(axis=1))


def test_model_round_trip(tmp_path, rng):
    model = _model()
    path = tmp_path / "model.npz"
    enc.save_model(model, path)
    back = enc.load_model(path)
    assert back.config == model.config
    assert set(back.params) == set(model.params)
    for name in model.params:
        assert np.array_equal(back.params[name].data, model.params[name].data)
    x = rng.normal(size=(2, 10, 2))
    np.testing.assert_array_equal(enc.encode(model, x).data, enc.encode(back, x).data)
