"""Per-timestamp embedding network: input projection, optional timestamp
masking, dilated convolution blocks with residuals, and the max-pooling
ladder used by the hierarchical loss."""
from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor

MASK_MODES = ("none", "binomial", "last_point")


@dataclass(frozen=True)
class EncoderConfig:
    input_dims: int
    hidden: int = 32
    output_dims: int = 16
    depth: int = 4          # dilated blocks, dilation 2^b at block b
    kernel_size: int = 3
    mask_mode: str = "none"

    def __post_init__(self):
        if self.depth < 1 or self.output_dims < 1 or self.hidden < 1 or self.input_dims < 1:
            raise ValueError("encoder dimensions must be >= 1")
        if self.mask_mode not in MASK_MODES:
            raise ValueError(f"unknown mask mode: {self.mask_mode!r}")


@dataclass
class EncoderModel:
    params: dict          # name -> Tensor (requires_grad)
    config: EncoderConfig

    def param_items(self):
        return sorted(self.params.items())


def _uniform(rng, shape, fan_in):
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def init_encoder(cfg: EncoderConfig, seed: int = 0) -> EncoderModel:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    k = cfg.kernel_size
    params = {
        "proj_w": _uniform(rng, (cfg.input_dims, cfg.hidden), cfg.input_dims),
        "proj_b": _uniform(rng, (cfg.hidden,), cfg.input_dims),
    }
    for b in range(cfg.depth):
        fan = k * cfg.hidden
        params[f"block{b}_conv1"] = _uniform(rng, (k, cfg.hidden, cfg.hidden), fan)
        params[f"block{b}_bias1"] = _uniform(rng, (cfg.hidden,), fan)
        params[f"block{b}_conv2"] = _uniform(rng, (k, cfg.hidden, cfg.hidden), fan)
        params[f"block{b}_bias2"] = _uniform(rng, (cfg.hidden,), fan)
    params["out_w"] = _uniform(rng, (cfg.hidden, cfg.output_dims), cfg.hidden)
    params["out_b"] = _uniform(rng, (cfg.output_dims,), cfg.hidden)
    tensors = {name: Tensor(v, requires_grad=True, name=name) for name, v in params.items()}
    return EncoderModel(params=tensors, config=cfg)


def build_mask(mask_mode: str, batch: int, length: int, rng=None, mask_index=None) -> np.ndarray | None:
    """0/1 keep-mask of shape [batch, length, 1], or None for no masking."""
    if mask_mode == "none":
        return None
    if mask_mode == "binomial":
        if rng is None:
            raise ValueError("binomial masking needs an RNG")
        return (rng.random((batch, length, 1)) > 0.5).astype(np.float64)
    if mask_mode == "last_point":
        idx = length - 1 if mask_index is None else int(mask_index)
        if not 0 <= idx < length:
            raise ValueError("mask_index out of range")
        mask = np.ones((batch, length, 1))
        mask[:, idx, :] = 0.0
        return mask
    raise ValueError(f"unknown mask mode: {mask_mode!r}")


def encode(model: EncoderModel, x, mask_mode: str | None = None, rng=None, mask_index=None) -> Tensor:
    """Map [B, L, D] inputs to per-timestamp representations [B, L, M].

    Masked timestamps are zeroed after the input projection, before the conv
    stack, so context can still fill them in.
    """
    cfg = model.config
    x = ad.as_tensor(x)
    if x.ndim != 3 or x.shape[2] != cfg.input_dims:
        raise ValueError(f"expected input [B, L, {cfg.input_dims}], got {x.shape}")
    p = model.params
    h = ad.add(ad.matmul(x, p["proj_w"]), p["proj_b"])
    mode = cfg.mask_mode if mask_mode is None else mask_mode
    mask = build_mask(mode, x.shape[0], x.shape[1], rng=rng, mask_index=mask_index)
    if mask is not None:
        h = ad.mul(h, mask)
    for b in range(cfg.depth):
        dilation = 2 ** b
        y = ad.gelu(h)
        y = ad.add(ad.conv1d_dilated(y, p[f"block{b}_conv1"], dilation), p[f"block{b}_bias1"])
        y = ad.gelu(y)
        y = ad.add(ad.conv1d_dilated(y, p[f"block{b}_conv2"], dilation), p[f"block{b}_bias2"])
        h = ad.add(h, y)
    return ad.add(ad.matmul(h, p["out_w"]), p["out_b"])


def pool_ladder(r: Tensor, m: int) -> list[Tensor]:
    """Level 0 is r itself; each next level max-pools by m along time, down to
    the last level of length >= 2 (a length-1 input yields a single level)."""
    if m < 2:
        raise ValueError("pool kernel must be >= 2")
    levels = [ad.as_tensor(r)]
    while True:
        length = levels[-1].shape[1]
        if length < 2 or -(-length // m) < 2:
            break
        levels.append(ad.max_pool1d(levels[-1], m))
    return levels


def instance_repr(r) -> np.ndarray:
    """Whole-series vectors: max over the time axis of [B, L, M] values."""
    arr = r.data if isinstance(r, Tensor) else np.asarray(r)
    return arr.max(axis=1)


_CKPT_VERSION = 1


def save_model(model: EncoderModel, path) -> None:
    arrays = {f"param/{name}": t.data for name, t in model.params.items()}
    np.savez(
        path,
        version=np.int64(_CKPT_VERSION),
        config=np.frombuffer(json.dumps(asdict(model.config)).encode(), dtype=np.uint8),
        **arrays,
    )


def load_model(path) -> EncoderModel:
    with np.load(path) as blob:
        if int(blob["version"]) != _CKPT_VERSION:
            raise ValueError(f"unsupported checkpoint version {int(blob['version'])}")
        cfg = EncoderConfig(**json.loads(bytes(blob["config"]).decode()))
        params = {
            key[len("param/"):]: Tensor(blob[key].copy(), requires_grad=True, name=key[len("param/"):])
            for key in blob.files
            if key.startswith("param/")
        }
    return EncoderModel(params=params, config=cfg)
