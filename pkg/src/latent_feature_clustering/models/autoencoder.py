"""Convolutional autoencoder and (beta-)variational autoencoder"""
import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from ..errors import CheckpointError, ConfigurationError, ShapeError
from ..ndmath import (
    Tensor,
    as_tensor,
    conv2d,
    conv2d_transpose,
    conv_output_size,
    dropout,
    flatten,
    init_parameter,
    linear,
    transpose_output_padding,
)

# Configure logging
logger = logging.getLogger(__name__)

LATENT_SIZES = (32, 64, 128, 256)
DROPOUT_RATES = (0.0, 0.2, 0.3, 0.4)
MODEL_KINDS = ("AE", "VAE")
FILTERS = 64
DEPTH = 4
MODES = ("train", "eval")


@dataclass
class ModelConfig:
    """Architecture hyperparameters; beta is ignored for the plain autoencoder"""

    kind: str = "AE"
    latent_dim: int = 256
    dropout_p: float = 0.0
    beta: float = 1.0
    height: int = 50
    width: int = 50

    def __post_init__(self):
        self.kind = str(self.kind).upper()
        if self.kind not in MODEL_KINDS:
            raise ConfigurationError(f"model kind must be one of {MODEL_KINDS}, got {self.kind!r}")
        if self.latent_dim not in LATENT_SIZES:
            raise ConfigurationError(f"latent_dim must be one of {LATENT_SIZES}, got {self.latent_dim}")
        if float(self.dropout_p) not in DROPOUT_RATES:
            raise ConfigurationError(f"dropout_p must be one of {DROPOUT_RATES}, got {self.dropout_p}")
        if not self.beta > 0:
            raise ConfigurationError(f"beta must be positive, got {self.beta}")
        self.dropout_p = float(self.dropout_p)
        self.beta = float(self.beta)

    @property
    def variational(self) -> bool:
        return self.kind == "VAE"

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class GaussianParams:
    """Posterior parameters produced by the variational encoder"""

    mu: Tensor
    log_var: Tensor

    def __post_init__(self):
        if self.mu.shape != self.log_var.shape:
            raise ShapeError(f"mu {self.mu.shape} and log_var {self.log_var.shape} differ")


@dataclass
class ModelParams:
    """Learnable weights plus the shape bookkeeping recorded at build time"""

    config: ModelConfig
    tensors: Dict[str, Tensor]
    encoder_sizes: List[Tuple[int, int]] = field(default_factory=list)
    output_padding: List[Tuple[int, int]] = field(default_factory=list)

    def parameters(self) -> Dict[str, Tensor]:
        return self.tensors

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    @property
    def flat_size(self) -> int:
        h, w = self.encoder_sizes[-1]
        return FILTERS * h * w

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: t.data for name, t in self.tensors.items()}

    def load_state_dict(self, state: Mapping[str, np.ndarray]) -> None:
        """Replace weights in place; names and shapes must match the built model"""
        missing = set(self.tensors) - set(state)
        extra = set(state) - set(self.tensors)
        if missing or extra:
            raise CheckpointError(f"shape table mismatch: missing {sorted(missing)}, unexpected {sorted(extra)}")
        for name, tensor in self.tensors.items():
            value = np.asarray(state[name])
            if value.shape != tensor.shape:
                raise CheckpointError(f"shape table mismatch for {name}: {value.shape} vs {tensor.shape}")
            tensor.data = value.astype(tensor.dtype)

    def astype(self, dtype: Any) -> "ModelParams":
        """Independent copy with every weight cast, e.g. the 64-bit gradient-check shadow"""
        tensors = {n: Tensor(t.data.astype(dtype), requires_grad=True) for n, t in self.tensors.items()}
        return ModelParams(self.config, tensors, list(self.encoder_sizes), list(self.output_padding))


def _encoder_sizes(height: int, width: int) -> List[Tuple[int, int]]:
    sizes = [(height, width)]
    for _ in range(DEPTH):
        h, w = sizes[-1]
        sizes.append((conv_output_size(h), conv_output_size(w)))
    return sizes


def build_model(config: ModelConfig, seed: int = 0) -> ModelParams:
    """Four stride-2 conv layers, a latent bottleneck and the mirrored decoder"""
    if config.height < 2 ** (DEPTH - 1) or config.width < 2 ** (DEPTH - 1):
        raise ConfigurationError(f"input {config.height}x{config.width} does not survive {DEPTH} halvings")
    rng = np.random.default_rng(seed)
    sizes = _encoder_sizes(config.height, config.width)
    tensors: Dict[str, Tensor] = {}

    in_channels = 1
    for layer in range(DEPTH):
        fan_in = in_channels * 9
        tensors[f"encoder.{layer}.weight"] = init_parameter((FILTERS, in_channels, 3, 3), fan_in, rng)
        tensors[f"encoder.{layer}.bias"] = init_parameter((FILTERS,), fan_in, rng)
        in_channels = FILTERS

    flat = FILTERS * sizes[-1][0] * sizes[-1][1]
    heads = ["mu", "log_var"] if config.variational else ["latent"]
    for head in heads:
        tensors[f"encoder.{head}.weight"] = init_parameter((flat, config.latent_dim), flat, rng)
        tensors[f"encoder.{head}.bias"] = init_parameter((config.latent_dim,), flat, rng)

    tensors["decoder.dense.weight"] = init_parameter((config.latent_dim, flat), config.latent_dim, rng)
    tensors["decoder.dense.bias"] = init_parameter((flat,), config.latent_dim, rng)

    output_padding = []
    for layer in range(DEPTH):
        source = sizes[DEPTH - layer]
        target = sizes[DEPTH - layer - 1]
        output_padding.append((
            transpose_output_padding(target[0], source[0]),
            transpose_output_padding(target[1], source[1]),
        ))
        out_channels = 1 if layer == DEPTH - 1 else FILTERS
        fan_in = FILTERS * 9
        tensors[f"decoder.{layer}.weight"] = init_parameter((FILTERS, out_channels, 3, 3), fan_in, rng)
        tensors[f"decoder.{layer}.bias"] = init_parameter((out_channels,), fan_in, rng)

    logger.info(f"Built {config.kind} with latent {config.latent_dim}, flatten size {flat}, "
                f"encoder sizes {sizes}")
    return ModelParams(config, tensors, sizes, output_padding)


def _check_mode(mode: str) -> bool:
    if mode not in MODES:
        raise ConfigurationError(f"mode must be one of {MODES}, got {mode!r}")
    return mode == "train"


def encode(
    params: ModelParams,
    batch: Union[Tensor, np.ndarray],
    mode: str = "eval",
    rng: Optional[np.random.Generator] = None,
) -> Union[Tensor, GaussianParams]:
    """Latent codes (AE) or posterior parameters (VAE) for a (B, 1, H, W) batch"""
    training = _check_mode(mode)
    x = as_tensor(batch)
    config = params.config
    if x.ndim != 4 or x.shape[1:] != (1, config.height, config.width):
        raise ShapeError(f"expected batch (B, 1, {config.height}, {config.width}), got {x.shape}")
    for layer in range(DEPTH):
        x = conv2d(x, params[f"encoder.{layer}.weight"], params[f"encoder.{layer}.bias"]).relu()
        x = dropout(x, config.dropout_p, rng, training)
    x = flatten(x)
    if config.variational:
        return GaussianParams(
            mu=linear(x, params["encoder.mu.weight"], params["encoder.mu.bias"]),
            log_var=linear(x, params["encoder.log_var.weight"], params["encoder.log_var.bias"]),
        )
    return linear(x, params["encoder.latent.weight"], params["encoder.latent.bias"])


def reparameterize(g: GaussianParams, rng: np.random.Generator) -> Tensor:
    """z = mu + exp(log_var / 2) * eps with eps ~ N(0, 1) from ``rng``"""
    eps = rng.standard_normal(g.mu.shape).astype(g.mu.dtype)
    return g.mu + (g.log_var * 0.5).exp() * as_tensor(eps)


def decode(params: ModelParams, z: Union[Tensor, np.ndarray], mode: str = "eval") -> Tensor:
    """Reconstruction (B, 1, H, W) from latent codes; the last layer is linear"""
    _check_mode(mode)
    z = as_tensor(z)
    config = params.config
    if z.ndim != 2 or z.shape[1] != config.latent_dim:
        raise ShapeError(f"expected latent codes (B, {config.latent_dim}), got {z.shape}")
    h, w = params.encoder_sizes[-1]
    x = linear(z, params["decoder.dense.weight"], params["decoder.dense.bias"]).relu()
    x = x.reshape(z.shape[0], FILTERS, h, w)
    for layer in range(DEPTH):
        x = conv2d_transpose(
            x,
            params[f"decoder.{layer}.weight"],
            params[f"decoder.{layer}.bias"],
            output_padding=params.output_padding[layer],
        )
        if layer < DEPTH - 1:
            x = x.relu()
    return x


def latent_codes(params: ModelParams, batch: Union[Tensor, np.ndarray]) -> np.ndarray:
    """Deterministic codes for projection: z for the AE, mu for the VAE"""
    out = encode(params, batch, mode="eval")
    return (out.mu if isinstance(out, GaussianParams) else out).data


def reconstruct(params: ModelParams, batch: Union[Tensor, np.ndarray]) -> np.ndarray:
    """Eval-mode reconstruction; the VAE decodes its posterior mean"""
    return decode(params, latent_codes(params, batch), mode="eval").data
