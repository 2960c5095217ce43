"""Model module: convolutional autoencoder and (beta-)VAE"""

from .autoencoder import (
    DROPOUT_RATES,
    LATENT_SIZES,
    GaussianParams,
    ModelConfig,
    ModelParams,
    build_model,
    decode,
    encode,
    latent_codes,
    reconstruct,
    reparameterize,
)

__all__ = [
    'DROPOUT_RATES',
    'LATENT_SIZES',
    'GaussianParams',
    'ModelConfig',
    'ModelParams',
    'build_model',
    'decode',
    'encode',
    'latent_codes',
    'reconstruct',
    'reparameterize',
]
