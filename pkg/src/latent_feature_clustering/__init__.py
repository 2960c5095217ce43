"""Semi-supervised latent feature clustering

Autoencoders with clustering and contrastive losses, 2-D projection and silhouette evaluation.
"""

__version__ = '0.1.0'

from .main import run

__all__ = ['run']
