"""Loss module: reconstruction, KL, soft silhouette, contrastive and their combination"""

from .reconstruction import kl_loss, kl_scale, mse_loss
from .clustering import SilhouetteTerms, one_hot, soft_silhouette_loss
from .contrastive import contrastive_loss
from .objective import AUX_MODES, LossConfig, LossReport, adaptive_weights, loss_weights, total_loss

__all__ = [
    'kl_loss',
    'kl_scale',
    'mse_loss',
    'SilhouetteTerms',
    'one_hot',
    'soft_silhouette_loss',
    'contrastive_loss',
    'AUX_MODES',
    'LossConfig',
    'LossReport',
    'adaptive_weights',
    'loss_weights',
    'total_loss',
]
