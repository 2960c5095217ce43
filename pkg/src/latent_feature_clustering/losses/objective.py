"""Loss configuration, adaptive weighting and the combined training objective"""
import logging
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from ..errors import ConfigurationError
from ..ndmath import Tensor

# Configure logging
logger = logging.getLogger(__name__)

AUX_MODES = ("none", "clustering", "contrastive")
ADAPTIVE_STEP = 0.01

Scalar = Union[float, Tensor]


@dataclass
class LossConfig:
    """Which auxiliary objective is active and how it is weighted"""

    aux: str = "none"
    lambda_cl: float = 0.2
    lambda_con: float = 0.2
    margin: float = 1.0
    adaptive: bool = False
    pretrain_epochs: int = 0

    def __post_init__(self):
        if self.aux not in AUX_MODES:
            raise ConfigurationError(f"aux must be one of {AUX_MODES}, got {self.aux!r}")
        if self.lambda_cl < 0 or self.lambda_con < 0:
            raise ConfigurationError("loss coefficients must be non-negative")
        if not self.margin > 0:
            raise ConfigurationError(f"margin must be positive, got {self.margin}")
        if self.pretrain_epochs < 0:
            raise ConfigurationError(f"pretrain_epochs must be >= 0, got {self.pretrain_epochs}")

    @property
    def coefficient(self) -> float:
        if self.aux == "clustering":
            return self.lambda_cl
        if self.aux == "contrastive":
            return self.lambda_con
        return 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class LossReport:
    """Scalar loss components of one batch or one epoch"""

    l_rec: float = 0.0
    l_cl: Optional[float] = None
    l_con: Optional[float] = None
    l_kl: Optional[float] = None
    soft_silhouette: Optional[float] = None
    total: float = 0.0

    def to_dict(self) -> Dict[str, Optional[float]]:
        return asdict(self)

    @classmethod
    def average(cls, reports, weights) -> "LossReport":
        """Weighted mean per component; components missing from every report stay None"""
        merged = {}
        for f in fields(cls):
            pairs = [(getattr(r, f.name), w) for r, w in zip(reports, weights) if getattr(r, f.name) is not None]
            if pairs:
                total_weight = sum(w for _, w in pairs)
                merged[f.name] = sum(v * w for v, w in pairs) / total_weight
            else:
                merged[f.name] = None
        merged["l_rec"] = merged["l_rec"] or 0.0
        merged["total"] = merged["total"] or 0.0
        return cls(**merged)


def adaptive_weights(epoch: int) -> Tuple[float, float]:
    """Reconstruction weight falls by 0.01 per epoch while the auxiliary weight rises by 0.01"""
    if epoch < 0:
        raise ConfigurationError(f"epoch must be >= 0, got {epoch}")
    step = round(ADAPTIVE_STEP * epoch, 10)
    return max(0.0, 1.0 - step), min(1.0, step)


def loss_weights(config: LossConfig, epoch: int) -> Tuple[float, float]:
    """(w_rec, w_aux) applied by ``total_loss`` at ``epoch``"""
    if epoch < config.pretrain_epochs or config.aux == "none":
        return 1.0, 0.0
    if config.adaptive:
        return adaptive_weights(epoch)
    return 1.0, config.coefficient


def total_loss(terms: Union[LossReport, Mapping[str, Optional[Scalar]]], config: LossConfig, epoch: int) -> Scalar:
    """Combine reconstruction, KL and auxiliary terms; works on floats and on tensors

    A missing auxiliary term (a batch where it was skipped) contributes nothing.
    """
    if isinstance(terms, LossReport):
        terms = terms.to_dict()
    l_cl, l_con = terms.get("l_cl"), terms.get("l_con")
    if l_cl is not None and l_con is not None:
        raise ConfigurationError("clustering and contrastive losses cannot both be active in one run")
    aux_term, aux_mode = (l_cl, "clustering") if l_cl is not None else (l_con, "contrastive")
    if aux_term is not None and config.aux != aux_mode:
        raise ConfigurationError(f"got a {aux_mode} term but the run is configured with aux={config.aux!r}")

    reconstruction = terms["l_rec"]
    if terms.get("l_kl") is not None:
        reconstruction = reconstruction + terms["l_kl"]
    w_rec, w_aux = loss_weights(config, epoch)
    total = reconstruction * w_rec if w_rec != 1.0 else reconstruction
    if aux_term is not None and w_aux > 0.0:
        total = total + aux_term * w_aux
    return total
