"""Mini-batch training loop for the autoencoder objectives"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config import ExperimentConfig
from ..datasets import LabeledImageSet
from ..errors import ClusteringLossError, NonFiniteError, TrainingError
from ..losses import (
    LossReport,
    contrastive_loss,
    kl_loss,
    loss_weights,
    mse_loss,
    soft_silhouette_loss,
    total_loss,
)
from ..models import GaussianParams, ModelParams, decode, encode, reparameterize
from ..ndmath import Adam, Tensor

# Configure logging
logger = logging.getLogger(__name__)


@dataclass
class TrainingHistory:
    """Per-epoch train and validation losses plus auxiliary-loss bookkeeping"""

    train: List[LossReport] = field(default_factory=list)
    val: List[LossReport] = field(default_factory=list)
    aux_calls: int = 0
    aux_skips: int = 0

    @property
    def epochs(self) -> int:
        return len(self.train)


def batches(n: int, batch_size: int, rng: Optional[np.random.Generator] = None) -> List[np.ndarray]:
    """Index batches covering 0..n-1; shuffled when ``rng`` is given, last short batch kept"""
    order = rng.permutation(n) if rng is not None else np.arange(n)
    return [order[start:start + batch_size] for start in range(0, n, batch_size)]


def _aux_term(
    config: ExperimentConfig, z: Tensor, labels: np.ndarray, class_count: int
) -> Tuple[Dict[str, Tensor], Optional[float]]:
    """Auxiliary loss for one batch; raises ClusteringLossError when the batch cannot support it"""
    if np.unique(labels).size < 2:
        raise ClusteringLossError("batch holds a single class")
    if config.aux == "clustering":
        l_cl, terms = soft_silhouette_loss(z, labels, class_count)
        return {"l_cl": l_cl}, terms.score
    return {"l_con": contrastive_loss(z, labels, config.loss.margin)}, None


class Trainer:
    """Runs the configured objective over a training set with a held-out validation pass"""

    def __init__(self, params: ModelParams, config: ExperimentConfig):
        self.params = params
        self.config = config
        self.optimizer = Adam(params.parameters(), lr=config.lr)
        self.rng = np.random.default_rng([config.seed, 1])
        self.history = TrainingHistory()

    def _forward(
        self,
        images: np.ndarray,
        labels: np.ndarray,
        class_count: int,
        epoch: int,
        mode: str,
    ) -> Tuple[Tensor, LossReport]:
        model_config = self.params.config
        training = mode == "train"
        out = encode(self.params, images, mode=mode, rng=self.rng)
        terms: Dict[str, Tensor] = {}
        if isinstance(out, GaussianParams):
            z = reparameterize(out, self.rng) if training else out.mu
            code = out.mu
            terms["l_kl"] = kl_loss(out, model_config.beta, model_config.latent_dim,
                                    model_config.height, model_config.width)
        else:
            z = code = out
        terms["l_rec"] = mse_loss(images, decode(self.params, z, mode=mode))

        silhouette = None
        _, w_aux = loss_weights(self.config.loss, epoch)
        if self.config.aux != "none" and w_aux > 0.0:
            try:
                if training:
                    self.history.aux_calls += 1
                aux, silhouette = _aux_term(self.config, code, labels, class_count)
                terms.update(aux)
            except ClusteringLossError as e:
                if training:
                    self.history.aux_skips += 1
                    logger.warning(f"Skipping {self.config.aux} term at epoch {epoch}: {str(e)}")

        total = total_loss(terms, self.config.loss, epoch)
        report = LossReport(
            l_rec=terms["l_rec"].item(),
            l_cl=terms["l_cl"].item() if "l_cl" in terms else None,
            l_con=terms["l_con"].item() if "l_con" in terms else None,
            l_kl=terms["l_kl"].item() if "l_kl" in terms else None,
            soft_silhouette=silhouette,
            total=total.item(),
        )
        return total, report

    def train_epoch(self, train_set: LabeledImageSet, epoch: int) -> LossReport:
        self.optimizer.lr = self.config.learning_rate(epoch)
        reports, sizes = [], []
        for index, batch in enumerate(batches(len(train_set), self.config.batch_size, self.rng)):
            try:
                self.optimizer.zero_grad()
                total, report = self._forward(train_set.images[batch], train_set.labels[batch],
                                              train_set.class_count, epoch, "train")
                if not np.isfinite(report.total):
                    raise NonFiniteError("non-finite total loss", op="total_loss")
                total.backward()
                self.optimizer.step()
            except NonFiniteError as e:
                raise TrainingError(f"training diverged: {str(e)}", epoch, index)
            logger.debug(f"Epoch {epoch} batch {index}: total {report.total:.5f}")
            reports.append(report)
            sizes.append(len(batch))
        return LossReport.average(reports, sizes)

    def validate(self, val_set: LabeledImageSet, epoch: int) -> LossReport:
        reports, sizes = [], []
        for batch in batches(len(val_set), self.config.batch_size):
            _, report = self._forward(val_set.images[batch], val_set.labels[batch],
                                      val_set.class_count, epoch, "eval")
            reports.append(report)
            sizes.append(len(batch))
        return LossReport.average(reports, sizes)

    def fit(self, train_set: LabeledImageSet, val_set: LabeledImageSet) -> TrainingHistory:
        """Train for ``config.epochs`` epochs, validating after each"""
        for epoch in range(self.config.epochs):
            train_report = self.train_epoch(train_set, epoch)
            val_report = self.validate(val_set, epoch)
            self.history.train.append(train_report)
            self.history.val.append(val_report)
            logger.info(f"Epoch {epoch + 1}/{self.config.epochs}: train total {train_report.total:.5f} "
                        f"(rec {train_report.l_rec:.5f}), val total {val_report.total:.5f}")
        if self.history.aux_skips:
            logger.info(f"Auxiliary term skipped on {self.history.aux_skips} of {self.history.aux_calls} batches")
        return self.history


def train_model(
    params: ModelParams, train_set: LabeledImageSet, val_set: LabeledImageSet, config: ExperimentConfig
) -> TrainingHistory:
    return Trainer(params, config).fit(train_set, val_set)
