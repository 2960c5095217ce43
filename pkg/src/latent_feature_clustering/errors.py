"""Exception hierarchy for the latent feature clustering pipeline"""
from typing import Any, Dict, Optional


class LatentClusteringError(Exception):
    """Base class for every error raised by this package"""

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form used by the CLI error line"""
        payload = {"error": type(self).__name__, "message": str(self)}
        payload.update(self._fields())
        return payload

    def _fields(self) -> Dict[str, Any]:
        return {}


class ShapeError(LatentClusteringError):
    """Array shapes do not agree with what an operation expects"""


class NonFiniteError(LatentClusteringError):
    """An operation produced NaN or Inf"""

    def __init__(self, message: str, op: Optional[str] = None):
        super().__init__(message)
        self.op = op

    def _fields(self) -> Dict[str, Any]:
        return {"op": self.op}


class GradientCheckError(LatentClusteringError):
    """An evaluation point of the finite-difference checker was not finite"""

    def __init__(self, message: str, coordinate: int):
        super().__init__(message)
        self.coordinate = coordinate

    def _fields(self) -> Dict[str, Any]:
        return {"coordinate": self.coordinate}


class ConfigurationError(LatentClusteringError):
    """Invalid configuration value or combination"""


class DatasetError(LatentClusteringError):
    """Dataset construction, normalization or split failed"""


class IdxFormatError(DatasetError):
    """Malformed IDX file"""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset

    def _fields(self) -> Dict[str, Any]:
        return {"offset": self.offset}


class ClusteringLossError(LatentClusteringError):
    """The clustering loss is undefined for the given batch"""


class ClassifierGateError(LatentClusteringError):
    """The pseudo-label classifier did not reach the accuracy gate"""

    def __init__(self, accuracy: float, gate: float):
        super().__init__(f"classifier accuracy {accuracy:.4f} is below the gate {gate:.4f}")
        self.accuracy = accuracy
        self.gate = gate

    def _fields(self) -> Dict[str, Any]:
        return {"accuracy": self.accuracy, "gate": self.gate}


class ProjectionError(LatentClusteringError):
    """kNN graph or embedding optimization failed"""


class CurveFitError(ProjectionError):
    """The low-dimensional curve fit did not converge"""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.6g})")
        self.residual = residual

    def _fields(self) -> Dict[str, Any]:
        return {"residual": self.residual}


class MetricError(LatentClusteringError):
    """A metric is undefined for its input"""


class CheckpointError(LatentClusteringError):
    """Checkpoint file is malformed or does not match the model"""

    def __init__(self, message: str, offset: Optional[int] = None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset

    def _fields(self) -> Dict[str, Any]:
        return {"offset": self.offset}


class TrainingError(LatentClusteringError):
    """Training diverged or hit an unrecoverable batch"""

    def __init__(self, message: str, epoch: int, batch: int):
        super().__init__(f"{message} (epoch {epoch}, batch {batch})")
        self.epoch = epoch
        self.batch = batch

    def _fields(self) -> Dict[str, Any]:
        return {"epoch": self.epoch, "batch": self.batch}
