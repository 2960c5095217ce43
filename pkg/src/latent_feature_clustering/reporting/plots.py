"""Static and interactive report files for a finished run"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
import plotly.graph_objects as go  # noqa: E402

from ..losses import LossReport  # noqa: E402
from ..projection import Embedding2D  # noqa: E402

# Configure logging
logger = logging.getLogger(__name__)

# Fixed so SVG element ids, and therefore the files, are reproducible
plt.rcParams["svg.hashsalt"] = "latent-feature-clustering"
SVG_METADATA = {"Date": None}

CLASS_COLORS = [
    "#1f77b4",  # Blue
    "#ff7f0e",  # Orange
    "#2ca02c",  # Green
    "#d62728",  # Red
    "#9467bd",  # Purple
    "#8c564b",  # Brown
    "#e377c2",  # Pink
    "#7f7f7f",  # Gray
    "#bcbd22",  # Olive
    "#17becf",  # Cyan
]

LOSS_COMPONENTS = ["l_rec", "l_cl", "l_con", "l_kl", "soft_silhouette", "total"]


def class_color(label: int) -> str:
    return CLASS_COLORS[int(label) % len(CLASS_COLORS)]


def class_name(label: int, class_names: Optional[Sequence[str]]) -> str:
    if class_names and 0 <= int(label) < len(class_names):
        return f"{int(label)}: {class_names[int(label)]}"
    return str(int(label))


def loss_curves_frame(train: List[LossReport], val: List[LossReport]) -> pd.DataFrame:
    """One row per epoch with train_* and val_* columns for every loss component"""
    rows = []
    for epoch, (t, v) in enumerate(zip(train, val)):
        row: Dict[str, Optional[float]] = {"epoch": epoch}
        for component in LOSS_COMPONENTS:
            row[f"train_{component}"] = getattr(t, component)
            row[f"val_{component}"] = getattr(v, component)
        rows.append(row)
    columns = ["epoch"] + [f"{p}_{c}" for c in LOSS_COMPONENTS for p in ("train", "val")]
    return pd.DataFrame(rows, columns=columns)


def write_loss_curves_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    frame.to_csv(path, index=False, float_format="%.9g")
    return path


def plot_loss_curves(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Train (solid) and validation (dashed) curves, one panel per recorded component"""
    path = Path(path)
    components = [c for c in LOSS_COMPONENTS if frame[f"train_{c}"].notna().any()]
    fig, axes = plt.subplots(1, len(components), figsize=(4 * len(components), 3.2), squeeze=False)
    for ax, component in zip(axes[0], components):
        ax.plot(frame["epoch"], frame[f"train_{component}"], label="train", color=CLASS_COLORS[0])
        ax.plot(frame["epoch"], frame[f"val_{component}"], label="validation", color=CLASS_COLORS[1],
                linestyle="--")
        ax.set_title(component)
        ax.set_xlabel("epoch")
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return path


def plot_projection(embedding: Embedding2D, path: Union[str, Path], title: Optional[str] = None) -> Path:
    """Scatter of the 2-D embedding; the markers of class c sit in the SVG group ``class-c``"""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 6))
    for label in np.unique(embedding.labels):
        members = embedding.labels == label
        ax.scatter(
            embedding.coords[members, 0],
            embedding.coords[members, 1],
            s=12,
            color=class_color(label),
            label=class_name(label, embedding.class_names),
            gid=f"class-{int(label)}",
        )
    ax.set_xticks([])
    ax.set_yticks([])
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize="small", markerscale=1.5)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return path


def plot_reconstructions(originals: np.ndarray, reconstructions: np.ndarray, path: Union[str, Path]) -> Path:
    """Originals on the top row, reconstructions below"""
    path = Path(path)
    count = len(originals)
    fig, axes = plt.subplots(2, count, figsize=(1.6 * count, 3.4), squeeze=False)
    for i in range(count):
        for row, images in enumerate((originals, reconstructions)):
            ax = axes[row][i]
            ax.imshow(images[i, 0], cmap="gray", vmin=0.0, vmax=1.0)
            ax.set_axis_off()
    axes[0][0].set_title("original", loc="left", fontsize="small")
    axes[1][0].set_title("reconstruction", loc="left", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return path


def projection_figure(embedding: Embedding2D, title: Optional[str] = None) -> go.Figure:
    """Interactive scatter; hovering shows the point index and its class"""
    fig = go.Figure()
    indices = np.arange(len(embedding))
    for label in np.unique(embedding.labels):
        members = embedding.labels == label
        name = class_name(label, embedding.class_names)
        fig.add_trace(
            go.Scatter(
                x=embedding.coords[members, 0],
                y=embedding.coords[members, 1],
                mode='markers',
                marker=dict(size=6, color=class_color(label), opacity=0.8),
                text=[f"index {i}, class {name}" for i in indices[members]],
                hoverinfo='text',
                name=name,
            )
        )
    fig.update_layout(
        title=title,
        legend_title="Class",
        height=600,
        margin={"r": 10, "t": 40, "l": 10, "b": 10},
    )
    return fig


def write_projection_html(
    embedding: Embedding2D, path: Union[str, Path], title: Optional[str] = None
) -> Optional[Path]:
    """Best effort; a failure is logged and the run carries on"""
    path = Path(path)
    try:
        projection_figure(embedding, title).write_html(str(path), include_plotlyjs="cdn")
        return path
    except Exception as e:
        logger.error(f"Error writing interactive projection to {path}: {str(e)}")
        return None


def emit_plots(result, directory: Union[str, Path]) -> List[Path]:
    """Write loss curves (CSV and SVG), projection scatter (SVG and HTML) and reconstructions"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    frame = loss_curves_frame(result.train_history, result.val_history)
    written.append(write_loss_curves_csv(frame, directory / "loss_curves.csv"))
    written.append(plot_loss_curves(frame, directory / "loss_curves.svg"))
    if result.embedding is not None:
        title = f"silhouette {result.silhouette:.3f}"
        written.append(plot_projection(result.embedding, directory / "projection.svg", title))
        html = write_projection_html(result.embedding, directory / "projection.html", title)
        if html is not None:
            written.append(html)
    if result.originals is not None and result.reconstructions is not None:
        written.append(plot_reconstructions(result.originals, result.reconstructions,
                                            directory / "reconstructions.svg"))
    logger.info(f"Wrote {len(written)} report files to {directory}")
    return written
