"""Reporting module: loss curves, projection scatter plots and reconstructions"""

from .plots import (
    CLASS_COLORS,
    class_color,
    emit_plots,
    loss_curves_frame,
    plot_loss_curves,
    plot_projection,
    plot_reconstructions,
    projection_figure,
    write_loss_curves_csv,
    write_projection_html,
)

__all__ = [
    'CLASS_COLORS',
    'class_color',
    'emit_plots',
    'loss_curves_frame',
    'plot_loss_curves',
    'plot_projection',
    'plot_reconstructions',
    'projection_figure',
    'write_loss_curves_csv',
    'write_projection_html',
]
