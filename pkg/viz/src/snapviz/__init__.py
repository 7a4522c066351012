"""Batch renderer for chartfree snapshot, report, and loss-log files."""

from .formats import read_loss_log, read_report, read_series, read_snapshot
from .render import deviation, heatmap, kymograph, loss_curve, mse_table, slices, sphere

__version__ = "0.1.0"
