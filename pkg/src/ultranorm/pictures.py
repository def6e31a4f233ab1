"""Self-contained SVG plots: line profiles and STFT magnitude heatmaps.

The output of the same data is byte-identical across runs.

"""
import logging

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "ultranorm"
plt.rcParams["svg.fonttype"] = "none"


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    _logger.info(f"plot written to {path}")


def plot_profile(x, curves, path, xlabel="t", ylabel="", log_x=False,
                 title=None, fig_size=(5, 4)):
    """Line plot of ``curves``, a mapping from label to values over ``x``.

    Examples
    --------
    >>> import numpy as np
    >>> from ultranorm.pictures import plot_profile
    >>> t = np.linspace(0, 1, 5)
    >>> plot_profile(t, {"t^2": t ** 2}, "/tmp/profile.svg")

    """
    fig, ax = plt.subplots(figsize=fig_size)
    for label, values in curves.items():
        ax.plot(x, values, label=label)
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(curves) > 1:
        ax.legend()
    _save(fig, path)


def plot_stft_magnitude(F, path, fig_size=(5, 4), log_scale=True):
    """Heatmap of :math:`|V_\\psi f|` on a one-dimensional phase-space grid;
    in dimension two the slice through the middle ``x`` and ``xi`` nodes
    of the second coordinate is shown."""
    grid = F.grid
    magnitude = F.magnitude
    if grid.dim == 2:
        full = magnitude.reshape((grid.x_points,) * 2 + (grid.xi_points,) * 2)
        magnitude = full[:, grid.x_points // 2, :, grid.xi_points // 2]
    if log_scale:
        magnitude = np.log10(np.maximum(magnitude, 1e-300))
        magnitude = np.maximum(magnitude, magnitude.max() - 16)
    fig, ax = plt.subplots(figsize=fig_size)
    extent = (-grid.xi_extent, grid.xi_extent, -grid.x_extent, grid.x_extent)
    image = ax.imshow(magnitude, origin="lower", extent=extent,
                      aspect="auto", cmap="viridis")
    fig.colorbar(image, ax=ax,
                 label="log10 |V f|" if log_scale else "|V f|")
    ax.set_xlabel("xi")
    ax.set_ylabel("x")
    _save(fig, path)
