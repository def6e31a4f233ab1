"""Grids, point handling and small numeric helpers shared by the other
modules.

"""
from dataclasses import dataclass, asdict

import numpy as np


@dataclass(frozen=True)
class SpatialGrid(object):
    """A uniform rectangular grid :math:`[-R, R]^d` with ``points`` nodes
    per axis.

    Examples
    --------
    >>> from ultranorm.utilities import SpatialGrid
    >>> grid = SpatialGrid(extent=1.0, points=3)
    >>> grid.axis
    array([-1.,  0.,  1.])
    >>> grid.nodes().shape
    (3, 1)

    """
    extent: float = 20.0
    points: int = 2001
    dim: int = 1

    def __post_init__(self):
        if self.points < 1 or self.dim < 1 or self.extent < 0:
            raise ValueError(f"invalid grid {self}")

    @property
    def axis(self):
        return np.linspace(-self.extent, self.extent, self.points)

    @property
    def step(self):
        if self.points == 1:
            return 0.0
        return 2 * self.extent / (self.points - 1)

    @property
    def shape(self):
        return (self.points,) * self.dim

    def nodes(self):
        """All nodes as an array of shape ``(points**dim, dim)``, in
        ``'ij'`` order."""
        mesh = np.meshgrid(*([self.axis] * self.dim), indexing='ij')
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def radii(self):
        return np.linalg.norm(self.nodes(), axis=1)

    def boundary_mask(self):
        """True at nodes having some coordinate on the boundary of the
        grid."""
        index = np.meshgrid(*([np.arange(self.points)] * self.dim),
                            indexing='ij')
        mask = np.zeros(self.points ** self.dim, dtype=bool)
        for idx in index:
            idx = idx.ravel()
            mask |= (idx == 0) | (idx == self.points - 1)
        return mask

    def refined(self):
        return SpatialGrid(self.extent, 2 * self.points - 1, self.dim)

    def to_dict(self):
        return asdict(self)


def default_grid(dim=1):
    """Default spatial grid: :math:`[-20, 20]` with 2001 points in
    dimension one, :math:`[-10, 10]^2` with 201 points per axis in
    dimension two."""
    if dim == 1:
        return SpatialGrid(20.0, 2001, 1)
    if dim == 2:
        return SpatialGrid(10.0, 201, 2)
    raise ValueError(f"unsupported dimension {dim}")


def as_points(x, dim):
    """Coerce ``x`` to an array of shape ``(N, dim)``.

    In dimension one a flat array is read as N points; in higher
    dimensions a flat array of length ``dim`` is a single point.

    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return x.reshape(1, 1)
    if x.ndim == 1:
        if dim == 1:
            return x[:, None]
        return x[None, :]
    if x.shape[-1] != dim:
        raise ValueError(f"points of dimension {x.shape[-1]}, expected {dim}")
    return x.reshape(-1, dim)


def ray_points(dim, r0, r1, count=64, diagonal=False):
    """Sample points along rays from the origin, between radii ``r0`` and
    ``r1``.

    Returns a list of ``(direction, radii, points)`` with the ``2*dim``
    coordinate rays, plus the ``2**dim`` diagonal rays when ``diagonal``
    is set.

    """
    radii = np.linspace(r0, r1, count)
    directions = []
    for i in range(dim):
        for sign in (1.0, -1.0):
            e = np.zeros(dim)
            e[i] = sign
            directions.append(e)
    if diagonal and dim > 1:
        corners = np.array(np.meshgrid(*([[1.0, -1.0]] * dim),
                                       indexing='ij')).reshape(dim, -1).T
        directions.extend(c / np.sqrt(dim) for c in corners)
    return [(e, radii, radii[:, None] * e[None, :]) for e in directions]


def ordered_map(func, items, pool=None):
    """``list(map(func, items))``, through ``pool`` when one is given.

    The result order is always the order of ``items``.

    """
    if pool is None:
        return [func(item) for item in items]
    return list(pool.map(func, items))


def log_abs(z):
    with np.errstate(divide='ignore'):
        return np.log(np.abs(z))


def tail(values, fraction):
    values = np.asarray(values)
    size = max(2, int(np.ceil(fraction * len(values))))
    return values[-size:]


def is_nonincreasing(values, atol=0.0):
    values = np.asarray(values, dtype=float)
    finite = values[np.isfinite(values)]
    return bool(np.all(np.diff(finite) <= atol))


def is_strictly_increasing(values):
    return bool(np.all(np.diff(np.asarray(values, dtype=float)) > 0))
