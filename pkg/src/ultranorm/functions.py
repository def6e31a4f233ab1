"""Hermite-Gaussian test functions

.. math:: f(x) = \\sum_k c_k e^{2\\pi i\\xi_k\\cdot x}e^{-a_k|x-x_k|^2}

with exact derivatives of every order up to 60, and the weighted
Roumieu seminorms

.. math:: \\sup_\\alpha\\sup_x \\frac{h^{|\\alpha|}|\\partial^\\alpha f(x)|v(x)}
   {M_\\alpha}, \\qquad
   \\sup_\\alpha\\sup_x \\frac{|\\partial^\\alpha f(x)|v(x)}
   {M_\\alpha\\prod_{j=0}^{|\\alpha|}r_j}.

Writing :math:`w = x - x_k - i\\pi\\xi_k/a_k`, each term is a constant
times :math:`e^{-a_kw^2}` in every coordinate, so that
:math:`\\partial^n` of it is :math:`(-\\sqrt{a})^nH_n(\\sqrt{a}w)` times
the term, :math:`H_n` the Hermite polynomials.

"""
import logging
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.special import gammaln

from ultranorm.utilities import (as_points, is_strictly_increasing, log_abs,
                                 tail)
from ultranorm.weights import assoc_exp

_logger = logging.getLogger(__name__)

DERIVATIVE_BUDGET = 60
DEFAULT_ALPHA_MAX = 40


class DerivativeBudgetError(ValueError):
    pass


class WindowClassError(ValueError):
    pass


@dataclass(frozen=True)
class GaussianTerm(object):
    """:math:`c\\,e^{2\\pi i\\xi_0\\cdot x}e^{-a|x-x_0|^2}`."""
    amplitude: complex
    center: tuple
    modulation: tuple
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("Gaussian widths must be positive")

    @property
    def dim(self):
        return len(self.center)


def _vector(value, dim):
    value = np.atleast_1d(np.asarray(value, dtype=float))
    if value.size == 1 and dim > 1:
        value = np.full(dim, value.item())
    if value.size != dim:
        raise ValueError(f"expected {dim} coordinates, got {value.size}")
    return tuple(float(v) for v in value)


def _hermite_factors(a, w, k_max):
    """:math:`(-\\sqrt{a})^kH_k(\\sqrt{a}w)` for :math:`0\\le k\\le k_{max}`,
    through :math:`P_{k+1} = -2awP_k - 2kaP_{k-1}`."""
    table = np.empty((k_max + 1,) + np.shape(w), dtype=complex)
    table[0] = 1.0
    if k_max >= 1:
        table[1] = -2 * a * w
    for k in range(1, k_max):
        table[k + 1] = -2 * a * w * table[k] - 2 * k * a * table[k - 1]
    return table


class HermiteGaussianFunction(object):
    """A finite combination of translated, modulated Gaussians.

    Parameters
    ----------
    terms : iterable of GaussianTerm or tuple
        Tuples are read as ``(amplitude, center, modulation, width)``.
    dim : int

    Examples
    --------
    >>> import numpy as np
    >>> from ultranorm.functions import HermiteGaussianFunction
    >>> f = HermiteGaussianFunction.gaussian()
    >>> complex(f(0.0)[0])
    (1+0j)
    >>> bool(np.isclose(f.norm(), 2 ** -0.25))
    True

    """
    def __init__(self, terms=(), dim=1):
        self.dim = dim
        self.terms = []
        for term in terms:
            if not isinstance(term, GaussianTerm):
                c, x0, xi0, a = term
                term = GaussianTerm(complex(c), _vector(x0, dim),
                                    _vector(xi0, dim), float(a))
            if term.dim != dim:
                raise ValueError("term dimension does not match")
            if term.amplitude != 0:
                self.terms.append(term)

    @classmethod
    def gaussian(cls, width=np.pi, center=0.0, modulation=0.0, amplitude=1.0,
                 dim=1):
        return cls([(amplitude, center, modulation, width)], dim)

    @classmethod
    def zero(cls, dim=1):
        return cls([], dim)

    def __repr__(self):
        return f"HermiteGaussianFunction({len(self.terms)} terms, " \
            f"dim={self.dim})"

    def __len__(self):
        return len(self.terms)

    def _combine(self, other):
        if other.dim != self.dim:
            raise ValueError("dimensions differ")
        return HermiteGaussianFunction(self.terms + other.terms, self.dim)

    def __add__(self, other):
        return self._combine(other)

    def __sub__(self, other):
        return self._combine(-1 * other)

    def __mul__(self, scalar):
        return HermiteGaussianFunction(
            [GaussianTerm(scalar * t.amplitude, t.center, t.modulation,
                          t.width) for t in self.terms], self.dim)

    __rmul__ = __mul__

    def conj(self):
        return HermiteGaussianFunction(
            [GaussianTerm(np.conj(t.amplitude), t.center,
                          tuple(-m for m in t.modulation), t.width)
             for t in self.terms], self.dim)

    def translate(self, u):
        """:math:`T_uf = f(\\cdot - u)`."""
        u = np.asarray(_vector(u, self.dim))
        return HermiteGaussianFunction(
            [GaussianTerm(t.amplitude *
                          np.exp(-2j * np.pi * np.dot(t.modulation, u)),
                          tuple(np.add(t.center, u)), t.modulation, t.width)
             for t in self.terms], self.dim)

    def modulate(self, eta):
        """:math:`M_\\eta f = e^{2\\pi i\\eta\\cdot x}f`."""
        eta = np.asarray(_vector(eta, self.dim))
        return HermiteGaussianFunction(
            [GaussianTerm(t.amplitude, t.center,
                          tuple(np.add(t.modulation, eta)), t.width)
             for t in self.terms], self.dim)

    def inner(self, other):
        """:math:`(f, g) = \\int f\\bar g` in closed form."""
        total = 0j
        for s in self.terms:
            for t in other.terms:
                total += s.amplitude * np.conj(t.amplitude) * \
                    np.prod([pair_integral(s.width, s.center[i],
                                           s.modulation[i], t.width,
                                           t.center[i], t.modulation[i])
                             for i in range(self.dim)])
        return complex(total)

    def norm(self):
        return float(np.sqrt(max(self.inner(self).real, 0.0)))

    def axis_tables(self, term, axis, s, k_max):
        """:math:`\\partial^k` of the factor of ``term`` in coordinate
        ``axis`` at the one-dimensional points ``s``."""
        a, x0, xi0 = term.width, term.center[axis], term.modulation[axis]
        s = np.asarray(s, dtype=float)
        factor = np.exp(2j * np.pi * xi0 * s - a * (s - x0) ** 2)
        w = (s - x0) - 1j * np.pi * xi0 / a
        return _hermite_factors(a, w, k_max) * factor[None, ...]

    def derivative_values(self, alpha, x):
        """:math:`\\partial^\\alpha f` at points ``x``."""
        alpha = _multi_index(alpha, self.dim)
        points = as_points(x, self.dim)
        total = np.zeros(len(points), dtype=complex)
        for term in self.terms:
            value = np.full(len(points), term.amplitude, dtype=complex)
            for i, k in enumerate(alpha):
                value *= self.axis_tables(term, i, points[:, i], k)[k]
            total += value
        return total

    def __call__(self, x):
        return self.derivative_values((0,) * self.dim, x)


def _multi_index(alpha, dim):
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    if len(alpha) != dim or min(alpha) < 0:
        raise ValueError(f"invalid multi-index {alpha} in dimension {dim}")
    if sum(alpha) > DERIVATIVE_BUDGET:
        raise DerivativeBudgetError(
            f"|alpha| = {sum(alpha)} exceeds {DERIVATIVE_BUDGET}")
    return alpha


def pair_integral(a, x1, xi1, b, x2, xi2):
    """:math:`\\int e^{2\\pi i(\\xi_1-\\xi_2)x}e^{-a(x-x_1)^2-b(x-x_2)^2}dx`.
    """
    ab = a + b
    nu = xi1 - xi2
    m = (a * x1 + b * x2) / ab
    return np.sqrt(np.pi / ab) * np.exp(2j * np.pi * nu * m) * \
        np.exp(-np.pi ** 2 * nu ** 2 / ab - a * b / ab * (x1 - x2) ** 2)


class Derivative(object):
    """:math:`\\partial^\\alpha f` of a Hermite-Gaussian function."""
    def __init__(self, function, alpha):
        self.function = function
        self.alpha = _multi_index(alpha, function.dim)

    def __call__(self, x):
        return self.function.derivative_values(self.alpha, x)

    def __repr__(self):
        return f"Derivative({self.function!r}, alpha={self.alpha})"


def derivative(f, alpha):
    """The exact derivative :math:`\\partial^\\alpha f`, for
    :math:`|\\alpha|\\le 60`.

    Examples
    --------
    >>> import numpy as np
    >>> from ultranorm.functions import HermiteGaussianFunction, derivative
    >>> df = derivative(HermiteGaussianFunction.gaussian(), 1)
    >>> x = 0.3
    >>> bool(np.isclose(df(x)[0], -2 * np.pi * x * np.exp(-np.pi * x * x)))
    True

    """
    return Derivative(f, alpha)


def multi_indices(dim, order_max):
    """Multi-indices with :math:`|\\alpha|\\le` ``order_max``, in
    lexicographic order."""
    return [alpha for alpha in product(range(order_max + 1), repeat=dim)
            if sum(alpha) <= order_max]


def derivative_slices(f, grid, alpha_max):
    """Yield ``(alpha, |alpha|, log|d^alpha f|)`` over the nodes of
    ``grid``, multi-indices in lexicographic order."""
    if alpha_max > DERIVATIVE_BUDGET:
        raise DerivativeBudgetError(
            f"alpha_max = {alpha_max} exceeds {DERIVATIVE_BUDGET}")
    axis = grid.axis
    n = len(axis)
    if not f.terms:
        for alpha in multi_indices(f.dim, alpha_max):
            yield alpha, sum(alpha), np.full(n ** f.dim, -np.inf)
        return
    amplitudes = np.array([t.amplitude for t in f.terms])
    tables = [[f.axis_tables(t, i, axis, alpha_max) for i in range(f.dim)]
              for t in f.terms]
    if f.dim == 1:
        total = np.einsum('t,tkn->kn', amplitudes,
                          np.array([tb[0] for tb in tables]))
        for k in range(alpha_max + 1):
            yield (k,), k, log_abs(total[k])
    elif f.dim == 2:
        first = np.array([tb[0] for tb in tables])
        second = np.array([tb[1] for tb in tables])
        for a1 in range(alpha_max + 1):
            weighted = amplitudes[:, None] * first[:, a1, :]
            block = np.einsum('ti,tkj->kij', weighted,
                              second[:, :alpha_max - a1 + 1, :])
            for a2 in range(alpha_max - a1 + 1):
                yield (a1, a2), a1 + a2, log_abs(block[a2].ravel())
    else:
        raise ValueError("seminorms are implemented for d = 1, 2")


@dataclass
class SeminormResult(object):
    """A weighted sup over multi-indices and grid nodes.

    ``order_terms`` holds, for each order, the largest term, so that the
    decay in :math:`|\\alpha|` can be audited.

    """
    value: float
    alpha: tuple
    point: list
    alpha_edge: bool
    grid_edge: bool
    order_terms: list

    @property
    def lower_bound(self):
        """Whether the sup sits on the boundary of the explored range."""
        return self.alpha_edge or self.grid_edge

    @property
    def log_value(self):
        return float(np.log(self.value)) if self.value > 0 else -np.inf

    def to_dict(self):
        return {"value": self.value, "alpha": list(self.alpha),
                "point": self.point, "alpha_edge": self.alpha_edge,
                "grid_edge": self.grid_edge, "lower_bound": self.lower_bound}


def weighted_sup(slices, log_weight, log_denominators, nodes, boundary,
                 alpha_max, log_h=0.0):
    """Sup of :math:`h^{|\\alpha|}|\\partial^\\alpha f|w/D_{|\\alpha|}` from
    derivative slices; ties keep the first multi-index and node."""
    best, best_alpha, best_node = -np.inf, None, 0
    order_terms = np.full(alpha_max + 1, -np.inf)
    for alpha, order, log_d in slices:
        terms = order * log_h + log_d + log_weight - log_denominators[order]
        i = int(np.argmax(terms))
        order_terms[order] = max(order_terms[order], terms[i])
        if terms[i] > best or best_alpha is None:
            best, best_alpha, best_node = terms[i], alpha, i
    if not np.isfinite(best):
        return SeminormResult(0.0, tuple(best_alpha), nodes[0].tolist(),
                              False, False, np.zeros(alpha_max + 1).tolist())
    return SeminormResult(
        float(np.exp(best)), tuple(best_alpha), nodes[best_node].tolist(),
        sum(best_alpha) == alpha_max, bool(boundary[best_node]),
        np.exp(order_terms).tolist())


def _log_weight(v, nodes):
    if v is None:
        return np.zeros(len(nodes))
    return v.log(nodes)


def seminorm_h(f, M, h, v, grid, alpha_max=DEFAULT_ALPHA_MAX):
    """:math:`\\sup_\\alpha\\sup_x h^{|\\alpha|}|\\partial^\\alpha f(x)|
    v(x)/M_{|\\alpha|}` over :math:`|\\alpha|\\le` ``alpha_max`` and the
    grid nodes.

    Parameters
    ----------
    f : HermiteGaussianFunction
    M : WeightSequence
    h : float
    v : WeightFunction or NachbinWeight or None
        ``None`` stands for the weight 1.
    grid : SpatialGrid
    alpha_max : int

    Returns
    -------
    SeminormResult
        Flagged as a lower bound when the sup sits at
        :math:`|\\alpha| = ` ``alpha_max`` or on the grid boundary.

    Examples
    --------
    >>> from ultranorm.functions import HermiteGaussianFunction, seminorm_h
    >>> from ultranorm.sequences import gevrey
    >>> from ultranorm.utilities import SpatialGrid
    >>> f = HermiteGaussianFunction.gaussian()
    >>> res = seminorm_h(f, gevrey(1), 1.0, None, SpatialGrid(5.0, 501), 0)
    >>> res.value, res.alpha
    (1.0, (0,))

    """
    nodes = grid.nodes()
    return weighted_sup(derivative_slices(f, grid, alpha_max),
                        _log_weight(v, nodes), M.log_values(alpha_max),
                        nodes, grid.boundary_mask(), alpha_max, np.log(h))


def seminorm_rj(f, M, r, v, grid, alpha_max=DEFAULT_ALPHA_MAX):
    """:math:`\\sup_\\alpha\\sup_x |\\partial^\\alpha f(x)|v(x)/
    (M_{|\\alpha|}\\prod_{j=0}^{|\\alpha|}r_j)`."""
    nodes = grid.nodes()
    log_den = M.log_values(alpha_max) + r.log_products(alpha_max)
    return weighted_sup(derivative_slices(f, grid, alpha_max),
                        _log_weight(v, nodes), log_den, nodes,
                        grid.boundary_mask(), alpha_max)


def gelfand_shilov_seminorm(f, M, A, h, tau, grid,
                            alpha_max=DEFAULT_ALPHA_MAX):
    """The seminorm with weight :math:`e^{A(\\tau|x|)}`."""
    return seminorm_h(f, M, h, assoc_exp(A, 1.0 / tau, f.dim), grid,
                      alpha_max)


def sup_sequence(f, v, grid, alpha_max=DEFAULT_ALPHA_MAX):
    """:math:`\\log\\sup_x|\\partial^\\alpha f(x)|v(x)` for each
    multi-index, as a dict."""
    log_w = _log_weight(v, grid.nodes())
    return {alpha: float(np.max(log_d + log_w))
            for alpha, _, log_d in derivative_slices(f, grid, alpha_max)}


def _truncated_finite(terms, orders, alpha_max, log_bound):
    head = terms[orders <= 0.75 * alpha_max]
    rest = terms[orders > 0.75 * alpha_max]
    top = np.max(terms)
    return bool(top < log_bound and
                (len(rest) == 0 or np.max(rest) <= np.max(head)))


def _log_sequence(a, alphas):
    get = a if callable(a) else a.__getitem__
    return np.array([get(alpha) for alpha in alphas], dtype=float)


def roumieu_sequence_equivalence(a, M, h_grid, r_list,
                                 alpha_max=DEFAULT_ALPHA_MAX, dim=1,
                                 bound=1e12, projective=None):
    """Compare the two finiteness conditions on a multi-sequence
    :math:`a_\\alpha \\ge 0`:

    * some ``h`` in ``h_grid`` gives
      :math:`\\sup_\\alpha a_\\alpha h^{|\\alpha|}/M_\\alpha < \\infty`,
    * every ``r`` in ``r_list`` gives
      :math:`\\sup_\\alpha a_\\alpha/(M_\\alpha\\prod r_j) < \\infty`.

    On the truncation a sup counts as finite when it is below ``bound``
    and the terms of the last quarter of orders do not exceed the rest.

    Parameters
    ----------
    a : callable or dict
        Maps a multi-index to :math:`\\log a_\\alpha`.
    projective : callable or dict, optional
        The sequence tested against the projective seminorms, when it
        differs from ``a``, as for sups taken under another weight.

    Returns
    -------
    dict
        ``inductive``, ``projective`` and ``agree`` verdicts with the
        per-parameter results.

    """
    alphas = multi_indices(dim, alpha_max)
    log_a = _log_sequence(a, alphas)
    log_b = log_a if projective is None else \
        _log_sequence(projective, alphas)
    orders = np.array([sum(alpha) for alpha in alphas])
    L = M.log_values(alpha_max)
    log_bound = np.log(bound)
    per_h = {float(h): _truncated_finite(
        log_a + orders * np.log(h) - L[orders], orders, alpha_max, log_bound)
        for h in h_grid}
    per_r = {r.name: _truncated_finite(
        log_b - L[orders] - r.log_products(alpha_max)[orders], orders,
        alpha_max, log_bound) for r in r_list}
    finite_h = any(per_h.values())
    finite_r = all(per_r.values())
    return {"inductive": finite_h, "projective": finite_r,
            "agree": finite_h == finite_r, "per_h": per_h, "per_r": per_r}


def ensure_gaussian_window_class(M, P=200, threshold=2.0):
    """Reject sequences too small for Gaussian windows.

    Gaussians lie in the classes of ``M`` only when
    :math:`p!^{1/2}\\prec M_p`; the trend
    :math:`(M_p/(M_0\\,p!^{1/2}))^{1/p}` must increase strictly on its last
    quarter and end above ``threshold``.

    Raises
    ------
    WindowClassError

    """
    L = M.log_values(P)
    p = np.arange(2, P + 1)
    trend = np.exp((L[p] - L[0] - 0.5 * gammaln(p + 1.0)) / p)
    if not (is_strictly_increasing(tail(trend, 0.25)) and
            trend[-1] > threshold):
        raise WindowClassError(
            f"{M.name}: Gaussian windows need p!^(1/2) < M_p; the trend ends "
            f"at {trend[-1]:.3g}")
    return trend


def default_family(dim=1):
    """Twelve Hermite-Gaussian functions with centers in {0, 1, -1},
    modulations in {0, 1, -1} and widths pi/2, pi and 2 pi."""
    pi = np.pi
    g = HermiteGaussianFunction.gaussian

    def one(width=pi, center=0.0, modulation=0.0, amplitude=1.0):
        return g(width, center, modulation, amplitude, dim)
    return [
        one(),
        one(pi / 2),
        one(2 * pi),
        one(center=1.0),
        one(center=-1.0),
        one(modulation=1.0),
        one(modulation=-1.0),
        one(pi / 2, 1.0, 1.0),
        one(2 * pi, -1.0, -1.0),
        one(center=1.0) + one(center=-1.0),
        one(modulation=1.0) - one(pi / 2, 1.0, amplitude=0.5),
        one(2 * pi, amplitude=2.0) + one(center=-1.0, modulation=-1.0,
                                         amplitude=1j),
    ]


def from_config(terms, dim=1):
    """Build a function from a list of term dicts with keys
    ``amplitude`` (number or ``[re, im]``), ``center``, ``modulation`` and
    ``width``."""
    built = []
    for term in terms:
        amplitude = term.get("amplitude", 1.0)
        if isinstance(amplitude, (list, tuple)):
            amplitude = complex(*amplitude)
        built.append((amplitude, term.get("center", 0.0),
                      term.get("modulation", 0.0), term.get("width", np.pi)))
    return HermiteGaussianFunction(built, dim)
