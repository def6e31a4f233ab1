"""Decreasing weight systems :math:`\\mathcal{V} = (v_n)` on
:math:`\\mathbb{R}^d`, their maximal Nachbin families
:math:`\\bar{V}(\\mathcal{V})`, conditions (S) and (V), translation
admissibility with respect to a weight sequence :math:`A_p`, the
construction of :math:`\\bar v` from an admissibility chain, and
mollification of tabulated weights.

Every weight is handled through its logarithm.

"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import logsumexp

from ultranorm.reports import CheckRecord, Status
from ultranorm.sequences import associated_function
from ultranorm.utilities import as_points, is_nonincreasing, ray_points

_logger = logging.getLogger(__name__)

_BLOCK = 2 ** 20


class NormalizationError(ValueError):
    pass


class ChainError(ValueError):
    pass


class WeightFunction(object):
    """A positive weight on :math:`\\mathbb{R}^d` given by its logarithm.

    Parameters
    ----------
    log_function : callable
        Map from an array of points of shape ``(N, dim)`` to the ``N``
        values of :math:`\\log w`.
    dim : int
    kind : str
        Closed-form family the weight belongs to.
    params : dict, optional

    """
    def __init__(self, log_function, dim=1, kind="custom", params=None):
        self.log_function = log_function
        self.dim = dim
        self.kind = kind
        self.params = params or {}

    def log(self, x):
        return np.asarray(self.log_function(as_points(x, self.dim)),
                          dtype=float)

    def __call__(self, x):
        return np.exp(self.log(x))

    def __repr__(self):
        return f"WeightFunction({self.kind}, dim={self.dim}, {self.params})"


def _norm(points):
    return np.linalg.norm(points, axis=1)


def unit(dim=1):
    return WeightFunction(lambda x: np.zeros(len(x)), dim, "unit")


def assoc_exp(seq, scale=1.0, dim=1):
    """:math:`e^{M(|x|/c)}`."""
    return WeightFunction(
        lambda x: associated_function(seq, _norm(x) / scale), dim,
        "assoc_exp", {"sequence": seq.name, "scale": scale})


def exp_rate(tau0, dim=1):
    """:math:`e^{\\tau_0|x|}`."""
    return WeightFunction(lambda x: tau0 * _norm(x), dim, "exp_rate",
                          {"tau0": tau0})


def polynomial(k, dim=1):
    """:math:`(1+|x|)^k`."""
    return WeightFunction(lambda x: k * np.log1p(_norm(x)), dim,
                          "polynomial", {"k": k})


def gaussian(a, dim=1):
    """:math:`e^{-a|x|^2}`."""
    return WeightFunction(lambda x: -a * np.sum(x ** 2, axis=1), dim,
                          "gaussian", {"a": a})


def reciprocal(w):
    return WeightFunction(lambda x: -w.log_function(x), w.dim, "reciprocal",
                          {"of": repr(w)})


def scaled(w, lam):
    log_lam = np.log(lam)
    return WeightFunction(lambda x: log_lam + w.log_function(x), w.dim,
                          "scaled", {"lambda": lam, "of": repr(w)})


def translated(w, shift):
    shift = np.asarray(shift, dtype=float).reshape(1, -1)
    return WeightFunction(lambda x: w.log_function(x - shift), w.dim,
                          "translated", {"shift": shift.ravel().tolist()})


def infimum(weights):
    weights = list(weights)
    return WeightFunction(
        lambda x: np.min([w.log_function(x) for w in weights], axis=0),
        weights[0].dim, "infimum", {"terms": len(weights)})


def tensor(w1, w2):
    """:math:`w_1\\otimes w_2(x, y) = w_1(x)w_2(y)` on the product space."""
    d1 = w1.dim
    return WeightFunction(
        lambda z: w1.log_function(z[:, :d1]) + w2.log_function(z[:, d1:]),
        w1.dim + w2.dim, "tensor", {"left": repr(w1), "right": repr(w2)})


def tabulated(axis, log_values, kind="table", params=None):
    """A one-dimensional weight interpolated linearly in log scale."""
    axis = np.asarray(axis, dtype=float)
    log_values = np.asarray(log_values, dtype=float)
    return WeightFunction(lambda x: np.interp(x[:, 0], axis, log_values), 1,
                          kind, dict(params or {}, points=len(axis)))


def read_weight_table(path):
    """Read a CSV table with header ``x,value``."""
    data = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    if np.any(data[:, 1] <= 0):
        raise ValueError(f"{path}: weights must be positive")
    return data[:, 0], data[:, 1]


class WeightSystem(object):
    """An indexed family :math:`n\\mapsto v_n`, :math:`n\\ge 1`."""
    def __init__(self, member, dim=1, kind="custom", params=None):
        self.member = member
        self.dim = dim
        self.kind = kind
        self.params = params or {}

    def __getitem__(self, n):
        if n < 1:
            raise IndexError("weight systems are indexed from 1")
        return self.member(n)

    def __repr__(self):
        return f"WeightSystem({self.kind}, dim={self.dim}, {self.params})"


def assoc_exp_system(seq, scale=1.0, dim=1):
    """:math:`v_n = e^{M(|x|/(cn))}`; with :math:`c = 1` this is the system
    :math:`\\mathcal{V}_{\\{M_p\\}}`."""
    return WeightSystem(lambda n: assoc_exp(seq, scale * n, dim), dim,
                        "assoc_exp", {"sequence": seq.name, "scale": scale})


def constant_system(weight):
    return WeightSystem(lambda n: weight, weight.dim, "constant",
                        {"weight": repr(weight)})


def poly_decay_system(k=1, dim=1):
    """:math:`v_n = (1+|x|)^{-kn}`."""
    return WeightSystem(lambda n: polynomial(-k * n, dim), dim, "poly_decay",
                        {"k": k})


def gaussian_system(a, dim=1):
    """:math:`v_n = e^{-na|x|^2}`."""
    return WeightSystem(lambda n: gaussian(n * a, dim), dim, "gaussian",
                        {"a": a})


def sequence_space_system(dim=1):
    """:math:`w_n(\\alpha) = n^{-|\\alpha|}` on multi-indices."""
    def member(n):
        return WeightFunction(lambda a: -np.sum(a, axis=1) * np.log(n), dim,
                              "multi_index", {"n": n})
    return WeightSystem(member, dim, "sequence_space")


def tensor_system(V, W):
    """:math:`(v_n\\otimes w_n)_n`; decreasing when both factors are."""
    return WeightSystem(lambda n: tensor(V[n], W[n]), V.dim + W.dim,
                        "tensor", {"left": repr(V), "right": repr(W)})


class NachbinWeight(object):
    """A weight :math:`\\inf_j \\lambda_j w_j` dominated by the members of a
    system, or a closed form.

    Parameters
    ----------
    terms : list of (float, WeightFunction)
        Pairs :math:`(\\log\\lambda_j, w_j)`.
    dim : int
    closed_form : WeightFunction, optional
        Used instead of the terms when given.

    """
    def __init__(self, terms=(), dim=1, closed_form=None, name=None):
        self.terms = list(terms)
        self.closed_form = closed_form
        self.dim = closed_form.dim if closed_form is not None else dim
        self.name = name or "v"
        if closed_form is None and not self.terms:
            raise ChainError("a Nachbin weight needs at least one term")

    @classmethod
    def from_system(cls, V, pairs, name=None):
        """:math:`\\inf_j \\lambda_j v_{n_j}` from pairs
        :math:`(\\lambda_j, n_j)`."""
        return cls([(np.log(lam), V[n]) for lam, n in pairs], V.dim,
                   name=name)

    @classmethod
    def direct(cls, weight, name=None):
        return cls(closed_form=weight, name=name)

    def add_term(self, lam, weight):
        return NachbinWeight(self.terms + [(np.log(lam), weight)], self.dim,
                             name=self.name)

    def truncated(self, k):
        return NachbinWeight(self.terms[:k], self.dim, name=self.name)

    def __len__(self):
        return len(self.terms)

    def log(self, x):
        if self.closed_form is not None:
            return self.closed_form.log(x)
        points = as_points(x, self.dim)
        return np.min([s + w.log(points) for s, w in self.terms], axis=0)

    def __call__(self, x):
        return np.exp(self.log(x))

    def as_weight(self):
        return WeightFunction(self.log, self.dim, "nachbin",
                              {"terms": len(self.terms)})

    def __repr__(self):
        return f"NachbinWeight({self.name!r}, terms={len(self.terms)})"


def check_decreasing(V, n_max, grid, slack=1e-12):
    """Whether :math:`v_{n+1}\\le v_n` at every node for :math:`n<n_{max}`.

    Returns
    -------
    (bool, dict or None)
        The verdict and a witness ``{"n": n, "point": x}`` of the first
        violation.

    """
    points = grid.nodes()
    previous = V[1].log(points)
    for n in range(1, n_max):
        current = V[n + 1].log(points)
        bad = np.nonzero(current > previous + np.log1p(slack))[0]
        if len(bad):
            return False, {"n": n, "point": points[bad[0]].tolist()}
        previous = current
    return True, None


def nachbin_membership(v, V, n_max, grid, bound=None, edge_band=0.05,
                       atol=1e-9):
    """Sup of :math:`v/v_n` on the grid for :math:`1\\le n\\le n_{max}`.

    A ratio that is larger in the outer band of radii than just inside it
    cannot be bounded from grid values, and the verdict is inconclusive.
    When ``bound`` is given a larger sup fails.

    """
    points = grid.nodes()
    radii = np.linalg.norm(points, axis=1)
    R = radii.max()
    outer = radii >= (1 - edge_band) * R
    inner = (radii >= (1 - 2 * edge_band) * R) & ~outer
    log_v = v.log(points)
    sups, rising = [], []
    for n in range(1, n_max + 1):
        ratio = log_v - V[n].log(points)
        sups.append(float(np.exp(np.max(ratio))))
        rising.append(bool(inner.any() and outer.any() and
                           ratio[outer].max() > ratio[inner].max() + atol))
    if any(rising):
        status = Status.INCONCLUSIVE
    elif bound is not None and max(sups) > bound:
        status = Status.FAIL
    else:
        status = Status.PASS
    return CheckRecord(
        name=f"nachbin_membership[{getattr(v, 'name', 'v')}]",
        anchor="sup v/v_n finite for every n",
        status=status,
        constants={"sup_ratios": sups, "edge_rising": rising},
        tolerances={"edge_band": edge_band, "atol": atol, "bound": bound},
        grid=grid.to_dict(),
        provenance=[f"ratio increases at the grid edge for n={n}"
                    for n, r in zip(range(1, n_max + 1), rising) if r])


def condition_s_check(V, n, m, grid, eps=1e-2, r0=None, diagonal=False,
                      count=64):
    """Sampled form of ":math:`v_m/v_n` vanishes at infinity".

    The ratio is sampled along the coordinate rays (and the diagonals if
    ``diagonal``) from ``r0`` (default half the grid extent) to the grid
    extent. It must be non-increasing on every ray and at most ``eps`` at
    the end of every ray.

    Returns
    -------
    (bool, dict)

    """
    if m <= n:
        raise ValueError("condition (S) compares m > n")
    R = grid.extent
    r0 = R / 2 if r0 is None else r0
    monotone, boundary = True, -np.inf
    for direction, radii, points in ray_points(grid.dim, r0, R, count,
                                               diagonal):
        ell = V[m].log(points) - V[n].log(points)
        monotone = monotone and is_nonincreasing(ell, atol=1e-9)
        boundary = max(boundary, float(ell[-1]))
    boundary_ratio = float(np.exp(boundary))
    ok = monotone and boundary_ratio <= eps
    return ok, {"n": n, "m": m, "monotone": monotone,
                "boundary_ratio": boundary_ratio, "eps": eps}


def _lambda(lambdas, j):
    return lambdas(j) if callable(lambdas) else lambdas[j - 1]


def _index_map(N_of_n):
    return N_of_n if callable(N_of_n) else N_of_n.__getitem__


def condition_v_witness_check(V, lambdas, v, N_of_n, grid, n_list=None,
                              atol=1e-12):
    """Check :math:`\\inf\\{\\lambda_1v_1,\\dots,\\lambda_Nv_N\\}\\le
    \\sup\\{v_n/n, v\\}` pointwise, with :math:`N = N(n)`.

    ``lambdas`` lists :math:`\\lambda_1, \\lambda_2, \\dots` (or maps ``j``
    to :math:`\\lambda_j`); ``N_of_n`` is a mapping or a callable.

    Returns
    -------
    (bool, dict or None)

    """
    points = grid.nodes()
    if n_list is None:
        n_list = sorted(N_of_n) if isinstance(N_of_n, dict) else [1]
    N_at = _index_map(N_of_n)
    log_v = v.log(points)
    for n in n_list:
        N = N_at(n)
        lhs = np.min([np.log(_lambda(lambdas, j)) + V[j].log(points)
                      for j in range(1, N + 1)], axis=0)
        rhs = np.maximum(V[n].log(points) - np.log(n), log_v)
        bad = np.nonzero(lhs > rhs + atol)[0]
        if len(bad):
            return False, {"n": n, "N": N, "point": points[bad[0]].tolist()}
    return True, None


def build_v_witness(V, K, grid, lambdas=None, n_list=None, atol=1e-12):
    """Build :math:`v = \\inf_{k\\le K}\\lambda_kv_k` and, for each ``n``,
    the least :math:`N(n)\\le K` for which condition (V) holds on the
    grid.

    Returns
    -------
    (NachbinWeight, list, dict)
        The weight, the :math:`\\lambda_k` and the map :math:`n\\mapsto N`.

    """
    lambdas = list(lambdas) if lambdas is not None else \
        [float(k) for k in range(1, K + 1)]
    n_list = list(n_list) if n_list is not None else list(range(1, K + 1))
    v = NachbinWeight.from_system(
        V, [(lambdas[k - 1], k) for k in range(1, K + 1)], name="v_witness")
    points = grid.nodes()
    log_v = v.log(points)
    partial = np.full(len(points), np.inf)
    running = []
    for j in range(1, K + 1):
        partial = np.minimum(partial, np.log(lambdas[j - 1]) +
                             V[j].log(points))
        running.append(partial.copy())
    N_of_n = {}
    for n in n_list:
        rhs = np.maximum(V[n].log(points) - np.log(n), log_v)
        N_of_n[n] = next(j + 1 for j, lhs in enumerate(running)
                         if np.all(lhs <= rhs + atol))
    _logger.info(f"condition (V) witness: {N_of_n}")
    return v, lambdas, N_of_n


def _product_log_max(log_fn, X, Y, offset_x=None, offset_y=None):
    """Max over the product grid of ``log_fn(x + y) - offset_x(x) -
    offset_y(y)`` with its argmax ``(x, y)``."""
    nx, ny = len(X), len(Y)
    offset_x = np.zeros(nx) if offset_x is None else offset_x
    offset_y = np.zeros(ny) if offset_y is None else offset_y
    rows = max(1, _BLOCK // ny)
    best, where = -np.inf, (X[0], Y[0])
    for start in range(0, nx, rows):
        block = X[start:start + rows]
        sums = (block[:, None, :] + Y[None, :, :]).reshape(-1, X.shape[1])
        values = log_fn(sums).reshape(len(block), ny) - \
            offset_x[start:start + rows, None] - offset_y[None, :]
        i, j = np.unravel_index(np.argmax(values), values.shape)
        if values[i, j] > best:
            best, where = float(values[i, j]), (block[i], Y[j])
    return best, where


def _log_translation_ratio(V, A, tau, n, m, X, Y, log_A_y=None):
    if log_A_y is None:
        log_A_y = associated_function(A, tau * np.linalg.norm(Y, axis=1))
    return _product_log_max(V[m].log, X, Y, V[n].log(X), log_A_y)


def admissibility_check(V, A, tau, pairs, C, grid_x, grid_y, atol=1e-12):
    """Measure :math:`\\max v_m(x+y)/(v_n(x)e^{A(\\tau y)})` over the
    product grid for every pair ``(n, m)``; pass iff each is at most
    ``C``."""
    if tau <= 0 or C <= 0:
        raise ValueError("admissibility needs tau > 0 and C > 0")
    X, Y = grid_x.nodes(), grid_y.nodes()
    log_A_y = associated_function(A, tau * np.linalg.norm(Y, axis=1))
    measured, worst = [], []
    for n, m in pairs:
        if m < n:
            raise ValueError(f"admissibility compares m >= n, got {(n, m)}")
        best, (x, y) = _log_translation_ratio(V, A, tau, n, m, X, Y,
                                              log_A_y)
        measured.append(float(np.exp(best)))
        worst.append({"n": n, "m": m, "x": x.tolist(), "y": y.tolist()})
    ok = all(np.log(c) <= np.log(C) + atol for c in measured)
    return CheckRecord(
        name=f"admissibility[{V.kind},{A.name},tau={tau:g}]",
        anchor="translation admissibility v_m(x+y) <= C v_n(x) e^{A(tau y)}",
        status=Status.PASS if ok else Status.FAIL,
        constants={"C_measured": measured, "C": C, "tau": tau,
                   "pairs": [list(p) for p in pairs], "argmax": worst},
        tolerances={"atol": atol},
        grid={"x": grid_x.to_dict(), "y": grid_y.to_dict()},
        provenance=[] if ok else ["hypothesis v_m(x+y) <= C v_n(x)e^{A(tau y)}"
                                  " violated"])


@dataclass(frozen=True)
class ChainLink(object):
    n: int
    C: float
    C_prime: float


def admissibility_chain(V, A, tau, v, n0, length, grid_x, grid_y):
    """Links :math:`(n_j, C_j, C'_j)`, :math:`n_j = 2^jn_0`.

    :math:`C_j` is the admissibility constant of the pair
    :math:`(n_j, n_{j+1})` and :math:`C'_j = \\sup v/v_{n_j}`, both
    measured over all sums :math:`x+y` of the product grid.

    """
    X, Y = grid_x.nodes(), grid_y.nodes()
    log_A_y = associated_function(A, tau * np.linalg.norm(Y, axis=1))
    chain = []
    for j in range(length):
        n, m = n0 * 2 ** j, n0 * 2 ** (j + 1)
        log_c, _ = _log_translation_ratio(V, A, tau, n, m, X, Y, log_A_y)
        log_cp, _ = _product_log_max(lambda z: v.log(z) - V[n].log(z), X, Y)
        chain.append(ChainLink(n, float(np.exp(log_c)),
                               float(np.exp(log_cp))))
    _logger.debug(f"admissibility chain {chain}")
    return chain


def build_vbar(V, chain):
    """:math:`\\bar v = \\inf_{j\\le L-2} C_jC'_{j+1}v_{n_j}` for a chain of
    length :math:`L\\ge 2`."""
    chain = list(chain)
    if len(chain) < 2:
        raise ChainError("building v-bar needs a chain of at least two links")
    terms = [(np.log(chain[j].C) + np.log(chain[j + 1].C_prime),
              V[chain[j].n]) for j in range(len(chain) - 1)]
    return NachbinWeight(terms, V.dim, name="vbar")


def vbar_inequality_check(v, vbar, A, tau, grid_x, grid_y, atol=1e-9):
    """Check :math:`v(x+y)\\le\\bar v(x)e^{A(\\tau y)}` on the product
    grid."""
    X, Y = grid_x.nodes(), grid_y.nodes()
    log_A_y = associated_function(A, tau * np.linalg.norm(Y, axis=1))
    best, (x, y) = _product_log_max(v.log, X, Y, vbar.log(X), log_A_y)
    ok = best <= atol
    return CheckRecord(
        name=f"vbar_inequality[{getattr(v, 'name', 'v')}]",
        anchor="v(x+y) <= vbar(x) e^{A(tau y)}",
        status=Status.PASS if ok else Status.FAIL,
        constants={"max_log_excess": best, "x": x.tolist(), "y": y.tolist(),
                   "tau": tau, "terms": len(vbar)},
        tolerances={"atol": atol},
        grid={"x": grid_x.to_dict(), "y": grid_y.to_dict()})


def tensor_domination_check(u, v, w, grid_x, grid_y, atol=1e-12):
    """Check a given decomposition :math:`u\\le v\\otimes w` on the product
    grid."""
    X, Y = grid_x.nodes(), grid_y.nodes()
    log_v, log_w = v.log(X), w.log(Y)
    rows = max(1, _BLOCK // len(Y))
    best = -np.inf
    for start in range(0, len(X), rows):
        block = X[start:start + rows]
        pairs = np.concatenate(
            [np.repeat(block, len(Y), axis=0), np.tile(Y, (len(block), 1))],
            axis=1)
        excess = u.log(pairs).reshape(len(block), len(Y)) - \
            log_v[start:start + rows, None] - log_w[None, :]
        best = max(best, float(excess.max()))
    ok = best <= atol
    return CheckRecord(
        name="tensor_domination",
        anchor="u <= v (x) w for a supplied decomposition",
        status=Status.PASS if ok else Status.FAIL,
        constants={"max_log_excess": best}, tolerances={"atol": atol},
        grid={"x": grid_x.to_dict(), "y": grid_y.to_dict()})


@dataclass(frozen=True)
class Bump(object):
    """A sampled non-negative bump: ``values`` at ``offsets``."""
    offsets: np.ndarray
    values: np.ndarray

    @property
    def integral(self):
        return float(trapezoid(self.values, self.offsets))


def standard_bump(width, points=201):
    """The compactly supported bump :math:`\\exp(-1/(1-(s/w)^2))` on
    :math:`|s|<w`, normalized to unit trapezoid integral."""
    offsets = np.linspace(-width, width, points)
    u = offsets / width
    values = np.zeros(points)
    inside = np.abs(u) < 1
    values[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    values /= trapezoid(values, offsets)
    return Bump(offsets, values)


def mollify_weight(axis, values, bump, tol=1e-8):
    """The weight :math:`\\tilde\\omega = \\omega * \\varphi` from a sampled
    one-dimensional weight ``values`` on ``axis``.

    The convolution only uses samples of ``axis``, so the result is
    tabulated on the nodes lying at least one bump radius inside it; that
    interval is recorded as ``params["support"]``.

    Raises
    ------
    NormalizationError
        If the bump is negative somewhere or its integral differs from 1
        by more than ``tol``.
    ValueError
        If no node lies one bump radius inside ``axis``.

    """
    if np.any(bump.values < 0) or abs(bump.integral - 1) > tol:
        raise NormalizationError(
            f"bump must be non-negative with unit integral, got "
            f"{bump.integral!r}")
    axis = np.asarray(axis, dtype=float)
    log_omega = np.log(np.asarray(values, dtype=float))
    # trapezoid weights
    step = np.diff(bump.offsets)
    weights = np.zeros_like(bump.values)
    weights[:-1] += step / 2
    weights[1:] += step / 2
    weights = weights * bump.values
    keep = weights > 0
    radius = float(np.max(np.abs(bump.offsets[keep])))
    slack = 1e-12 * max(1.0, float(np.max(np.abs(axis))))
    inside = (axis - radius >= axis[0] - slack) & \
        (axis + radius <= axis[-1] + slack)
    if not np.any(inside):
        raise ValueError(f"axis of length {axis[-1] - axis[0]:g} is shorter "
                         f"than the bump support {2 * radius:g}")
    support = axis[inside]
    shifted = np.interp(support[:, None] - bump.offsets[None, keep], axis,
                        log_omega)
    log_smooth = logsumexp(shifted + np.log(weights[keep])[None, :], axis=1)
    return tabulated(support, log_smooth, kind="mollified",
                     params={"support": [float(support[0]),
                                         float(support[-1])]})


def equivalence_band(w1, w2, points):
    """``(min, max)`` of :math:`w_1/w_2` over ``points``."""
    ratio = w1.log(points) - w2.log(points)
    return float(np.exp(ratio.min())), float(np.exp(ratio.max()))


def max_jump(weight, grid):
    """Largest difference of ``weight`` between neighbouring nodes of a
    one-dimensional grid."""
    return float(np.max(np.abs(np.diff(weight(grid.axis)))))
