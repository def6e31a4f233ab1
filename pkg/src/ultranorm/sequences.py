"""A *weight sequence* is a positive sequence :math:`(M_p)_{p\\in\\mathbb{N}}`
with :math:`M_p/M_{p-1}\\to\\infty`. Its *associated function* is

.. math:: M(t) = \\sup_{p\\in\\mathbb{N}} \\log \\frac{t^p M_0}{M_p},
   \\qquad M(0) = 0.

The standing conditions are log-convexity (M.1),
:math:`M_p^2\\le M_{p-1}M_{p+1}`, and the geometric bound (M.2)',
:math:`M_{p+1}\\le C_0H^pM_p`.

Values are held as logarithms, so that :math:`p!^s` stays finite far
beyond :math:`p = 170`.

"""
import logging
import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ultranorm.reports import CheckRecord, Status
from ultranorm.utilities import is_strictly_increasing, tail

_logger = logging.getLogger(__name__)

DEFAULT_LENGTH = 512
EXTENSION_BUDGET = 2 ** 21
LOCALIZATION_MARGIN = 8
_CHUNK = 2 ** 22


class SequenceExtensionError(ValueError):
    pass


class LocalizationError(ArithmeticError):
    pass


class WeightSequence(object):
    """A positive sequence stored through :math:`\\log M_p`.

    Parameters
    ----------
    log_values : array_like, optional
        :math:`\\log M_0, \\dots, \\log M_P`.
    generator : callable, optional
        Vectorized map from an integer array ``p`` to :math:`\\log M_p`.
        Sequences with a generator extend themselves on demand.
    name : str, optional
    log_convex : bool, optional
        Declared log-convexity. When ``None`` it is tested on the stored
        values.
    length : int
        Number of values computed up front from ``generator``.
    budget : int
        Largest length extension may reach.

    Examples
    --------
    >>> from ultranorm.sequences import WeightSequence
    >>> seq = WeightSequence.from_values([1, 1, 2, 6, 24])
    >>> seq.values()
    array([ 1.,  1.,  2.,  6., 24.])

    """
    def __init__(self, log_values=None, generator=None, name=None,
                 log_convex=None, length=DEFAULT_LENGTH,
                 budget=EXTENSION_BUDGET):
        if log_values is None and generator is None:
            raise ValueError("either log_values or a generator is required")
        self.generator = generator
        self.budget = budget
        self.name = name or "M"
        self._lock = threading.Lock()
        if log_values is None:
            log_values = generator(np.arange(length))
        log_values = np.asarray(log_values, dtype=float)
        if log_values.ndim != 1 or len(log_values) == 0:
            raise ValueError("a sequence needs at least one value")
        if not np.all(np.isfinite(log_values)):
            raise ValueError("values must be strictly positive and finite")
        self._log_values = log_values
        if log_convex is None:
            log_convex = check_m1(self, len(log_values) - 1)[0]
        self.log_convex = bool(log_convex)

    @classmethod
    def from_values(cls, values, name=None, log_convex=None):
        values = np.asarray(values, dtype=float)
        if np.any(values <= 0):
            raise ValueError("values must be strictly positive")
        return cls(np.log(values), name=name, log_convex=log_convex)

    def __len__(self):
        return len(self._log_values)

    def __repr__(self):
        return f"WeightSequence({self.name!r}, stored={len(self)})"

    def extend(self, P):
        """Make sure :math:`M_0, \\dots, M_P` are stored."""
        if P < len(self):
            return
        if self.generator is None:
            raise SequenceExtensionError(
                f"{self.name}: M_{P} requested, only {len(self)} values "
                "stored and no generator")
        if P + 1 > self.budget:
            raise SequenceExtensionError(
                f"{self.name}: M_{P} exceeds the extension budget "
                f"{self.budget}")
        with self._lock:
            if P < len(self):
                return
            size = min(self.budget, max(P + 1, 2 * len(self)))
            values = np.asarray(self.generator(np.arange(size)), dtype=float)
            _logger.debug(f"{self.name} extended to {size} values")
            self._log_values = values

    def log_values(self, P=None):
        if P is None:
            return self._log_values
        self.extend(P)
        return self._log_values[:P + 1]

    def values(self, P=None):
        return np.exp(self.log_values(P))

    def log_ratios(self, P=None):
        """:math:`\\log m_p`, :math:`m_p = M_p/M_{p-1}`, for
        :math:`1\\le p\\le P`."""
        L = self.log_values(P)
        return L[1:] - L[:-1]

    @property
    def log_m0(self):
        return self._log_values[0]


def gevrey(s, length=DEFAULT_LENGTH):
    """The Gevrey sequence :math:`M_p = p!^s`."""
    return WeightSequence(generator=lambda p: s * gammaln(p + 1.0),
                          name=f"p!^{s:g}", log_convex=True, length=length)


factorial_power = gevrey


def log_power(length=DEFAULT_LENGTH):
    """:math:`M_p = (\\log(p+2))^p`."""
    return WeightSequence(
        generator=lambda p: p * np.log(np.log(p + 2.0)),
        name="log(p+2)^p", length=length)


def constant(c=1.0, length=DEFAULT_LENGTH):
    return WeightSequence(
        generator=lambda p: np.full(np.shape(p), np.log(c)),
        name=f"const {c:g}", log_convex=True, length=length)


def _log_terms(L, log_t, p):
    # log(t^p M_0 / M_p)
    return p * log_t - (L[p] - L[0])


def _grow(seq, reason):
    try:
        seq.extend(2 * len(seq))
    except SequenceExtensionError as error:
        raise LocalizationError(
            f"supremum not localized for {seq.name}: {reason}") from error


def _fast_path(seq, log_t):
    # the sup sits at p = #{p : m_p <= t} once m_P > t
    while seq.log_ratios()[-1] <= log_t.max():
        _grow(seq, f"ratios stay below t = {np.exp(log_t.max()):g}")
    L = seq.log_values()
    k = np.searchsorted(seq.log_ratios(), log_t, side='right')
    return _log_terms(L, log_t, k)


def _brute_force(seq, log_t, margin=LOCALIZATION_MARGIN):
    while True:
        L = seq.log_values()
        P = len(L) - 1
        p = np.arange(P + 1)
        out = np.empty_like(log_t)
        step = max(1, _CHUNK // (P + 1))
        localized = True
        for start in range(0, len(log_t), step):
            block = log_t[start:start + step]
            terms = _log_terms(L, block[:, None], p[None, :])
            j = np.argmax(terms, axis=1)
            out[start:start + step] = terms[np.arange(len(block)), j]
            if np.any(j + margin > P):
                localized = False
                break
            window = np.take_along_axis(
                terms, j[:, None] + np.arange(margin + 1)[None, :], axis=1)
            if not np.all(np.diff(window, axis=1) < 0):
                localized = False
                break
        if localized:
            return out
        _grow(seq, f"no {margin} decreasing terms past the maximum")


def associated_function(seq, t, method="auto"):
    """The associated function :math:`M(t)` of ``seq``.

    Parameters
    ----------
    seq : WeightSequence
    t : float or array_like
        Non-negative arguments.
    method : {'auto', 'fast', 'brute'}
        ``'fast'`` counts the ratios :math:`m_p\\le t` and is only valid
        for log-convex sequences; ``'brute'`` maximizes
        :math:`\\log(t^pM_0/M_p)` over the stored indices, extending the
        sequence until eight consecutive terms past the maximum decrease.
        ``'auto'`` picks ``'fast'`` for log-convex sequences.

    Returns
    -------
    float or numpy.ndarray

    Raises
    ------
    LocalizationError
        If the extension budget runs out before the supremum is found.

    Examples
    --------
    >>> import numpy as np
    >>> from ultranorm.sequences import gevrey, associated_function
    >>> float(associated_function(gevrey(1), 1.0))
    0.0
    >>> bool(np.isclose(associated_function(gevrey(1), 2.0), np.log(2)))
    True

    """
    t = np.asarray(t, dtype=float)
    if np.any(np.isnan(t)) or np.any(t < 0):
        raise ValueError("the associated function needs t >= 0")
    flat = t.ravel()
    out = np.zeros_like(flat)
    positive = flat > 0
    if np.any(positive):
        if method == "auto":
            method = "fast" if seq.log_convex else "brute"
        log_t = np.log(flat[positive])
        if method == "fast":
            values = _fast_path(seq, log_t)
        elif method == "brute":
            values = _brute_force(seq, log_t)
        else:
            raise ValueError(f"unknown method {method!r}")
        out[positive] = np.maximum(values, 0.0)
    out = out.reshape(t.shape)
    return float(out) if out.ndim == 0 else out


def radial_extension(seq, x):
    """:math:`M(|x|)` for points ``x`` in :math:`\\mathbb{R}^d`; the last
    axis of ``x`` holds the coordinates."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return associated_function(seq, abs(float(x)))
    return associated_function(seq, np.linalg.norm(x, axis=-1))


def check_m1(seq, P, rtol=1e-12):
    """Whether :math:`M_p^2\\le M_{p-1}M_{p+1}` for every triple inside
    :math:`M_0,\\dots,M_P`.

    Returns
    -------
    (bool, int or None)
        The verdict and the first violating index.

    Examples
    --------
    >>> from ultranorm.sequences import WeightSequence, check_m1
    >>> check_m1(WeightSequence.from_values([1, 1, 4, 5]), 3)
    (False, 2)

    """
    L = seq.log_values(P) if P >= len(seq) else seq.log_values()[:P + 1]
    excess = 2 * L[1:-1] - L[:-2] - L[2:]
    bad = np.nonzero(excess > rtol * np.maximum(1.0, np.abs(L[1:-1])))[0]
    if len(bad):
        return False, int(bad[0] + 1)
    return True, None


@dataclass(frozen=True)
class M2PrimeWitness(object):
    """Constants with :math:`M_{p+1}\\le C_0H^pM_p` for
    :math:`0\\le p\\le` ``verified_up_to``."""
    C0: float
    H: float
    verified_up_to: int

    def holds(self, seq, P=None, rtol=1e-12):
        P = self.verified_up_to if P is None else P
        log_m = seq.log_ratios(P + 1)
        p = np.arange(P + 1)
        bound = np.log(self.C0) + p * np.log(self.H)
        return bool(np.all(log_m <= bound + rtol * np.maximum(1, bound)))


def fit_m2prime(seq, P):
    """Fit (M.2)' on :math:`0\\le p\\le P`: :math:`C_0 = \\max(1, M_1/M_0)`
    and the least :math:`H\\ge 1` that works with it.

    The witness certifies the truncation only.

    Examples
    --------
    >>> from ultranorm.sequences import gevrey, fit_m2prime
    >>> w = fit_m2prime(gevrey(2), 100)
    >>> round(w.C0, 12), round(w.H, 12)
    (1.0, 4.0)

    """
    if P < 1:
        raise ValueError("fit_m2prime needs P >= 1")
    log_m = seq.log_ratios(P + 1)
    log_c0 = max(0.0, log_m[0])
    p = np.arange(1, P + 1)
    log_h = max(0.0, float(np.max((log_m[1:] - log_c0) / p)))
    return M2PrimeWitness(float(np.exp(log_c0)), float(np.exp(log_h)), P)


def check_m2prime_decay(seq, witness, d, t_grid, tol=1e-9):
    """Evaluate the two consequences of (M.2)' on ``t_grid``:

    .. math:: e^{M(t)-M(H^{d+1}t)} \\le (2C_0)^{d+1}(1+t^{d+1})^{-1},
       \\qquad M(H^kt) - M(t) \\ge k\\log(t/C_0),\\ 1\\le k\\le d+1.

    Returns
    -------
    CheckRecord
        ``max_ratio`` is the largest left/right ratio of the first
        inequality and ``min_slack`` the smallest slack of the second.

    """
    t = np.sort(np.asarray(t_grid, dtype=float))
    k = d + 1
    C0, H = witness.C0, witness.H
    name = f"m2prime_decay[{seq.name},d={d}]"
    anchor = "(M.2)' consequences for the associated function"
    grid = {"t_min": float(t[0]), "t_max": float(t[-1]), "points": len(t)}
    try:
        Mt = associated_function(seq, t)
        log_ratio = (Mt - associated_function(seq, H ** k * t)
                     - k * np.log(2 * C0) + np.log1p(t ** k))
        slack = np.inf
        positive = t > 0
        for j in range(1, k + 1):
            gain = associated_function(seq, H ** j * t[positive]) - \
                Mt[positive]
            needed = j * np.log(t[positive] / C0)
            if np.any(positive):
                slack = min(slack, float(np.min(gain - needed)))
    except LocalizationError as err:
        _logger.info(f"{seq.name}: {err}")
        return CheckRecord(name=name, anchor=anchor,
                           status=Status.INCONCLUSIVE,
                           constants={"C0": C0, "H": H},
                           tolerances={"ratio": tol}, grid=grid,
                           provenance=[str(err)])
    max_ratio = float(np.exp(np.max(log_ratio)))
    monotone = bool(np.all(np.diff(Mt) >= -tol))
    ok = max_ratio <= 1 + tol and slack >= -tol and monotone
    _logger.info(f"{seq.name}: decay ratio {max_ratio:.3g}, slack {slack:.3g}")
    return CheckRecord(
        name=name, anchor=anchor,
        status=Status.PASS if ok else Status.FAIL,
        constants={"C0": C0, "H": H, "max_ratio": max_ratio,
                   "min_slack": slack, "M_monotone": monotone,
                   "t_argmax": float(t[np.argmax(log_ratio)])},
        tolerances={"ratio": tol}, grid=grid)


def precedes_log_growth(seq, P, threshold=2.0):
    """Truncated test of :math:`(\\log p)^p\\prec M_p`, that is
    :math:`M_p^{1/p}/\\log p\\to\\infty`.

    Returns the verdict together with the trend
    :math:`M_p^{1/p}/\\log p`, :math:`2\\le p\\le P`. The verdict asks for
    a strictly increasing last quarter and a last value above
    ``threshold``; it is a heuristic on the truncation.

    """
    if P < 10:
        raise ValueError("precedes_log_growth needs P >= 10")
    L = seq.log_values(P)
    p = np.arange(2, P + 1)
    trend = np.exp(L[p] / p) / np.log(p)
    verdict = is_strictly_increasing(tail(trend, 0.25)) and \
        trend[-1] > threshold
    return bool(verdict), trend
