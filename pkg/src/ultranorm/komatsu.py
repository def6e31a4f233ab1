"""Komatsu's family: positive non-decreasing sequences :math:`r_j\\to\\infty`.

They replace the parameter :math:`h` of a Roumieu seminorm: the
denominators :math:`h^{-p}M_p` become :math:`M_p\\prod_{j=0}^p r_j`. The
associated function of the product sequence is written
:math:`M_{r_j}`.

"""
import logging
import threading

import numpy as np

from ultranorm.reports import CheckRecord, Status
from ultranorm.sequences import (DEFAULT_LENGTH, M2PrimeWitness,
                                 SequenceExtensionError, WeightSequence,
                                 associated_function, fit_m2prime)
from ultranorm.utilities import tail

_logger = logging.getLogger(__name__)


class RSequenceError(ValueError):
    pass


class RSequence(object):
    """A sequence of the family, stored through :math:`\\log r_j`.

    Parameters
    ----------
    log_values : array_like, optional
    generator : callable, optional
        Vectorized map ``j -> log r_j``.
    diverges : bool
        Attestation that the sequence tends to infinity. Closed forms
        built by the module functions set it; tables and arbitrary
        generators must pass it explicitly.
    name : str, optional

    Raises
    ------
    RSequenceError
        For non-positive, decreasing or constant values, or a missing
        attestation.

    """
    def __init__(self, log_values=None, generator=None, diverges=False,
                 name=None, length=DEFAULT_LENGTH):
        if not diverges:
            raise RSequenceError(
                "a sequence of the family must tend to infinity; "
                "attest it with diverges=True")
        if log_values is None and generator is None:
            raise RSequenceError("either log_values or a generator is "
                                 "required")
        self.generator = generator
        self.name = name or "r"
        self._lock = threading.Lock()
        if log_values is None:
            log_values = generator(np.arange(length))
        self._log_values = np.asarray(log_values, dtype=float)
        self._validate(self._log_values)

    def _validate(self, log_values):
        if log_values.ndim != 1 or len(log_values) < 2:
            raise RSequenceError("at least two values are needed")
        if not np.all(np.isfinite(log_values)):
            raise RSequenceError(f"{self.name}: values must be positive")
        if np.any(np.diff(log_values) < 0):
            raise RSequenceError(f"{self.name}: values must not decrease")
        if log_values[-1] <= log_values[0]:
            raise RSequenceError(f"{self.name}: a constant sequence does "
                                 "not tend to infinity")

    @classmethod
    def from_values(cls, values, diverges=False, name=None):
        values = np.asarray(values, dtype=float)
        if np.any(values <= 0):
            raise RSequenceError("values must be strictly positive")
        return cls(np.log(values), diverges=diverges, name=name)

    def __len__(self):
        return len(self._log_values)

    def __repr__(self):
        return f"RSequence({self.name!r}, stored={len(self)})"

    def extend(self, J):
        """Make sure :math:`r_0, \\dots, r_J` are stored."""
        if J < len(self):
            return
        if self.generator is None:
            raise SequenceExtensionError(
                f"{self.name}: r_{J} requested, only {len(self)} values "
                "stored and no generator")
        with self._lock:
            if J < len(self):
                return
            size = max(J + 1, 2 * len(self))
            self._log_values = np.asarray(
                self.generator(np.arange(size)), dtype=float)
            _logger.debug(f"{self.name} extended to {size} values")

    def log_values(self, J=None):
        if J is None:
            return self._log_values
        self.extend(J)
        return self._log_values[:J + 1]

    def values(self, J=None):
        return np.exp(self.log_values(J))

    def log_products(self, P=None):
        """:math:`\\log\\prod_{j=0}^p r_j` for :math:`0\\le p\\le P`."""
        return np.cumsum(self.log_values(P))

    def scaled(self, factor, name=None):
        """The sequence :math:`c\\,r_j`."""
        shift = np.log(factor)
        generator = None
        if self.generator is not None:
            def generator(j, g=self.generator):
                return g(j) + shift
        return RSequence(self._log_values + shift, generator, diverges=True,
                         name=name or f"{factor:g}*{self.name}")


def linear(a, b):
    """:math:`r_j = aj + b`."""
    if a <= 0 or b <= 0:
        raise RSequenceError("linear sequences need a > 0 and b > 0")
    return RSequence(generator=lambda j: np.log(a * j + b), diverges=True,
                     name=f"{a:g}j+{b:g}")


def power(exponent, scale=1.0):
    """:math:`r_j = c(j+1)^k`."""
    if exponent <= 0 or scale <= 0:
        raise RSequenceError("power sequences need exponent > 0, scale > 0")
    return RSequence(
        generator=lambda j: np.log(scale) + exponent * np.log(j + 1.0),
        diverges=True, name=f"{scale:g}(j+1)^{exponent:g}")


def geometric(base, scale=1.0):
    """:math:`r_j = c\\,b^j`."""
    if base <= 1 or scale <= 0:
        raise RSequenceError("geometric sequences need base > 1")
    return RSequence(generator=lambda j: np.log(scale) + j * np.log(base),
                     diverges=True, name=f"{scale:g}*{base:g}^j")


def logarithmic(shift=np.e):
    """:math:`r_j = \\log(j + s)`, :math:`s > 1`."""
    if shift <= 1:
        raise RSequenceError("logarithmic sequences need shift > 1")
    return RSequence(generator=lambda j: np.log(np.log(j + shift)),
                     diverges=True, name=f"log(j+{shift:g})")


def table(values, diverges=False, name=None):
    return RSequence.from_values(values, diverges=diverges,
                                 name=name or "table")


def shipped_r_list():
    """:math:`\\sqrt{j+1}`, :math:`j+1` and :math:`\\log(j+e)`."""
    return [power(0.5), linear(1.0, 1.0), logarithmic()]


def running_product(r, p):
    """:math:`\\log\\prod_{j=0}^p r_j`.

    Examples
    --------
    >>> import numpy as np
    >>> from ultranorm.komatsu import linear, running_product
    >>> round(float(np.exp(running_product(linear(1, 1), 3))), 9)
    24.0

    """
    return float(r.log_products(p)[p])


def product_sequence(M, r):
    """The weight sequence :math:`M_p\\prod_{j=0}^p r_j`.

    It is log-convex whenever ``M`` is, since the added increments
    :math:`\\log r_p` do not decrease.

    """
    generator = None
    if M.generator is not None and r.generator is not None:
        def generator(p):
            return M.generator(p) + np.cumsum(r.generator(p))
    P = min(len(M), len(r)) - 1
    log_values = M.log_values()[:P + 1] + r.log_products()[:P + 1]
    return WeightSequence(log_values, generator,
                          name=f"{M.name}*prod({r.name})",
                          log_convex=M.log_convex or None,
                          budget=M.budget)


def shifted_associated_function(M, r, t):
    """:math:`M_{r_j}(t)`, the associated function of
    :func:`product_sequence`."""
    return associated_function(product_sequence(M, r), t)


def regularize(r, J):
    """:math:`r'_j = \\min(r_j, c\\,2^j)` with :math:`c = \\min(1, r_0)`.

    The output satisfies :math:`r'\\le r`, is non-decreasing and
    unbounded, and :math:`r'_{j+1}\\le 2^{j+1}r'_j` for every ``j``,
    because :math:`c\\le r'_j\\le c\\,2^j`. Applying it twice changes
    nothing.

    """
    if J < 1:
        raise ValueError("regularize needs J >= 1")
    log_c = min(0.0, float(r.log_values(J)[0]))
    j = np.arange(J + 1)
    log_values = np.minimum(r.log_values(J), log_c + j * np.log(2.0))
    generator = None
    if r.generator is not None:
        def generator(j, g=r.generator):
            return np.minimum(g(j), log_c + j * np.log(2.0))
    return RSequence(log_values, generator, diverges=True,
                     name=f"reg({r.name})")


def regularization_certificate(M, r, r_prime, J, rtol=1e-12):
    """Check the properties of :func:`regularize` on :math:`j\\le J`:
    domination by ``r``, monotonicity, the doubling bound, the cap
    :math:`r'_j\\le c\\,2^j` with :math:`c = \\min(1, r_0)`, and (M.2)' of
    the product sequence :math:`M_p\\prod r'_j`.

    The product witness is derived, not fitted: from the witness
    :math:`(C_0, H)` of ``M`` and the cap,
    :math:`M_{p+1}r'_{p+1}/M_p\\le 2c\\,C_0(2H)^p`.

    """
    lr, lp = r.log_values(J), r_prime.log_values(J)
    j = np.arange(J + 1)
    atol = rtol * np.maximum(1.0, np.abs(lp))
    dominated = bool(np.all(lp <= lr + atol))
    monotone = bool(np.all(np.diff(lp) >= 0))
    doubling = bool(np.all(lp[1:] <= j[1:] * np.log(2.0) + lp[:-1]
                           + atol[1:]))
    log_c = min(0.0, float(lr[0]))
    capped = bool(np.all(lp <= log_c + j * np.log(2.0) + atol))
    base = fit_m2prime(M, J - 1)
    witness = M2PrimeWitness(max(1.0, 2 * np.exp(log_c) * base.C0),
                             2 * base.H, J - 1)
    product = product_sequence(M, r_prime)
    m2prime = witness.holds(product, J - 1)
    ok = dominated and monotone and doubling and capped and m2prime
    return CheckRecord(
        name=f"regularization[{r.name}]",
        anchor="geometric regularization of a sequence of the family",
        status=Status.PASS if ok else Status.FAIL,
        constants={"dominated": dominated, "monotone": monotone,
                   "doubling": doubling, "capped": capped,
                   "m2prime": m2prime, "C0": witness.C0, "H": witness.H,
                   "M_C0": base.C0, "M_H": base.H,
                   "r_prime_last": float(np.exp(lp[-1]))},
        tolerances={"rtol": rtol}, grid={"J": J})


def nachbin_domination_check(M, r, n, t_grid, tol=1e-9):
    """Sampled boundedness of :math:`M_{r_j}(t) - M(t/n)`.

    Passes when the difference is finite on the grid, rises by at most
    ``tol`` between consecutive nodes of the last tenth, and takes its
    sup before that tenth, up to ``tol``. The sup is recorded as
    ``bound``, the constant of :math:`e^{M_{r_j}}\\le Ce^{M(\\cdot/n)}` on
    the grid.

    """
    t = np.sort(np.asarray(t_grid, dtype=float))
    log_ratio = shifted_associated_function(M, r, t) - \
        associated_function(M, t / n)
    finite = bool(np.all(np.isfinite(log_ratio)))
    end = tail(log_ratio, 0.1)
    head = log_ratio[:len(log_ratio) - len(end)]
    max_increment = float(np.max(np.diff(end)))
    peak = float(np.max(log_ratio))
    settles = max_increment <= tol
    bounded = finite and (len(head) == 0 or
                          float(np.max(end)) <= float(np.max(head)) + tol)
    reasons = []
    if not finite:
        reasons.append("non-finite difference on the grid")
    if not settles:
        reasons.append(f"difference still rises by {max_increment:.3g} "
                       f"on the last tenth at n={n}")
    if finite and not bounded:
        reasons.append(f"sup of the difference sits on the last tenth at "
                       f"n={n}")
    ok = not reasons
    if not ok:
        _logger.info(f"domination by e^M(t/{n}) fails for {r.name}")
    return CheckRecord(
        name=f"nachbin_domination[{r.name},n={n}]",
        anchor="e^{M_r} dominated by every weight e^{M(./n)}",
        status=Status.PASS if ok else Status.FAIL,
        constants={"n": n, "bound": float(np.exp(peak)),
                   "max_tail_increment": max_increment,
                   "log_ratio_last": float(log_ratio[-1])},
        tolerances={"increment": tol},
        grid={"t_min": float(t[0]), "t_max": float(t[-1]),
              "points": len(t)},
        provenance=reasons)
