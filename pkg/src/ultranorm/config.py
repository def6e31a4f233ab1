"""Experiment configuration: a JSON document naming the sequences, weight
systems, test functions, windows, grids and tolerances of a run.

Every default is filled in by :meth:`ExperimentConfig.from_dict`, so
that :meth:`ExperimentConfig.to_dict` records the complete configuration
of a report. Unknown keys are rejected.

"""
import copy
import json
import logging
from dataclasses import dataclass, field, fields

import numpy as np

from ultranorm import komatsu, weights
from ultranorm.functions import default_family, from_config
from ultranorm.sequences import (WeightSequence, constant, factorial_power,
                                 gevrey, log_power)
from ultranorm.stft import PhaseSpaceGrid
from ultranorm.utilities import SpatialGrid

_logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


DEFAULT_TOLERANCES = {
    "isometry": 1e-6,
    "reconstruction": 1e-6,
    "drift": 0.05,
    "decreasing_slack": 1e-12,
    "s_threshold": 1e-2,
    "noise_floor": 1e-12,
    "edge_mass": 1e-10,
    "near_orthogonal": 1e-8,
    "normalization": 1e-8,
    "m2prime": 1e-9,
    "log_growth_threshold": 2.0,
    "vbar": 1e-9,
    "domination": 1e-9,
}

SUITE_NAMES = ("prop_stft_gg", "prop_stft_projective", "theorem_diagram",
               "lemma_algebraic_equality")

_GRID_DEFAULTS = {
    1: {"spatial": {"extent": 20.0, "points": 2001},
        "phase": {"x_extent": 8.0, "xi_extent": 6.0, "x_points": 192,
                  "xi_points": 192},
        "product": {"extent": 10.0, "points": 201},
        "t": {"min": 1e-2, "max": 1e3, "points": 400},
        "reconstruction": {"extent": 4.0, "points": 161}},
    2: {"spatial": {"extent": 10.0, "points": 201},
        "phase": {"x_extent": 4.0, "xi_extent": 2.0, "x_points": 32,
                  "xi_points": 32},
        "product": {"extent": 6.0, "points": 13},
        "t": {"min": 1e-2, "max": 1e3, "points": 400},
        "reconstruction": {"extent": 2.0, "points": 9}},
}

_DECAY_DEFAULTS = {"alpha_max": 40, "moment_order": 10,
                   "adjoint_alpha_max": 20, "h_grid": [1.0, 0.5, 0.25],
                   "bound": 1e12}

_ADMISSIBILITY_DEFAULTS = {"tau": 1.0, "C": 1.0, "n": 1, "chain_length": 4}


def _default_sequences():
    return {"M": {"gevrey": 1.0}, "A": {"gevrey": 1.0}}


def _default_r_sequences():
    return [{"power": {"exponent": 0.5, "scale": 1.0}},
            {"linear": {"a": 1.0, "b": 1.0}},
            {"log": {"shift": float(np.e)}}]


def _default_weight_systems():
    return {"V": {"assoc_exp": {"seq": "A", "scale": 1.0}}}


def _default_nachbin_weights():
    return [{"poly": 2}]


def _default_windows():
    return {"psi": [{"width": float(np.pi)}],
            "gamma": [{"width": float(np.pi)}]}


def _check_keys(section, data, allowed):
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {section}: {', '.join(unknown)}")


def _merged(section, data, defaults):
    if data is None:
        return copy.deepcopy(defaults)
    if not isinstance(data, dict):
        raise ConfigError(f"{section} must be an object")
    _check_keys(section, data, defaults)
    merged = copy.deepcopy(defaults)
    merged.update(data)
    return merged


@dataclass(frozen=True)
class ExperimentConfig(object):
    """A validated experiment configuration.

    Examples
    --------
    >>> from ultranorm.config import ExperimentConfig
    >>> config = ExperimentConfig.from_dict({"suite": "theorem_diagram"})
    >>> config.tolerance("isometry")
    1e-06
    >>> config.phase_grid().x_points
    192

    """
    dimension: int = 1
    seed: int = 0
    sequences: dict = field(default_factory=_default_sequences)
    r_sequences: list = field(default_factory=_default_r_sequences)
    weight_systems: dict = field(default_factory=_default_weight_systems)
    nachbin_weights: list = field(default_factory=_default_nachbin_weights)
    functions: object = "default"
    windows: dict = field(default_factory=_default_windows)
    grids: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    admissibility: dict = field(default_factory=dict)
    decay: dict = field(default_factory=dict)
    suite: str = "theorem_diagram"
    suites: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, data):
        """Validate ``data`` and fill in every default.

        Raises
        ------
        ConfigError
        """
        if not isinstance(data, dict):
            raise ConfigError("a configuration is a JSON object")
        names = [f.name for f in fields(cls)]
        _check_keys("configuration", data, names)
        values = {k: copy.deepcopy(v) for k, v in data.items()}
        dim = values.get("dimension", 1)
        if dim not in (1, 2):
            raise ConfigError(f"dimension must be 1 or 2, got {dim!r}")
        grid_defaults = _GRID_DEFAULTS[dim]
        grids = values.get("grids") or {}
        _check_keys("grids", grids, grid_defaults)
        values["grids"] = {name: _merged(f"grids.{name}", grids.get(name),
                                         default)
                           for name, default in grid_defaults.items()}
        values["tolerances"] = _merged("tolerances", values.get("tolerances"),
                                       DEFAULT_TOLERANCES)
        values["admissibility"] = _merged(
            "admissibility", values.get("admissibility"),
            _ADMISSIBILITY_DEFAULTS)
        values["decay"] = _merged("decay", values.get("decay"),
                                  _DECAY_DEFAULTS)
        windows = values.get("windows")
        if windows is not None:
            values["windows"] = _merged("windows", windows,
                                        _default_windows())
        suite = values.get("suite", cls.suite)
        for name in [suite] + list(values.get("suites", [])):
            if name not in SUITE_NAMES:
                raise ConfigError(f"unknown suite {name!r}")
        config = cls(**values)
        config._validate()
        return config

    @classmethod
    def default(cls):
        return cls.from_dict({})

    def _validate(self):
        for name, entry in self.sequences.items():
            build_sequence(entry, name)
        for entry in self.r_sequences:
            build_r_sequence(entry)
        for name in self.weight_systems:
            self.weight_system(name)
        self.nachbin_weight_list()
        self.function_family()
        self.window("psi")
        self.window("gamma")
        self.phase_grid()

    def to_dict(self):
        return {f.name: copy.deepcopy(getattr(self, f.name))
                for f in fields(self)}

    def with_overrides(self, tolerances=None, seed=None):
        """A copy with some tolerances and the seed replaced.

        Raises
        ------
        ConfigError
            For unknown tolerance names.
        """
        data = self.to_dict()
        for name, value in (tolerances or {}).items():
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {name!r}")
            data["tolerances"][name] = float(value)
        if seed is not None:
            data["seed"] = int(seed)
        return ExperimentConfig.from_dict(data)

    @property
    def suite_names(self):
        return list(self.suites) or [self.suite]

    def tolerance(self, name):
        return self.tolerances[name]

    def sequence(self, name):
        try:
            entry = self.sequences[name]
        except KeyError:
            raise ConfigError(f"no sequence named {name!r}") from None
        return build_sequence(entry, name)

    def r_sequence_list(self):
        return [build_r_sequence(entry) for entry in self.r_sequences]

    def weight_system(self, name="V"):
        try:
            entry = self.weight_systems[name]
        except KeyError:
            raise ConfigError(f"no weight system named {name!r}") from None
        return build_weight_system(entry, self, self.dimension)

    def nachbin_weight_list(self, system="V"):
        V = self.weight_system(system)
        return [build_nachbin_weight(entry, V, self.dimension)
                for entry in self.nachbin_weights]

    def function_family(self):
        if self.functions == "default":
            return default_family(self.dimension)
        if not isinstance(self.functions, list):
            raise ConfigError('functions must be "default" or a list')
        try:
            return [from_config(terms, self.dimension)
                    for terms in self.functions]
        except (TypeError, ValueError, AttributeError) as err:
            raise ConfigError(f"invalid function: {err}") from err

    def window(self, name):
        try:
            return from_config(self.windows[name], self.dimension)
        except (TypeError, ValueError, AttributeError) as err:
            raise ConfigError(f"invalid window {name!r}: {err}") from err

    def spatial_grid(self):
        g = self.grids["spatial"]
        return SpatialGrid(float(g["extent"]), int(g["points"]),
                           self.dimension)

    def product_grid(self):
        g = self.grids["product"]
        return SpatialGrid(float(g["extent"]), int(g["points"]),
                           self.dimension)

    def reconstruction_grid(self):
        g = self.grids["reconstruction"]
        return SpatialGrid(float(g["extent"]), int(g["points"]),
                           self.dimension)

    def phase_grid(self):
        g = self.grids["phase"]
        try:
            return PhaseSpaceGrid(float(g["x_extent"]), float(g["xi_extent"]),
                                  int(g["x_points"]), int(g["xi_points"]),
                                  self.dimension)
        except ValueError as err:
            raise ConfigError(f"grids.phase: {err}") from err

    def t_grid(self):
        g = self.grids["t"]
        return np.logspace(np.log10(g["min"]), np.log10(g["max"]),
                           int(g["points"]))


def build_sequence(entry, name=None):
    """A weight sequence from one of the forms ``{"gevrey": s}``,
    ``{"table": [...]}``, ``{"expr": "factorial_power", "s": s}``,
    ``{"expr": "log_power"}`` and ``{"expr": "constant", "c": c}``."""
    if not isinstance(entry, dict):
        raise ConfigError(f"sequence {name!r} must be an object")
    if "gevrey" in entry:
        _check_keys(f"sequence {name}", entry, ["gevrey"])
        return gevrey(float(entry["gevrey"]))
    if "table" in entry:
        _check_keys(f"sequence {name}", entry, ["table"])
        values = np.asarray(entry["table"], dtype=float)
        if len(values) < 2 or np.any(values <= 0):
            raise ConfigError(f"sequence {name!r}: tables need at least two "
                              "positive values")
        return WeightSequence.from_values(values, name=name)
    expr = entry.get("expr")
    if expr == "factorial_power":
        _check_keys(f"sequence {name}", entry, ["expr", "s"])
        return factorial_power(float(entry.get("s", 1.0)))
    if expr == "log_power":
        _check_keys(f"sequence {name}", entry, ["expr"])
        return log_power()
    if expr == "constant":
        _check_keys(f"sequence {name}", entry, ["expr", "c"])
        return constant(float(entry.get("c", 1.0)))
    raise ConfigError(f"unknown sequence form {entry!r}")


def build_r_sequence(entry):
    """A sequence of Komatsu's family from ``{"linear": {"a", "b"}}``,
    ``{"power": {"exponent", "scale"}}``, ``{"geometric": {"base",
    "scale"}}``, ``{"log": {"shift"}}`` or ``{"table": [...],
    "diverges": true}``."""
    if not isinstance(entry, dict):
        raise ConfigError("r-sequences must be objects")
    try:
        if "table" in entry:
            _check_keys("r-sequence", entry, ["table", "diverges"])
            return komatsu.table(entry["table"], bool(entry.get("diverges")))
        if len(entry) != 1:
            raise ConfigError(f"unknown r-sequence form {entry!r}")
        (kind, params), = entry.items()
        params = params or {}
        if kind == "linear":
            _check_keys("linear", params, ["a", "b"])
            return komatsu.linear(params.get("a", 1.0), params.get("b", 1.0))
        if kind == "power":
            _check_keys("power", params, ["exponent", "scale"])
            return komatsu.power(params.get("exponent", 1.0),
                                 params.get("scale", 1.0))
        if kind == "geometric":
            _check_keys("geometric", params, ["base", "scale"])
            return komatsu.geometric(params.get("base", 2.0),
                                     params.get("scale", 1.0))
        if kind == "log":
            _check_keys("log", params, ["shift"])
            return komatsu.logarithmic(params.get("shift", np.e))
    except komatsu.RSequenceError as err:
        raise ConfigError(str(err)) from err
    raise ConfigError(f"unknown r-sequence form {entry!r}")


def build_weight_system(entry, config, dim=1):
    """A weight system from ``{"assoc_exp": {"seq", "scale"}}``,
    ``{"constant": {"exp_rate": t}}``, ``{"poly_decay": k}``,
    ``{"gaussian": a}`` or ``{"table": path, "mollify": width}``."""
    if not isinstance(entry, dict) or not entry:
        raise ConfigError("weight systems must be non-empty objects")
    if "table" in entry:
        _check_keys("weight system", entry, ["table", "mollify"])
        if dim != 1:
            raise ConfigError("tabulated weights are one-dimensional")
        try:
            axis, values = weights.read_weight_table(entry["table"])
        except OSError as err:
            raise ConfigError(f"cannot read weight table: {err}") from err
        width = entry.get("mollify")
        if width:
            weight = weights.mollify_weight(axis, values,
                                            weights.standard_bump(width))
        else:
            weight = weights.tabulated(axis, np.log(values))
        return weights.constant_system(weight)
    if len(entry) != 1:
        raise ConfigError(f"unknown weight system form {entry!r}")
    (kind, params), = entry.items()
    if kind == "assoc_exp":
        _check_keys("assoc_exp", params, ["seq", "scale"])
        seq = config.sequence(params.get("seq", "A"))
        return weights.assoc_exp_system(seq, float(params.get("scale", 1.0)),
                                        dim)
    if kind == "constant":
        _check_keys("constant", params, ["exp_rate"])
        return weights.constant_system(
            weights.exp_rate(float(params.get("exp_rate", 1.0)), dim))
    if kind == "poly_decay":
        return weights.poly_decay_system(float(params), dim)
    if kind == "gaussian":
        return weights.gaussian_system(float(params), dim)
    raise ConfigError(f"unknown weight system form {entry!r}")


def build_nachbin_weight(entry, V, dim=1):
    """A member of the maximal Nachbin family supplied directly:
    ``{"unit": true}``, ``{"poly": k}`` or ``{"scaled_member": {"n",
    "scale"}}``."""
    if not isinstance(entry, dict) or len(entry) != 1:
        raise ConfigError(f"unknown Nachbin weight form {entry!r}")
    (kind, params), = entry.items()
    if kind == "unit":
        return weights.NachbinWeight.direct(weights.unit(dim), name="unit")
    if kind == "poly":
        return weights.NachbinWeight.direct(
            weights.polynomial(float(params), dim), name=f"poly{params}")
    if kind == "scaled_member":
        _check_keys("scaled_member", params, ["n", "scale"])
        n, lam = int(params.get("n", 1)), float(params.get("scale", 1.0))
        return weights.NachbinWeight.from_system(V, [(lam, n)],
                                                 name=f"{lam:g}*v_{n}")
    raise ConfigError(f"unknown Nachbin weight form {entry!r}")


def load_config(path):
    """Read and validate a JSON configuration file.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    ConfigError
        If the file is not valid JSON or not a valid configuration.
    """
    with open(path) as config_file:
        try:
            data = json.load(config_file)
        except json.JSONDecodeError as err:
            raise ConfigError(f"{path}: {err}") from err
    _logger.info(f"configuration read from {path}")
    return ExperimentConfig.from_dict(data)
