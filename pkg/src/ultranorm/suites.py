"""Verification suites: the mapping properties of the STFT on weighted
Gelfand-Shilov type spaces, the commuting diagram of the projective
description, and the agreement of the inductive and projective
finiteness conditions.

A suite is a :class:`CheckRegistry`, a directed acyclic graph of named
checks whose edges are dependencies. Checks of one generation are
independent and may run concurrently; a check whose dependencies did
not all pass is not run and is reported inconclusive, with the failing
dependencies as provenance. Records come out in the lexicographic
topological order of the graph whatever the number of threads.

"""
import logging
from dataclasses import replace

import networkx as nx
import numpy as np

from ultranorm.functions import (WindowClassError, seminorm_h, seminorm_rj,
                                 ensure_gaussian_window_class, sup_sequence,
                                 roumieu_sequence_equivalence)
from ultranorm.komatsu import (nachbin_domination_check, product_sequence,
                               regularization_certificate, regularize, table)
from ultranorm.reports import CheckRecord, Status, VerificationReport
from ultranorm.sequences import fit_m2prime
from ultranorm.stft import (BOUND_RTOL, NearOrthogonalError, Translation,
                            adjoint_bound_check, adjoint_constant_bound,
                            adjoint_scale, bound_status, decay_bound_check,
                            decay_constant_bound, reconstruction_check,
                            reconstruction_error, stft_grid,
                            weighted_stft_sup, window_integrals)
from ultranorm.utilities import ordered_map
from ultranorm.weights import (ChainError, admissibility_chain,
                               admissibility_check, build_vbar,
                               equivalence_band, mollify_weight,
                               nachbin_membership, polynomial, standard_bump,
                               vbar_inequality_check)

_logger = logging.getLogger(__name__)

RANDOM_TABLES = 10
REGULARIZATION_LENGTH = 200


class CheckRegistry(object):
    """Named checks with dependencies.

    Examples
    --------
    >>> from ultranorm.reports import CheckRecord
    >>> from ultranorm.suites import CheckRegistry
    >>> registry = CheckRegistry("demo")
    >>> registry.add("a", lambda: CheckRecord("a", "", "fail"), "first")
    >>> registry.add("b", lambda: CheckRecord("b", "", "pass"), "second",
    ...              requires=["a"])
    >>> [r.status.value for r in registry.run()]
    ['fail', 'inconclusive']

    """
    def __init__(self, name):
        self.name = name
        self.graph = nx.DiGraph()

    def add(self, name, check, anchor, requires=()):
        if name in self.graph and "check" in self.graph.nodes[name]:
            raise ValueError(f"check {name!r} registered twice")
        self.graph.add_node(name, check=check, anchor=anchor)
        for dependency in requires:
            self.graph.add_edge(dependency, name)

    def __len__(self):
        return self.graph.number_of_nodes()

    def _call(self, name):
        node = self.graph.nodes[name]
        try:
            record = node["check"]()
        except (ValueError, ArithmeticError) as err:
            _logger.warning(f"{name}: {err}")
            record = CheckRecord(name, node["anchor"], Status.FAIL,
                                 provenance=[f"{type(err).__name__}: {err}"])
        return replace(record, name=name)

    def run(self, pool=None):
        """Run every check and return the records in registry order."""
        missing = [n for n in self.graph if "check" not in self.graph.nodes[n]]
        if missing:
            raise ValueError(f"unregistered dependencies: {missing}")
        results = {}
        for generation in nx.topological_generations(self.graph):
            runnable, blocked = [], {}
            for name in sorted(generation):
                bad = sorted(p for p in self.graph.predecessors(name)
                             if not results[p].passed)
                if bad:
                    blocked[name] = bad
                else:
                    runnable.append(name)
            records = ordered_map(self._call, runnable, pool)
            results.update(zip(runnable, records))
            for name, bad in blocked.items():
                results[name] = CheckRecord(
                    name, self.graph.nodes[name]["anchor"],
                    Status.INCONCLUSIVE,
                    provenance=[f"depends on {p} ({results[p].status.value})"
                                for p in bad])
            _logger.info(f"{self.name}: {len(runnable)} checks run, "
                         f"{len(blocked)} blocked")
        return [results[name]
                for name in nx.lexicographical_topological_sort(self.graph)]


def _pass_fail(name, anchor, ok, constants, **kwargs):
    return CheckRecord(name, anchor, Status.PASS if ok else Status.FAIL,
                       constants, **kwargs)


def _window_class_check(M):
    def check():
        try:
            trend = ensure_gaussian_window_class(M)
        except WindowClassError as err:
            return CheckRecord("window_class", "Gaussian windows in the class",
                               Status.FAIL, provenance=[str(err)])
        return CheckRecord("window_class", "Gaussian windows in the class",
                           Status.PASS, {"trend_last": float(trend[-1])})
    return check


def _admissibility(config, V, A, factor=1):
    """Admissibility of the pair :math:`(kn, 2kn)`, ``k = factor``."""
    adm = config.admissibility
    n = factor * int(adm["n"])
    grid = config.product_grid()
    return lambda: admissibility_check(V, A, adm["tau"], [(n, 2 * n)],
                                       adm["C"], grid, grid)


def _translation(config, A):
    adm = config.admissibility
    return Translation(A, adm["tau"], adm["C"])


def _t_points(config):
    return config.reconstruction_grid().nodes()


def prop_stft_gg(config, pool=None):
    """:math:`V_\\psi` maps the weighted Roumieu space into the weighted
    continuous functions on phase space, and :math:`V_\\psi^*` maps back.

    For each test function: the decay estimate with
    :math:`(v, w) = (v_{2n}, v_n)` and :math:`h = 1/n`, the adjoint
    estimate on :math:`V_\\psi\\varphi` with :math:`(v, w) = (v_{4n},
    v_{2n})`, and reconstruction. All of them depend on the window class
    and on admissibility of :math:`(n, 2n)`; the adjoint estimate also
    on admissibility of :math:`(2n, 4n)`.

    """
    M, A = config.sequence("M"), config.sequence("A")
    V = config.weight_system("V")
    psi, gamma = config.window("psi"), config.window("gamma")
    grid = config.phase_grid()
    spatial = config.spatial_grid()
    n = int(config.admissibility["n"])
    h = 1.0 / n
    decay = config.decay
    tol = config.tolerances
    registry = CheckRegistry("prop_stft_gg")
    registry.add("window_class", _window_class_check(M),
                 "Gaussian windows in the class")
    registry.add("admissibility", _admissibility(config, V, A),
                 "translation admissibility of the weight system")
    registry.add("admissibility_adjoint", _admissibility(config, V, A, 2),
                 "translation admissibility for the adjoint weights")
    base = ["window_class", "admissibility"]
    translation = _translation(config, A)
    for i, phi in enumerate(config.function_family()):
        registry.add(
            f"decay[{i}]",
            lambda phi=phi: decay_bound_check(
                phi, psi, M, h, V[2 * n], V[n], grid, spatial,
                decay["alpha_max"], decay["moment_order"], tol["drift"],
                tol["noise_floor"], translation=translation),
            "STFT decay estimate", requires=base)
        registry.add(
            f"adjoint[{i}]",
            lambda phi=phi: _adjoint_of_stft(phi, psi, M, h, V[4 * n],
                                             V[2 * n], grid, decay, tol),
            "STFT adjoint estimate",
            requires=base + ["admissibility_adjoint", f"decay[{i}]"])
        registry.add(
            f"reconstruction[{i}]",
            lambda phi=phi: reconstruction_check(
                phi, psi, gamma, grid, _t_points(config),
                tol["reconstruction"]),
            "reconstruction on the weighted space",
            requires=base + [f"adjoint[{i}]"])
    return VerificationReport.create(registry.run(pool), config.to_dict())


def _adjoint_of_stft(phi, psi, M, h, v, w, grid, decay, tol):
    if grid.dim != 1:
        return CheckRecord("adjoint_bound", "STFT adjoint estimate",
                           Status.INCONCLUSIVE, {"skipped": "d = 2"},
                           provenance=["derivative tables formed for d = 1 "
                                       "only"])
    F = stft_grid(phi, psi, grid)
    F_fine = stft_grid(phi, psi, grid.refined())
    return adjoint_bound_check(F, psi, M, h, v, w,
                               alpha_max=decay["adjoint_alpha_max"],
                               F_refined=F_fine, drift_tol=tol["drift"],
                               noise_floor=tol["noise_floor"])


def _random_tables(seed, count=RANDOM_TABLES, length=REGULARIZATION_LENGTH):
    """Random non-decreasing unbounded tables, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    tables = []
    for k in range(count):
        start = rng.uniform(0.1, 3.0)
        increments = rng.exponential(rng.uniform(0.05, 5.0), length)
        increments[rng.random(length) < 0.3] = 0.0
        increments[-1] += 1.0
        tables.append(table(start + np.concatenate([[0.0],
                                                    np.cumsum(increments)]),
                            diverges=True, name=f"random{k}"))
    return tables


def _projective_link(F, phi, psi, M, r, v, vbar, spatial, alpha_max,
                     noise_floor, A, tau):
    """sup of :math:`|V_\\psi\\varphi|(v\\otimes e^{M_r})`, the seminorm
    with :math:`\\rho_j = \\pi r_j/\\sqrt d` and weight :math:`\\bar v`, and
    the closed-form bound of their ratio."""
    rho = r.scaled(np.pi / np.sqrt(phi.dim))
    norm = seminorm_rj(phi, M, rho, vbar, spatial, alpha_max)
    sup = weighted_stft_sup(F, product_sequence(M, r), 1.0, v, noise_floor)
    log_L = M.log_values(alpha_max) + rho.log_products(alpha_max)
    log_K = window_integrals(psi, Translation(A, tau), alpha_max)
    return norm, sup, decay_constant_bound(log_K, log_L, 1.0)


def _projective_decay(phi, psi, M, A, tau, r_prime, v, vbar, grid, spatial,
                      decay, noise_floor):
    """sup of :math:`|V_\\psi\\varphi|(v\\otimes e^{M_{r'}})` against the
    seminorm with :math:`\\rho_j = \\pi r'_j/\\sqrt d` and weight
    :math:`\\bar v`."""
    anchor = "STFT decay into the projective weights"
    F = stft_grid(phi, psi, grid)
    norm, sup, bound = _projective_link(F, phi, psi, M, r_prime, v, vbar,
                                        spatial, decay["alpha_max"],
                                        noise_floor, A, tau)
    if norm.value == 0:
        return CheckRecord("projective_decay", anchor, Status.PASS,
                           {"C": 0.0, "vacuous": True})
    C = sup.value / norm.value
    reasons, failures = [], []
    if norm.lower_bound:
        reasons.append("seminorm attained on the boundary of its range")
    if not sup.interior:
        reasons.append("xi-profile does not peak inside the grid")
    if bound.exceeded_by(C):
        failures.append(f"C = {C:.6g} above the bound {bound.value:.6g}")
        if bound.alpha_edge:
            reasons.append("window integrals peak at the top order")
    return CheckRecord("projective_decay", anchor,
                       bound_status(np.isfinite(C), failures, reasons),
                       {"C": C, "bound": bound.value, "sup": sup.value,
                        "seminorm": norm.value,
                        "unresolved_bound": sup.unresolved / norm.value},
                       tolerances={"bound": BOUND_RTOL},
                       grid=grid.to_dict(), provenance=failures + reasons)


def prop_stft_projective(config, pool=None):
    """The projective mapping property of :math:`V_\\psi`, following its
    construction: each ``r`` is regularized and certified, the Nachbin
    weights are dominated, :math:`\\bar v` is built from an admissibility
    chain and checked, and then the decay of :math:`V_\\psi\\varphi`
    against the projective seminorms is measured."""
    M, A = config.sequence("M"), config.sequence("A")
    V = config.weight_system("V")
    psi = config.window("psi")
    grid = config.phase_grid()
    spatial = config.spatial_grid()
    product = config.product_grid()
    adm = config.admissibility
    n0 = int(adm["n"])
    J = REGULARIZATION_LENGTH
    tol = config.tolerances
    registry = CheckRegistry("prop_stft_projective")
    regularized = {}
    for r in config.r_sequence_list():
        r_prime = regularize(r, J)
        regularized[r.name] = r_prime
        registry.add(f"regularization[{r.name}]",
                     lambda r=r, rp=r_prime: regularization_certificate(
                         M, r, rp, J),
                     "geometric regularization")
        for n in (1, 2, 3):
            registry.add(f"nachbin_domination[{r.name},n={n}]",
                         lambda rp=r_prime, n=n: nachbin_domination_check(
                             M, rp, n, config.t_grid(), tol["domination"]),
                         "e^{M_r} dominated by e^{M(./n)}",
                         requires=[f"regularization[{r.name}]"])
    for r in _random_tables(config.seed):
        registry.add(f"regularization[{r.name}]",
                     lambda r=r: regularization_certificate(
                         M, r, regularize(r, J), J),
                     "geometric regularization of a random table")
    chain_v = polynomial(2, config.dimension)
    state = {}

    def vbar_check():
        chain = admissibility_chain(V, A, adm["tau"], chain_v, n0,
                                    int(adm["chain_length"]), product,
                                    product)
        state["vbar"] = build_vbar(V, chain)
        record = vbar_inequality_check(chain_v, state["vbar"], A, adm["tau"],
                                       product, product, tol["vbar"])
        return replace(record, constants=dict(
            record.constants, chain=[[link.n, link.C, link.C_prime]
                                     for link in chain]))
    registry.add("vbar_inequality", vbar_check,
                 "v(x+y) <= vbar(x) e^{A(tau y)}")
    registry.add("vbar_membership",
                 lambda: nachbin_membership(
                     state["vbar"], V,
                     n0 * 2 ** (int(adm["chain_length"]) - 2), spatial),
                 "vbar in the maximal Nachbin family",
                 requires=["vbar_inequality"])
    for name, r_prime in regularized.items():
        for i, phi in enumerate(config.function_family()):
            registry.add(
                f"projective_decay[{name},{i}]",
                lambda phi=phi, rp=r_prime: _projective_decay(
                    phi, psi, M, A, adm["tau"], rp, chain_v, state["vbar"],
                    grid, spatial, config.decay, tol["noise_floor"]),
                "STFT decay into the projective weights",
                requires=[f"regularization[{name}]", "vbar_membership"])
    return VerificationReport.create(registry.run(pool), config.to_dict())


def _normalized_window(psi, gamma, tol):
    """:math:`\\gamma/\\overline{(\\gamma,\\psi)}`, so that the pairing with
    ``psi`` is 1."""
    pairing = gamma.inner(psi)
    scale = gamma.norm() * psi.norm()
    if scale == 0 or abs(pairing) < tol * scale:
        raise NearOrthogonalError(f"(gamma, psi) = {pairing:.3g}")
    return gamma * (1 / np.conj(pairing))


def _diagram_chain(phi, psi, gamma, M, h, V, n, v, vbar, r_list, grid,
                   spatial, t_points, decay, tol, translation):
    """The inequality chain and commutation for one function.

    Backwards through the diagram, the synthesis estimate bounds ``S_ind``,
    the seminorm of scale :math:`h'` (:func:`adjoint_scale`) and weight
    :math:`v_{4n}`, by ``C1`` times ``N_cont``, the sup of
    :math:`|V_\\psi\\varphi|(v_{2n}\\otimes e^{M(\\pi h\\cdot/\\sqrt d)})`.
    For every ``r`` the analysis estimate bounds ``N_proj``, the sup of
    :math:`|V_\\psi\\varphi|(v\\otimes e^{M_r})`, by ``C2`` times the
    projective seminorm of weight :math:`\\bar v`. ``C1`` and ``C2`` are
    compared with their closed forms; ``bridge = N_cont/N_proj`` is
    measured only.

    """
    anchor = "commuting diagram of the projective description"
    alpha_max = decay["alpha_max"]
    s = np.pi * h / np.sqrt(grid.dim)
    witness = fit_m2prime(M, 100)
    h_prime = adjoint_scale(s, witness, grid.dim)
    s_ind = seminorm_h(phi, M, h_prime, V[4 * n], spatial, alpha_max)
    if s_ind.value == 0:
        return CheckRecord("diagram", anchor, Status.PASS,
                           {"vacuous": True, "S_ind": 0.0})
    F = stft_grid(phi, psi, grid)
    cont = weighted_stft_sup(F, M, s, V[2 * n], tol["noise_floor"])
    N_cont = cont.value
    C1 = s_ind.value / N_cont
    C1_bound = adjoint_constant_bound(
        window_integrals(gamma, translation, alpha_max), M, s, witness,
        translation.C, grid.dim)
    links = {r.name: _projective_link(F, phi, psi, M, r, v, vbar, spatial,
                                      alpha_max, tol["noise_floor"],
                                      translation.A, translation.tau)
             for r in r_list}
    C2 = {name: sup.value / norm.value
          for name, (norm, sup, _) in links.items()}
    bridge = {name: N_cont / sup.value for name, (_, sup, _) in links.items()}
    error, _ = reconstruction_error(phi, psi, gamma, grid, t_points)
    reasons, failures = [], []
    if s_ind.lower_bound or any(norm.lower_bound
                                for norm, _, _ in links.values()):
        reasons.append("a seminorm is attained on the boundary of its range")
    if not cont.interior:
        reasons.append("xi-profile does not peak inside the grid")
    if C1_bound.exceeded_by(C1):
        if C1_bound.exceeded_by(s_ind.value / max(N_cont, cont.unresolved)):
            failures.append(f"C1 = {C1:.6g} above its bound "
                            f"{C1_bound.value:.6g}")
        else:
            reasons.append("C1 exceeds its bound on the resolved nodes only")
        if C1_bound.alpha_edge:
            reasons.append("window integrals of gamma peak at the top order")
    for name, (_, _, bound) in links.items():
        if bound.exceeded_by(C2[name]):
            failures.append(f"C2[{name}] = {C2[name]:.6g} above its bound "
                            f"{bound.value:.6g}")
            if bound.alpha_edge:
                reasons.append(f"window integrals for {name} peak at the "
                               f"top order")
    finite = np.isfinite(C1) and all(np.isfinite(c) and c > 0
                                     for c in C2.values())
    if error > tol["reconstruction"]:
        status = Status.FAIL
        failures.append(f"commutation error {error:.3g}")
    else:
        status = bound_status(finite, failures, reasons)
    return CheckRecord(
        "diagram", anchor, status,
        {"S_ind": s_ind.value, "h_prime": h_prime, "N_cont": N_cont,
         "C1": C1, "C1_bound": C1_bound.value, "C2": C2,
         "C2_bound": {name: b.value for name, (_, _, b) in links.items()},
         "bridge": bridge,
         "projective": {name: norm.value
                        for name, (norm, _, _) in links.items()},
         "commutation_error": error,
         "witness": {"C0": witness.C0, "H": witness.H}},
        {"commutation": tol["reconstruction"], "bound": BOUND_RTOL},
        grid.to_dict(), failures + reasons)


def _mollification_check(config, V):
    """Mollify the single weight of a constant system and compare."""
    width = 0.5
    spatial = config.spatial_grid()
    axis = spatial.axis
    weight = V[1]
    smooth = mollify_weight(axis, weight(axis), standard_bump(width))
    low, high = smooth.params["support"]
    interior = (axis >= low) & (axis <= high)
    low, high = equivalence_band(smooth, weight, axis[interior])
    ok = np.exp(-0.1 - width) <= low and high <= np.exp(0.1 + width)
    return _pass_fail("mollification", "mollified weight is equivalent", ok,
                      {"band": [low, high], "width": width})


def _vbar_check(config, V, A, state):
    """Build :math:`\\bar v` from an admissibility chain started at the
    first Nachbin weight of the config and check its translation
    inequality; the weight is left in ``state``."""
    adm = config.admissibility
    product = config.product_grid()

    def check():
        v = config.nachbin_weight_list()[0]
        chain = admissibility_chain(V, A, adm["tau"], v, int(adm["n"]),
                                    int(adm["chain_length"]), product,
                                    product)
        try:
            state["vbar"] = build_vbar(V, chain)
        except ChainError as err:
            return CheckRecord("vbar", "projective weight from the chain",
                               Status.FAIL, provenance=[str(err)])
        state["v"] = v
        return vbar_inequality_check(v, state["vbar"], A, adm["tau"],
                                     product, product,
                                     config.tolerances["vbar"])
    return check


def theorem_diagram(config, pool=None):
    """The inclusion of the inductive space into its projective
    description, measured as inequality chains

    .. math:: \\|\\varphi\\|_{h',4n}\\le C_1\\,\\|V_\\psi\\varphi\\|_{cont}
       = C_1\\,b\\,\\|V_\\psi\\varphi\\|_{proj}
       \\le C_1bC_2\\,\\|\\varphi\\|_{r,\\bar v}

    for every test function and shipped ``r``, with :math:`C_1, C_2`
    held to their closed forms, together with
    :math:`V_\\gamma^*V_\\psi\\varphi = \\varphi` for the normalized
    synthesis window."""
    M, A = config.sequence("M"), config.sequence("A")
    V = config.weight_system("V")
    psi, gamma = config.window("psi"), config.window("gamma")
    grid = config.phase_grid()
    spatial = config.spatial_grid()
    n = int(config.admissibility["n"])
    h = 1.0 / n
    tol = config.tolerances
    translation = _translation(config, A)
    state = {}
    registry = CheckRegistry("theorem_diagram")

    def normalization():
        state["gamma"] = _normalized_window(psi, gamma,
                                            tol["near_orthogonal"])
        pairing = state["gamma"].inner(psi)
        return _pass_fail("normalization", "(gamma, psi) = 1",
                          abs(pairing - 1) <= tol["normalization"],
                          {"pairing": pairing},
                          tolerances={"normalization": tol["normalization"]})

    registry.add("window_class", _window_class_check(M),
                 "Gaussian windows in the class")
    registry.add("admissibility", _admissibility(config, V, A),
                 "translation admissibility of the weight system")
    registry.add("admissibility_adjoint", _admissibility(config, V, A, 2),
                 "translation admissibility for the adjoint weights")
    registry.add("normalization", normalization, "(gamma, psi) = 1")
    registry.add("vbar", _vbar_check(config, V, A, state),
                 "projective weight from the chain",
                 requires=["admissibility"])
    base = ["window_class", "admissibility_adjoint", "normalization", "vbar"]
    if V.kind == "constant":
        registry.add("mollification", lambda: _mollification_check(config, V),
                     "mollified weight is equivalent")
    r_list = config.r_sequence_list()
    for i, phi in enumerate(config.function_family()):
        registry.add(
            f"diagram[{i}]",
            lambda phi=phi: _diagram_chain(
                phi, psi, state["gamma"], M, h, V, n, state["v"],
                state["vbar"], r_list, grid, spatial, _t_points(config),
                config.decay, tol, translation),
            "commuting diagram of the projective description",
            requires=base)
    return VerificationReport.create(registry.run(pool), config.to_dict())


def lemma_algebraic_equality(config, pool=None):
    """For each test function, the sequence
    :math:`a_\\alpha = \\sup_x|\\partial^\\alpha\\varphi|v_n` is finite for
    the inductive seminorms of some ``h`` exactly when
    :math:`b_\\alpha = \\sup_x|\\partial^\\alpha\\varphi|\\bar v` is for the
    projective seminorms of every ``r``, :math:`\\bar v` built from the
    admissibility chain."""
    M, A = config.sequence("M"), config.sequence("A")
    V = config.weight_system("V")
    n = int(config.admissibility["n"])
    spatial = config.spatial_grid()
    decay = config.decay
    r_list = config.r_sequence_list()
    state = {}
    registry = CheckRegistry("lemma_algebraic_equality")
    registry.add("admissibility", _admissibility(config, V, A),
                 "translation admissibility of the weight system")
    registry.add("vbar", _vbar_check(config, V, A, state),
                 "projective weight from the chain",
                 requires=["admissibility"])

    def agreement(phi):
        inductive = sup_sequence(phi, V[n], spatial, decay["alpha_max"])
        projective = sup_sequence(phi, state["vbar"], spatial,
                                  decay["alpha_max"])
        result = roumieu_sequence_equivalence(
            inductive, M, decay["h_grid"], r_list, decay["alpha_max"],
            config.dimension, decay["bound"], projective=projective)
        constants = dict(
            result, inductive_weight=repr(V[n]),
            projective_weight=repr(state["vbar"]),
            log_sup_inductive=_keyed(inductive),
            log_sup_projective=_keyed(projective))
        return _pass_fail("algebraic_equality",
                          "inductive and projective finiteness agree",
                          result["agree"], constants,
                          tolerances={"bound": decay["bound"]},
                          grid=spatial.to_dict())
    for i, phi in enumerate(config.function_family()):
        registry.add(f"agreement[{i}]", lambda phi=phi: agreement(phi),
                     "inductive and projective finiteness agree",
                     requires=["vbar"])
    return VerificationReport.create(registry.run(pool), config.to_dict())


def _keyed(log_sups):
    return {",".join(map(str, alpha)): value
            for alpha, value in log_sups.items()}


SUITES = {
    "prop_stft_gg": prop_stft_gg,
    "prop_stft_projective": prop_stft_projective,
    "theorem_diagram": theorem_diagram,
    "lemma_algebraic_equality": lemma_algebraic_equality,
}


def run_suites(config, pool=None):
    """Run the selected suites and merge their records, prefixed by the
    suite name, into one report."""
    records = []
    for name in config.suite_names:
        _logger.info(f"running suite {name}")
        report = SUITES[name](config, pool)
        records.extend(replace(r, name=f"{name}/{r.name}")
                       for r in report.records)
    return VerificationReport.create(records, config.to_dict())
