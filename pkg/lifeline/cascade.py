"""
Probabilistic cascade of failures.

Within a layer a node fails when it fails on its own or when its supplier
fails: p_f = 1 - (1 - p_sf)(1 - p_cf) with p_cf = p_f(parent). A layer is
available when every unit of its chains survives; the layers of a network
are tried in hierarchy order, which splits the probability mass between
the layers and the loss of capacity exactly like an event tree.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from lifeline import exceptions, settings
from lifeline.graph import is_cycle, logical_unit
from lifeline.utils import union

log = logging.getLogger('lifeline')


@dataclass(frozen=True)
class NodeProbabilities:
    p_sf: float
    p_cf: float
    p_f: float


@dataclass(frozen=True)
class ConfigurationState:
    label: str
    p_occ: float
    chain_survival: float
    members: frozenset = field(default=frozenset(), compare=False)


@dataclass
class NetworkState:
    network_id: str
    nodes: dict
    configurations: list
    loc: float

    @property
    def p_occ(self):
        return {c.label: c.p_occ for c in self.configurations}


def _units(configuration, groups):
    """Collapse redundancy-group members of a layer into logical units."""
    units = {}
    for node_id in configuration.nodes:
        units.setdefault(logical_unit(node_id, groups), []).append(node_id)
    return units


def _topological(configuration):
    graph = configuration.digraph()
    try:
        return graph, list(nx.topological_sort(graph))
    except nx.NetworkXUnfeasible:
        cycle = [x for x, _ in nx.find_cycle(graph)]
        raise exceptions.CyclicConfiguration(configuration.label, cycle)


def propagate_layer(configuration, p_sf, groups=None):
    """
    Failure probabilities of every node of one layer, given the local
    failure probability of each node. A consumer fed by several members of
    one redundancy group loses supply only when all of them fail.
    """
    groups = groups or {}
    graph, order = _topological(configuration)
    p_f = {}
    result = {}
    for node_id in order:
        parents = list(graph.predecessors(node_id))
        if not parents:
            p_cf = 0.0
        elif len(parents) == 1:
            p_cf = p_f[parents[0]]
        else:
            owners = {groups.get(parent) for parent in parents}
            if len(owners) > 1 or None in owners:
                raise exceptions.SingleInflowViolation(
                    node_id, configuration.label)
            p_cf = float(np.prod([p_f[parent] for parent in parents]))
        local = p_sf.get(node_id, 0.0)
        p_f[node_id] = union(local, p_cf)
        result[node_id] = NodeProbabilities(local, p_cf, p_f[node_id])
    return result


def chain_survival(configuration, local_failure, groups=None):
    """
    Probability that every unit on the chains of a layer is operational.
    A redundancy group counts as one unit that is lost only when all of
    its members fail.
    """
    groups = groups or {}
    survival = 1.0
    for (kind, _), members in _units(configuration, groups).items():
        failures = [local_failure.get(m, 0.0) for m in members]
        if kind == 'group':
            survival *= 1.0 - float(np.prod(failures))
        else:
            survival *= 1.0 - failures[0]
    return survival


def configuration_occurrence(network, survivals):
    """
    Split the probability mass between the layers of a network: layer k is
    active when it survives and every layer above it in the hierarchy is
    lost. The remainder is the loss of capacity.
    """
    states = []
    lost = 1.0
    for configuration, survival in zip(network.configurations, survivals):
        states.append(ConfigurationState(configuration.label, survival * lost,
                                         survival,
                                         frozenset(configuration.nodes)))
        lost *= 1.0 - survival
    return states, lost


def couple_layers_prob(I, p_upstream, p_local):
    """
    Unite the local probabilities of the consuming network with the
    failures routed from the supplying network through incidence I.
    """
    I = np.asarray(I, dtype=float)
    p_upstream = np.asarray(p_upstream, dtype=float)
    p_local = np.asarray(p_local, dtype=float)
    if I.shape != (len(p_upstream), len(p_local)):
        raise exceptions.DimensionMismatch((len(p_upstream), len(p_local)),
                                           I.shape)
    routed = 1.0 - np.prod(1.0 - I * p_upstream[:, np.newaxis], axis=0)
    return 1.0 - (1.0 - routed) * (1.0 - p_local)


def _external(model, network, p_f):
    external = np.zeros(len(network.nodes))
    for dependency in model.incoming(network.id):
        upstream = model.network(dependency.from_network)
        I = dependency.matrix(upstream.nodes, network.nodes)
        p_upstream = [p_f.get(x, 0.0) for x in upstream.nodes]
        external = couple_layers_prob(I, p_upstream, external)
    return dict(zip(network.nodes, external.tolist()))


def solve_network(model, network, p_sf, p_f_upstream):
    """Solve one network given the failures of the networks it draws on."""
    groups = model.groups
    external = _external(model, network, p_f_upstream)
    local = {n: union(p_sf.get(n, 0.0), external[n]) for n in network.nodes}

    layer_cf = {n: [] for n in network.nodes}
    survivals = []
    for configuration in network.configurations:
        for node_id, probs in propagate_layer(configuration, local,
                                              groups).items():
            layer_cf[node_id].append(probs.p_cf)
        survival = chain_survival(configuration, local, groups)
        log.debug('Layer %s/%s survives with %.6g', network.id,
                  configuration.label, survival)
        survivals.append(survival)

    nodes = {}
    for node_id in network.nodes:
        # supply is lost only when every layer holding the node fails it
        internal = float(np.prod(layer_cf[node_id])) if layer_cf[node_id] \
            else 0.0
        p_cf = union(external[node_id], internal)
        self_p = p_sf.get(node_id, 0.0)
        nodes[node_id] = NodeProbabilities(self_p, p_cf, union(self_p, p_cf))
    states, loc = configuration_occurrence(network, survivals)
    return NetworkState(network.id, nodes, states, loc)


def _solve_cycle(model, group, p_sf, p_f, tolerance, max_iterations):
    routed = {n: 0.0 for network_id in group
              for n in model.network(network_id).nodes}
    history = []
    damping = 0.0
    for iteration in range(max_iterations):
        current = dict(p_f, **routed)
        states = {network_id: solve_network(model, model.network(network_id),
                                            p_sf, current)
                  for network_id in group}
        fresh = {n: p.p_f for state in states.values()
                 for n, p in state.nodes.items()}
        step = {n: damping * routed[n] + (1.0 - damping) * fresh[n]
                for n in routed}
        change = max(abs(step[n] - routed[n]) for n in routed) if routed \
            else 0.0
        history.append(change)
        if change <= tolerance:
            log.debug('Cycle %s converged after %d iterations',
                      ', '.join(group), iteration + 1)
            return states
        if not damping and len(history) > 2 and change > history[-2]:
            damping = settings.FIXED_POINT_DAMPING
            log.warning('Cycle %s oscillates, damping by %.2f',
                        ', '.join(group), damping)
        routed = step
    raise exceptions.ConvergenceError(group, history)


def solve_system(model, p_sf, tolerance=None, max_iterations=None):
    """
    Solve every network of the model in dependency order. Networks on a
    dependency cycle are iterated together until the failure
    probabilities settle.
    """
    if tolerance is None:
        tolerance = settings.FIXED_POINT_TOLERANCE
    if max_iterations is None:
        max_iterations = settings.FIXED_POINT_MAX_ITERATIONS
    p_f = {}
    states = {}
    for group in model.solve_order:
        if is_cycle(model, group):
            solved = _solve_cycle(model, group, p_sf, p_f, tolerance,
                                  max_iterations)
        else:
            network = model.network(group[0])
            solved = {network.id: solve_network(model, network, p_sf, p_f)}
        for network_id, state in solved.items():
            states[network_id] = state
            p_f.update((n, p.p_f) for n, p in state.nodes.items())
    return {network.id: states[network.id] for network in model.networks}


def failure_probabilities(states):
    return {n: p for state in states.values() for n, p in state.nodes.items()}


def node_importance(model, p_sf, node_id, target_id):
    """
    How much the exposure of `node_id` adds to the failure probability of
    `target_id`, at every instant of `p_sf` (one mapping or a sequence of
    mappings).
    """
    model.node(node_id)
    target = model.node(target_id)
    series = [p_sf] if isinstance(p_sf, dict) else list(p_sf)
    importance = []
    for snapshot in series:
        exposed = solve_system(model, snapshot)
        shielded = solve_system(model, dict(snapshot, **{node_id: 0.0}))
        importance.append(
            exposed[target.network_id].nodes[target_id].p_f -
            shielded[target.network_id].nodes[target_id].p_f)
    return importance
