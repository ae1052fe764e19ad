"""
Exact and sampled oracles used by the test suite, plus small helpers.
"""
import itertools
from unittest.mock import patch

import networkx as nx
import numpy as np

from lifeline.graph import (Configuration, Network, Node, NodeKind,
                            SystemModel)
from lifeline.pra import AND, OR, BasicEvent, Gate, basic_events


def patch_settings(key, value):
    return patch('lifeline.settings.%s' % key, value)


def chain_model(edges=None, network_id='net', layers=None, kinds=None,
                groups=None):
    """
    Build a one-network model from edge lists. `layers` is a list of edge
    lists, one per configuration; `edges` is used when it is None.
    """
    layers = layers or [edges]
    configurations = tuple(Configuration.from_edges('layer%d' % i, i, edges)
                           for i, edges in enumerate(layers))
    ids = []
    for configuration in configurations:
        ids.extend(n for n in configuration.nodes if n not in ids)
    graph = nx.DiGraph()
    for configuration in configurations:
        graph.add_edges_from(configuration.edges)
    kinds = kinds or {}
    groups = groups or {}

    def kind(node_id):
        if node_id in kinds:
            return kinds[node_id]
        if graph.in_degree(node_id) == 0:
            return NodeKind.SOURCE
        if graph.out_degree(node_id) == 0:
            return NodeKind.TARGET
        return NodeKind.INTERMEDIATE

    nodes = tuple(Node(n, network_id, kind(n), partial_source=True,
                       redundancy_group=groups.get(n)) for n in ids)
    targets = tuple(n.id for n in nodes if n.kind == NodeKind.TARGET)
    network = Network(network_id, tuple(ids), configurations, targets)
    return SystemModel((network,), nodes)


def random_tree(rng, size):
    """Edges of a random tree with `size` nodes rooted at n0."""
    return [('n%d' % rng.integers(0, i), 'n%d' % i) for i in range(1, size)]


def brute_force_layer(configuration, p_sf):
    """
    Exact failure probability of every node of a layer by enumerating the
    2^n joint outcomes of independent self failures.
    """
    nodes = list(configuration.nodes)
    graph = configuration.digraph()
    ancestors = {n: nx.ancestors(graph, n) | {n} for n in nodes}
    p = np.array([p_sf.get(n, 0.0) for n in nodes])
    index = {n: i for i, n in enumerate(nodes)}
    result = {n: 0.0 for n in nodes}
    for outcome in itertools.product((False, True), repeat=len(nodes)):
        failed = np.array(outcome)
        weight = float(np.prod(np.where(failed, p, 1.0 - p)))
        for n in nodes:
            if any(failed[index[a]] for a in ancestors[n]):
                result[n] += weight
    return result


def brute_force_union(probabilities):
    """1 - P(no event occurs), by enumerating every joint outcome."""
    total = 0.0
    for outcome in itertools.product((False, True), repeat=len(probabilities)):
        weight = 1.0
        for occurred, p in zip(outcome, probabilities):
            weight *= p if occurred else 1.0 - p
        if any(outcome):
            total += weight
    return total


def truth_table(node):
    """Top-event probability of a fault tree by exhaustive enumeration."""
    events = basic_events(node)
    p = {e.id: e.probability for e in events}

    def occurs(element, state):
        if isinstance(element, BasicEvent):
            return state[element.id]
        values = [occurs(child, state) for child in element.children]
        return all(values) if element.kind == AND else any(values)

    total = 0.0
    for outcome in itertools.product((False, True), repeat=len(events)):
        state = dict(zip(p, outcome))
        if occurs(node, state):
            weight = 1.0
            for event_id, occurred in state.items():
                weight *= p[event_id] if occurred else 1.0 - p[event_id]
            total += weight
    return total


def random_fault_tree(rng, events=6, depth=2, prefix='e'):
    counter = itertools.count()

    def build(level, budget):
        if level == depth or budget == 1:
            return BasicEvent('%s%d' % (prefix, next(counter)),
                              float(rng.random()))
        width = int(rng.integers(2, max(3, budget)))
        width = min(width, budget)
        shares = [budget // width] * width
        shares[-1] += budget - sum(shares)
        return Gate(AND if rng.random() < 0.5 else OR,
                    tuple(build(level + 1, s) for s in shares))

    return build(0, events)


def sample_failures(model, p_sf, samples, seed=0):
    """
    Monte Carlo estimate of every node's failure probability with
    independent Boolean self failures. A node works when it does not fail
    itself, every node feeding it through a dependency works, and, if it
    belongs to any layer, one of its layers delivers supply to it.
    Returns (estimate, standard error) per node.
    """
    rng = np.random.default_rng(seed)
    node_ids = [node.id for node in model.nodes]
    p = np.array([p_sf.get(n, 0.0) for n in node_ids])
    index = {n: i for i, n in enumerate(node_ids)}
    groups = model.groups
    failures = np.zeros(len(node_ids))

    for _ in range(samples):
        failed_self = rng.random(len(node_ids)) < p
        works = {}
        for group in model.solve_order:
            for network_id in group:
                network = model.network(network_id)
                local = {}
                for n in network.nodes:
                    feeds = [x for d in model.incoming(network_id)
                             for x, y in d.edges if y == n]
                    local[n] = not failed_self[index[n]] and all(
                        works.get(x, True) for x in feeds)
                supplied = {n: [] for n in network.nodes}
                for configuration in network.configurations:
                    graph = configuration.digraph()
                    ok = {}
                    for n in nx.topological_sort(graph):
                        parents = list(graph.predecessors(n))
                        if not parents:
                            upstream = True
                        elif len(parents) == 1 or parents[0] not in groups:
                            upstream = all(ok[x] for x in parents)
                        else:
                            upstream = any(ok[x] for x in parents)
                        supplied[n].append(upstream)
                        ok[n] = local[n] and upstream
                for n in network.nodes:
                    works[n] = local[n] and (not supplied[n] or
                                             any(supplied[n]))
        failures += np.array([not works[n] for n in node_ids])

    estimate = failures / samples
    error = np.sqrt(estimate * (1.0 - estimate) / samples)
    return dict(zip(node_ids, estimate)), dict(zip(node_ids, error))
