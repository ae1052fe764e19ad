"""
System-of-networks data model.

A network is a stack of mutually exclusive configurations (layers) over one
node set, ordered by hierarchy: layer 0 is the ordinary supply line and
later layers are backups. Inside a layer every node draws supply from at
most one parent, so each layer is a forest of supply chains. Networks are
coupled through inter-network dependencies.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property

import networkx as nx
import numpy as np

from lifeline import exceptions

log = logging.getLogger('lifeline')

EXEMPT = 'exempt'

# Rule names reported by validate_topology.
SINGLE_INFLOW = 'single-inflow rule'
ACYCLIC = 'acyclic configuration'
SOURCE_INFLOW = 'source with inflow'
TARGET_OUTFLOW = 'target with outflow'
UNREACHABLE = 'target unreachable from any source'
NO_TARGET = 'configuration serves no target'
PARTIAL_SOURCE = 'partial source not flagged'
REDUNDANCY_GROUP = 'redundancy group'
DEPENDENCY_DIMENSION = 'dependency dimension'
SELF_DEPENDENCY = 'self dependency'
UNKNOWN_REFERENCE = 'unknown reference'
DUPLICATE_ID = 'duplicate id'
NO_CONFIGURATION = 'no configuration'


class NodeKind(str, Enum):
    SOURCE = 'source'
    INTERMEDIATE = 'intermediate'
    TARGET = 'target'


@dataclass(frozen=True)
class AutonomyRef:
    curve: str
    capacity_hours: float | None = None


@dataclass(frozen=True, eq=True)
class Node:
    id: str
    network_id: str
    kind: NodeKind
    partial_source: bool = False
    # hazard kind -> exposure attributes ({'intensity': ..}) or EXEMPT
    site: dict = field(default_factory=dict, hash=False)
    # hazard kind -> fragility curve name
    fragility: dict = field(default_factory=dict, hash=False)
    autonomy: AutonomyRef | None = None
    redundancy_group: str | None = None
    category: str | None = None
    name: str | None = None

    @property
    def score_category(self):
        return self.category or self.network_id

    def is_exempt(self, hazard):
        return self.site.get(hazard) == EXEMPT

    def site_intensity(self, hazard):
        attributes = self.site.get(hazard)
        if not attributes or attributes == EXEMPT:
            return None
        return attributes.get('intensity')


@dataclass(frozen=True)
class Configuration:
    label: str
    layer_index: int
    edges: tuple = ()
    degraded: bool = False

    @classmethod
    def from_edges(cls, label, layer_index, edges, degraded=False):
        return cls(label, layer_index, tuple(tuple(e) for e in edges),
                   degraded)

    @property
    def nodes(self):
        """Node ids of the layer in order of first appearance."""
        seen = {}
        for x, y in self.edges:
            seen.setdefault(x, None)
            seen.setdefault(y, None)
        return tuple(seen)

    def digraph(self):
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from(self.edges)
        return graph

    def adjacency(self, node_ids):
        """Boolean matrix over node_ids; entry [x, y] is the edge x -> y."""
        index = {node_id: i for i, node_id in enumerate(node_ids)}
        matrix = np.zeros((len(node_ids), len(node_ids)), dtype=bool)
        for x, y in self.edges:
            matrix[index[x], index[y]] = True
        return matrix


@dataclass(frozen=True)
class Network:
    id: str
    nodes: tuple
    configurations: tuple
    targets: tuple

    def configuration(self, index):
        if not 0 <= index < len(self.configurations):
            raise exceptions.ConfigurationIndexError(self.id, index)
        return self.configurations[index]

    def layers_of(self, node_id):
        return [c for c in self.configurations if node_id in c.nodes]


@dataclass(frozen=True)
class InterNetworkDependency:
    from_network: str
    to_network: str
    # (x, y) pairs: node x of from_network feeds node y of to_network
    edges: tuple = ()

    def matrix(self, from_nodes, to_nodes):
        """Boolean n x m incidence over the two networks' node lists."""
        rows = {node_id: i for i, node_id in enumerate(from_nodes)}
        cols = {node_id: j for j, node_id in enumerate(to_nodes)}
        matrix = np.zeros((len(from_nodes), len(to_nodes)), dtype=bool)
        for x, y in self.edges:
            matrix[rows[x], cols[y]] = True
        return matrix


@dataclass(frozen=True)
class SystemModel:
    networks: tuple
    nodes: tuple
    dependencies: tuple = ()

    @cached_property
    def node_map(self):
        return {node.id: node for node in self.nodes}

    @cached_property
    def network_map(self):
        return {network.id: network for network in self.networks}

    def node(self, node_id):
        try:
            return self.node_map[node_id]
        except KeyError:
            raise exceptions.UnknownNode(node_id)

    def network(self, network_id):
        try:
            return self.network_map[network_id]
        except KeyError:
            raise exceptions.UnknownNetwork(network_id)

    @cached_property
    def groups(self):
        """Redundancy-group name of every grouped node."""
        return {node.id: node.redundancy_group for node in self.nodes
                if node.redundancy_group}

    @cached_property
    def solve_order(self):
        return solve_order(self)

    def incoming(self, network_id):
        return [d for d in self.dependencies if d.to_network == network_id]

    def with_configuration(self, network_id, configuration):
        """
        Return a copy of the model with `configuration` appended to the
        network at the lowest hierarchy.
        """
        networks = []
        for network in self.networks:
            if network.id == network_id:
                configuration = replace(
                    configuration, layer_index=len(network.configurations))
                network = replace(network, configurations=(
                    network.configurations + (configuration,)))
            networks.append(network)
        if network_id not in self.network_map:
            raise exceptions.UnknownNetwork(network_id)
        return replace(self, networks=tuple(networks))


@dataclass(frozen=True, order=True)
class Violation:
    network: str
    configuration: str
    node: str
    rule: str
    message: str

    def __str__(self):
        where = '/'.join(p for p in (self.network, self.configuration) if p)
        return '%s: %s (%s)' % (where or 'model', self.message, self.rule)


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self):
        return not self.violations

    def __iter__(self):
        return iter(self.violations)

    def __len__(self):
        return len(self.violations)


def logical_unit(node_id, groups):
    group = groups.get(node_id)
    return ('group', group) if group else ('node', node_id)


def enumerate_chains(network, config_index):
    """
    Return every maximal supply chain of a layer, from a node without
    inflow to a node without outflow, each listed in supply order.
    """
    configuration = network.configuration(config_index)
    graph = configuration.digraph()
    roots = [n for n in configuration.nodes if graph.in_degree(n) == 0]
    leaves = [n for n in configuration.nodes if graph.out_degree(n) == 0]
    chains = []
    for root in roots:
        for leaf in leaves:
            if root == leaf:
                continue
            chains.extend(tuple(path) for path in
                          nx.all_simple_paths(graph, root, leaf))
    return chains


def network_interop_matrix(model, layer=0):
    """
    Classic IIM matrix over every node of the model: a[y, x] = 1 when x
    feeds y in the given layer of its network or through a dependency.
    """
    node_ids = [node.id for node in model.nodes]
    index = {node_id: i for i, node_id in enumerate(node_ids)}
    matrix = np.zeros((len(node_ids), len(node_ids)))
    for network in model.networks:
        if layer < len(network.configurations):
            for x, y in network.configurations[layer].edges:
                matrix[index[y], index[x]] = 1.0
    for dependency in model.dependencies:
        for x, y in dependency.edges:
            matrix[index[y], index[x]] = 1.0
    return node_ids, matrix


def solve_order(model):
    """
    Order the networks by dependency. Each entry is a list of network ids;
    an entry with more than one network, or a network depending on itself,
    is a dependency cycle to be solved by fixed-point iteration.
    """
    declared = {network.id: i for i, network in enumerate(model.networks)}
    graph = nx.DiGraph()
    graph.add_nodes_from(declared)
    for dependency in model.dependencies:
        if (dependency.from_network in declared and
                dependency.to_network in declared):
            graph.add_edge(dependency.from_network, dependency.to_network)
    condensed = nx.condensation(graph)
    members = condensed.graph['mapping']
    components = {}
    for network_id, component in members.items():
        components.setdefault(component, []).append(network_id)
    for component in components.values():
        component.sort(key=declared.get)
    key = lambda component: min(declared[n] for n in components[component])
    return [components[c] for c in
            nx.lexicographical_topological_sort(condensed, key=key)]


def is_cycle(model, group):
    if len(group) > 1:
        return True
    return any(d.from_network == d.to_network == group[0]
               for d in model.dependencies)


class TopologyValidator(object):
    """Collects every structural violation of a system model."""

    def __init__(self, model, extra_configurations=()):
        self.model = model
        self.extra = list(extra_configurations)
        self.violations = []

    def add(self, rule, message, network='', configuration='', node=''):
        self.violations.append(
            Violation(network, configuration, node, rule, message))

    def validate(self):
        self.check_nodes()
        for network in self.model.networks:
            self.check_network(network)
        self.check_groups()
        self.check_dependencies()
        return ValidationReport(sorted(set(self.violations)))

    def check_nodes(self):
        seen = set()
        for node in self.model.nodes:
            if node.id in seen:
                self.add(DUPLICATE_ID, 'node id "%s" is declared twice'
                         % node.id, node.network_id, node=node.id)
            seen.add(node.id)

    def check_network(self, network):
        node_map = self.model.node_map
        for node_id in network.nodes:
            if node_id not in node_map:
                self.add(UNKNOWN_REFERENCE, 'unknown node "%s"' % node_id,
                         network.id, node=node_id)
            elif node_map[node_id].network_id != network.id:
                self.add(UNKNOWN_REFERENCE, 'node "%s" belongs to network '
                         '"%s"' % (node_id, node_map[node_id].network_id),
                         network.id, node=node_id)
        for target in network.targets:
            if target not in network.nodes:
                self.add(UNKNOWN_REFERENCE, 'unknown target "%s"' % target,
                         network.id, node=target)

        configurations = list(network.configurations)
        configurations += [c for n, c in self.extra if n == network.id]
        if not configurations:
            self.add(NO_CONFIGURATION, 'network has no configuration',
                     network.id)
        reached = {}
        for configuration in configurations:
            graph = self.check_configuration(network, configuration)
            for source in graph.nodes:
                if self.kind(source) != NodeKind.SOURCE:
                    continue
                served = nx.descendants(graph, source) & set(network.targets)
                reached.setdefault(source, set()).update(served)

        contained = set()
        for configuration in configurations:
            contained.update(configuration.nodes)
        for target in network.targets:
            if target in network.nodes and target not in contained:
                self.add(UNREACHABLE, 'target "%s" is in no configuration'
                         % target, network.id, node=target)

        for source, served in reached.items():
            node = node_map[source]
            missing = set(network.targets) - served
            if missing and not node.partial_source:
                self.add(PARTIAL_SOURCE, 'source "%s" never reaches %s'
                         % (source, ', '.join(sorted(missing))),
                         network.id, node=source)

    def kind(self, node_id):
        return self.model.node_map[node_id].kind

    def check_configuration(self, network, configuration):
        label = configuration.label
        known = set(network.nodes) & set(self.model.node_map)
        edges = []
        for x, y in configuration.edges:
            bad = [n for n in (x, y) if n not in known]
            for n in bad:
                self.add(UNKNOWN_REFERENCE, 'edge %s -> %s uses unknown node '
                         '"%s"' % (x, y, n), network.id, label, n)
            if not bad:
                edges.append((x, y))

        graph = nx.DiGraph()
        graph.add_edges_from(edges)
        groups = self.model.groups

        for y in graph.nodes:
            units = {logical_unit(x, groups) for x in graph.predecessors(y)}
            if len(units) > 1:
                self.add(SINGLE_INFLOW, 'node "%s" has %d inflow edges'
                         % (y, len(units)), network.id, label, y)
            if graph.in_degree(y) and self.kind(y) == NodeKind.SOURCE:
                self.add(SOURCE_INFLOW, 'source "%s" has an inflow edge' % y,
                         network.id, label, y)
            if graph.out_degree(y) and self.kind(y) == NodeKind.TARGET:
                self.add(TARGET_OUTFLOW, 'target "%s" has an outflow edge'
                         % y, network.id, label, y)

        members = {}
        for n in graph.nodes:
            if n in groups:
                members.setdefault(groups[n], []).append(n)
        for group, nodes in members.items():
            parents = {frozenset(graph.predecessors(n)) for n in nodes}
            if len(parents) > 1:
                self.add(REDUNDANCY_GROUP, 'members of group "%s" draw from '
                         'different suppliers' % group, network.id, label)

        if not nx.is_directed_acyclic_graph(graph):
            cycle = [x for x, _ in nx.find_cycle(graph)]
            self.add(ACYCLIC, 'cycle %s' % ' -> '.join(cycle),
                     network.id, label)
            return graph

        if configuration.degraded:
            return graph
        targets = [n for n in graph.nodes if n in network.targets]
        if not targets:
            self.add(NO_TARGET, 'configuration reaches no network target',
                     network.id, label)
        for target in targets:
            ancestors = nx.ancestors(graph, target)
            if not any(self.kind(a) == NodeKind.SOURCE for a in ancestors):
                self.add(UNREACHABLE, 'target "%s" is not supplied by a '
                         'source' % target, network.id, label, target)
        return graph

    def check_groups(self):
        members = {}
        for node in self.model.nodes:
            if node.redundancy_group:
                members.setdefault(node.redundancy_group, []).append(node)
        for group, nodes in members.items():
            if len({(n.network_id, n.kind) for n in nodes}) > 1:
                self.add(REDUNDANCY_GROUP, 'members of group "%s" differ in '
                         'network or kind' % group, nodes[0].network_id)

    def check_dependencies(self):
        networks = self.model.network_map
        for dependency in self.model.dependencies:
            ends = (dependency.from_network, dependency.to_network)
            missing = [n for n in ends if n not in networks]
            for n in missing:
                self.add(UNKNOWN_REFERENCE, 'dependency names unknown network '
                         '"%s"' % n, n)
            if missing:
                continue
            source, sink = (networks[n] for n in ends)
            for x, y in dependency.edges:
                if x not in source.nodes or y not in sink.nodes:
                    self.add(DEPENDENCY_DIMENSION, 'dependency edge %s -> %s '
                             'is outside %s -> %s' % (x, y, ends[0], ends[1]),
                             ends[1], node=y)
                elif x == y:
                    self.add(SELF_DEPENDENCY, 'node "%s" depends on itself'
                             % x, ends[1], node=x)


def validate_topology(model, extra_configurations=()):
    """
    Check the structural rules of a model and return the violations found.
    `extra_configurations` are (network id, configuration) pairs that will
    be appended later, such as timeline interventions.
    """
    report = TopologyValidator(model, extra_configurations).validate()
    log.debug('Validated model: %d violations', len(report))
    return report
