"""
Fault trees and event trees, evaluated independently of the cascade model
so that both can be compared on the structures they share.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from lifeline import exceptions
from lifeline.cascade import (chain_survival, configuration_occurrence,
                              propagate_layer)
from lifeline.graph import Configuration, enumerate_chains

log = logging.getLogger('lifeline')

AND = 'AND'
OR = 'OR'


@dataclass(frozen=True)
class BasicEvent:
    id: str
    probability: float


@dataclass(frozen=True)
class Gate:
    kind: str
    children: tuple


@dataclass(frozen=True)
class FaultTree:
    name: str
    root: object


@dataclass(frozen=True)
class Branch:
    label: str
    success_probability: float


@dataclass(frozen=True)
class EventTree:
    name: str
    initiating_frequency: float
    branches: tuple

    @property
    def sequences(self):
        """
        Leaf outcomes: success at branch k after every earlier branch
        failed, then the sequence where every branch fails.
        """
        outcomes = []
        for k, branch in enumerate(self.branches):
            outcomes.append((branch.label, (False,) * k + (True,)))
        outcomes.append(('failure', (False,) * len(self.branches)))
        return outcomes


@dataclass(frozen=True)
class EventSequence:
    label: str
    outcomes: tuple
    frequency: float


@dataclass(frozen=True)
class Comparison:
    fta: float
    iim: float
    diff: float


@dataclass(frozen=True)
class EventTreeComparison:
    sequences: list
    p_occ: list
    loc: float
    max_diff: float


def basic_events(node):
    if isinstance(node, BasicEvent):
        return [node]
    if not isinstance(node, Gate):
        raise exceptions.MalformedTree('unexpected element %r' % (node,))
    events = []
    for child in node.children:
        events.extend(basic_events(child))
    return events


def check_fault_tree(tree):
    events = basic_events(tree.root)
    ids = [event.id for event in events]
    shared = sorted({i for i in ids if ids.count(i) > 1})
    if shared:
        raise exceptions.MalformedTree('basic events %s appear more than '
                                       'once' % ', '.join(shared))
    for event in events:
        if not 0.0 <= event.probability <= 1.0:
            raise exceptions.MalformedTree('event "%s" has probability %r'
                                           % (event.id, event.probability))


def _evaluate(node):
    if isinstance(node, BasicEvent):
        return node.probability
    if not node.children:
        raise exceptions.MalformedTree('%s gate without inputs' % node.kind)
    values = np.array([_evaluate(child) for child in node.children])
    if node.kind == AND:
        return float(np.prod(values))
    if node.kind == OR:
        return float(1.0 - np.prod(1.0 - values))
    raise exceptions.MalformedTree('unknown gate "%s"' % node.kind)


def eval_fault_tree(tree):
    """Top-event probability with independent basic events."""
    if isinstance(tree, (Gate, BasicEvent)):
        tree = FaultTree('top', tree)
    check_fault_tree(tree)
    return _evaluate(tree.root)


def eval_event_tree(tree):
    """Frequency of every sequence of an event tree."""
    if tree.initiating_frequency < 0:
        raise exceptions.MalformedTree('negative initiating frequency')
    for branch in tree.branches:
        if not 0.0 <= branch.success_probability <= 1.0:
            raise exceptions.MalformedTree('branch "%s" has probability %r'
                                           % (branch.label,
                                              branch.success_probability))
    sequences = []
    for label, outcomes in tree.sequences:
        factor = 1.0
        for branch, success in zip(tree.branches, outcomes):
            p = branch.success_probability
            factor *= p if success else 1.0 - p
        sequences.append(EventSequence(label, outcomes,
                                       tree.initiating_frequency * factor))
    return sequences


def _chain_layer(head, events):
    """One layer: `head` nodes feed a series chain of events ending at top."""
    names = ['e%d' % i for i in range(len(events))] + ['top']
    edges = [(h, names[0]) for h in head]
    edges += list(zip(names[:-1], names[1:]))
    p_sf = dict(zip(names, list(events) + [0.0]))
    return Configuration.from_edges('or-chain', 0, edges), p_sf


def iim_or_equivalence(events):
    """
    Compare an OR gate over `events` with the same events in series on one
    supply chain.
    """
    events = [float(p) for p in events]
    fta = eval_fault_tree(Gate(OR, tuple(
        BasicEvent('e%d' % i, p) for i, p in enumerate(events))))
    configuration, p_sf = _chain_layer([], events)
    iim = propagate_layer(configuration, p_sf)['top'].p_f
    return Comparison(fta, iim, abs(fta - iim))


def iim_and_equivalence(events):
    """
    Compare an AND gate over `events` with the same events as a redundancy
    group of sources feeding the top node.
    """
    events = [float(p) for p in events]
    fta = eval_fault_tree(Gate(AND, tuple(
        BasicEvent('g%d' % i, p) for i, p in enumerate(events))))
    members = ['g%d' % i for i in range(len(events))]
    configuration = Configuration.from_edges(
        'parallel', 0, [(m, 'top') for m in members])
    p_sf = dict(zip(members, events))
    groups = {m: 'parallel' for m in members}
    iim = propagate_layer(configuration, p_sf, groups)['top'].p_f
    return Comparison(fta, iim, abs(fta - iim))


def fault_tree_equivalence(tree):
    """
    Map a fault tree onto a single layer and compare both evaluations. An
    OR gate maps to a series chain; at most one AND gate of basic events
    below it maps to a redundancy group at the head of the chain.
    """
    if isinstance(tree, (Gate, BasicEvent)):
        tree = FaultTree('top', tree)
    check_fault_tree(tree)
    root = tree.root
    if isinstance(root, BasicEvent):
        root = Gate(OR, (root,))
    if root.kind == AND:
        root = Gate(OR, (root,))
    series, parallel = [], []
    for child in root.children:
        if isinstance(child, BasicEvent):
            series.append(child.probability)
        elif (child.kind == AND and not parallel and
              all(isinstance(c, BasicEvent) for c in child.children)):
            parallel = [c.probability for c in child.children]
        else:
            raise exceptions.StructuralMismatch(
                'only an OR of basic events and one AND group maps onto a '
                'supply chain')
    members = ['g%d' % i for i in range(len(parallel))]
    if series:
        configuration, p_sf = _chain_layer(members, series)
    else:
        configuration = Configuration.from_edges(
            'parallel', 0, [(m, 'top') for m in members])
        p_sf = {'top': 0.0}
    p_sf.update(zip(members, parallel))
    groups = {m: 'parallel' for m in members}
    fta = _evaluate(tree.root)
    iim = propagate_layer(configuration, p_sf, groups)['top'].p_f
    log.debug('Fault tree %s: %.12g vs %.12g', tree.name, fta, iim)
    return Comparison(fta, iim, abs(fta - iim))


def check_full_flow(network):
    if not network.configurations:
        raise exceptions.StructuralMismatch('network "%s" has no '
                                            'configuration' % network.id)
    seen = set()
    for configuration in network.configurations:
        if configuration.degraded:
            raise exceptions.StructuralMismatch(
                'configuration "%s" is degraded, it carries no complete '
                'flow' % configuration.label)
        if not configuration.edges:
            raise exceptions.StructuralMismatch(
                'configuration "%s" is empty' % configuration.label)
        edges = frozenset(configuration.edges)
        if edges in seen:
            raise exceptions.StructuralMismatch(
                'configuration "%s" repeats another layer, the layers are not '
                'mutually exclusive' % configuration.label)
        seen.add(edges)


def _branch_survival(network, index, p_sf, groups):
    """Layer survival computed from its enumerated chains."""
    on_chains = []
    for chain in enumerate_chains(network, index):
        on_chains.extend(n for n in chain if n not in on_chains)
    survival = 1.0
    counted = set()
    for node_id in on_chains:
        group = groups.get(node_id)
        if group is None:
            survival *= 1.0 - p_sf.get(node_id, 0.0)
        elif group not in counted:
            counted.add(group)
            members = [n for n in on_chains if groups.get(n) == group]
            survival *= 1.0 - float(np.prod([p_sf.get(m, 0.0)
                                             for m in members]))
    return survival


def iim_eta_equivalence(network, p_sf, groups=None):
    """
    Compare the configuration occurrences of a network with the event tree
    whose branches are its layers in hierarchy order.
    """
    groups = groups or {}
    check_full_flow(network)
    tree = EventTree(network.id, 1.0, tuple(
        Branch(c.label, _branch_survival(network, k, p_sf, groups))
        for k, c in enumerate(network.configurations)))
    sequences = eval_event_tree(tree)

    survivals = [chain_survival(c, p_sf, groups)
                 for c in network.configurations]
    states, loc = configuration_occurrence(network, survivals)
    p_occ = [state.p_occ for state in states]
    diffs = [abs(s.frequency - p) for s, p in zip(sequences, p_occ)]
    diffs.append(abs(sequences[-1].frequency - loc))
    return EventTreeComparison(sequences, p_occ, loc, max(diffs))
