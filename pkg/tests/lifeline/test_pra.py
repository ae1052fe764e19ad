from dataclasses import replace
from unittest import TestCase

import numpy as np
import pytest

from lifeline import exceptions, pra
from lifeline.cascade import chain_survival, configuration_occurrence
from lifeline.parser import load_scenario
from lifeline.pra import (AND, OR, BasicEvent, Branch, EventTree,
                          FaultTree, Gate)
from lifeline.testutils import random_fault_tree, truth_table


class TestFaultTrees(TestCase):
    def test_gates(self):
        events = (BasicEvent('a', 0.1), BasicEvent('b', 0.2))
        assert pra.eval_fault_tree(Gate(OR, events)) == pytest.approx(0.28)
        assert pra.eval_fault_tree(Gate(AND, events)) == pytest.approx(0.02)
        assert pra.eval_fault_tree(BasicEvent('a', 0.1)) == 0.1

    def test_matches_truth_table(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            root = random_fault_tree(rng, events=int(rng.integers(2, 9)),
                                     depth=int(rng.integers(1, 4)))
            assert abs(pra.eval_fault_tree(root) - truth_table(root)) <= 1e-12

    def test_malformed(self):
        shared = Gate(OR, (BasicEvent('a', 0.1), Gate(AND, (
            BasicEvent('a', 0.1), BasicEvent('b', 0.2)))))
        with pytest.raises(exceptions.MalformedTree):
            pra.eval_fault_tree(shared)
        with pytest.raises(exceptions.MalformedTree):
            pra.eval_fault_tree(Gate('XOR', (BasicEvent('a', 0.1),)))
        with pytest.raises(exceptions.MalformedTree):
            pra.eval_fault_tree(Gate(OR, ()))
        with pytest.raises(exceptions.MalformedTree):
            pra.eval_fault_tree(Gate(OR, (BasicEvent('a', 1.5),)))
        with pytest.raises(exceptions.MalformedTree):
            pra.eval_fault_tree(Gate(OR, ('a',)))


class TestGateEquivalence(TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(2024)

    def test_or_gate_is_a_series_chain(self):
        for _ in range(1000):
            events = self.rng.random(int(self.rng.integers(2, 7)))
            assert pra.iim_or_equivalence(events).diff <= 1e-12

    def test_and_gate_is_a_redundancy_group(self):
        for _ in range(1000):
            events = self.rng.random(int(self.rng.integers(2, 7)))
            result = pra.iim_and_equivalence(events)
            assert result.diff <= 1e-12
            assert result.iim == pytest.approx(float(np.prod(events)))

    def test_alarm_clock(self):
        tree = load_scenario('example4').pra.fault_trees[0]
        result = pra.fault_tree_equivalence(tree)
        assert result.diff <= 1e-12
        assert result.fta == pytest.approx(
            1 - (1 - 0.0003) * (1 - 0.01) * (1 - 0.0027 * 0.1))

    def test_and_only(self):
        tree = FaultTree('pumps', Gate(AND, (BasicEvent('p1', 0.3),
                                             BasicEvent('p2', 0.4))))
        assert pra.fault_tree_equivalence(tree).iim == pytest.approx(0.12)

    def test_unmappable(self):
        nested = Gate(AND, (BasicEvent('a', 0.1), Gate(OR, (
            BasicEvent('b', 0.2), BasicEvent('c', 0.3)))))
        with pytest.raises(exceptions.StructuralMismatch):
            pra.fault_tree_equivalence(Gate(OR, (nested,)))
        two_groups = Gate(OR, (
            Gate(AND, (BasicEvent('a', 0.1), BasicEvent('b', 0.2))),
            Gate(AND, (BasicEvent('c', 0.1), BasicEvent('d', 0.2)))))
        with pytest.raises(exceptions.StructuralMismatch):
            pra.fault_tree_equivalence(two_groups)


class TestEventTrees(TestCase):
    def test_sequences(self):
        tree = EventTree('t', 2.0, (Branch('first', 0.5),
                                    Branch('second', 0.5)))
        sequences = pra.eval_event_tree(tree)
        assert [s.label for s in sequences] == ['first', 'second', 'failure']
        assert [s.frequency for s in sequences] == \
            pytest.approx([1.0, 0.5, 0.5])
        assert sequences[1].outcomes == (False, True)

    def test_oversleeping(self):
        tree = load_scenario('example4').pra.event_trees[0]
        sequences = pra.eval_event_tree(tree)
        assert sum(s.frequency for s in sequences) == pytest.approx(365)
        assert sequences[-1].frequency == pytest.approx(
            365 * (1 - 0.9897) * 0.05 * 0.2)

    def test_invalid(self):
        with pytest.raises(exceptions.MalformedTree):
            pra.eval_event_tree(EventTree('t', -1.0, (Branch('b', 0.5),)))
        with pytest.raises(exceptions.MalformedTree):
            pra.eval_event_tree(EventTree('t', 1.0, (Branch('b', 1.5),)))


class TestConfigurationsAsEventTree(TestCase):
    def setUp(self):
        self.model = load_scenario('example3').model
        self.network = self.model.network('example3')

    def test_occurrence_is_the_sequence_set(self):
        p_sf = {n: 0.1 for n in self.network.nodes}
        survivals = [chain_survival(c, p_sf)
                     for c in self.network.configurations]
        states, loc = configuration_occurrence(self.network, survivals)
        s1, s2, s3 = survivals
        assert [s.p_occ for s in states] == pytest.approx(
            [s1, (1 - s1) * s2, (1 - s1) * (1 - s2) * s3])
        result = pra.iim_eta_equivalence(self.network, p_sf)
        assert result.max_diff <= 1e-12
        assert result.loc == pytest.approx(loc)

    def test_random_assignments(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            p_sf = dict(zip(self.network.nodes,
                            rng.random(len(self.network.nodes))))
            result = pra.iim_eta_equivalence(self.network, p_sf)
            assert result.max_diff <= 1e-12
            assert sum(result.p_occ) + result.loc == pytest.approx(1.0)

    def test_wake_up_network(self):
        network = load_scenario('example4').model.network('wake_up')
        p_sf = {'mains': 0.0027, 'battery': 0.1, 'alarm_clock': 0.0003,
                'roommate': 0.2}
        assert pra.iim_eta_equivalence(network, p_sf).max_diff <= 1e-12

    def test_not_full_flow(self):
        configurations = self.network.configurations
        repeated = replace(self.network, configurations=configurations + (
            replace(configurations[0], label='again'),))
        with pytest.raises(exceptions.StructuralMismatch):
            pra.iim_eta_equivalence(repeated, {})

        degraded = replace(self.network, configurations=(
            replace(configurations[0], degraded=True),))
        with pytest.raises(exceptions.StructuralMismatch):
            pra.iim_eta_equivalence(degraded, {})

        with pytest.raises(exceptions.StructuralMismatch):
            pra.iim_eta_equivalence(replace(self.network, configurations=()),
                                    {})
