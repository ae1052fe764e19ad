from unittest import TestCase

import numpy as np
import pytest

from lifeline.graph import Configuration, NodeKind
from lifeline.pra import AND, OR, BasicEvent, Gate, basic_events
from lifeline import testutils


def test_brute_force_union():
    assert testutils.brute_force_union([]) == 0.0
    assert testutils.brute_force_union([0.1, 0.2]) == pytest.approx(0.28)
    assert testutils.brute_force_union([1.0, 0.3]) == pytest.approx(1.0)


def test_truth_table():
    a, b, c = (BasicEvent(n, p) for n, p in (('a', 0.1), ('b', 0.2),
                                             ('c', 0.5)))
    assert testutils.truth_table(Gate(AND, (a, b))) == pytest.approx(0.02)
    assert testutils.truth_table(Gate(OR, (a, b))) == pytest.approx(0.28)
    nested = Gate(OR, (c, Gate(AND, (a, b))))
    assert testutils.truth_table(nested) == pytest.approx(1 - 0.5 * 0.98)


def test_brute_force_layer():
    configuration = Configuration.from_edges('main', 0, [('s', 'x'),
                                                         ('x', 't')])
    result = testutils.brute_force_layer(configuration,
                                         {'s': 0.1, 'x': 0.2, 't': 0.3})
    assert result['s'] == pytest.approx(0.1)
    assert result['x'] == pytest.approx(0.28)
    assert result['t'] == pytest.approx(1 - 0.9 * 0.8 * 0.7)


def test_random_fault_tree():
    rng = np.random.default_rng(3)
    tree = testutils.random_fault_tree(rng, events=5)
    ids = [event.id for event in basic_events(tree)]
    assert 2 <= len(ids) <= 5
    assert ids == ['e%d' % i for i in range(len(ids))]


def test_random_tree():
    rng = np.random.default_rng(3)
    edges = testutils.random_tree(rng, 6)
    assert len(edges) == 5
    assert all(int(x[1:]) < int(y[1:]) for x, y in edges)


class TestChainModel(TestCase):
    def test_kinds(self):
        model = testutils.chain_model([('s', 'x'), ('x', 't')])
        assert model.node('s').kind == NodeKind.SOURCE
        assert model.node('x').kind == NodeKind.INTERMEDIATE
        assert model.node('t').kind == NodeKind.TARGET
        assert model.network('net').targets == ('t',)
        assert all(node.partial_source for node in model.nodes)

    def test_layers_and_groups(self):
        model = testutils.chain_model(
            layers=[[('a', 't')], [('b', 'c'), ('c', 't')]],
            kinds={'c': NodeKind.INTERMEDIATE}, groups={'a': 'g'})
        network = model.network('net')
        assert [c.label for c in network.configurations] == ['layer0',
                                                             'layer1']
        assert network.nodes == ('a', 't', 'b', 'c')
        assert model.groups == {'a': 'g'}

    def test_sampling(self):
        model = testutils.chain_model([('s', 't')])
        estimate, error = testutils.sample_failures(model, {'s': 0.5}, 4000)
        assert estimate['s'] == pytest.approx(0.5, abs=4 * error['s'] + 1e-3)
        assert estimate['t'] == estimate['s']
