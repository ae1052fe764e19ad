"""
Classic Input-Output Inoperability Model.

q = (I - A)^-1 c, where a_ij is the influence of node j on node i and c
holds the exogenous inoperabilities. The series-parallel correction scales
the influence reaching members of redundancy groups by 1/n.
"""
from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from lifeline import exceptions

log = logging.getLogger('lifeline')


class DamageVector(NamedTuple):
    raw: np.ndarray
    clamped: np.ndarray
    groups: dict = {}


def spectral_radius(A):
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def _check(A, c):
    A = np.asarray(A, dtype=float)
    c = np.asarray(c, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise exceptions.DimensionMismatch('(n, n)', A.shape)
    if c.shape != (A.shape[0],):
        raise exceptions.DimensionMismatch((A.shape[0],), c.shape)
    if ((A < 0) | (A > 1)).any():
        raise ValueError('interdependency entries must lie in [0, 1]')
    return A, c


def _solve(M, c):
    rho = spectral_radius(M)
    if rho >= 1.0:
        raise exceptions.SolvabilityError(rho)
    raw = np.linalg.solve(np.eye(len(c)) - M, c)
    return raw, np.clip(raw, 0.0, 1.0)


def damage_vector(A, c):
    A, c = _check(A, c)
    return DamageVector(*_solve(A, c))


def series_parallel_vector(node_ids, groups):
    """SP entry 1/n for members of an n-fold redundancy group, else 1."""
    sizes = {}
    for group in groups.values():
        sizes[group] = sizes.get(group, 0) + 1
    return np.array([1.0 / sizes[groups[n]] if n in groups else 1.0
                     for n in node_ids])


def group_inoperability(q, node_ids, groups):
    """Inoperability of each redundancy group: every member out at once."""
    index = {node_id: i for i, node_id in enumerate(node_ids)}
    members = {}
    for node_id, group in groups.items():
        if node_id in index:
            members.setdefault(group, []).append(q[index[node_id]])
    return {group: float(np.prod(values)) for group, values in members.items()}


def damage_vector_sp(A, sp, c, node_ids=None, groups=None):
    """
    Damage vector with the series-parallel correction: A is multiplied
    element-wise by SP x 1^T, so row i is scaled by SP_i.
    """
    A, c = _check(A, c)
    sp = np.asarray(sp, dtype=float)
    if sp.shape != c.shape:
        raise exceptions.DimensionMismatch(c.shape, sp.shape)
    if ((sp <= 0) | (sp > 1)).any():
        raise ValueError('series-parallel entries must lie in (0, 1]')
    raw, clamped = _solve(A * sp[:, np.newaxis], c)
    aggregated = {}
    if node_ids is not None and groups:
        aggregated = group_inoperability(raw, node_ids, groups)
    return DamageVector(raw, clamped, aggregated)


def neumann_series(A, c, terms=200):
    """
    Truncated series c + Ac + A^2 c + ..., returned with every partial sum.
    Useful to watch the growth of q when the spectral radius nears 1.
    """
    A, c = _check(A, c)
    partial = c.copy()
    term = c.copy()
    sums = [partial.copy()]
    for _ in range(terms):
        term = A @ term
        partial = partial + term
        sums.append(partial.copy())
    return partial, sums


def decay_score(q_series):
    """dc_s(t) = sum_j q_j(t) for every step of one node's perturbation."""
    q_series = np.asarray(q_series, dtype=float)
    if q_series.ndim == 1:
        return float(q_series.sum())
    return q_series.sum(axis=1)


def _shock_responses(A, sp):
    M = A if sp is None else A * np.asarray(sp, dtype=float)[:, np.newaxis]
    rho = spectral_radius(M)
    if rho >= 1.0:
        raise exceptions.SolvabilityError(rho)
    # column i of the inverse is the response to a unit shock at node i
    return np.linalg.inv(np.eye(len(M)) - M).sum(axis=0)


def decay_scores(A, c, sp=None):
    """
    Decay score of every node for the scenario perturbing that node alone
    with its own entry of c.
    """
    A, c = _check(A, c)
    return _shock_responses(A, sp) * c


def unit_decay_scores(A, c, node_ids, groups, sp=None):
    """
    Decay scores of logical units as (member ids, score) pairs. A
    redundancy group is one unit: it is shocked only when every member is,
    so its entry of c is the product of theirs, applied to the mean
    response of its members. Nodes outside groups score as in
    decay_scores.
    """
    A, c = _check(A, c)
    if len(node_ids) != len(c):
        raise exceptions.DimensionMismatch((len(c),), (len(node_ids),))
    response = _shock_responses(A, sp)
    units = {}
    for i, node_id in enumerate(node_ids):
        key = ('group', groups[node_id]) if node_id in groups else \
            ('node', node_id)
        units.setdefault(key, []).append(i)
    return [(tuple(node_ids[i] for i in members),
             float(response[members].mean() * np.prod(c[members])))
            for members in units.values()]


def system_score(decay_scores_by_kind, counts=None):
    """
    sys_s = sum over node kinds of the kind's summed decay score divided
    by the number of nodes of that kind. Targets are left out by the
    caller.
    """
    total = 0.0
    for kind, scores in decay_scores_by_kind.items():
        if np.ndim(scores) == 0:
            scores = [scores]
        count = len(scores) if counts is None else counts[kind]
        if count == 0:
            raise exceptions.ZeroCount(kind)
        total += float(np.sum(scores)) / count
    return total


def couple_layers_classic(I, q_j, c_i):
    """c_{j->i} = I^T q_j + c_i, clamped to [0, 1]."""
    I = np.asarray(I, dtype=float)
    q_j = np.asarray(q_j, dtype=float)
    c_i = np.asarray(c_i, dtype=float)
    if I.shape != (len(q_j), len(c_i)):
        raise exceptions.DimensionMismatch((len(q_j), len(c_i)), I.shape)
    coupled = I.T @ q_j + c_i
    clamped = np.clip(coupled, 0.0, 1.0)
    if (clamped != coupled).any():
        log.warning('Clamping %d coupled inoperabilities to [0, 1]',
                    int((clamped != coupled).sum()))
    return clamped
