"""
Temporal engine: steps a system model through an event timeline.

Each step applies the hazards that arrived, charges the autonomy clocks
with the time spent on duty during the previous step, inserts recovery
layers, and solves the cascade completely before moving on.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from lifeline import classic, exceptions, settings
from lifeline.cascade import NodeProbabilities, node_importance, solve_system
from lifeline.graph import NodeKind, network_interop_matrix
from lifeline.hazard import EventVector, self_failure
from lifeline.report import ClassicSnapshot, ProbabilityReport, Step

log = logging.getLogger('lifeline')

EXPECTED = 'expected'
DOMINANT = 'dominant'
AUTONOMY_MODES = (EXPECTED, DOMINANT)


@dataclass(frozen=True)
class Intervention:
    time: float
    network_id: str
    configuration: object


@dataclass(frozen=True)
class Timeline:
    t0: float
    T: float
    dt: float
    events: tuple = ()
    interventions: tuple = ()

    def __post_init__(self):
        if not self.t0 < self.T:
            raise exceptions.InvalidTimeline('t0 must precede T')
        if not self.dt > 0:
            raise exceptions.InvalidTimeline('dt must be positive')
        times = [event.time for event in self.events]
        if times != sorted(times):
            raise exceptions.InvalidTimeline('events are not sorted by time')
        for time in times + [i.time for i in self.interventions]:
            if not self.t0 <= time <= self.T:
                raise exceptions.InvalidTimeline(
                    'time %g is outside [%g, %g]' % (time, self.t0, self.T))
        for event in self.events:
            for node_id, (_, intensity) in event.intensities.items():
                if intensity < 0:
                    raise exceptions.InvalidTimeline(
                        'negative intensity for node "%s"' % node_id)

    @property
    def grid(self):
        count = int(math.floor((self.T - self.t0) / self.dt +
                               settings.TIME_EPSILON))
        return [self.t0 + i * self.dt for i in range(count + 1)]

    def with_dt(self, dt):
        return replace(self, dt=dt)

    def scaled(self, factors):
        """Multiply the intensity of every event by its hazard's factor."""
        events = []
        for event in self.events:
            events.append(EventVector(event.time, {
                node_id: (hazard, intensity * factors.get(hazard, 1.0))
                for node_id, (hazard, intensity) in
                event.intensities.items()}))
        return replace(self, events=tuple(events))


def autonomy_clock_advance(node, dt, snapshot, mode):
    """
    Duty hours a node accumulates over one step, from the configuration
    occupancy of its network during that step.
    """
    held = [c.p_occ for c in snapshot.configurations if node.id in c.members]
    if not held:
        return 0.0
    if mode == EXPECTED:
        return dt * min(1.0, sum(held))
    if mode == DOMINANT:
        occupied = [c.p_occ for c in snapshot.configurations if c.p_occ > 0]
        if occupied and max(held) > 0 and max(held) == max(occupied):
            return dt
        return 0.0
    raise exceptions.UnknownAutonomyMode(mode, AUTONOMY_MODES)


def _due(pending, time):
    due = []
    while pending and pending[0].time <= time + settings.TIME_EPSILON:
        due.append(pending.pop(0))
    return due


class TimelineRun(object):
    """The state carried from one step to the next."""

    def __init__(self, model, curves, timeline, mode, classic_iim=False,
                 series_parallel=False, importance=()):
        if mode not in AUTONOMY_MODES:
            raise exceptions.UnknownAutonomyMode(mode, AUTONOMY_MODES)
        self.model = model
        self.curves = curves
        self.timeline = timeline
        self.mode = mode
        self.classic_iim = classic_iim
        self.series_parallel = series_parallel
        self.importance = list(importance)
        self.hazard = {node.id: 0.0 for node in model.nodes}
        self.duty = {node.id: 0.0 for node in model.nodes}
        self.previous = None
        self.matrix = None
        self.classic_skipped = False

    def run(self, scenario='', checkpoints=None):
        log.info('Running %s over %d steps (%s autonomy)', scenario or
                 'timeline', len(self.timeline.grid), self.mode)
        events = list(self.timeline.events)
        interventions = sorted(self.timeline.interventions,
                               key=lambda i: i.time)
        report = ProbabilityReport(scenario, [], dict(checkpoints or {}))
        for time in self.timeline.grid:
            self.apply_events(_due(events, time))
            if self.previous is not None:
                self.advance_clocks()
            for intervention in _due(interventions, time):
                self.apply_intervention(intervention)
            p_sf = self.self_failures()
            states = solve_system(self.model, p_sf)
            report.steps.append(self.record(time, p_sf, states))
            self.previous = states
        return report

    def apply_events(self, events):
        if not events:
            return
        for node in self.model.nodes:
            self.hazard[node.id] = self_failure(
                node, events, self.hazard[node.id], 0.0, self.curves)
        log.debug('Applied %d events', len(events))

    def advance_clocks(self):
        for node in self.model.nodes:
            if node.autonomy is None:
                continue
            snapshot = self.previous[node.network_id]
            self.duty[node.id] += autonomy_clock_advance(
                node, self.timeline.dt, snapshot, self.mode)

    def apply_intervention(self, intervention):
        log.info('Adding configuration %s to %s at %g h',
                 intervention.configuration.label, intervention.network_id,
                 intervention.time)
        self.model = self.model.with_configuration(
            intervention.network_id, intervention.configuration)
        self.matrix = None

    def self_failures(self):
        return {node.id: self_failure(node, None, self.hazard[node.id],
                                      self.duty[node.id], self.curves)
                for node in self.model.nodes}

    def record(self, time, p_sf, states):
        nodes = {}
        for state in states.values():
            nodes.update(state.nodes)
        snapshot = None
        if self.classic_iim:
            snapshot = self.classic_snapshot(p_sf)
        return Step(
            time=time,
            nodes={node.id: nodes[node.id] for node in self.model.nodes},
            p_occ={n: {c.label: c.p_occ for c in s.configurations}
                   for n, s in states.items()},
            survival={n: {c.label: c.chain_survival for c in s.configurations}
                      for n, s in states.items()},
            loc={n: s.loc for n, s in states.items()},
            classic=snapshot,
            importance={'%s->%s' % (node_id, target_id): node_importance(
                self.model, p_sf, node_id, target_id)[0]
                for node_id, target_id in self.importance})

    def classic_snapshot(self, p_sf):
        """
        Classic companion of one step, or None when I - A has no convergent
        inverse (a dependency cycle with full coupling).
        """
        if self.matrix is None:
            self.matrix = network_interop_matrix(self.model)
        node_ids, A = self.matrix
        c = np.array([p_sf[n] for n in node_ids])
        sp = None
        try:
            if self.series_parallel:
                sp = classic.series_parallel_vector(node_ids,
                                                    self.model.groups)
                q = classic.damage_vector_sp(A, sp, c)
            else:
                q = classic.damage_vector(A, c)
            scores = classic.decay_scores(A, c, sp)
            groups = self.model.groups if self.series_parallel else {}
            units = classic.unit_decay_scores(A, c, node_ids, groups, sp)
        except exceptions.SolvabilityError as e:
            if not self.classic_skipped:
                log.warning('Skipping the classic companion: %s', e)
                self.classic_skipped = True
            return None
        by_kind = {}
        for members, score in units:
            node = self.model.node(members[0])
            if node.kind != NodeKind.TARGET:
                by_kind.setdefault(node.score_category, []).append(score)
        return ClassicSnapshot(
            q=dict(zip(node_ids, q.raw.tolist())),
            q_clamped=dict(zip(node_ids, q.clamped.tolist())),
            decay_scores=dict(zip(node_ids, scores.tolist())),
            system_score=classic.system_score(by_kind))


def run_timeline(model, curves, timeline, mode=None, classic_iim=False,
                 series_parallel=False, importance=(), scenario='',
                 checkpoints=None):
    """Step the model through the timeline and collect every quantity."""
    run = TimelineRun(model, curves, timeline,
                      mode or settings.DEFAULT_AUTONOMY_MODE, classic_iim,
                      series_parallel, importance)
    return run.run(scenario, checkpoints)


def _mean(values, weights):
    return float(sum(w * v for w, v in zip(weights, values)))


def _mean_maps(maps, weights):
    keys = []
    for mapping in maps:
        keys.extend(k for k in mapping if k not in keys)
    return {k: _mean([m.get(k, 0.0) for m in maps], weights) for k in keys}


def _mean_steps(steps, weights):
    first = steps[0]
    nodes = {}
    for node_id in first.nodes:
        nodes[node_id] = NodeProbabilities(*(
            _mean([getattr(s.nodes[node_id], q) for s in steps], weights)
            for q in ('p_sf', 'p_cf', 'p_f')))
    snapshot = None
    if all(s.classic is not None for s in steps):
        snapshot = ClassicSnapshot(
            q=_mean_maps([s.classic.q for s in steps], weights),
            q_clamped=_mean_maps([s.classic.q_clamped for s in steps],
                                 weights),
            decay_scores=_mean_maps([s.classic.decay_scores for s in steps],
                                    weights),
            system_score=_mean([s.classic.system_score for s in steps],
                               weights))
    return Step(
        time=first.time,
        nodes=nodes,
        p_occ={n: _mean_maps([s.p_occ[n] for s in steps], weights)
               for n in first.p_occ},
        survival={n: _mean_maps([s.survival[n] for s in steps], weights)
                  for n in first.survival},
        loc={n: _mean([s.loc[n] for s in steps], weights) for n in first.loc},
        classic=snapshot,
        importance=_mean_maps([s.importance for s in steps], weights))


def run_ensemble(model, curves, timelines, mode=None, workers=None,
                 **options):
    """
    Run weighted timelines and average every reported quantity with the
    normalized weights.
    """
    weights = np.array([float(w) for _, w in timelines])
    if not len(weights):
        raise exceptions.InvalidWeights('no timelines')
    if (weights < 0).any():
        raise exceptions.InvalidWeights('weights must be nonnegative')
    if weights.sum() == 0:
        raise exceptions.InvalidWeights('all weights are zero')
    weights = (weights / weights.sum()).tolist()
    log.info('Running %d ensemble members', len(weights))

    def member(timeline):
        return run_timeline(model, curves, timeline, mode, **options)

    workers = workers or settings.ENSEMBLE_WORKERS
    members = [timeline for timeline, _ in timelines]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            reports = list(executor.map(member, members))
    else:
        reports = [member(timeline) for timeline in members]

    grid = reports[0].times
    if any(r.times != grid for r in reports):
        raise exceptions.InvalidTimeline('ensemble members use different '
                                         'time grids')
    if len(reports) == 1:
        return reports[0]
    steps = [_mean_steps([r.steps[i] for r in reports], weights)
             for i in range(len(grid))]
    first = reports[0]
    return ProbabilityReport(first.scenario, steps, first.checkpoints)
