"""
Hazard vulnerability: fragility curves turn hazard intensities into
complete-failure probabilities and autonomy curves turn accumulated duty
time into run-out probabilities.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy import stats

from lifeline import exceptions
from lifeline.utils import check_probability

log = logging.getLogger('lifeline')


class HazardKind(str, Enum):
    EARTHQUAKE_PGA = 'earthquake_pga'
    TSUNAMI_DEPTH = 'tsunami_depth'
    GENERIC = 'generic'


UNITS = {
    HazardKind.EARTHQUAKE_PGA: 'g',
    HazardKind.TSUNAMI_DEPTH: 'm',
    HazardKind.GENERIC: 'dimensionless',
}


class CurveForm(str, Enum):
    LOGNORMAL = 'lognormal_cdf'
    PIECEWISE = 'piecewise_linear'
    STEP = 'step'


def check_breakpoints(name, breakpoints):
    if not breakpoints:
        raise exceptions.InvalidCurve(name, 'no breakpoints')
    xs = [x for x, _ in breakpoints]
    ps = [p for _, p in breakpoints]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise exceptions.InvalidCurve(name, 'breakpoints must be strictly '
                                      'increasing')
    if any(b < a for a, b in zip(ps, ps[1:])):
        raise exceptions.InvalidCurve(name, 'probabilities must not decrease')
    if any(not 0.0 <= p <= 1.0 for p in ps):
        raise exceptions.InvalidCurve(name, 'probabilities must lie in [0, 1]')
    if xs[0] < 0:
        raise exceptions.InvalidCurve(name, 'negative breakpoint')


@dataclass(frozen=True)
class FragilityCurve:
    name: str
    hazard_kind: HazardKind
    form: CurveForm
    median: float | None = None
    beta: float | None = None
    breakpoints: tuple = ()
    threshold: float | None = None
    units: str | None = None

    def __post_init__(self):
        if self.units is None:
            object.__setattr__(self, 'units', UNITS[self.hazard_kind])
        if self.form == CurveForm.LOGNORMAL:
            if not (self.median and self.median > 0 and
                    self.beta and self.beta > 0):
                raise exceptions.InvalidCurve(
                    self.name, 'lognormal median and beta must be positive')
        elif self.form == CurveForm.PIECEWISE:
            check_breakpoints(self.name, self.breakpoints)
        elif self.form == CurveForm.STEP:
            # a zero threshold would fail nodes under zero intensity
            if self.threshold is None or not 0 < self.threshold < np.inf:
                raise exceptions.InvalidCurve(
                    self.name, 'step threshold must be positive and finite')


@dataclass(frozen=True)
class AutonomyCurve:
    name: str
    form: CurveForm
    capacity_hours: float | None = None
    breakpoints: tuple = ()

    def __post_init__(self):
        if self.form == CurveForm.STEP:
            if self.capacity_hours is None or self.capacity_hours <= 0:
                raise exceptions.InvalidCurve(
                    self.name, 'autonomy capacity must be positive')
        elif self.form == CurveForm.PIECEWISE:
            check_breakpoints(self.name, self.breakpoints)
            hours, probability = self.breakpoints[0]
            if hours == 0 and probability != 0:
                raise exceptions.InvalidCurve(
                    self.name, 'autonomy must be intact at zero duty')
        else:
            raise exceptions.InvalidCurve(self.name, 'autonomy curves are '
                                          'step or piecewise_linear')


@dataclass(frozen=True)
class EventVector:
    time: float
    # node id -> (hazard kind, intensity)
    intensities: dict = field(default_factory=dict, hash=False)

    def for_node(self, node_id):
        return self.intensities.get(node_id)


@dataclass(frozen=True)
class CurveLibrary:
    fragility: dict = field(default_factory=dict, hash=False)
    autonomy: dict = field(default_factory=dict, hash=False)

    def fragility_curve(self, name):
        try:
            return self.fragility[name]
        except KeyError:
            raise exceptions.UnresolvedReference('fragility curve', name)

    def autonomy_curve(self, name):
        try:
            return self.autonomy[name]
        except KeyError:
            raise exceptions.UnresolvedReference('autonomy curve', name)

    def scaled(self, factor):
        """
        Return a library whose fragility capacities are multiplied by
        `factor`, a number or a mapping of curve name to number.
        """
        def factor_for(name):
            if isinstance(factor, dict):
                return factor.get(name, 1.0)
            return factor
        return replace(self, fragility={
            name: scale_curve(curve, factor_for(name))
            for name, curve in self.fragility.items()})


def _interp(intensity, breakpoints):
    xs = [x for x, _ in breakpoints]
    ps = [p for _, p in breakpoints]
    return float(np.interp(intensity, xs, ps, left=0.0, right=ps[-1]))


def eval_fragility(curve, intensity, units=None):
    """Probability of complete failure of a node under `intensity`."""
    if units is not None and units != curve.units:
        raise exceptions.UnitMismatch(curve.units, units)
    if intensity < 0:
        raise exceptions.InvalidIntensity(intensity)
    if curve.form == CurveForm.LOGNORMAL:
        if intensity == 0:
            return 0.0
        return float(stats.lognorm.cdf(intensity, s=curve.beta,
                                       scale=curve.median))
    if curve.form == CurveForm.PIECEWISE:
        return _interp(intensity, curve.breakpoints)
    return 1.0 if intensity >= curve.threshold else 0.0


def eval_autonomy(curve, duty_hours, capacity_hours=None):
    """Run-out probability after `duty_hours` of service."""
    if curve.form == CurveForm.STEP:
        capacity = capacity_hours or curve.capacity_hours
        return 1.0 if duty_hours >= capacity else 0.0
    if capacity_hours:
        # stretch the curve to the node's own capacity
        ratio = capacity_hours / curve.breakpoints[-1][0]
        breakpoints = [(h * ratio, p) for h, p in curve.breakpoints]
        return _interp(duty_hours, breakpoints)
    return _interp(duty_hours, curve.breakpoints)


def scale_curve(curve, factor):
    """Multiply the intensity parameters of a fragility curve by `factor`."""
    if factor <= 0:
        raise exceptions.InvalidCurve(curve.name, 'scale factor must be '
                                      'positive')
    if curve.form == CurveForm.LOGNORMAL:
        return replace(curve, median=curve.median * factor)
    if curve.form == CurveForm.PIECEWISE:
        return replace(curve, breakpoints=tuple(
            (x * factor, p) for x, p in curve.breakpoints))
    return replace(curve, threshold=curve.threshold * factor)


def combine_independent(probabilities):
    """Probability that at least one of independent failures occurs."""
    values = np.array([check_probability(p) for p in probabilities])
    return float(1.0 - np.prod(1.0 - values))


def joint_redundant_failure(probabilities):
    """Probability that every member of a redundancy group fails."""
    if not len(probabilities):
        raise exceptions.EmptyGroup()
    values = np.array([check_probability(p) for p in probabilities])
    return float(np.prod(values))


def hazard_terms(node, events_at_t, curves):
    terms = []
    for event in events_at_t:
        entry = event.for_node(node.id)
        if entry is None:
            continue
        hazard, intensity = entry
        hazard = HazardKind(hazard)
        if intensity == 0 or node.is_exempt(hazard.value):
            continue
        name = node.fragility.get(hazard.value)
        if name is None:
            raise exceptions.MissingFragilityCurve(node.id, hazard.value)
        curve = curves.fragility_curve(name)
        if curve.hazard_kind != hazard:
            raise exceptions.UnitMismatch(UNITS[hazard], curve.units)
        terms.append(eval_fragility(curve, intensity))
    return terms


def autonomy_term(node, duty_hours, curves):
    if node.autonomy is None:
        return 0.0
    curve = curves.autonomy_curve(node.autonomy.curve)
    return eval_autonomy(curve, duty_hours, node.autonomy.capacity_hours)


def self_failure(node, events_at_t, carried_psf, duty_hours, curves):
    """
    Self-failure probability of a node at one instant: the carried failure
    united with every hazard acting now and with the autonomy run-out at
    the node's accumulated duty time.
    """
    if events_at_t is None:
        events_at_t = ()
    elif isinstance(events_at_t, EventVector):
        events_at_t = (events_at_t,)
    terms = [carried_psf]
    terms.extend(hazard_terms(node, events_at_t, curves))
    terms.append(autonomy_term(node, duty_hours, curves))
    return combine_independent(terms)
