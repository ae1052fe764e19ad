from unittest import TestCase

import numpy as np
import pytest
from scipy import stats

from lifeline import exceptions, hazard
from lifeline.graph import AutonomyRef, EXEMPT, Node, NodeKind
from lifeline.hazard import (AutonomyCurve, CurveForm, CurveLibrary,
                             EventVector, FragilityCurve, HazardKind)


def piecewise(name, points, kind=HazardKind.EARTHQUAKE_PGA):
    return FragilityCurve(name, kind, CurveForm.PIECEWISE,
                          breakpoints=tuple(points))


class TestFragility(TestCase):
    def test_lognormal(self):
        curve = FragilityCurve('c', HazardKind.EARTHQUAKE_PGA,
                               CurveForm.LOGNORMAL, median=0.5, beta=0.6)
        assert hazard.eval_fragility(curve, 0.5) == pytest.approx(0.5)
        assert hazard.eval_fragility(curve, 0) == 0.0
        expected = stats.norm.cdf(np.log(0.3 / 0.5) / 0.6)
        assert hazard.eval_fragility(curve, 0.3) == pytest.approx(expected)

    def test_piecewise(self):
        curve = piecewise('battery', [(0.15, 0.0), (0.95, 0.8)])
        assert hazard.eval_fragility(curve, 0.1) == 0.0
        assert hazard.eval_fragility(curve, 0.469) == pytest.approx(0.319)
        assert hazard.eval_fragility(curve, 2.0) == 0.8

    def test_step(self):
        curve = FragilityCurve('turbine', HazardKind.EARTHQUAKE_PGA,
                               CurveForm.STEP, threshold=0.15)
        assert hazard.eval_fragility(curve, 0.149) == 0.0
        assert hazard.eval_fragility(curve, 0.15) == 1.0

    def test_monotone_in_intensity(self):
        rng = np.random.default_rng(5)
        for i in range(200):
            k = int(rng.integers(1, 6))
            xs = np.cumsum(rng.uniform(0.01, 1.0, k))
            ps = np.sort(rng.uniform(0.0, 1.0, k))
            curves = [
                FragilityCurve('lognormal', HazardKind.EARTHQUAKE_PGA,
                               CurveForm.LOGNORMAL,
                               median=float(rng.uniform(0.05, 3.0)),
                               beta=float(rng.uniform(0.1, 1.5))),
                piecewise('piecewise', zip(xs.tolist(), ps.tolist())),
                FragilityCurve('step', HazardKind.EARTHQUAKE_PGA,
                               CurveForm.STEP,
                               threshold=float(rng.uniform(0.05, 3.0))),
            ]
            intensities = np.sort(rng.uniform(0.0, 4.0, 25)).tolist()
            for curve in curves:
                p = [hazard.eval_fragility(curve, x) for x in intensities]
                assert all(0.0 <= v <= 1.0 for v in p), (i, curve)
                assert all(b >= a for a, b in zip(p, p[1:])), (i, curve)

    def test_units(self):
        curve = piecewise('c', [(0, 0), (1, 1)], HazardKind.TSUNAMI_DEPTH)
        assert curve.units == 'm'
        assert hazard.eval_fragility(curve, 0.5, units='m') == 0.5
        with pytest.raises(exceptions.UnitMismatch):
            hazard.eval_fragility(curve, 0.5, units='g')
        with pytest.raises(exceptions.InvalidIntensity) as error:
            hazard.eval_fragility(curve, -1)
        assert isinstance(error.value, exceptions.LifelineError)

    def test_invalid_curves(self):
        with pytest.raises(exceptions.InvalidCurve):
            FragilityCurve('c', HazardKind.EARTHQUAKE_PGA,
                           CurveForm.LOGNORMAL, median=0.5, beta=0)
        with pytest.raises(exceptions.InvalidCurve):
            piecewise('c', [(0, 0.5), (1, 0.2)])
        with pytest.raises(exceptions.InvalidCurve):
            piecewise('c', [(1, 0), (1, 1)])
        with pytest.raises(exceptions.InvalidCurve):
            piecewise('c', [(0, 0), (1, 1.2)])
        with pytest.raises(exceptions.InvalidCurve):
            FragilityCurve('c', HazardKind.EARTHQUAKE_PGA, CurveForm.STEP,
                           threshold=0)

    def test_scale_curve(self):
        curve = piecewise('c', [(1, 0), (3, 1)])
        scaled = hazard.scale_curve(curve, 1.2)
        assert np.allclose(scaled.breakpoints, ((1.2, 0), (3.6, 1)))
        lognormal = FragilityCurve('l', HazardKind.GENERIC,
                                   CurveForm.LOGNORMAL, median=2, beta=0.4)
        assert hazard.scale_curve(lognormal, 0.5).median == 1.0
        with pytest.raises(exceptions.InvalidCurve):
            hazard.scale_curve(curve, 0)

        library = CurveLibrary({'c': curve, 'l': lognormal})
        assert library.scaled({'l': 2.0}).fragility['l'].median == 4.0
        assert library.scaled({'l': 2.0}).fragility['c'] == curve
        assert library.scaled(2.0).fragility['c'].breakpoints[1][0] == 6.0


class TestAutonomy(TestCase):
    def test_step(self):
        curve = AutonomyCurve('ic', CurveForm.STEP, capacity_hours=9.0)
        assert hazard.eval_autonomy(curve, 8.75) == 0.0
        assert hazard.eval_autonomy(curve, 9.0) == 1.0
        assert hazard.eval_autonomy(curve, 9.0, capacity_hours=12) == 0.0

    def test_piecewise(self):
        curve = AutonomyCurve('battery', CurveForm.PIECEWISE,
                              breakpoints=((0, 0), (8, 0), (24, 1)))
        assert hazard.eval_autonomy(curve, 8) == 0.0
        assert hazard.eval_autonomy(curve, 23) == pytest.approx(0.9375)
        assert hazard.eval_autonomy(curve, 30) == 1.0
        # stretched to a 48 hour capacity
        assert hazard.eval_autonomy(curve, 32, 48) == pytest.approx(0.5)

    def test_invalid(self):
        with pytest.raises(exceptions.InvalidCurve):
            AutonomyCurve('a', CurveForm.STEP, capacity_hours=0)
        with pytest.raises(exceptions.InvalidCurve):
            AutonomyCurve('a', CurveForm.PIECEWISE,
                          breakpoints=((0, 0.1), (1, 1)))
        with pytest.raises(exceptions.InvalidCurve):
            AutonomyCurve('a', CurveForm.LOGNORMAL)


class TestSelfFailure(TestCase):
    def setUp(self):
        self.curves = CurveLibrary(
            fragility={
                'battery_pga': piecewise('battery_pga',
                                         [(0.15, 0.0), (0.95, 0.8)]),
                'battery_depth': piecewise('battery_depth',
                                           [(1, 0), (11, 1)],
                                           HazardKind.TSUNAMI_DEPTH),
            },
            autonomy={'battery': AutonomyCurve(
                'battery', CurveForm.PIECEWISE,
                breakpoints=((0, 0), (8, 0), (24, 1)))})
        self.node = Node(
            'dc_battery', 'electric', NodeKind.SOURCE,
            fragility={'earthquake_pga': 'battery_pga',
                       'tsunami_depth': 'battery_depth'},
            autonomy=AutonomyRef('battery'))
        self.earthquake = EventVector(0.0, {
            'dc_battery': ('earthquake_pga', 0.469)})
        self.tsunami = EventVector(0.8, {
            'dc_battery': ('tsunami_depth', 9.0)})

    def test_events_accumulate(self):
        after_quake = hazard.self_failure(self.node, self.earthquake, 0.0,
                                          0.0, self.curves)
        assert after_quake == pytest.approx(0.319)
        after_wave = hazard.self_failure(self.node, self.tsunami,
                                         after_quake, 0.0, self.curves)
        assert after_wave == pytest.approx(1 - 0.681 * 0.2)

    def test_autonomy_run_out(self):
        p = hazard.self_failure(self.node, None, 1 - 0.681 * 0.2, 23.0,
                                self.curves)
        assert p == pytest.approx(1 - 0.681 * 0.2 * 0.0625)

    def test_no_event(self):
        assert hazard.self_failure(self.node, [], 0.25, 0.0,
                                   self.curves) == 0.25

    def test_exempt_and_missing(self):
        node = Node('hill_plant', 'electric', NodeKind.SOURCE,
                    site={'tsunami_depth': EXEMPT},
                    fragility={'earthquake_pga': 'battery_pga'})
        assert hazard.self_failure(node, EventVector(0, {
            'hill_plant': ('tsunami_depth', 9.0)}), 0.0, 0.0,
            self.curves) == 0.0
        exposed = Node('shore_plant', 'electric', NodeKind.SOURCE,
                       fragility={'earthquake_pga': 'battery_pga'})
        with pytest.raises(exceptions.MissingFragilityCurve):
            hazard.self_failure(exposed, EventVector(0, {
                'shore_plant': ('tsunami_depth', 9.0)}), 0.0, 0.0,
                self.curves)

    def test_curve_for_the_wrong_hazard(self):
        node = Node('n', 'electric', NodeKind.SOURCE,
                    fragility={'tsunami_depth': 'battery_pga'})
        with pytest.raises(exceptions.UnitMismatch):
            hazard.self_failure(node, EventVector(0, {
                'n': ('tsunami_depth', 2.0)}), 0.0, 0.0, self.curves)

    def test_unknown_curve(self):
        with pytest.raises(exceptions.UnresolvedReference):
            self.curves.fragility_curve('nope')
        with pytest.raises(exceptions.UnresolvedReference):
            self.curves.autonomy_curve('nope')


def test_combinations():
    assert hazard.combine_independent([0.5, 0.5]) == pytest.approx(0.75)
    assert hazard.combine_independent([]) == 0.0
    assert hazard.joint_redundant_failure([0.5, 0.2]) == pytest.approx(0.1)
    with pytest.raises(exceptions.EmptyGroup):
        hazard.joint_redundant_failure([])
    with pytest.raises(exceptions.InvalidProbability):
        hazard.combine_independent([1.2])
