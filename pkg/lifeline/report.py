from __future__ import annotations

from dataclasses import asdict, dataclass, field

from lifeline import exceptions, settings
from lifeline.cascade import NodeProbabilities


@dataclass
class ClassicSnapshot:
    """Classic IIM companion values of one step."""
    q: dict
    q_clamped: dict
    decay_scores: dict
    system_score: float


@dataclass
class Step:
    time: float
    nodes: dict
    # network id -> {configuration label: p_occ}
    p_occ: dict
    # network id -> {configuration label: chain survival}
    survival: dict
    loc: dict
    classic: ClassicSnapshot | None = None
    # "node->target" -> importance of node for target
    importance: dict = field(default_factory=dict)


@dataclass
class ProbabilityReport:
    scenario: str = ''
    steps: list = field(default_factory=list)
    checkpoints: dict = field(default_factory=dict)

    @property
    def times(self):
        return [step.time for step in self.steps]

    def at(self, time):
        """The step recorded at `time` or, between grid points, just after."""
        for step in self.steps:
            if step.time >= time - settings.TIME_EPSILON:
                return step
        return self.steps[-1]

    def checkpoint(self, name):
        try:
            return self.at(self.checkpoints[name])
        except KeyError:
            raise exceptions.UnknownCheckpoint(name)

    def node_series(self, node_id, quantity='p_f'):
        return [getattr(step.nodes[node_id], quantity) for step in self.steps]

    def loc_series(self, network_id):
        return [step.loc[network_id] for step in self.steps]

    def p_occ_series(self, network_id, label):
        return [step.p_occ[network_id].get(label, 0.0) for step in self.steps]

    def system_score_series(self):
        """sys_s of every step, NaN where the classic companion is missing."""
        return [step.classic.system_score if step.classic is not None
                else float('nan') for step in self.steps]

    @property
    def has_classic(self):
        return any(step.classic is not None for step in self.steps)

    def to_dict(self):
        return {
            'scenario': self.scenario,
            'checkpoints': dict(self.checkpoints),
            'steps': [asdict(step) for step in self.steps],
        }

    @classmethod
    def from_dict(cls, data):
        steps = []
        for item in data['steps']:
            classic = item.get('classic')
            steps.append(Step(
                time=item['time'],
                nodes={n: NodeProbabilities(**p)
                       for n, p in item['nodes'].items()},
                p_occ=item['p_occ'],
                survival=item['survival'],
                loc=item['loc'],
                classic=ClassicSnapshot(**classic) if classic else None,
                importance=item.get('importance', {})))
        return cls(data.get('scenario', ''), steps,
                   data.get('checkpoints', {}))
