"""
Scenario documents.

A scenario is a YAML document (JSON-compatible) holding the model, the
curve library, the timeline, the analysis options and optional fault and
event trees. Every mapping remembers the line it starts on so that
reference errors can point at the offending entry.
"""
from __future__ import annotations

import os
import logging
from dataclasses import dataclass, field

import yaml

from lifeline import exceptions, settings
from lifeline.engine import AUTONOMY_MODES, Intervention, Timeline
from lifeline.graph import (AutonomyRef, Configuration, EXEMPT,
                            InterNetworkDependency, Network, Node, NodeKind,
                            SystemModel)
from lifeline.hazard import (AutonomyCurve, CurveForm, CurveLibrary,
                             EventVector, FragilityCurve, HazardKind)
from lifeline.pra import (BasicEvent, Branch, EventTree, FaultTree, Gate)
from lifeline.utils import parse_chain

log = logging.getLogger('lifeline')

SCENARIO_EXTENSION = '.yml'
OUTPUTS = ('cascade', 'classic-iim', 'importance', 'compare-pra')


@dataclass(frozen=True)
class Variant:
    weight: float
    # hazard kind -> intensity scale factor
    scale: dict = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class Analysis:
    outputs: tuple = ('cascade',)
    autonomy_mode: str | None = None
    series_parallel: bool = False
    checkpoints: dict = field(default_factory=dict, hash=False)
    importance: tuple = ()
    # scenarios whose sys_s is compared with this one
    sensitivity: tuple = ()


@dataclass(frozen=True)
class EtaCheck:
    network: str
    uniform: float | None = None
    p_sf: dict = field(default_factory=dict, hash=False)

    def probabilities(self, network):
        if self.uniform is not None:
            return {node_id: self.uniform for node_id in network.nodes}
        return dict(self.p_sf)


@dataclass(frozen=True)
class PraBlock:
    fault_trees: tuple = ()
    event_trees: tuple = ()
    eta: tuple = ()


@dataclass(frozen=True)
class ScenarioDocument:
    name: str
    description: str
    schema: int
    model: SystemModel
    curves: CurveLibrary
    timeline: Timeline | None = None
    variants: tuple = ()
    analysis: Analysis = Analysis()
    pra: PraBlock | None = None


class LineDict(dict):
    line = None


class LineLoader(yaml.SafeLoader):
    """Safe loader whose mappings carry their 1-based line number."""


def _construct_mapping(loader, node):
    mapping = LineDict(loader.construct_mapping(node, deep=True))
    mapping.line = node.start_mark.line + 1
    return mapping


LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG,
                           _construct_mapping)


def line_of(data):
    return getattr(data, 'line', None)


def plain(data):
    """Copy nested LineDicts into plain dicts and lists."""
    if isinstance(data, dict):
        return {k: plain(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [plain(v) for v in data]
    return data


def get_data(text):
    if not text or not text.strip():
        raise exceptions.ScenarioSyntaxError('empty document', 1)
    try:
        data = yaml.load(text, Loader=LineLoader)
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        raise exceptions.ScenarioSyntaxError(
            getattr(e, 'problem', None) or str(e),
            mark.line + 1 if mark else None)
    if not isinstance(data, dict):
        raise exceptions.ScenarioSyntaxError('a scenario must be a mapping', 1)
    return data


def require(data, key, where):
    if not isinstance(data, dict) or key not in data:
        raise exceptions.ScenarioSyntaxError('%s needs "%s"' % (where, key),
                                             line_of(data))
    return data[key]


def convert(factory, value, what, data):
    """Convert one scenario value, reporting the line of its entry."""
    try:
        return factory(value)
    except (TypeError, ValueError):
        raise exceptions.ScenarioSyntaxError('bad %s %r' % (what, value),
                                             line_of(data))


def optional_number(data, key, what):
    value = data.get(key)
    return None if value is None else convert(float, value, what, data)


def parse_edges(items, where):
    edges = []
    for item in items or []:
        if isinstance(item, str):
            try:
                edges.extend(parse_chain(item))
            except ValueError as e:
                raise exceptions.ScenarioSyntaxError('%s: %s' % (where, e))
        elif isinstance(item, (list, tuple)) and len(item) == 2:
            edges.append((str(item[0]), str(item[1])))
        else:
            raise exceptions.ScenarioSyntaxError('%s: bad edge %r'
                                                 % (where, item))
    return tuple(edges)


def parse_breakpoints(item, where):
    def pair(point):
        x, p = point
        return float(x), float(p)
    return tuple(convert(pair, point, 'breakpoint of %s' % where, item)
                 for point in item.get('breakpoints') or ())


class ScenarioParser(object):
    """Turns the loaded YAML data into a ScenarioDocument."""

    def __init__(self, data, base_path=None):
        self.data = data
        self.base_path = base_path or settings.SCENARIO_DIR
        self.errors = []

    def unresolved(self, kind, name, data):
        self.errors.append(
            exceptions.UnresolvedReference(kind, name, line_of(data)))

    def parse(self):
        schema = self.data.get('schema')
        if schema is None:
            raise exceptions.ScenarioSyntaxError('missing schema version',
                                                 line_of(self.data))
        if schema != settings.SCHEMA_VERSION:
            raise exceptions.SchemaVersionMismatch(schema,
                                                   settings.SCHEMA_VERSION)
        name = str(require(self.data, 'name', 'scenario'))
        log.info('Parsing scenario %s', name)

        curves = self.parse_curves(self.data.get('curves') or {})
        model = self.parse_model(curves)
        timeline, variants = None, ()
        if self.data.get('timeline'):
            timeline, variants = self.parse_timeline(self.data['timeline'],
                                                     model)
        analysis = self.parse_analysis(self.data.get('analysis') or {}, model)
        pra = None
        if self.data.get('pra'):
            pra = self.parse_pra(self.data['pra'], model)
        if self.errors:
            raise exceptions.InvalidScenario(self.errors)
        return ScenarioDocument(
            name=name,
            description=str(self.data.get('description', '')),
            schema=schema,
            model=model,
            curves=curves,
            timeline=timeline,
            variants=variants,
            analysis=analysis,
            pra=pra)

    def parse_curves(self, data):
        fragility, autonomy = {}, {}
        if data.get('include'):
            path = os.path.join(self.base_path, data['include'])
            if not os.path.exists(path):
                raise exceptions.ScenarioSyntaxError(
                    'included file %s does not exist' % path, line_of(data))
            with open(path, encoding='utf-8') as f:
                included = get_data(f.read())
            library = self.parse_curves(included.get('curves') or {})
            fragility.update(library.fragility)
            autonomy.update(library.autonomy)
        for name, item in (data.get('fragility') or {}).items():
            where = 'curve %s' % name
            fragility[name] = FragilityCurve(
                name=name,
                hazard_kind=convert(HazardKind, require(item, 'hazard', where),
                                    'hazard of %s' % where, item),
                form=convert(CurveForm, require(item, 'form', where),
                             'form of %s' % where, item),
                median=optional_number(item, 'median', 'median of %s' % where),
                beta=optional_number(item, 'beta', 'beta of %s' % where),
                breakpoints=parse_breakpoints(item, where),
                threshold=optional_number(item, 'threshold',
                                          'threshold of %s' % where),
                units=item.get('units'))
        for name, item in (data.get('autonomy') or {}).items():
            where = 'curve %s' % name
            autonomy[name] = AutonomyCurve(
                name=name,
                form=convert(CurveForm, require(item, 'form', where),
                             'form of %s' % where, item),
                capacity_hours=optional_number(item, 'capacity_hours',
                                               'capacity of %s' % where),
                breakpoints=parse_breakpoints(item, where))
        return CurveLibrary(fragility, autonomy)

    def parse_node(self, item, network_id, curves):
        node_id = str(require(item, 'id', 'node'))
        fragility = {}
        by_hazard = item.get('fragility') or {}
        for hazard, curve in by_hazard.items():
            hazard = convert(HazardKind, hazard, 'hazard of node %s' % node_id,
                             by_hazard).value
            fragility[hazard] = curve
            if curve not in curves.fragility:
                self.unresolved('fragility curve', curve, item)
        site = {}
        by_hazard = item.get('site') or {}
        for hazard, attributes in by_hazard.items():
            hazard = convert(HazardKind, hazard, 'hazard of node %s' % node_id,
                             by_hazard).value
            if attributes != EXEMPT and not isinstance(attributes, dict):
                raise exceptions.ScenarioSyntaxError(
                    'site of node %s must map %s to attributes or "%s"'
                    % (node_id, hazard, EXEMPT), line_of(by_hazard))
            site[hazard] = (EXEMPT if attributes == EXEMPT
                            else plain(attributes))
        autonomy = None
        if item.get('autonomy'):
            autonomy = AutonomyRef(
                require(item['autonomy'], 'curve', 'autonomy of %s' % node_id),
                optional_number(item['autonomy'], 'capacity_hours',
                                'capacity of %s' % node_id))
            if autonomy.curve not in curves.autonomy:
                self.unresolved('autonomy curve', autonomy.curve, item)
        return Node(
            id=node_id,
            network_id=network_id,
            kind=convert(NodeKind, item.get('kind', 'intermediate'),
                         'kind of node %s' % node_id, item),
            partial_source=bool(item.get('partial_source', False)),
            site=site,
            fragility=fragility,
            autonomy=autonomy,
            redundancy_group=item.get('redundancy_group'),
            category=item.get('category'),
            name=item.get('name'))

    def parse_configuration(self, item, index, nodes, network_id):
        label = str(require(item, 'label', 'configuration'))
        edges = parse_edges(item.get('edges'), 'configuration %s' % label)
        for edge in edges:
            for node_id in edge:
                if node_id not in nodes:
                    self.unresolved('node', node_id, item)
        return Configuration(label, index, edges,
                             bool(item.get('degraded', False)))

    def parse_model(self, curves):
        nodes, networks, dependencies = [], [], []
        for item in require(self.data, 'networks', 'scenario'):
            network_id = str(require(item, 'id', 'network'))
            members = [self.parse_node(n, network_id, curves)
                       for n in require(item, 'nodes', 'network %s'
                                        % network_id)]
            nodes.extend(members)
            ids = [n.id for n in members]
            configurations = tuple(
                self.parse_configuration(c, i, ids, network_id)
                for i, c in enumerate(item.get('configurations') or []))
            targets = item.get('targets')
            if targets is None:
                targets = [n.id for n in members if n.kind == NodeKind.TARGET]
            for target in targets:
                if target not in ids:
                    self.unresolved('node', target, item)
            networks.append(Network(network_id, tuple(ids), configurations,
                                    tuple(targets)))

        network_nodes = {n.id: n.nodes for n in networks}
        for item in self.data.get('dependencies') or []:
            ends = (str(require(item, 'from', 'dependency')),
                    str(require(item, 'to', 'dependency')))
            edges = parse_edges(item.get('edges'), 'dependency')
            for end in ends:
                if end not in network_nodes:
                    self.unresolved('network', end, item)
            if all(end in network_nodes for end in ends):
                for x, y in edges:
                    if x not in network_nodes[ends[0]]:
                        self.unresolved('node', x, item)
                    if y not in network_nodes[ends[1]]:
                        self.unresolved('node', y, item)
            dependencies.append(InterNetworkDependency(ends[0], ends[1],
                                                       edges))
        return SystemModel(tuple(networks), tuple(nodes), tuple(dependencies))

    def parse_event(self, item, model):
        time = convert(float, require(item, 'time', 'event'), 'event time',
                       item)
        hazard = convert(HazardKind, require(item, 'hazard', 'event'),
                         'event hazard', item).value
        intensities = {}
        if item.get('from_site'):
            for node in model.nodes:
                intensity = node.site_intensity(hazard)
                if intensity is not None:
                    intensities[node.id] = (hazard, convert(
                        float, intensity, 'site intensity of %s' % node.id,
                        item))
        if 'uniform' in item:
            uniform = convert(float, item['uniform'], 'uniform intensity',
                              item)
            for node in model.nodes:
                if hazard in node.fragility and not node.is_exempt(hazard):
                    intensities[node.id] = (hazard, uniform)
        for node_id, value in (item.get('intensities') or {}).items():
            if node_id not in model.node_map:
                self.unresolved('node', node_id, item)
                continue
            what = 'intensity of %s' % node_id
            if isinstance(value, (list, tuple)):
                if len(value) != 2:
                    raise exceptions.ScenarioSyntaxError(
                        '%s must be [hazard, value]' % what, line_of(item))
                intensities[node_id] = (
                    convert(HazardKind, value[0], what, item).value,
                    convert(float, value[1], what, item))
            else:
                intensities[node_id] = (hazard,
                                        convert(float, value, what, item))
        return EventVector(time, intensities)

    def parse_timeline(self, data, model):
        events = sorted((self.parse_event(e, model)
                         for e in data.get('events') or []),
                        key=lambda e: e.time)
        interventions = []
        for item in data.get('interventions') or []:
            network_id = str(require(item, 'network', 'intervention'))
            if network_id not in model.network_map:
                self.unresolved('network', network_id, item)
                continue
            configuration = self.parse_configuration(
                require(item, 'configuration', 'intervention'), 0,
                model.network_map[network_id].nodes, network_id)
            interventions.append(Intervention(
                convert(float, require(item, 'time', 'intervention'),
                        'intervention time', item),
                network_id, configuration))
        variants = tuple(
            Variant(convert(float, require(v, 'weight', 'variant'),
                            'variant weight', v),
                    {convert(HazardKind, h, 'variant hazard', v).value:
                     convert(float, f, 'variant scale', v)
                     for h, f in (v.get('scale') or {}).items()})
            for v in data.get('variants') or [])
        timeline = Timeline(
            t0=convert(float, data.get('t0', 0.0), 't0', data),
            T=convert(float, require(data, 'T', 'timeline'), 'T', data),
            dt=convert(float, data.get('dt', settings.DEFAULT_DT), 'dt',
                       data),
            events=tuple(events),
            interventions=tuple(interventions))
        return timeline, variants

    def parse_analysis(self, data, model):
        outputs = tuple(data.get('outputs') or ('cascade',))
        for output in outputs:
            if output not in OUTPUTS:
                raise exceptions.ScenarioSyntaxError(
                    'unknown output "%s"' % output, line_of(data))
        mode = data.get('autonomy_mode')
        if mode is not None and mode not in AUTONOMY_MODES:
            raise exceptions.ScenarioSyntaxError(
                'unknown autonomy mode "%s"' % mode, line_of(data))
        importance = []
        for item in data.get('importance') or []:
            pair = (str(require(item, 'node', 'importance')),
                    str(require(item, 'target', 'importance')))
            for node_id in pair:
                if node_id not in model.node_map:
                    self.unresolved('node', node_id, item)
            importance.append(pair)
        checkpoints = data.get('checkpoints') or {}
        sensitivity = data.get('sensitivity') or []
        if not isinstance(sensitivity, list):
            raise exceptions.ScenarioSyntaxError(
                'sensitivity must list scenario names', line_of(data))
        return Analysis(
            outputs=outputs,
            autonomy_mode=mode,
            series_parallel=bool(data.get('series_parallel', False)),
            checkpoints={str(k): convert(float, v, 'checkpoint %s' % k,
                                         checkpoints)
                         for k, v in checkpoints.items()},
            importance=tuple(importance),
            sensitivity=tuple(str(name) for name in sensitivity))

    def parse_gate(self, item):
        if 'event' in item:
            return BasicEvent(str(item['event']),
                              convert(float,
                                      require(item, 'probability', 'event'),
                                      'probability of %s' % item['event'],
                                      item))
        return Gate(str(require(item, 'gate', 'fault tree')).upper(),
                    tuple(self.parse_gate(child) for child in
                          require(item, 'inputs', 'gate')))

    def parse_pra(self, data, model):
        fault_trees = tuple(
            FaultTree(str(require(item, 'name', 'fault tree')),
                      self.parse_gate(require(item, 'top', 'fault tree')))
            for item in data.get('fault_trees') or [])
        event_trees = tuple(
            EventTree(str(require(item, 'name', 'event tree')),
                      convert(float, item.get('initiating_frequency', 1.0),
                              'initiating frequency', item),
                      tuple(Branch(str(require(b, 'label', 'branch')),
                                   convert(float,
                                           require(b, 'success', 'branch'),
                                           'branch success', b))
                            for b in require(item, 'branches', 'event tree')))
            for item in data.get('event_trees') or [])
        checks = []
        for item in data.get('eta') or []:
            network_id = str(require(item, 'network', 'eta check'))
            if network_id not in model.network_map:
                self.unresolved('network', network_id, item)
            checks.append(EtaCheck(
                network_id, optional_number(item, 'uniform', 'uniform p_sf'),
                {str(k): convert(float, v, 'p_sf of %s' % k, item)
                 for k, v in (item.get('p_sf') or {}).items()}))
        return PraBlock(fault_trees, event_trees, tuple(checks))


def parse_scenario(text, base_path=None):
    """
    Parse scenario text. Includes are resolved against `base_path`, the
    bundled scenario directory by default.
    """
    return ScenarioParser(get_data(text), base_path).parse()


def scenario_dir():
    return os.environ.get('LIFELINE_IIM_SCENARIO_DIR') or settings.SCENARIO_DIR


def find_scenario(name):
    """Resolve a scenario given as a path or as a bundled name."""
    if os.path.isfile(name):
        return name
    directory = scenario_dir()
    path = os.path.join(directory, name + SCENARIO_EXTENSION)
    if not os.path.isfile(path):
        raise exceptions.ScenarioNotFound(name, directory)
    return path


def load_scenario(name):
    path = find_scenario(name)
    log.info('Loading %s', path)
    with open(path, encoding='utf-8') as f:
        return parse_scenario(f.read(), os.path.dirname(os.path.abspath(path)))


def list_scenarios():
    """Bundled scenario names with their one-line descriptions."""
    directory = scenario_dir()
    scenarios = []
    for file_name in sorted(os.listdir(directory),
                            key=lambda f: os.path.splitext(f)[0]):
        name, ext = os.path.splitext(file_name)
        if ext != SCENARIO_EXTENSION:
            continue
        with open(os.path.join(directory, file_name), encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
        scenarios.append((name, str(data.get('description', ''))
                          .strip().split('\n')[0]))
    return scenarios


def _edges(edges):
    return [[x, y] for x, y in edges]


def _configuration(configuration):
    data = {'label': configuration.label,
            'edges': _edges(configuration.edges)}
    if configuration.degraded:
        data['degraded'] = True
    return data


def _curve(curve):
    data = {'hazard': curve.hazard_kind.value, 'form': curve.form.value,
            'units': curve.units}
    if curve.form == CurveForm.LOGNORMAL:
        data.update(median=curve.median, beta=curve.beta)
    elif curve.form == CurveForm.PIECEWISE:
        data['breakpoints'] = [list(b) for b in curve.breakpoints]
    else:
        data['threshold'] = curve.threshold
    return data


def _autonomy(curve):
    data = {'form': curve.form.value}
    if curve.form == CurveForm.STEP:
        data['capacity_hours'] = curve.capacity_hours
    else:
        data['breakpoints'] = [list(b) for b in curve.breakpoints]
    return data


def _node(node):
    data = {'id': node.id, 'kind': node.kind.value}
    for key in ('name', 'category', 'redundancy_group'):
        if getattr(node, key) is not None:
            data[key] = getattr(node, key)
    if node.partial_source:
        data['partial_source'] = True
    if node.fragility:
        data['fragility'] = dict(node.fragility)
    if node.site:
        data['site'] = plain(node.site)
    if node.autonomy:
        data['autonomy'] = {'curve': node.autonomy.curve}
        if node.autonomy.capacity_hours is not None:
            data['autonomy']['capacity_hours'] = node.autonomy.capacity_hours
    return data


def _gate(node):
    if isinstance(node, BasicEvent):
        return {'event': node.id, 'probability': node.probability}
    return {'gate': node.kind, 'inputs': [_gate(c) for c in node.children]}


def serialize_scenario(document):
    """Write a document back to scenario text, with curves inlined."""
    model = document.model
    data = {
        'schema': document.schema,
        'name': document.name,
        'description': document.description,
        'networks': [{
            'id': network.id,
            'nodes': [_node(model.node(n)) for n in network.nodes],
            'targets': list(network.targets),
            'configurations': [_configuration(c)
                               for c in network.configurations],
        } for network in model.networks],
        'dependencies': [{'from': d.from_network, 'to': d.to_network,
                          'edges': _edges(d.edges)}
                         for d in model.dependencies],
        'curves': {
            'fragility': {n: _curve(c) for n, c in
                          document.curves.fragility.items()},
            'autonomy': {n: _autonomy(c) for n, c in
                         document.curves.autonomy.items()},
        },
    }
    timeline = document.timeline
    if timeline is not None:
        events = []
        for event in timeline.events:
            hazards = [h for h, _ in event.intensities.values()]
            hazard = hazards[0] if hazards else HazardKind.GENERIC.value
            events.append({
                'time': event.time,
                'hazard': hazard,
                'intensities': {n: v if h == hazard else [h, v]
                                for n, (h, v) in event.intensities.items()},
            })
        data['timeline'] = {
            't0': timeline.t0, 'T': timeline.T, 'dt': timeline.dt,
            'events': events,
            'interventions': [{'time': i.time, 'network': i.network_id,
                               'configuration':
                                   _configuration(i.configuration)}
                              for i in timeline.interventions],
            'variants': [{'weight': v.weight, 'scale': dict(v.scale)}
                         for v in document.variants],
        }
    analysis = document.analysis
    data['analysis'] = {
        'outputs': list(analysis.outputs),
        'series_parallel': analysis.series_parallel,
        'checkpoints': dict(analysis.checkpoints),
        'importance': [{'node': n, 'target': t}
                       for n, t in analysis.importance],
    }
    if analysis.autonomy_mode:
        data['analysis']['autonomy_mode'] = analysis.autonomy_mode
    if analysis.sensitivity:
        data['analysis']['sensitivity'] = list(analysis.sensitivity)
    if document.pra is not None:
        data['pra'] = {
            'fault_trees': [{'name': t.name, 'top': _gate(t.root)}
                            for t in document.pra.fault_trees],
            'event_trees': [{
                'name': t.name,
                'initiating_frequency': t.initiating_frequency,
                'branches': [{'label': b.label,
                              'success': b.success_probability}
                             for b in t.branches],
            } for t in document.pra.event_trees],
            'eta': [dict({'network': c.network},
                         **({'uniform': c.uniform} if c.uniform is not None
                            else {'p_sf': dict(c.p_sf)}))
                    for c in document.pra.eta],
        }
    return yaml.safe_dump(data, sort_keys=False, allow_unicode=True)
