from __future__ import annotations

import os
import json
import logging

import pandas as pd

from lifeline import exceptions, settings
from lifeline.report import ProbabilityReport
from lifeline.utils import makedirs

log = logging.getLogger('lifeline')

COLUMNS = ['time_h', 'entity_kind', 'entity_id', 'quantity', 'value']
FORMATS = ('csv', 'json')


def float_format():
    return '%%.%dg' % settings.CSV_SIGNIFICANT_DIGITS


def report_rows(report):
    """One (time, entity kind, entity, quantity, value) row per quantity."""
    for step in report.steps:
        for node_id, p in step.nodes.items():
            for quantity in ('p_sf', 'p_cf', 'p_f'):
                yield step.time, 'node', node_id, quantity, \
                    getattr(p, quantity)
        for network_id, layers in step.p_occ.items():
            for label, p_occ in layers.items():
                entity = '%s/%s' % (network_id, label)
                yield step.time, 'configuration', entity, 'p_occ', p_occ
                yield step.time, 'configuration', entity, 'chain_survival', \
                    step.survival[network_id][label]
        for network_id, loc in step.loc.items():
            yield step.time, 'network', network_id, 'loc', loc
        if step.classic is not None:
            for node_id, q in step.classic.q.items():
                yield step.time, 'node', node_id, 'q', q
                yield step.time, 'node', node_id, 'q_clamped', \
                    step.classic.q_clamped[node_id]
                yield step.time, 'node', node_id, 'dc_s', \
                    step.classic.decay_scores[node_id]
            yield step.time, 'system', report.scenario or 'system', 'sys_s', \
                step.classic.system_score
        for pair, value in step.importance.items():
            yield step.time, 'importance', pair, 'importance', value


def report_frame(report):
    return pd.DataFrame(list(report_rows(report)), columns=COLUMNS)


def export_report(report, format='csv'):
    """Serialize a report as CSV rows or as JSON nested by time step."""
    if format == 'csv':
        text = report_frame(report).to_csv(index=False,
                                           float_format=float_format(),
                                           lineterminator='\n')
        return text.encode('utf-8')
    if format == 'json':
        return json.dumps(report.to_dict(), indent=1).encode('utf-8')
    raise exceptions.UnknownReportFormat(format, FORMATS)


def import_report(data):
    if isinstance(data, bytes):
        data = data.decode('utf-8')
    return ProbabilityReport.from_dict(json.loads(data))


def write_report(report, path, format=None):
    """
    Write a report to `path`. Without an explicit format the extension
    picks one when it names a known format, CSV otherwise.
    """
    if format is None:
        extension = os.path.splitext(path)[1].lstrip('.').lower()
        format = extension if extension in FORMATS else 'csv'
    data = export_report(report, format)
    with open(path, 'wb') as f:
        f.write(data)
    log.info('Wrote %s report to %s', format, path)


def plot_frames(report, model):
    """
    Wide tables for plotting, one per figure family and network: failure
    probabilities per node, occupancy per configuration, loss of capacity
    and the failure probability of the network targets.
    """
    times = report.times
    frames = {}
    for network in model.networks:
        for quantity in ('p_sf', 'p_cf', 'p_f'):
            frames['%s_%s' % (network.id, quantity)] = pd.DataFrame(
                {n: report.node_series(n, quantity) for n in network.nodes},
                index=pd.Index(times, name='time_h'))
        labels = []
        for step in report.steps:
            labels.extend(l for l in step.p_occ[network.id] if l not in labels)
        frames['%s_p_occ' % network.id] = pd.DataFrame(
            {l: report.p_occ_series(network.id, l) for l in labels},
            index=pd.Index(times, name='time_h'))
        frames['%s_loc' % network.id] = pd.DataFrame(
            {'loc': report.loc_series(network.id)},
            index=pd.Index(times, name='time_h'))
        frames['%s_targets_p_f' % network.id] = pd.DataFrame(
            {n: report.node_series(n, 'p_f') for n in network.targets},
            index=pd.Index(times, name='time_h'))
    if report.has_classic:
        frames['system_score'] = system_score_frame([report])
    return frames


def system_score_frame(reports):
    """
    sys_s of several runs side by side, one column per scenario. The runs
    must share their time grid.
    """
    times = reports[0].times
    columns = {}
    for report in reports:
        if len(report.times) != len(times) or any(
                abs(a - b) > settings.TIME_EPSILON
                for a, b in zip(report.times, times)):
            raise exceptions.InvalidTimeline(
                '%s and %s run on different time grids'
                % (reports[0].scenario, report.scenario))
        columns[report.scenario or 'system'] = report.system_score_series()
    return pd.DataFrame(columns, index=pd.Index(times, name='time_h'))


def write_table(frame, path):
    frame.to_csv(path, float_format=float_format(), lineterminator='\n')
    log.debug('Wrote %d rows to %s', len(frame), path)


def export_plot_data(report, model, directory):
    makedirs(directory)
    paths = []
    for name, frame in plot_frames(report, model).items():
        path = os.path.join(directory, '%s.csv' % name)
        write_table(frame, path)
        paths.append(path)
    log.info('Wrote %d plot tables to %s', len(paths), directory)
    return paths
