import sys
import logging
import argparse

import numpy as np

from lifeline import exceptions, export, pra, settings
from lifeline.engine import AUTONOMY_MODES, run_ensemble, run_timeline
from lifeline.graph import validate_topology
from lifeline.parser import list_scenarios, load_scenario

log = logging.getLogger('lifeline')

EQUIVALENCE_TOLERANCE = 1e-12


def configure_logging(verbose=False):
    logging.basicConfig(format=settings.LOG_FORMAT,
                        level=logging.DEBUG if verbose else settings.LOG_LEVEL)


def load_valid(name):
    document = load_scenario(name)
    extra = []
    if document.timeline is not None:
        extra = [(i.network_id, i.configuration)
                 for i in document.timeline.interventions]
    report = validate_topology(document.model, extra)
    return document, report


def run_document(document, args, importance=(), classic_iim=False):
    timeline = document.timeline
    if timeline is None:
        raise exceptions.InvalidTimeline('scenario %s has no timeline'
                                         % document.name)
    if args.dt is not None:
        timeline = timeline.with_dt(args.dt)
    analysis = document.analysis
    options = dict(
        classic_iim=classic_iim or 'classic-iim' in analysis.outputs,
        series_parallel=analysis.series_parallel,
        importance=importance,
        scenario=document.name,
        checkpoints=analysis.checkpoints)
    mode = args.autonomy_mode or analysis.autonomy_mode
    if document.variants:
        members = [(timeline.scaled(v.scale), v.weight)
                   for v in document.variants]
        return run_ensemble(document.model, document.curves, members, mode,
                            **options)
    return run_timeline(document.model, document.curves, timeline, mode,
                        **options)


def format_checkpoints(report):
    lines = []
    for name, time in report.checkpoints.items():
        step = report.at(time)
        lines.append('%s (t = %g h)' % (name, step.time))
        for network_id, layers in step.p_occ.items():
            lines.append('  %s' % network_id)
            for label, p_occ in layers.items():
                lines.append('    %-28s %7.2f%%' % (label, 100 * p_occ))
            lines.append('    %-28s %7.2f%%' % ('loss of capacity',
                                                100 * step.loc[network_id]))
    return '\n'.join(lines)


def validate(args):
    document, report = load_valid(args.scenario)
    for violation in report:
        print(violation)
    if not report.valid:
        return 1
    print('%s: %d networks, %d nodes, no violations'
          % (document.name, len(document.model.networks),
             len(document.model.nodes)))
    return 0


def run_scenario(args):
    document, validation = load_valid(args.scenario)
    if not validation.valid:
        for violation in validation:
            print(violation)
        return 1
    report = run_document(document, args, document.analysis.importance)
    if args.out:
        export.write_report(report, args.out, args.format)
    table = format_checkpoints(report)
    if table:
        print(table)
    return 0


def importance(args):
    document, validation = load_valid(args.scenario)
    if not validation.valid:
        for violation in validation:
            print(violation)
        return 1
    pairs = list(zip(args.node or [], args.target or []))
    if len(args.node or []) != len(args.target or []):
        raise exceptions.LifelineError('give one --target per --node')
    pairs = pairs or list(document.analysis.importance)
    if not pairs:
        raise exceptions.LifelineError('no node/target pair to evaluate')
    report = run_document(document, args, pairs)
    if args.out:
        export.write_report(report, args.out, args.format)
    for node_id, target_id in pairs:
        key = '%s->%s' % (node_id, target_id)
        series = [step.importance[key] for step in report.steps]
        peak = int(np.argmax(series))
        print('%s: max %.6f at t = %g h, final %.6f'
              % (key, series[peak], report.steps[peak].time, series[-1]))
    return 0


def compare_pra(args):
    document, validation = load_valid(args.scenario)
    rng = np.random.default_rng(args.seed)
    worst = 0.0

    or_diff = max(pra.iim_or_equivalence(rng.random(rng.integers(2, 7))).diff
                  for _ in range(args.samples))
    and_diff = max(pra.iim_and_equivalence(rng.random(rng.integers(2, 7))).diff
                   for _ in range(args.samples))
    print('OR gate vs series chain: max diff %.3g' % or_diff)
    print('AND gate vs redundancy group: max diff %.3g' % and_diff)
    worst = max(worst, or_diff, and_diff)

    block = document.pra
    for tree in block.fault_trees if block else ():
        try:
            result = pra.fault_tree_equivalence(tree)
        except exceptions.StructuralMismatch as e:
            print('fault tree %s: %.6g (%s)'
                  % (tree.name, pra.eval_fault_tree(tree), e))
            continue
        print('fault tree %s: %.6g, max diff %.3g'
              % (tree.name, result.fta, result.diff))
        worst = max(worst, result.diff)
    for tree in block.event_trees if block else ():
        for sequence in pra.eval_event_tree(tree):
            print('event tree %s: %-28s %.6g'
                  % (tree.name, sequence.label, sequence.frequency))

    groups = document.model.groups
    for check in block.eta if block else ():
        network = document.model.network(check.network)
        assignments = [check.probabilities(network)]
        size = len(network.nodes)
        assignments += [dict(zip(network.nodes, rng.random(size)))
                        for _ in range(args.samples // 5)]
        diff = max(pra.iim_eta_equivalence(network, p_sf, groups).max_diff
                   for p_sf in assignments)
        print('event tree vs configurations of %s: max diff %.3g'
              % (network.id, diff))
        worst = max(worst, diff)
    return 0 if worst <= EQUIVALENCE_TOLERANCE else 1


def compare_scores(args):
    document, validation = load_valid(args.scenario)
    names = args.against or list(document.analysis.sensitivity)
    if not names:
        raise exceptions.LifelineError('no scenario to compare %s with'
                                       % document.name)
    documents = [(document, validation)] + [load_valid(n) for n in names]
    reports = []
    for other, validation in documents:
        if not validation.valid:
            for violation in validation:
                print(violation)
            return 1
        reports.append(run_document(other, args, classic_iim=True))
    frame = export.system_score_frame(reports)
    if args.out:
        export.write_table(frame, args.out)
    print(frame.to_string(float_format=lambda v: '%.4f' % v))
    return 0


def list_bundled(args):
    for name, description in list_scenarios():
        print('%-24s %s' % (name, description))
    return 0


def export_plot_data(args):
    document, validation = load_valid(args.scenario)
    if not validation.valid:
        for violation in validation:
            print(violation)
        return 1
    report = run_document(document, args)
    for path in export.export_plot_data(report, document.model, args.out):
        print(path)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog='lifeline')
    parser.add_argument('--verbose', action='store_true',
                        help='Log every solve step')
    subparsers = parser.add_subparsers(help='Commands:', dest='command')
    subparsers.required = True

    def add_command(name, func, help, out=False, run=False):
        sub = subparsers.add_parser(name, help=help)
        sub.set_defaults(func=func)
        if name != 'list-scenarios':
            sub.add_argument('--scenario', required=True,
                             help='Bundled scenario name or path')
        if out:
            sub.add_argument('--out', required=name == 'export-plot-data',
                             help='Output file or directory')
        if run:
            sub.add_argument('--format', choices=export.FORMATS)
            sub.add_argument('--dt', type=float, help='Time step in hours')
            sub.add_argument('--autonomy-mode', choices=AUTONOMY_MODES)
        return sub

    add_command('validate', validate, 'Check the topology of a scenario')
    add_command('run', run_scenario, 'Run the timeline of a scenario',
                out=True, run=True)
    sub = add_command('importance', importance,
                      'Node importance for node/target pairs', out=True,
                      run=True)
    sub.add_argument('--node', action='append')
    sub.add_argument('--target', action='append')
    sub = add_command('compare-pra', compare_pra,
                      'Compare the cascade model with fault and event trees')
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--samples', type=int, default=1000)
    sub = add_command('compare-scores', compare_scores,
                      'Compare the system score of a scenario with its '
                      'interventions', out=True)
    sub.add_argument('--against', action='append',
                     help='Scenario to compare with, repeatable')
    sub.add_argument('--dt', type=float, help='Time step in hours')
    sub.add_argument('--autonomy-mode', choices=AUTONOMY_MODES)
    add_command('list-scenarios', list_bundled, 'List bundled scenarios')
    add_command('export-plot-data', export_plot_data,
                'Write one CSV table per figure family', out=True, run=True)
    return parser


def main(args=None):
    parser = build_parser()
    args = parser.parse_args(sys.argv[1:] if args is None else args)
    configure_logging(args.verbose)
    try:
        return args.func(args)
    except exceptions.LifelineError as e:
        print('error: %s' % e, file=sys.stderr)
        return 1


def run(args=None):
    sys.exit(main(args))
