import os
from textwrap import dedent

import pandas as pd
import pytest

from lifeline import commands, export

BROKEN = dedent('''
    schema: 1
    name: broken
    networks:
      - id: net
        nodes:
          - {id: s, kind: source}
          - {id: t, kind: target}
          - {id: u, kind: target}
        configurations:
          - label: main
            edges: [s -> t -> u]
''')


def test_validate(capsys):
    assert commands.main(['validate', '--scenario', 'example2']) == 0
    out = capsys.readouterr().out
    assert out.startswith('example2: 2 networks, 11 nodes')


def test_validate_violations(tmp_path, capsys):
    path = tmp_path / 'broken.yml'
    path.write_text(BROKEN)
    assert commands.main(['validate', '--scenario', str(path)]) == 1
    assert 'outflow' in capsys.readouterr().out
    assert commands.main(['run', '--scenario', str(path)]) == 1


def test_validate_bad_kind(tmp_path, capsys):
    path = tmp_path / 'typo.yml'
    path.write_text(BROKEN.replace('{id: s, kind: source}',
                                   '{id: s, kind: sorce}'))
    assert commands.main(['validate', '--scenario', str(path)]) == 1
    err = capsys.readouterr().err
    assert err.startswith('error: line 7: ')
    assert 'sorce' in err


def test_unknown_scenario(capsys):
    assert commands.main(['validate', '--scenario', 'nowhere']) == 1
    assert capsys.readouterr().err.startswith('error: scenario "nowhere"')


def test_run(tmp_path, capsys):
    out = str(tmp_path / 'example3.json')
    assert commands.main(['run', '--scenario', 'example3', '--out', out]) == 0
    table = capsys.readouterr().out
    assert 'first_shock (t = 1 h)' in table
    assert 'loss of capacity' in table
    with open(out, 'rb') as f:
        report = export.import_report(f.read())
    assert report.scenario == 'example3'
    assert report.times == [0.0, 1.0, 2.0, 3.0, 4.0]


def test_run_options(tmp_path):
    out = str(tmp_path / 'example3.out')
    assert commands.main(['run', '--scenario', 'example3', '--out', out,
                          '--format', 'json', '--dt', '0.5',
                          '--autonomy-mode', 'dominant']) == 0
    with open(out, 'rb') as f:
        assert len(export.import_report(f.read()).steps) == 9


def test_run_text_extension(tmp_path):
    out = tmp_path / 'report.txt'
    assert commands.main(['run', '--scenario', 'example3',
                          '--out', str(out)]) == 0
    assert out.read_text().startswith('time_h,entity_kind,')


def test_run_zero_dt(capsys):
    assert commands.main(['run', '--scenario', 'example3', '--dt', '0']) == 1
    assert 'dt must be positive' in capsys.readouterr().err


def test_importance_without_pairs(capsys):
    assert commands.main(['importance', '--scenario', 'example4']) == 1
    assert 'error:' in capsys.readouterr().err


def test_importance(capsys):
    assert commands.main(['importance', '--scenario', 'example1']) == 0
    assert capsys.readouterr().out.startswith('pump->bld1_water: max ')
    assert commands.main(['importance', '--scenario', 'example1',
                          '--node', 'electrical_source',
                          '--target', 'bld2_water']) == 0
    assert 'electrical_source->bld2_water' in capsys.readouterr().out


def test_importance_pairs(capsys):
    assert commands.main(['importance', '--scenario', 'example1',
                          '--node', 'pump']) == 1
    assert 'one --target per --node' in capsys.readouterr().err


@pytest.mark.parametrize('scenario', ['example3', 'example4'])
def test_compare_pra(scenario, capsys):
    assert commands.main(['compare-pra', '--scenario', scenario,
                          '--samples', '50']) == 0
    out = capsys.readouterr().out
    assert 'OR gate vs series chain' in out
    assert 'AND gate vs redundancy group' in out


def test_list_scenarios(capsys):
    assert commands.main(['list-scenarios']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 8
    assert lines[1].startswith('example1-maintenance')
    assert lines[6].startswith('fukushima-detailed')


def test_export_plot_data(tmp_path, capsys):
    directory = str(tmp_path / 'plots')
    assert commands.main(['export-plot-data', '--scenario', 'example1',
                          '--out', directory]) == 0
    paths = capsys.readouterr().out.split()
    assert len(paths) == 13
    assert os.path.join(directory, 'system_score.csv') in paths
    assert all(os.path.isfile(p) for p in paths)


def test_compare_scores(tmp_path, capsys):
    out = str(tmp_path / 'scores.csv')
    assert commands.main(['compare-scores', '--scenario', 'example1',
                          '--out', out]) == 0
    header = capsys.readouterr().out.splitlines()[0].split()
    assert header == ['example1', 'example1-modification',
                      'example1-maintenance', 'example2']
    table = pd.read_csv(out, index_col='time_h')
    assert list(table.index) == [5.0 * i for i in range(11)]
    assert (table['example1-modification'] <= table['example1']).all()


def test_compare_scores_against(capsys):
    assert commands.main(['compare-scores', '--scenario', 'example1',
                          '--against', 'example2']) == 0
    assert capsys.readouterr().out.split()[:2] == ['example1', 'example2']
    assert commands.main(['compare-scores', '--scenario', 'example1',
                          '--against', 'example3']) == 1
    assert 'different time grids' in capsys.readouterr().err
    assert commands.main(['compare-scores', '--scenario', 'example4']) == 1
    assert 'no scenario to compare' in capsys.readouterr().err


def test_run_exits():
    with pytest.raises(SystemExit) as exit:
        commands.run(['list-scenarios'])
    assert exit.value.code == 0
