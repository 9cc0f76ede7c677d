import json
import os

import pytest

from zkucb.cli import cli_dispatch, EXIT_OK, EXIT_REJECTED, EXIT_ERROR
from zkucb.bandit import Trace
from zkucb.proof import Statement


EPISODE = ['--seed', '7', '--steps', '4', '--window', '1', '--q', '16']


@pytest.fixture
def pipeline(tmp_path):
    paths = {k: str(tmp_path/v) for k, v in (('trace', 'trace.json'), ('r1cs', 'c.r1cs.json'),
                                              ('witness', 'w.json'), ('statement', 'stmt.json'),
                                              ('pk', 'c.pk'), ('vk', 'c.vk'), ('proof', 'p.proof'))}
    assert cli_dispatch(['simulate', *EPISODE, '--tie-break', 'lowest_index', '--out', paths['trace']]) == EXIT_OK
    assert cli_dispatch(['compile', *EPISODE, '--out', paths['r1cs']]) == EXIT_OK
    assert cli_dispatch(['witness', '--trace', paths['trace'], '--r1cs', paths['r1cs'],
                         '--out', paths['witness'], '--statement-out', paths['statement']]) == EXIT_OK
    assert cli_dispatch(['setup', '--r1cs', paths['r1cs'], '--pk', paths['pk'], '--vk', paths['vk']]) == EXIT_OK
    assert cli_dispatch(['prove', '--pk', paths['pk'], '--r1cs', paths['r1cs'], '--witness', paths['witness'],
                         '--statement', paths['statement'], '--out', paths['proof']]) == EXIT_OK
    return paths


def verify_args(paths, statement=None):
    return ['verify', '--vk', paths['vk'], '--statement', statement or paths['statement'],
            '--proof', paths['proof']]


def test_pipeline_accepts(pipeline):
    assert cli_dispatch(verify_args(pipeline)) == EXIT_OK


def test_tampered_statement_rejected(pipeline, tmp_path):
    with open(pipeline['statement']) as f:
        values = [int(v) for v in json.load(f)]
    values[-1] += 1
    bad = str(tmp_path/'bad.json')
    with open(bad, 'w') as f:
        f.write(Statement.from_values(values).to_json())
    assert cli_dispatch(verify_args(pipeline, bad)) == EXIT_REJECTED


def test_simulate_to_stdout(capsys):
    assert cli_dispatch(['simulate', '--seed', '3', '--steps', '3', '--window', '1']) == EXIT_OK
    trace = Trace.from_json(capsys.readouterr().out)
    assert trace.config.seed == 3
    assert trace.config.tie_break == 'lcg'
    assert len(trace.steps) == 3


def test_simulate_from_config_file(tmp_path, capsys):
    path = tmp_path/'episode.toml'
    path.write_text('means = [0.5, 1.5]\nT = 3\nseed = 11\nq = 16\nwindow = 1\n')
    assert cli_dispatch(['simulate', '--config', str(path), '--seed', '12']) == EXIT_OK
    trace = Trace.from_json(capsys.readouterr().out)
    assert trace.config.K == 2
    assert trace.config.seed == 12


def test_witness_refuses_lcg_trace(tmp_path):
    trace = str(tmp_path/'trace.json')
    assert cli_dispatch(['simulate', *EPISODE, '--tie-break', 'lcg', '--out', trace]) == EXIT_OK
    assert cli_dispatch(['witness', '--trace', trace, '--out', str(tmp_path/'w.json')]) == EXIT_ERROR


@pytest.mark.parametrize("argv", [['compile', '--steps', '2'], ['simulate', '--bogus'], [],
                                  ['verify', '--vk', 'missing.vk', '--statement', 's', '--proof', 'p'],
                                  ['compile', '--steps', '4', '--tie-break', 'lcg']])
def test_usage_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert cli_dispatch(argv) == EXIT_ERROR


def test_non_ascii_statement_is_malformed(pipeline, tmp_path):
    bad = tmp_path/'latin.json'
    bad.write_bytes(b'["1", "2\xc3"]')
    assert cli_dispatch(verify_args(pipeline, str(bad))) == EXIT_ERROR


def test_malformed_proof_sidecar(pipeline):
    with open(pipeline['proof']+'.json', 'wb') as f:
        f.write(b'\xc3\x28 not json')
    assert cli_dispatch(verify_args(pipeline)) == EXIT_ERROR


@pytest.mark.parametrize("name,text", [('episode.json', '{"means": [1.0], "T": "ten"}'),
                                       ('episode.json', '{"means": [1.0], "seed": 1.5}'),
                                       ('episode.json', '{"means": ["abc"]}'),
                                       ('episode.json', '{"means": [1.0], "lcg": {"b": 3}}'),
                                       ('episode.json', '[1, 2]'),
                                       ('episode.toml', 'means = [1.0]\nT = "ten"\n')])
def test_wrong_typed_episode_config(tmp_path, name, text):
    path = tmp_path/name
    path.write_text(text)
    assert cli_dispatch(['simulate', '--config', str(path)]) == EXIT_ERROR


def test_non_utf8_config(tmp_path):
    path = tmp_path/'episode.json'
    path.write_bytes(b'{"means": [1.0], "seed": "\xff"}')
    assert cli_dispatch(['simulate', '--config', str(path)]) == EXIT_ERROR


def test_wrong_typed_experiment_config(tmp_path):
    path = tmp_path/'setting2.json'
    path.write_text('{"steps": ["ten"], "q_levels": [16]}')
    assert cli_dispatch(['bench', '--setting', 'II', '--config', str(path)]) == EXIT_ERROR


def test_plot_rejects_unreadable_csv(tmp_path):
    csv = tmp_path/'table.csv'
    csv.write_bytes(b'q,steps\n\xff\xfe,3\n')
    assert cli_dispatch(['plot', '--csv', str(csv), '--out', str(tmp_path/'t.svg')]) == EXIT_ERROR
    csv.write_text('q,steps,constraints\n16,3,100\n')
    assert cli_dispatch(['plot', '--csv', str(csv), '--out', str(tmp_path/'t.svg')]) == EXIT_ERROR


def test_version():
    assert cli_dispatch(['--version']) == EXIT_OK


def test_bench_setting2(tmp_path):
    csv, svg = str(tmp_path/'s2.csv'), str(tmp_path/'s2.svg')
    argv = ['bench', '--setting', 'II', '--steps', '3', '4', '--q', '16', '--window', '1',
            '--out', csv, '--plot', svg]
    assert cli_dispatch(argv) == EXIT_OK
    with open(csv) as f:
        assert f.readline().startswith('q,steps,constraints')
    with open(csv+'.json') as f:
        assert json.load(f)['steps'] == [3, 4]
    assert (tmp_path/'s2.svg').exists()
    assert cli_dispatch(['plot', '--csv', csv, '--out', str(tmp_path/'again.svg')]) == EXIT_OK
    assert 'constraints' in (tmp_path/'again.svg').read_text()


def test_verify_needs_no_witness(pipeline):
    os.remove(pipeline['witness'])
    os.remove(pipeline['trace'])
    assert cli_dispatch(verify_args(pipeline)) == EXIT_OK
