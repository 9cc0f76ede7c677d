import json
import os

import pytest

from conftest import small_config
from zkucb.utils import ConfigError, FormatError
from zkucb.processing import (read_config_file, envconfig_from_dict, open_envconfig, open_experimentconfig,
                              write_trace, open_trace, write_r1cs, open_r1cs, write_witness, open_witness,
                              write_statement, open_statement, file_size)
from zkucb.circuit import statement_from_trace
from zkucb.proof import setup, prove, write_key, read_key, write_proof, read_proof
from zkucb.organization import (get_shapelist, get_filenamelist, build_filename, get_directoryname,
                                get_tracepath, get_r1cspath, get_keypath, get_proofpath, get_benchpath,
                                get_plotpath)


def test_toml_episode_config(tmp_path):
    path = tmp_path/'episode.toml'
    path.write_text('means = [0.9, 1.0, 1.1]\nsteps = 12\nseed = 3\nq = 16\nwindow = 4\n'
                    'tie_break = "lowest_index"\n\n[lcg]\na = 1664525\nc = 1013904223\n')
    cfg = open_envconfig(str(path))
    assert cfg == small_config(T=12, seed=3, window=4)


def test_json_episode_config_roundtrip(tmp_path):
    cfg = small_config(uniform_bound=True)
    path = tmp_path/'episode.json'
    path.write_text(json.dumps(cfg.to_dict()))
    assert open_envconfig(str(path)) == cfg


def test_episode_config_defaults():
    cfg = envconfig_from_dict({'means': [0.5]})
    assert (cfg.T, cfg.seed) == (200, 0)


@pytest.mark.parametrize("d", [{'means': [1.0], 'horizon': 5}, {'T': 5}, {'means': [1.0], 'T': 'ten'},
                               {'means': [1.0], 'lcg': {'a': 3, 'z': 1}}])
def test_episode_config_rejected(d):
    with pytest.raises(ConfigError):
        envconfig_from_dict(d)


def test_config_file_errors(tmp_path):
    bad = tmp_path/'bad.toml'
    bad.write_text('means = [0.9,\n')
    with pytest.raises(ConfigError):
        read_config_file(str(bad))
    with pytest.raises(ConfigError):
        read_config_file(str(tmp_path/'episode.yaml'))
    listed = tmp_path/'list.json'
    listed.write_text('[1, 2]')
    with pytest.raises(ConfigError):
        read_config_file(str(listed))
    latin = tmp_path/'latin.toml'
    latin.write_bytes(b'means = [1.0] # \xe9\n')
    with pytest.raises(ConfigError):
        read_config_file(str(latin))


def test_experiment_config_file(tmp_path):
    path = tmp_path/'setting2.toml'
    path.write_text('setting = "II"\nsteps = [20, 30]\nq_levels = [16, 256]\nbackend = "transparent"\n')
    cfg = open_experimentconfig(str(path))
    assert cfg.steps == (20, 30)
    assert cfg.q_levels == (16, 256)


def test_shipped_configs_load():
    root = os.path.join(os.path.dirname(__file__), '..', 'configs')
    setting1 = open_experimentconfig(os.path.join(root, 'setting1.toml'))
    assert setting1.setting == 'I'
    assert setting1.index_modes == ('literal', 'scaled')
    assert open_experimentconfig(os.path.join(root, 'setting2.toml')).setting == 'II'
    assert open_envconfig(os.path.join(root, 'episode.toml')).K == 3


def test_artifact_files(tmp_path, small_trace, small_cs, small_witness):
    assert write_trace(small_trace, str(tmp_path/'t'/'trace.json')) > 0
    assert open_trace(str(tmp_path/'t'/'trace.json')) == small_trace
    size = write_r1cs(small_cs, str(tmp_path/'c.r1cs.json'))
    assert size == file_size(str(tmp_path/'c.r1cs.json'))
    assert open_r1cs(str(tmp_path/'c.r1cs.json')).shape_hash() == small_cs.shape_hash()
    write_witness(small_witness, str(tmp_path/'w.json'))
    assert open_witness(str(tmp_path/'w.json')) == small_witness
    stmt = statement_from_trace(small_trace)
    write_statement(stmt, str(tmp_path/'s.json'))
    assert open_statement(str(tmp_path/'s.json')) == stmt
    with pytest.raises(FormatError):
        file_size(str(tmp_path/'missing'))
    (tmp_path/'latin.json').write_bytes(b'["1\xc3"]')
    with pytest.raises(FormatError):
        open_statement(str(tmp_path/'latin.json'))


def test_filenames():
    cfg = small_config(T=6, q=16, window=2, seed=7)
    assert get_shapelist(cfg) == ['K3', 'T6', 'q16', 'w2', 'literal']
    assert build_filename(get_filenamelist(cfg), 'json') == 'K3.T6.q16.w2.literal.lowest_index.seed7.json'
    assert get_filenamelist(cfg.with_(uniform_bound=True))[-1] == 'uniform'
    assert get_directoryname('keys', backend='groth16', extra=None) == 'keys.backend-groth16'
    assert get_directoryname('setting2', q=[16, 256]) == 'setting2.q-16_256'


def test_paths(output_root):
    cfg = small_config()
    assert get_tracepath(cfg).startswith(str(output_root/'trace'))
    assert get_r1cspath(cfg).endswith('K3.T6.q16.w2.literal.r1cs.json')
    assert get_r1cspath(cfg) == get_r1cspath(cfg.with_(seed=1))
    assert get_keypath(cfg, 'transparent', 'vk').endswith('keys.backend-transparent/K3.T6.q16.w2.literal.vk')
    assert '/proof.backend-groth16/' in get_proofpath(cfg, 'groth16')
    assert get_benchpath('I') == str(output_root/'bench'/'settingI.csv')
    path = get_plotpath('setting1', makedirs=True)
    assert os.path.isdir(os.path.dirname(path))


def test_files_roundtrip_bit_exactly(tmp_path, small_cs, small_witness, small_trace):
    pairs = []
    write_r1cs(small_cs, str(tmp_path/'a.r1cs.json'))
    write_r1cs(open_r1cs(str(tmp_path/'a.r1cs.json')), str(tmp_path/'b.r1cs.json'))
    pairs.append(('a.r1cs.json', 'b.r1cs.json'))
    write_witness(small_witness, str(tmp_path/'a.wtns.json'))
    write_witness(open_witness(str(tmp_path/'a.wtns.json')), str(tmp_path/'b.wtns.json'))
    pairs.append(('a.wtns.json', 'b.wtns.json'))
    pk, vk = setup(small_cs)
    proof = prove(pk, small_cs, statement_from_trace(small_trace), small_witness)
    for name, obj, write, read in (('pk', pk, write_key, read_key), ('vk', vk, write_key, read_key),
                                   ('proof', proof, write_proof, read_proof)):
        write(obj, str(tmp_path/('a.'+name)))
        write(read(str(tmp_path/('a.'+name))), str(tmp_path/('b.'+name)))
        pairs.append(('a.'+name, 'b.'+name))
    for a, b in pairs:
        assert (tmp_path/a).read_bytes() == (tmp_path/b).read_bytes()
