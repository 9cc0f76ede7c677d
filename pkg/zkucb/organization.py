""" Collection of functions for navigating the zkUCB artifact directory structure """

import os

from zkucb.version import sysconfig


### FILENAMES ###
def get_shapelist(cfg):
    """
    Return the list of strings naming the circuit shape of [cfg]. Everything
    that changes the constraint system is in here; the seed is not.
    """
    return ['K'+str(cfg.K),
            'T'+str(cfg.T),
            'q'+str(cfg.quant.q),
            'w'+str(cfg.quant.window),
            cfg.quant.index_mode]


def get_filenamelist(cfg):
    """
    Return the filename list for a single episode: the shape, the tie break,
    the seed and, when set, the uniform-bound flag.
    """
    tmp = get_shapelist(cfg)+[cfg.tie_break, 'seed'+str(cfg.seed)]
    if cfg.uniform_bound:
        tmp.append('uniform')
    return tmp


def build_filename(filenamelist, ext):
    return '.'.join(filenamelist)+'.'+ext


def get_directoryname(kind, **args):
    """
    Return a directory name of the form kind.key-value.key-value with keys
    sorted; None values are skipped and lists joined by underscores.
    """
    strings = [kind]
    for key, value in sorted(args.items()):
        if value is None:
            continue
        elif isinstance(value, (list, tuple)):
            string = '-'.join([key, '_'.join(str(v) for v in value)])
        else:
            string = '-'.join([key, str(value)])
        strings.append(string)
    return '.'.join(strings)


def _path(root, filename, makedirs):
    if makedirs and not os.path.exists(root):
        os.makedirs(root)
    return '/'.join([root, filename])


### EPISODE ARTIFACTS ###
def get_tracepath(cfg, makedirs=False):
    return _path(sysconfig['tracepathroot'], build_filename(get_filenamelist(cfg), 'json'), makedirs)


def get_r1cspath(cfg, makedirs=False):
    return _path(sysconfig['r1cspathroot'], build_filename(get_shapelist(cfg), 'r1cs.json'), makedirs)


def get_witnesspath(cfg, makedirs=False):
    return _path(sysconfig['witnesspathroot'], build_filename(get_filenamelist(cfg), 'wtns.json'), makedirs)


def get_statementpath(cfg, makedirs=False):
    return _path(sysconfig['witnesspathroot'], build_filename(get_filenamelist(cfg), 'stmt.json'), makedirs)


def get_keypath(cfg, backend, kind, makedirs=False):
    """Keys are per circuit shape and backend; kind is 'pk' or 'vk'."""
    root = '/'.join([sysconfig['keypathroot'], get_directoryname('keys', backend=backend)])
    return _path(root, build_filename(get_shapelist(cfg), kind), makedirs)


def get_proofpath(cfg, backend, makedirs=False):
    root = '/'.join([sysconfig['proofpathroot'], get_directoryname('proof', backend=backend)])
    return _path(root, build_filename(get_filenamelist(cfg), 'proof'), makedirs)


### EXPERIMENT OUTPUTS ###
def get_benchpath(setting, makedirs=False, **args):
    """CSV path for a bench setting; [args] distinguish non-default runs."""
    name = get_directoryname('setting'+str(setting), **args)
    return _path(sysconfig['benchpathroot'], name+'.csv', makedirs)


def get_plotpath(name, makedirs=False):
    return _path(sysconfig['plotpathroot'], name+'.svg', makedirs)
