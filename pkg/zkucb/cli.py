"""
Command-line entry point.

    zkucb simulate --seed 7 --steps 20 --tie-break lowest_index --out trace.json
    zkucb compile --steps 20 --out circuit.r1cs.json
    zkucb witness --trace trace.json --r1cs circuit.r1cs.json --out w.json --statement-out stmt.json
    zkucb setup --r1cs circuit.r1cs.json --pk circuit.pk --vk circuit.vk
    zkucb prove --pk circuit.pk --r1cs circuit.r1cs.json --witness w.json --statement stmt.json --out p.proof
    zkucb verify --vk circuit.vk --statement stmt.json --proof p.proof
    zkucb bench --setting I
    zkucb plot --csv setting1.csv --out setting1.svg

Exit codes: 0 success, 1 verification failed, 2 usage, configuration or I/O error.
"""

import argparse
import logging
import sys

from zkucb.version import __version__
from zkucb.utils import ZkucbError
from zkucb.bandit import run_episode, INDEX_MODES, TIE_BREAKS
from zkucb.circuit import compile_trace_shape, synthesize_witness, statement_from_trace
from zkucb.proof import (BACKENDS, Statement, setup, prove, verify, read_key, write_key,
                         read_proof, write_proof)
from zkucb.processing import (read_config_file, envconfig_from_dict, open_trace, write_trace,
                              open_r1cs, write_r1cs, open_witness, write_witness, open_statement,
                              write_statement)
from zkucb.calculations import (ExperimentConfig, run_setting1, run_setting2, setting1_table,
                                setting2_table)
from zkucb.plotting import write_csv, read_csv, render_plot
from zkucb.organization import get_r1cspath, get_benchpath, get_plotpath

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_ERROR = 2

DEFAULT_MEANS = [0.9, 1.0, 1.1]


def _means(text):
    try:
        return [float(m) for m in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError("means must be comma-separated numbers, got {"+text+"}")


def build_parser():
    parser = argparse.ArgumentParser(prog='zkucb', description="Verifiable UCB bandits with R1CS proofs.")
    parser.add_argument('--version', action='version', version='%(prog)s '+__version__)
    sub = parser.add_subparsers(dest='command', required=True)

    logopts = argparse.ArgumentParser(add_help=False)
    logopts.add_argument('-v', '--verbose', action='store_true', help="debug logging")
    logopts.add_argument('-q', '--quiet', action='store_true', help="warnings and errors only")

    episode = argparse.ArgumentParser(add_help=False, parents=[logopts])
    episode.add_argument('--config', help="TOML or JSON episode config; flags override it")
    episode.add_argument('--means', type=_means, help="comma-separated arm means, e.g. 0.9,1.0,1.1")
    episode.add_argument('--seed', type=int)
    episode.add_argument('--q', type=int, help="scaling factor")
    episode.add_argument('--steps', type=int, help="horizon T")
    episode.add_argument('--window', type=int, help="LCG draws averaged per reward")
    episode.add_argument('--index-mode', choices=INDEX_MODES)
    episode.add_argument('--tie-break', choices=TIE_BREAKS)
    episode.add_argument('--uniform-bound', action='store_true', default=None,
                         help="use u = q for every arm")

    p = sub.add_parser('simulate', parents=[episode], help="run an episode and emit its trace JSON")
    p.add_argument('--out', help="trace path (default: stdout)")

    p = sub.add_parser('compile', parents=[episode], help="compile the circuit for a config")
    p.add_argument('--out', help="R1CS JSON path (default: under the output root)")

    p = sub.add_parser('witness', parents=[logopts], help="synthesize a witness from a trace")
    p.add_argument('--trace', required=True)
    p.add_argument('--r1cs', help="compiled system; compiled from the trace config when omitted")
    p.add_argument('--out', required=True)
    p.add_argument('--statement-out', help="also write the public statement")

    p = sub.add_parser('setup', parents=[logopts], help="generate proving and verifying keys")
    p.add_argument('--r1cs', required=True)
    p.add_argument('--pk', required=True)
    p.add_argument('--vk', required=True)
    p.add_argument('--backend', choices=BACKENDS, default='transparent')

    p = sub.add_parser('prove', parents=[logopts], help="prove a statement")
    p.add_argument('--pk', required=True)
    p.add_argument('--r1cs', required=True)
    p.add_argument('--witness', required=True)
    p.add_argument('--statement', help="defaults to the public prefix of the witness")
    p.add_argument('--out', required=True)
    p.add_argument('--backend', choices=BACKENDS, help="defaults to the backend of the key")

    p = sub.add_parser('verify', parents=[logopts], help="verify a proof; exit 0 accept, 1 reject")
    p.add_argument('--vk', required=True)
    p.add_argument('--statement', required=True)
    p.add_argument('--proof', required=True)
    p.add_argument('--backend', choices=BACKENDS, help="defaults to the backend of the key")

    p = sub.add_parser('bench', parents=[logopts], help="run setting I or II")
    p.add_argument('--setting', choices=('I', 'II'), required=True)
    p.add_argument('--config', help="TOML or JSON experiment config")
    p.add_argument('--iterations', type=int)
    p.add_argument('--seed', type=int, help="base seed; iteration i uses seed + i")
    p.add_argument('--q', type=int, nargs='+', help="quantization levels")
    p.add_argument('--steps', type=int, nargs='+', help="horizon (I) or list of horizons (II)")
    p.add_argument('--window', type=int)
    p.add_argument('--index-mode', choices=INDEX_MODES, nargs='+')
    p.add_argument('--tie-break', choices=TIE_BREAKS)
    p.add_argument('--backend', choices=BACKENDS)
    p.add_argument('--uniform-bound', action='store_true', default=None)
    p.add_argument('--out', help="CSV path (default: under the output root)")
    p.add_argument('--plot', help="SVG path (default: next to the CSV outputs)")

    p = sub.add_parser('plot', parents=[logopts], help="render a bench CSV to SVG")
    p.add_argument('--csv', required=True)
    p.add_argument('--out', required=True)
    return parser


def configure_logging(args):
    level = logging.INFO
    if getattr(args, 'verbose', False):
        level = logging.DEBUG
    elif getattr(args, 'quiet', False):
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, force=True,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def envconfig_from_args(args, tie_break='lcg'):
    d = read_config_file(args.config) if args.config else {}
    d.setdefault('means', DEFAULT_MEANS)
    d.setdefault('tie_break', tie_break)
    flags = {'means': args.means, 'seed': args.seed, 'q': args.q, 'T': args.steps,
             'window': args.window, 'index_mode': args.index_mode, 'tie_break': args.tie_break,
             'uniform_bound': args.uniform_bound}
    if args.steps is not None:
        d.pop('steps', None)
    d.update({k: v for k, v in flags.items() if v is not None})
    return envconfig_from_dict(d)


def experimentconfig_from_args(args):
    d = read_config_file(args.config) if args.config else {}
    d['setting'] = args.setting
    if args.steps is not None:
        if args.setting == 'I':
            if len(args.steps) != 1:
                raise ZkucbError("Setting I takes a single horizon, got {"+str(args.steps)+"}.")
            d['T'] = args.steps[0]
        else:
            d['steps'] = args.steps
    flags = {'iterations': args.iterations, 'base_seed': args.seed, 'q_levels': args.q,
             'window': args.window, 'index_modes': args.index_mode, 'tie_break': args.tie_break,
             'backend': args.backend, 'uniform_bound': args.uniform_bound}
    d.update({k: v for k, v in flags.items() if v is not None})
    return ExperimentConfig.from_dict(d)


### COMMANDS ###
def cmd_simulate(args):
    trace = run_episode(envconfig_from_args(args, tie_break='lcg'))
    if args.out:
        write_trace(trace, args.out)
    else:
        sys.stdout.write(trace.to_json()+'\n')
    return EXIT_OK


def cmd_compile(args):
    cfg = envconfig_from_args(args, tie_break='lowest_index')
    cs = compile_trace_shape(cfg)
    path = args.out or get_r1cspath(cfg, makedirs=True)
    write_r1cs(cs, path)
    logger.info("Shape hash %s.", cs.shape_hash())
    return EXIT_OK


def cmd_witness(args):
    trace = open_trace(args.trace)
    cs = open_r1cs(args.r1cs) if args.r1cs else compile_trace_shape(trace.config)
    w = synthesize_witness(cs, trace, check=True)
    write_witness(w, args.out)
    if args.statement_out:
        write_statement(statement_from_trace(trace), args.statement_out)
    return EXIT_OK


def cmd_setup(args):
    cs = open_r1cs(args.r1cs)
    pk, vk = setup(cs, args.backend)
    write_key(pk, args.pk)
    write_key(vk, args.vk)
    return EXIT_OK


def cmd_prove(args):
    pk = read_key(args.pk)
    cs = open_r1cs(args.r1cs)
    w = open_witness(args.witness)
    stmt = open_statement(args.statement) if args.statement else Statement.from_assignment(cs, w)
    proof = prove(pk, cs, stmt, w, args.backend or pk.backend)
    write_proof(proof, args.out)
    return EXIT_OK


def cmd_verify(args):
    vk = read_key(args.vk)
    stmt = open_statement(args.statement)
    proof = read_proof(args.proof)
    ok = verify(vk, stmt, proof, args.backend or vk.backend)
    logger.info("Verification %s.", 'succeeded' if ok else 'failed')
    return EXIT_OK if ok else EXIT_REJECTED


def cmd_bench(args):
    cfg = experimentconfig_from_args(args)
    if cfg.setting == 'I':
        table = setting1_table(run_setting1(cfg))
        name = 'setting1'
    else:
        table = setting2_table(run_setting2(cfg))
        name = 'setting2'
    path = args.out or get_benchpath(cfg.setting, makedirs=True)
    write_csv(table, path, meta=cfg.to_dict())
    render_plot(table, args.plot or get_plotpath(name, makedirs=True))
    return EXIT_OK


def cmd_plot(args):
    render_plot(read_csv(args.csv), args.out)
    return EXIT_OK


COMMANDS = {'simulate': cmd_simulate,
            'compile': cmd_compile,
            'witness': cmd_witness,
            'setup': cmd_setup,
            'prove': cmd_prove,
            'verify': cmd_verify,
            'bench': cmd_bench,
            'plot': cmd_plot}


def cli_dispatch(argv):
    """Parse [argv] and run the command; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR
    configure_logging(args)
    try:
        return COMMANDS[args.command](args)
    except (ZkucbError, OSError) as e:
        logger.error("%s", e)
        print("zkucb "+args.command+": error: "+str(e), file=sys.stderr)
        return EXIT_ERROR


def main(argv=None):
    return cli_dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == '__main__':
    sys.exit(main())
