"""
CSV and SVG output for the experiment tables.

Figures are rendered with the Agg canvas and a fixed SVG hash salt and no date
stamp, so re-rendering a table gives byte-identical files.
"""

import json
import logging
import os

import numpy as np
import pandas as pd
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from zkucb.utils import ConfigError, FormatError

logger = logging.getLogger(__name__)

plt.rcParams['svg.hashsalt'] = 'zkucb'
plt.rcParams['svg.fonttype'] = 'none'
plt.rcParams['figure.dpi'] = 100
plt.rcParams['font.size'] = 9

TIMING_COLUMNS = ['setup_ms', 'compile_ms', 'witness_ms', 'prove_ms', 'verify_ms']
SIZE_COLUMNS = ['pk_bytes', 'vk_bytes', 'witness_bytes', 'proof_bytes']


def _check_table(table):
    if table is None or len(table) == 0:
        raise ConfigError("Cannot write an empty table.")


def _require_columns(table, columns):
    missing = [c for c in columns if c not in table.columns]
    if missing:
        raise ConfigError("Table lacks columns {"+", ".join(missing)+"}.")


def write_csv(table, path, meta=None):
    """
    Write [table] with its column order as given. With [meta] a JSON sidecar
    <path>.json records it (config, seed rule).
    """
    _check_table(table)
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    table.to_csv(path, index=False, na_rep='', float_format='%.10g', lineterminator='\n')
    if meta is not None:
        with open(path+'.json', 'w') as f:
            json.dump(meta, f, indent=1, sort_keys=True, default=str)
    logger.info("Table of %d rows written to %s.", len(table), path)


def read_csv(path):
    try:
        return pd.read_csv(path, keep_default_na=True)
    except (UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FormatError("Unreadable table {"+path+"}: "+str(e)) from e


def _series_label(algo, q):
    if pd.isna(q):
        return algo
    return algo+' q='+str(int(q))


def plot_rewards(table, ax):
    """Mean reward per step, one line per (algo, q) with a one-stderr band."""
    for (algo, q), group in table.groupby(['algo', 'q'], dropna=False, sort=False):
        group = group.sort_values('step')
        x = group['step'].to_numpy()
        y = group['mean_reward'].to_numpy(dtype=float)
        e = group['stderr'].to_numpy(dtype=float)
        line, = ax.plot(x, y, lw=1, label=_series_label(algo, q))
        ax.fill_between(x, y-e, y+e, color=line.get_color(), alpha=0.2, lw=0)
    ax.set_xlabel('step')
    ax.set_ylabel('mean reward')
    ax.legend(loc='lower right', frameon=False)


def plot_metric(table, column, ax):
    """[column] against steps, one line per q; an all-empty column is marked absent."""
    values = table[column].to_numpy(dtype=float)
    ax.set_title(column)
    ax.set_xlabel('steps')
    if np.all(np.isnan(values)):
        ax.text(0.5, 0.5, 'absent', ha='center', va='center', transform=ax.transAxes)
        return
    for q, group in table.groupby('q', sort=True):
        group = group.sort_values('steps')
        ax.plot(group['steps'], group[column].to_numpy(dtype=float), marker='o', ms=2, lw=1,
                label='q='+str(int(q)))
    ax.legend(frameon=False, fontsize=7)


def render_plot(table, path):
    """
    Render a setting I table (reward curves) or a setting II table (constraint
    count, phase timings and component sizes) to an SVG file.
    """
    _check_table(table)
    if 'mean_reward' in table.columns:
        _require_columns(table, ['algo', 'q', 'step', 'mean_reward', 'stderr'])
        fig, ax = plt.subplots(figsize=(6, 4))
        plot_rewards(table, ax)
    elif 'constraints' in table.columns:
        columns = ['constraints']+TIMING_COLUMNS+SIZE_COLUMNS
        _require_columns(table, ['q', 'steps']+columns)
        fig, axes = plt.subplots(3, 4, figsize=(14, 9))
        for ax, column in zip(axes.flat, columns):
            plot_metric(table, column, ax)
        for ax in axes.flat[len(columns):]:
            ax.set_visible(False)
        fig.tight_layout()
    else:
        raise ConfigError("Table columns {"+", ".join(table.columns)+"} match no known layout.")
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    logger.info("Figure written to %s.", path)
