#
# Copyright 2020 Taylor Petrick
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.
#

"""
Command line front end: expand, eval, diagnose and simulate.

Exit codes are 0 on success, 1 on a computation error and 2 on invalid
configuration or arguments.
"""

import argparse
import dataclasses
import io
import json
import os
import sys

from typing import Optional, Tuple

import numpy as np
import pandas as pd

from . import config as aee_config
from .diagnostics import LEFT, RIGHT, SIDES, invert_cdf, tail_scan
from .engine import (ONE_SAMPLE, BoundExpansion, Derivation,
    special_case_lambda_form, statistic_kind, KINDS)
from .errors import ComputeError, ConfigError
from .estimators import (R2_FORMS, ModeratedPrior, central_moments_from_data,
    load_moment_spec, one_sample_spec, two_sample_spec, MAX_DATA_ORDER)
from .logging import Logging
from .oracle import GeneratorSpec, empirical_cdf_at, sample_statistic
from .polynomial import SparsePoly
from .utils import parse_list, parse_number

# Default x grid for `simulate --compare`
COMPARE_GRID = [x / 2 for x in range(-8, 9)]

@dataclasses.dataclass
class CommandConfig():
    """
    Validated options of one invocation.
    """
    subcommand: str
    test: object
    order: int
    data: Tuple[str, ...] = ()
    moments: Optional[str] = None
    col: Optional[str] = None
    xs: Tuple[float, ...] = ()
    ps: Tuple[float, ...] = ()
    fmt: str = 'json'
    output: Optional[str] = None
    seed: int = 0
    reps: int = 0
    prior: Optional[ModeratedPrior] = None
    equal_variance: bool = False
    lambda_form: bool = False
    with_k_table: bool = False
    trace: bool = False
    step: Optional[float] = None
    width: Optional[float] = None
    dist: Optional[GeneratorSpec] = None
    sizes: Tuple[int, ...] = ()
    compare: bool = False

    @classmethod
    def from_args(cls, args, config):
        """
        Validates parsed arguments against the configuration.
        """

        kind = statistic_kind(args.test)
        limit = aee_config.max_order(config)
        lowest = 0 if args.command == 'expand' else 1
        if not lowest <= args.order <= limit:
            raise ConfigError("order must be in [{}, {}], got {}".format(
                lowest, limit, args.order))

        prior = None
        d0 = getattr(args, 'd0', None)
        s02 = getattr(args, 's02', None)
        if d0 is not None or s02 is not None:
            if d0 is None or s02 is None:
                raise ConfigError("--d0 and --s02 must be given together")
            prior = ModeratedPrior(_number(d0, '--d0'), _number(s02, '--s02'))
        if kind.estimator == 'moderated' and prior is None and \
                args.command != 'expand':
            raise ConfigError("{} needs --d0 and --s02".format(kind.token))

        options = dict(subcommand=args.command, test=kind, order=args.order,
            fmt=args.format, output=args.output, prior=prior,
            trace=getattr(args, 'trace', False))

        if args.command == 'expand':
            options.update(lambda_form=args.lambda_form,
                with_k_table=args.with_k_table)
            return cls(**options)

        if args.command in ('eval', 'diagnose'):
            data = tuple(args.data or ())
            if bool(data) == bool(args.moments):
                raise ConfigError("give exactly one of --data or --moments")
            expected = 1 if kind.arity == ONE_SAMPLE else 2
            if data and len(data) != expected:
                raise ConfigError("{} needs {} --data file(s)".format(
                    kind.token, expected))
            for path in data + ((args.moments,) if args.moments else ()):
                if not os.path.isfile(path):
                    raise ConfigError("input file not found: {}".format(path))
            options.update(data=data, moments=args.moments, col=args.col,
                equal_variance=args.equal_variance)

        if args.command == 'eval':
            xs = tuple(_list(args.x, '--x'))
            ps = tuple(_list(args.p, '--p'))
            if bool(xs) == bool(ps):
                raise ConfigError("give exactly one of --x or --p")
            if any(not 0 < p < 1 for p in ps):
                raise ConfigError("probabilities must be in (0, 1)")
            options.update(xs=xs, ps=ps)

        if args.command == 'diagnose':
            if args.step is not None and args.step <= 0:
                raise ConfigError("--step must be positive, got {}".format(
                    args.step))
            if args.width is not None and args.width <= 0:
                raise ConfigError("--width must be positive")
            options.update(step=args.step, width=args.width)

        if args.command == 'simulate':
            if args.reps < 1:
                raise ConfigError("--reps must be at least 1, got {}".format(
                    args.reps))
            if kind.arity == ONE_SAMPLE:
                if args.n is None:
                    raise ConfigError("{} needs --n".format(kind.token))
                sizes = (args.n,)
            else:
                if args.nx is None or args.ny is None:
                    raise ConfigError("{} needs --nx and --ny".format(kind.token))
                sizes = (args.nx, args.ny)
            if min(sizes) < 2:
                raise ConfigError("sample sizes must be at least 2")
            options.update(dist=GeneratorSpec.parse(args.dist), sizes=sizes,
                reps=args.reps, seed=args.seed, compare=args.compare,
                xs=tuple(_list(args.x, '--x')))

        return cls(**options)

def _number(text, flag):
    try:
        return parse_number(text)
    except ValueError:
        raise ConfigError("{} expects a number, got {!r}".format(flag, text))

def _list(text, flag):
    if not text:
        return []
    try:
        return parse_list(text)
    except ValueError:
        raise ConfigError("{} expects a comma separated list, got {!r}".format(
            flag, text))

def read_column(path, col=None):
    """
    Reads one numeric column from a CSV file with an optional header.

    Args:
        path: The CSV path.
        col: Column name or zero based index; required for multi-column
            files.

    Returns:
        A float numpy array.
    """

    if not os.path.isfile(path):
        raise ConfigError("data file not found: {}".format(path))
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skip_blank_lines=True)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as error:
        raise ConfigError("cannot read {}: {}".format(path, error))

    has_header = pd.to_numeric(frame.iloc[0], errors='coerce').isna().any()
    if has_header:
        frame.columns = [str(name).strip() for name in frame.iloc[0]]
        frame = frame.iloc[1:]

    if col is None:
        if frame.shape[1] != 1:
            raise ConfigError("{} has {} columns; choose one with --col".format(
                path, frame.shape[1]))
        column = frame.iloc[:, 0]
    elif has_header and col in frame.columns:
        column = frame[col]
    elif col.isdigit() and int(col) < frame.shape[1]:
        column = frame.iloc[:, int(col)]
    else:
        raise ConfigError("{} has no column {!r}".format(path, col))

    values = pd.to_numeric(column.str.strip(), errors='coerce')
    if values.isna().any():
        raise ConfigError("{} contains non-numeric values".format(path))
    return values.to_numpy(dtype=float)

def _emit(cfg, text):
    if cfg.output:
        with open(cfg.output, 'w', encoding='utf-8') as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)

def _json(payload):
    return json.dumps(payload, indent=2) + '\n'

def _csv(frame):
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format='%.17g')
    return buffer.getvalue()

def moment_samples(kind, document):
    """
    Checks a loaded moment-spec document against the statistic's arity.

    Returns:
        A tuple with one MomentSet per sample.
    """
    loaded = load_moment_spec(document)
    if kind.arity == ONE_SAMPLE:
        if isinstance(loaded, tuple):
            raise ConfigError("{} needs a one-sample moment spec".format(
                kind.token))
        samples = (loaded,)
    else:
        if not isinstance(loaded, tuple):
            raise ConfigError("{} needs a two-sample moment spec".format(
                kind.token))
        samples = loaded
    if any(ms.n_obs < 2 for ms in samples):
        raise ConfigError("moment spec needs \"n\" of at least 2")
    return samples

def bind_moments(kind, order, samples, derivation, prior=None,
        equal_variance=False):
    """
    Derives the expansion and binds it to the sample moments.

    Args:
        kind: StatisticKind.
        order: Number of correction terms K.
        samples: Tuple of MomentSet, one per sample.
        derivation: engine.Derivation used to obtain the expansion.
        prior: ModeratedPrior for moderated statistics.
        equal_variance: Whether equal variances were declared.

    Returns:
        (BoundExpansion, n)
    """

    if kind.arity == ONE_SAMPLE:
        ms, = samples
        spec = one_sample_spec(kind, ms.n_obs, ms.sigma2, prior)
        bindings = spec.bindings(ms)
    else:
        ms_x, ms_y = samples
        spec = two_sample_spec(kind, ms_x.n_obs, ms_y.n_obs, ms_x.sigma2,
            ms_y.sigma2, prior, equal_variance)
        bindings = spec.bindings(ms_x, ms_y)

    es = derivation.run(kind.arity, order)
    try:
        return BoundExpansion(es, bindings), float(spec.n)
    except SparsePoly.BindingError as error:
        raise ConfigError("input moments are incomplete: {}".format(error))

def _bound(cfg, config):
    if cfg.moments:
        with open(cfg.moments, encoding='utf-8') as handle:
            try:
                document = json.load(handle)
            except json.JSONDecodeError as error:
                raise ConfigError("cannot parse {}: {}".format(cfg.moments, error))
        samples = moment_samples(cfg.test, document)
    else:
        order = max(min(cfg.order + 2, MAX_DATA_ORDER), 4)
        samples = tuple(central_moments_from_data(
            read_column(path, cfg.col), order) for path in cfg.data)
    return bind_moments(cfg.test, cfg.order, samples, Derivation(config),
        cfg.prior, cfg.equal_variance)

def scan(config, bound, n, step=None, width=None):
    """
    Tail scan with the [diagnostics] defaults filling missing options.
    """
    step = step if step is not None else config.getfloat('diagnostics', 'step')
    width = width if width is not None else \
        config.getfloat('diagnostics', 'width')
    return tail_scan(bound, n, step=step, width=width,
        tolerance=config.getfloat('diagnostics', 'tolerance'))

def evaluate_rows(bound, n, report, xs=(), ps=(), tolerance=1e-10):
    """
    One row per x (CDF values) or per p (quantiles) with every truncation,
    the usable orders and the value at the usable order of the row's side.
    Quantiles that cannot be computed are None.
    """

    orders = {side: report.usable_order(side) for side in SIDES}
    rows = []
    for x in xs:
        values = [float(v) for v in bound.cumulative(n, x)]
        side = LEFT if x <= 0 else RIGHT
        rows.append({'x': x, 'terms': values, 'usable_order': orders,
            'selected': values[orders[side]]})

    for p in ps:
        quantiles = []
        for k in range(bound.order() + 1):
            try:
                quantiles.append(invert_cdf(bound, n, p, terms=k,
                    report=report, tolerance=tolerance))
            except ComputeError:
                quantiles.append(None)
        side = LEFT if p <= 0.5 else RIGHT
        rows.append({'p': p, 'terms': quantiles, 'usable_order': orders,
            'selected': quantiles[orders[side]]})
    return rows


def cmd_expand(cfg, config):
    """
    Writes the symbolic expansion.
    """
    kind = cfg.test
    es = Derivation(config).run(kind.arity, cfg.order)
    if cfg.lambda_form:
        if kind.ordinary:
            es = special_case_lambda_form(es, kind)
        else:
            Logging.get('cli').warning(
                "--lambda-form ignored for %s", kind.token)

    if cfg.fmt == 'text':
        lines = ['r2 = {}'.format(R2_FORMS[kind.token])]
        for k in range(1, es.order() + 1):
            lines.append('q{} = {}'.format(k, es.render_q(k)))
        if cfg.with_k_table and es.k_table() is not None:
            for (j, l), value in es.k_table().items():
                lines.append('k[{},{}] = {}'.format(j, l, value.render()))
        _emit(cfg, '\n'.join(lines) + '\n')
        return 0

    payload = es.to_json(R2_FORMS[kind.token], cfg.with_k_table)
    payload['test'] = kind.token
    _emit(cfg, _json(payload))
    return 0

def cmd_eval(cfg, config):
    """
    Evaluates the expansion at x values or inverts it at probabilities.
    """

    bound, n = _bound(cfg, config)
    report = scan(config, bound, n)
    rows = evaluate_rows(bound, n, report, cfg.xs, cfg.ps,
        config.getfloat('diagnostics', 'bisect_tol'))

    if cfg.fmt == 'csv':
        records = []
        for row in rows:
            record = {'x': row['x']} if 'x' in row else {'p': row['p']}
            for k, value in enumerate(row['terms']):
                record['term{}'.format(k)] = value
            record['usable_left'] = row['usable_order'][LEFT]
            record['usable_right'] = row['usable_order'][RIGHT]
            record['selected'] = row['selected']
            records.append(record)
        _emit(cfg, _csv(pd.DataFrame(records)))
    else:
        _emit(cfg, _json(rows))
    return 0

def cmd_diagnose(cfg, config):
    """
    Writes the tail report.
    """
    bound, n = _bound(cfg, config)
    report = scan(config, bound, n, cfg.step, cfg.width)
    _emit(cfg, _json(report.to_json()))
    return 0

def compare_table(cfg, config, empirical):
    """
    Deviation of every truncated expansion from the simulated CDF, with the
    expansion bound to the generator's exact moments.
    """

    kind = cfg.test
    ms = cfg.dist.moments()
    if kind.arity == ONE_SAMPLE:
        spec = one_sample_spec(kind, cfg.sizes[0], ms.sigma2, cfg.prior)
        bindings = spec.bindings(ms)
    else:
        spec = two_sample_spec(kind, cfg.sizes[0], cfg.sizes[1], ms.sigma2,
            ms.sigma2, cfg.prior, equal_variance=True)
        bindings = spec.bindings(ms, ms)

    es = Derivation(config).run(kind.arity, cfg.order)
    bound = BoundExpansion(es, bindings)
    n = float(spec.n)

    xs = np.array(cfg.xs or COMPARE_GRID, dtype=float)
    values = bound.cumulative(n, xs)
    frame = pd.DataFrame({'x': xs, 'empirical': empirical_cdf_at(empirical, xs)})
    for k in range(bound.order() + 1):
        frame['term{}'.format(k)] = values[k]
    for k in range(bound.order() + 1):
        frame['dev{}'.format(k)] = np.abs(values[k] - frame['empirical'])
    return frame

def cmd_simulate(cfg, config):
    """
    Simulates the statistic and optionally compares it with the expansions.
    """

    sizes = cfg.sizes
    empirical = sample_statistic(cfg.dist, cfg.test, sizes, cfg.reps,
        cfg.seed, config, cfg.prior)

    table = compare_table(cfg, config, empirical) if cfg.compare else None

    if cfg.output:
        empirical.dump_csv(cfg.output + '.csv')
        empirical.dump_metadata(cfg.output + '.json')
        if table is not None:
            table.to_csv(cfg.output + '_compare.csv', index=False,
                float_format='%.17g')
        return 0

    sys.stdout.write(_json(empirical.metadata))
    if table is not None:
        sys.stdout.write(_csv(table))
    return 0

COMMANDS = {
    'expand'    : cmd_expand,
    'eval'      : cmd_eval,
    'diagnose'  : cmd_diagnose,
    'simulate'  : cmd_simulate,
}

def build_parser():
    """
    Returns the argparse parser for all subcommands.
    """

    parser = argparse.ArgumentParser(
        description='Adjusted Edgeworth expansions for t-type statistics')
    parser.add_argument(
        '-c', '--config', dest='config', required=False,
        help='The path to an INI file containing configuration options')
    commands = parser.add_subparsers(dest='command', required=True)

    def common(sub, formats):
        sub.add_argument('--test', required=True, choices=sorted(KINDS),
            help='The statistic')
        sub.add_argument('--order', type=int, default=2,
            help='Number of correction terms K')
        sub.add_argument('--format', default='json', choices=formats,
            help='Output format')
        sub.add_argument('-o', '--output', default=None,
            help='Output path (or prefix for simulate); stdout when omitted')
        sub.add_argument('--d0', default=None,
            help='Prior degrees of freedom of a moderated statistic')
        sub.add_argument('--s02', default=None,
            help='Prior variance of a moderated statistic')
        sub.add_argument('--trace', action='store_true',
            help='Log derivation progress and counters to stderr')

    def inputs(sub):
        sub.add_argument('--data', action='append',
            help='CSV file with one sample; repeat for the y sample')
        sub.add_argument('--moments', default=None,
            help='Moment-spec JSON file')
        sub.add_argument('--col', default=None,
            help='Column name or index for multi-column CSV files')
        sub.add_argument('--equal-variance', action='store_true',
            help='Declare equal variances (required by two-pooled)')

    expand = commands.add_parser('expand', help='Derive the expansion')
    common(expand, ['json', 'text'])
    expand.add_argument('--lambda-form', action='store_true',
        help='Express one-sample ordinary statistics with standardized '
            'cumulants')
    expand.add_argument('--with-k-table', action='store_true',
        help='Include the cumulant coefficients k_{j,l}')

    evaluate = commands.add_parser('eval', help='Evaluate the expansion')
    common(evaluate, ['json', 'csv'])
    inputs(evaluate)
    evaluate.add_argument('--x', default=None, help='Comma separated x values')
    evaluate.add_argument('--p', default=None,
        help='Comma separated probabilities to invert')

    diagnose = commands.add_parser('diagnose', help='Run the tail diagnostic')
    common(diagnose, ['json'])
    inputs(diagnose)
    diagnose.add_argument('--step', type=float, default=None, help='Grid step')
    diagnose.add_argument('--width', type=float, default=None,
        help='Grid half width in units of r')

    simulate = commands.add_parser('simulate',
        help='Simulate the sampling distribution')
    common(simulate, ['json'])
    simulate.add_argument('--dist', required=True,
        help='Generator, e.g. gamma:3:1:centered, normal:0:1, '
            'discrete:-1,1:1/2,1/2')
    simulate.add_argument('--n', type=int, default=None,
        help='One-sample size')
    simulate.add_argument('--nx', type=int, default=None, help='x sample size')
    simulate.add_argument('--ny', type=int, default=None, help='y sample size')
    simulate.add_argument('--reps', type=int, default=100000,
        help='Number of replicates')
    simulate.add_argument('--seed', type=int, default=0, help='Base seed')
    simulate.add_argument('--compare', action='store_true',
        help='Emit the deviation table against the expansions')
    simulate.add_argument('--x', default=None,
        help='Comma separated x grid for --compare')

    return parser

def main(argv=None):
    """
    Runs one command and returns the process exit code.
    """

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return error.code

    log = None
    handler = None
    try:
        config = aee_config.load(args.config)
        log = Logging.create(config, Logging.ROOT, 'edgeworth')
        cfg = CommandConfig.from_args(args, config)

        if cfg.trace:
            handler = Logging.trace(log)

        return COMMANDS[cfg.subcommand](cfg, config)
    except ConfigError as error:
        sys.stderr.write("error: {}\n".format(error))
        return 2
    except ComputeError as error:
        if log is not None:
            log.error("%s failed: %s", args.command, error)
        sys.stderr.write("error: {}\n".format(error))
        return 1
    finally:
        if handler is not None:
            log.removeHandler(handler)
