# coding: utf-8
"""
Options every command shares, and the loop that turns a computation into a
report, an error record and an exit code.
"""
from __future__ import absolute_import, division, print_function, unicode_literals

import sys

from .. import click
from ..exceptions import NumericalCheckError, ObstructionLabError
from ..logging import log
from ..scenarios import load_scenario, sample_points
from ..utils import RunConfig
from ..writer import ReportWriter

JET_ORDER_ENV = "OBSTRUCTION_LAB_JET_ORDER"


def split_list(value):
    """
    >>> split_list("b3_final, b3_volume")
    ['b3_final', 'b3_volume']
    >>> split_list(None)
    []
    """
    if not value:
        return []
    return [item.strip() for item in value.split(",") if item.strip()]


def _param_value(raw):
    try:
        return float(raw)
    except ValueError:
        return raw


def parse_params(values, **shortcuts):
    """``NAME=VALUE`` pairs; numbers become floats, anything else stays an expression.

    >>> sorted(parse_params(["a=2", "F=x1^2"], rho=None, eps=0.1).items())
    [('F', 'x1^2'), ('a', 2.0), ('eps', 0.1)]
    """
    params = {}
    for item in values:
        name, sep, raw = item.partition("=")
        if not sep or not name.strip() or not raw.strip():
            raise click.BadParameter(
                "expected NAME=VALUE, got {!r}".format(item), param_hint="--param"
            )
        params[name.strip()] = _param_value(raw.strip())
    for name, value in shortcuts.items():
        if value is not None:
            params[name] = value
    return params


def parse_t_steps(value):
    """
    >>> parse_t_steps("1e-3,2e-3")
    (0.001, 0.002)
    """
    try:
        steps = tuple(float(item) for item in split_list(value))
    except ValueError:
        raise click.BadParameter(
            "expected comma separated step sizes, got {!r}".format(value),
            param_hint="--t-steps",
        )
    if value and len(steps) < 2:
        raise click.BadParameter("need at least two step sizes", param_hint="--t-steps")
    if any(step <= 0 for step in steps):
        raise click.BadParameter("step sizes must be positive", param_hint="--t-steps")
    return steps


def check_known(values, known, param_hint):
    unknown = [value for value in values if value not in known]
    if unknown:
        raise click.BadParameter(
            "unknown id(s) {} (known: {})".format(
                ", ".join(unknown), ", ".join(known)
            ),
            param_hint=param_hint,
        )
    return values


def common_options(fn):
    """The scenario, tolerance, output and verbosity options of every command."""
    decorators = [
        click.option("-v", "--verbose", count=True, help="Show more output"),
        click.option("-q", "--quiet", count=True, help="Give less output"),
        click.option(
            "-s",
            "--scenario",
            required=True,
            help="Catalog scenario id or path of a scenario JSON document",
        ),
        click.option(
            "--param",
            "params",
            multiple=True,
            metavar="NAME=VALUE",
            help="Override a scenario parameter, e.g. --param a=1.0",
        ),
        click.option("--a", "a", type=float, default=None, help="Shortcut for --param a=A"),
        click.option(
            "--rho", "rho", type=float, default=None, help="Shortcut for --param rho=RHO"
        ),
        click.option(
            "--eps", "eps", type=float, default=None, help="Shortcut for --param eps=EPS"
        ),
        click.option(
            "--jet-order",
            type=int,
            default=6,
            show_default=True,
            envvar=JET_ORDER_ENV,
            help="Truncation order of the jets",
        ),
        click.option(
            "--tol-abs", type=float, default=1e-10, show_default=True,
            help="Absolute tolerance floor",
        ),
        click.option(
            "--tol-rel", type=float, default=1e-7, show_default=True,
            help="Relative tolerance",
        ),
        click.option(
            "--points",
            type=click.IntRange(min=1),
            default=None,
            help="Replace the scenario's points by this many sample points",
        ),
        click.option(
            "--orientation",
            type=click.Choice(["1", "-1"]),
            default="1",
            show_default=True,
            help="Flip the unit normal with -1",
        ),
        click.option(
            "-o",
            "--json-out",
            type=click.Path(dir_okay=False, writable=True),
            default=None,
            help="Write the JSON report (or the error record) here",
        ),
        click.option(
            "-n",
            "--dry-run",
            is_flag=True,
            help="Only print the report table, don't write any file",
        ),
    ]
    for decorator in reversed(decorators):
        fn = decorator(fn)
    return fn


def build_config(options, **extra):
    """A :class:`RunConfig` from the keyword arguments click passed to a command."""
    log.verbosity = options.pop("verbose") - options.pop("quiet")
    params = parse_params(
        options.pop("params"),
        a=options.pop("a"),
        rho=options.pop("rho"),
        eps=options.pop("eps"),
    )
    return RunConfig(
        options.pop("scenario"),
        params=params,
        jet_order=options.pop("jet_order"),
        tol_abs=options.pop("tol_abs"),
        tol_rel=options.pop("tol_rel"),
        json_path=options.pop("json_out"),
        points=options.pop("points"),
        orientation=int(options.pop("orientation")),
        dry_run=options.pop("dry_run"),
        **extra
    )


def load(config):
    scenario = load_scenario(config.scenario, config.params)
    if config.points is not None:
        scenario = scenario.with_points(sample_points(scenario.n, count=config.points))
    return scenario


def geometry_for(scenario, config, command):
    order = config.order_for(command, scenario.n)
    return scenario.geometry(order, orientation=config.orientation)


def run(kind, config, build):
    """Load the scenario, call ``build(scenario, config)`` and report.

    ``build`` returns the payload and the list of failed checks. Errors are
    logged, recorded and turned into their exit code; failed checks exit 1.
    """
    writer = ReportWriter(kind, config.json_path, config.dry_run)
    try:
        scenario = load(config)
        writer.context = {"scenario": scenario.as_dict(), "config": config.as_dict()}
        with log.timed(kind):
            payload, failures = build(scenario, config)
        if failures:
            writer.write(payload)
            raise NumericalCheckError(failures)
    except ObstructionLabError as e:
        log.error(str(e))
        if not isinstance(e, NumericalCheckError):
            writer.write_error(e)
        sys.exit(e.exit_code)
    writer.write(payload)
