# coding: utf-8
from __future__ import absolute_import, division, print_function, unicode_literals

from collections import OrderedDict

from .. import click
from ..functional import (
    DEFAULT_GRID,
    DEFAULT_T_STEPS,
    ClosedScenario,
    normal_variation,
    variation_pointwise,
)
from .options import build_config, common_options, geometry_for, parse_t_steps, run

POINTWISE_TOLERANCE = 1e-6


def build(scenario, config, pointwise=False):
    closed = ClosedScenario(scenario, grid=config.grid or DEFAULT_GRID)
    t_steps = config.t_steps or DEFAULT_T_STEPS
    report = normal_variation(closed, t_steps, scenario.conformal_factors)
    payload = report.as_dict()
    failures = report.failures()
    if pointwise:
        geometry = geometry_for(scenario, config, "variation")
        checks = variation_pointwise(geometry, closed.u, sorted(t_steps)[:2])
        payload["pointwise"] = OrderedDict(
            (key, check.as_dict()) for key, check in checks.items()
        )
        failures.extend(
            "{} (residual {:.3e})".format(check.quantity, check.residual)
            for check in checks.values()
            if not check.passed(POINTWISE_TOLERANCE)
        )
    return payload, failures


@click.command()
@common_options
@click.option(
    "--grid",
    type=click.IntRange(min=2),
    default=None,
    help="Nodes per axis of the quadrature grid (default {})".format(DEFAULT_GRID),
)
@click.option(
    "--t-steps",
    default=None,
    metavar="T,T",
    help="Geometric ladder of step sizes (default {})".format(
        ",".join(repr(t) for t in DEFAULT_T_STEPS)
    ),
)
@click.option(
    "--pointwise",
    is_flag=True,
    default=False,
    help="Also check var(h), var(L), var(H) and var(dvol) at the scenario's points",
)
def cli(grid, t_steps, pointwise, **options):
    """Checks the first variation of the energy on a closed scenario."""
    if grid is not None and grid % 2:
        raise click.BadParameter("must be even", param_hint="--grid")
    config = build_config(options, grid=grid, t_steps=parse_t_steps(t_steps))
    run("variation", config, lambda scenario, config: build(scenario, config, pointwise))
