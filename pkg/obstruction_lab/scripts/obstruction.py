# coding: utf-8
from __future__ import absolute_import, division, print_function, unicode_literals

from .. import click
from ..obstruction import FORMULAS, build_report
from .options import build_config, check_known, common_options, geometry_for, run, split_list


def build(scenario, config, flip=False):
    geometry = geometry_for(scenario, config, "obstruction")
    report = build_report(
        geometry,
        config.formulas or None,
        scenario.conformal_factors,
        config.tol_abs,
        config.tol_rel,
        flip=flip,
    )
    return report.as_dict(), report.failures()


@click.command()
@common_options
@click.option(
    "-f",
    "--formulas",
    default=None,
    metavar="ID,ID",
    help="Only these formula ids (default: every applicable one)",
)
@click.option(
    "--flip",
    is_flag=True,
    default=False,
    help="Also check the parity of the default formula under a normal flip",
)
def cli(formulas, flip, **options):
    """Evaluates B_n through every applicable formula and compares them pairwise."""
    formulas = check_known(split_list(formulas), list(FORMULAS), "--formulas")
    config = build_config(options, formulas=formulas)
    run("obstruction", config, lambda scenario, config: build(scenario, config, flip))
