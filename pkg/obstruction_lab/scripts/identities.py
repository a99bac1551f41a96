# coding: utf-8
from __future__ import absolute_import, division, print_function, unicode_literals

from .. import click
from ..identities import CATALOG, run_suite
from .options import build_config, check_known, common_options, geometry_for, run, split_list


def _describe(result):
    if result.normalized is None:
        detail = result.reason
    else:
        detail = "normalized residual {:.3e}".format(result.normalized)
    return "{} at {}: {}".format(result.identity_id, result.point, detail)


def build(scenario, config):
    geometry = geometry_for(scenario, config, "identities")
    report = run_suite([geometry], config.identities or None, config.tol_rel)
    return report.as_dict(), [_describe(result) for result in report.failed]


@click.command()
@common_options
@click.option(
    "-i",
    "--identities",
    default=None,
    metavar="ID,ID",
    help="Only these catalog entries (default: all of them)",
)
def cli(identities, **options):
    """Runs the identity catalog on the scenario."""
    identities = check_known(split_list(identities), list(CATALOG), "--identities")
    run("identities", build_config(options, identities=identities), build)
