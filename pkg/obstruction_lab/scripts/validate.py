# coding: utf-8
from __future__ import absolute_import, division, print_function, unicode_literals

import sys

from .. import click
from ..exceptions import ObstructionLabError
from ..logging import log
from ..scenarios import validate_scenario
from ..writer import ReportWriter
from .options import parse_params


@click.command()
@click.option("-v", "--verbose", count=True, help="Show more output")
@click.option("-q", "--quiet", count=True, help="Give less output")
@click.option(
    "--param",
    "params",
    multiple=True,
    metavar="NAME=VALUE",
    help="Override a scenario parameter, e.g. --param a=1.0",
)
@click.option(
    "-o",
    "--json-out",
    type=click.Path(dir_okay=False, writable=True),
    default=None,
    help="Write the diagnostics (or the error record) here",
)
@click.argument("scenario")
def cli(verbose, quiet, params, json_out, scenario):
    """Parses a scenario, verifies its tags and reports the jet orders it needs."""
    log.verbosity = verbose - quiet
    writer = ReportWriter("validate", json_out)
    try:
        diagnostics = validate_scenario(scenario, parse_params(params))
    except ObstructionLabError as e:
        log.error(str(e))
        writer.write_error(e)
        sys.exit(e.exit_code)
    writer.context = {"scenario": diagnostics.pop("scenario")}
    writer.write(diagnostics)
    log.info(
        "{}: verified {}".format(
            scenario, ", ".join(diagnostics["verified"]) or "no tags"
        )
    )
