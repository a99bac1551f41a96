# coding: utf-8
from __future__ import absolute_import, division, print_function, unicode_literals

from collections import OrderedDict

from .. import click
from ..obstruction import FORMULAS
from . import expansion, identities, obstruction, stacks, variation
from .options import build_config, check_known, common_options, run, split_list

STEPS = OrderedDict(
    [
        ("stacks", stacks.build),
        ("expansion", expansion.build),
        ("obstruction", obstruction.build),
        ("identities", identities.build),
    ]
)


def build(scenario, config):
    payload = OrderedDict()
    failures = []
    steps = list(STEPS.items())
    if scenario.closed:
        steps.append(("variation", variation.build))
    for name, step in steps:
        payload[name], failed = step(scenario, config)
        failures.extend("{}: {}".format(name, failure) for failure in failed)
    return payload, failures


@click.command()
@common_options
@click.option(
    "-f",
    "--formulas",
    default=None,
    metavar="ID,ID",
    help="Only these formula ids (default: every applicable one)",
)
def cli(formulas, **options):
    """Runs every command on the scenario; closed scenarios include the variation check."""
    formulas = check_known(split_list(formulas), list(FORMULAS), "--formulas")
    run("all", build_config(options, formulas=formulas), build)
