import click

from obstruction_lab.scripts import expansion, identities, obstruction, run_all, stacks
from obstruction_lab.scripts import validate, variation


@click.group()
@click.version_option()
def cli():
    pass


cli.add_command(stacks.cli, "stacks")
cli.add_command(expansion.cli, "expansion")
cli.add_command(obstruction.cli, "obstruction")
cli.add_command(identities.cli, "identities")
cli.add_command(variation.cli, "variation")
cli.add_command(run_all.cli, "all")
cli.add_command(validate.cli, "validate")


# Enable ``python -m obstruction_lab ...``.
if __name__ == "__main__":  # pragma: no branch
    cli()
