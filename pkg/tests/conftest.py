import json

from click.testing import CliRunner
from pytest import fixture

from obstruction_lab.scenarios import from_catalog, sample_points

# small samples keep the jet arithmetic fast
POINTS = 3


@fixture
def runner():
    cli_runner = CliRunner(mix_stderr=False)
    with cli_runner.isolated_filesystem():
        yield cli_runner


@fixture
def scenario():
    """Catalog scenario with a reduced point sample."""

    def _scenario(name, count=POINTS, **params):
        built = from_catalog(name, params)
        return built.with_points(sample_points(built.n, count=count))

    return _scenario


@fixture
def geometry(scenario):
    """Stacks of a catalog scenario, at the order the obstruction formulas need."""

    def _geometry(name, order=6, count=POINTS, orientation=1, **params):
        return scenario(name, count=count, **params).geometry(
            order, orientation=orientation
        )

    return _geometry


@fixture
def write_scenario():
    def _write(document, path="scenario.json"):
        with open(path, "w") as f:
            if isinstance(document, str):
                f.write(document)
            else:
                json.dump(document, f)
        return path

    return _write

