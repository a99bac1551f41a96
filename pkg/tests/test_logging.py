import pytest
from pytest import raises

from obstruction_lab.logging import LogContext


@pytest.mark.parametrize(
    "verbosity, expected",
    [(-1, ["warn", "boom"]), (0, ["info", "warn", "boom"]), (1, ["debug", "info", "warn", "boom"])],
)
def test_verbosity_levels(capsys, verbosity, expected):
    log = LogContext(verbosity)
    log.debug("debug")
    log.info("info")
    log.warning("warn")
    log.error("boom")
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err.splitlines() == expected


def test_timed_blocks_indent_nested_messages(capsys):
    log = LogContext(verbosity=1)
    with log.timed("outer"):
        log.info("inside")
        with log.timed("inner"):
            log.info("deeper")
    lines = capsys.readouterr().err.splitlines()
    assert lines[0] == "outer"
    assert lines[1] == "  inside"
    assert lines[2] == "  inner"
    assert lines[3] == "    deeper"
    assert lines[4].startswith("  inner took ")
    assert lines[5].startswith("outer took ")
    assert log.depth == 0


def test_timed_restores_the_depth_on_errors(capsys):
    log = LogContext()
    with raises(ValueError):
        with log.timed("failing"):
            raise ValueError("no")
    log.info("after")
    assert capsys.readouterr().err.splitlines() == ["after"]
