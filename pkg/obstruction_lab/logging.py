# coding: utf-8
from __future__ import absolute_import, division, print_function, unicode_literals

import time
from contextlib import contextmanager

from . import click

# spaces per nesting level of timed blocks
INDENT = 2


class LogContext(object):
    """Diagnostics on stderr; stdout belongs to the report table.

    Messages logged inside :meth:`timed` blocks are indented by nesting
    depth so the operator chain behind a slow step stays readable at ``-v``.
    """

    def __init__(self, verbosity=0):
        self.verbosity = verbosity
        self.depth = 0

    def log(self, message, **kwargs):
        kwargs.setdefault("err", True)
        prefix = " " * (INDENT * self.depth)
        click.secho(prefix + str(message), **kwargs)

    def debug(self, message, **kwargs):
        if self.verbosity >= 1:
            self.log(message, **kwargs)

    def info(self, message, **kwargs):
        if self.verbosity >= 0:
            self.log(message, **kwargs)

    def warning(self, message, **kwargs):
        kwargs.setdefault("fg", "yellow")
        self.log(message, **kwargs)

    def error(self, message, **kwargs):
        kwargs.setdefault("fg", "red")
        self.log(message, **kwargs)

    @contextmanager
    def timed(self, label):
        """Time the wrapped block; nested messages are indented one level."""
        start = time.time()
        self.debug(label)
        self.depth += 1
        try:
            yield
        finally:
            self.depth -= 1
        self.debug("{} took {:.2f}s".format(label, time.time() - start))


log = LogContext()
