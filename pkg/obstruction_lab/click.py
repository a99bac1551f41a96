from __future__ import absolute_import

import click
from click import *  # noqa
