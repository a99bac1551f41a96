# coding: utf-8
from __future__ import absolute_import, division, print_function, unicode_literals

from collections import OrderedDict

import numpy as np

from .. import click
from ..ambient import cotton_from_ambient, symmetry_residuals, weyl_traces
from ..identities import run_suite
from ..utils import norm2, within
from .options import build_config, common_options, geometry_for, run

# cheap consistency checks between the two stacks
STACK_CHECKS = ("codazzi", "gauss_ambient")


def stack_values(geometry):
    s, a = geometry.surface, geometry.ambient
    values = OrderedDict(
        [
            ("H", s.H),
            ("norm_L2", s.norm_L2),
            ("norm_lo2", s.norm_lo2),
            ("scal", s.scal),
            ("J", s.J),
            ("scal_bar", a.scal),
            ("jbar", a.jbar),
            ("ric00", a.ric00),
        ]
    )
    if geometry.n == 2:
        values["K"] = s.K
    else:
        values["norm_W0"] = norm2(a.W0)
        values["tr_lo3"] = s.tr_lo3
    return values


def curvature_checks(ambient):
    """Algebraic residuals of the ambient curvature; all vanish up to round-off."""
    checks = OrderedDict(sorted(symmetry_residuals(ambient.riemann).items()))
    if ambient.dim == 4:
        checks["weyl_traces"] = weyl_traces(ambient.weyl)
        checks["cotton_paths"] = float(
            np.abs(ambient.cotton0 - cotton_from_ambient(ambient)).max()
        )
    return checks


def build(scenario, config):
    geometry = geometry_for(scenario, config, "stacks")
    identities = run_suite([geometry], STACK_CHECKS, tolerance=config.tol_rel)
    curvature = curvature_checks(geometry.ambient)
    scale = 1.0 + float(np.abs(geometry.ambient.riemann).max())
    payload = {
        "values": stack_values(geometry),
        "identities": identities.summary(),
        "curvature": curvature,
        "points": geometry.points,
    }
    failures = [
        "{} at {}".format(result.identity_id, result.point)
        for result in identities.failed
    ]
    failures.extend(
        "{} (residual {:.3e})".format(name, residual)
        for name, residual in curvature.items()
        if not within(residual, scale, config.tol_abs, config.tol_rel)
    )
    return payload, failures


@click.command()
@common_options
def cli(**options):
    """Evaluates the intrinsic, extrinsic and ambient stacks at the scenario's points."""
    run("stacks", build_config(options), build)
