# coding: utf-8
from __future__ import absolute_import, division, print_function, unicode_literals

import numpy as np

from .. import click
from ..expansion import expansion_data, sc_remainder_oracle
from ..fermi import fermi_chart
from ..obstruction import compute, default_formula
from ..utils import within
from .options import build_config, common_options, geometry_for, run

# the residue of sigma_4 at n = 2 is this multiple of B_2
RESIDUE_FACTOR = -0.375


def build(scenario, config):
    geometry = geometry_for(scenario, config, "expansion")
    data = expansion_data(geometry, config.tol_rel)
    sc_remainder_oracle(geometry, config.tol_rel)
    chart = fermi_chart(geometry)
    checks = {
        "gauss_lemma": chart.gauss_lemma_residual(),
        "trace_volume": chart.trace_volume_residual(),
    }
    failures = [
        "{} (residual {:.3e})".format(name, value)
        for name, value in sorted(checks.items())
        if not within(value, 1.0, config.tol_abs, config.tol_rel)
    ]
    if geometry.n == 2:
        b2 = compute(geometry, default_formula(2))
        residual = np.abs(data.residue - RESIDUE_FACTOR * b2)
        checks["residue_law"] = residual
        if not within(residual, 1.0 + np.abs(b2), config.tol_abs, config.tol_rel):
            failures.append(
                "residue of sigma_4 != -3/8 B_2 (residual {:.3e})".format(
                    float(residual.max())
                )
            )
    payload = data.as_dict()
    payload["checks"] = checks
    return payload, failures


@click.command()
@common_options
def cli(**options):
    """Normal expansion data: h_(k), v_k, sigma_k and the remainder of S(g, sigma_F)."""
    run("expansion", build_config(options), build)
