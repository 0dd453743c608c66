"""Desk-scale laboratory for computational entropy.

Explicit small joint distributions, exact threshold optimizers, rejection
predictors, Hadamard list decoding with errors and erasures, and the
inner-product key-recovery reduction, all checked against closed-form
oracles.
"""

__version__ = "0.1.0"

from . import bitlin, distmodel, hadamard, metricopt, predictor, condenser  # noqa: E402,F401

# entrolab.harness (configs, suites, CSV reports, CLI) is imported on demand;
# it pulls in click and matplotlib, which plain library use never needs.
