"""Python access to the SMATV simulation core.

Networks, scenarios and results are exchanged as the same JSON documents
the CLI and HTTP service use; this wrapper decodes them into dicts.
"""

import json

from . import _smatv
from ._smatv import SmatvError, cascade_cnr, power_to_level

__all__ = [
    "SmatvError",
    "builtin_catalog",
    "cascade_cnr",
    "case_study",
    "optimize",
    "power_to_level",
    "simulate",
    "sweep",
    "validate",
]


def _text(network):
    return network if isinstance(network, str) else json.dumps(network)


def _scenario(scenario):
    return "" if scenario is None else json.dumps(scenario)


def case_study():
    return json.loads(_smatv.case_study())


def builtin_catalog():
    return json.loads(_smatv.builtin_catalog())


def validate(network):
    return json.loads(_smatv.validate(_text(network)))


def simulate(network, scenario=None):
    return json.loads(_smatv.simulate(_text(network), _scenario(scenario)))


def sweep(network, line="TERR", levels=(50, 60, 70, 80, 90), scenario=None):
    return json.loads(_smatv.sweep(_text(network), line, list(levels), _scenario(scenario)))


def optimize(network, budget=100000, seed=1, scenario=None):
    return json.loads(_smatv.optimize(_text(network), budget, seed, _scenario(scenario)))
