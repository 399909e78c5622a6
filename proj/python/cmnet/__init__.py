"""Python front end for the cmnet core.

Documents may be passed as dicts or lists, as a path to a JSON file, or as a
``builtin:`` spec. Every function returns plain Python data.
"""

import json

from . import _cmnet
from ._cmnet import CapExceededError, IoError, PreconditionError, SchemaError, SolverError

__version__ = _cmnet.__version__


def _arg(doc):
    if doc is None:
        return ""
    if isinstance(doc, (dict, list)):
        return json.dumps(doc)
    return str(doc)


def fig1_network():
    return json.loads(_cmnet.fig1_network())


def generate(family, size, colors=0):
    return json.loads(_cmnet.generate(family, size, colors))


def validate(network):
    return json.loads(_cmnet.validate(_arg(network)))


def pcolor(network, tuples=None, mode="exact"):
    return json.loads(_cmnet.pcolor(_arg(network), _arg(tuples), mode))


def patterns(network, tuples=None):
    return json.loads(_cmnet.patterns(_arg(network), _arg(tuples)))


def simulate(network, refinement=None, tuples=None):
    return json.loads(_cmnet.simulate(_arg(network), _arg(refinement), _arg(tuples)))


def finner(network, distribution, weights=None):
    return json.loads(_cmnet.finner(_arg(network), _arg(distribution), _arg(weights)))


def certify(network, refinement=None, tuples=None):
    return json.loads(_cmnet.certify(_arg(network), _arg(refinement), _arg(tuples)))


def search(network, tuples=None, seed=1, iterations=2000, restarts=4, budget_seconds=600.0,
           per_party=False, threads=0):
    return json.loads(_cmnet.search(_arg(network), _arg(tuples), seed, iterations, restarts,
                                    budget_seconds, per_party, threads))
