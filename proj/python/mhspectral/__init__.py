"""Eigenpairs of multi-homogeneous order-preserving maps."""

import json as _json

from ._mhspectral import (
    DomainError,
    Error,
    ParseError,
    hilbert_metric,
    is_irreducible,
    is_primitive,
    lipschitz_bound,
    perron_weights,
    spectral_radius,
    thompson_metric,
)
from . import _mhspectral

__all__ = [
    "DomainError", "Error", "ParseError", "analyze", "canonical", "certify", "graph",
    "hilbert_metric", "is_irreducible", "is_primitive", "lipschitz_bound", "perron_weights",
    "solve", "spectral_radius", "thompson_metric",
]


def _text(doc):
    if isinstance(doc, (str, bytes)):
        return doc.decode() if isinstance(doc, bytes) else doc
    return _json.dumps(doc)


def _run(command, instance, dual=False, seed=None, report=None):
    out = _mhspectral.run(command, _text(instance), dual, seed,
                          None if report is None else _text(report))
    return _json.loads(out)


def analyze(instance, dual=False):
    """Homogeneity matrix, spectral radius, regime and weights of an instance."""
    return _run("analyze", instance, dual=dual)


def solve(instance, seed=None):
    """Power method (or delta-continuation) report; ``exit_code`` mirrors the CLI."""
    return _run("solve", instance, seed=seed)


def graph(instance, dual=False):
    return _run("graph", instance, dual=dual)


def certify(instance, report=None, seed=None):
    """Uniqueness certificate; ``report`` reuses an earlier solve instead of re-solving."""
    return _run("certify", instance, seed=seed, report=report)


def canonical(instance):
    """Canonical JSON text with every default filled in."""
    return _mhspectral.canonical(_text(instance))
