"""Envy-free and proportional convex partitions of sampled measures.

Thin JSON-friendly wrapper over the compiled core: dict in, dict out.
"""

import json as _json

from ._core import (
    FairspaceError,
    Measure,
    equalize_weights,
    make_measure,
)
from . import _core

__all__ = [
    "FairspaceError",
    "Measure",
    "make_measure",
    "measure",
    "equalize_weights",
    "solve_envy_free",
    "solve_levi",
    "solve_simultaneous",
    "solve_group_allocation",
    "solve_proportional",
    "verify",
    "render_svg",
]


def measure(spec):
    """Realize a measure from its spec dict (points / grid / gaussian-mixture)."""
    return _core.measure_from_json(_json.dumps(spec))


def solve_envy_free(space, measures, **kwargs):
    """space: delta-space dict; returns {partition, certificate, x, objective}."""
    return _json.loads(_core.solve_envy_free(_json.dumps(space), measures, **kwargs))


def solve_levi(cones, measures, alphas, **kwargs):
    """cones: partition dict whose cells share the apex at the origin."""
    return _json.loads(_core.solve_levi(_json.dumps(cones), measures, alphas, **kwargs))


def solve_simultaneous(base, groups, n, **kwargs):
    return _json.loads(_core.solve_simultaneous(base, groups, n, **kwargs))


def solve_group_allocation(base, groups, m, **kwargs):
    return _json.loads(_core.solve_group_allocation(base, groups, m, **kwargs))


def solve_proportional(base, groups, n, **kwargs):
    return _json.loads(_core.solve_proportional(base, groups, n, **kwargs))


def verify(partition, certificate, measures=(), base=None, groups=()):
    """Re-check every certificate claim; returns (ok, violations)."""
    ok, violations = _core.verify(
        _json.dumps(partition),
        _json.dumps(certificate),
        list(measures),
        base,
        [list(g) for g in groups],
    )
    return ok, list(violations)


def render_svg(partition, measures=(), labels=()):
    return _core.render_svg(_json.dumps(partition), list(measures), list(labels))
