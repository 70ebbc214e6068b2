"""Spectral shape optimization on finite metric measure spaces.

Thin wrapper over the compiled ``_mmshape`` module: grid builders, the
torsion boundary-value solver, Dirichlet eigenvalues and energy, capacity,
and the combinatorial domain optimizers. JSON-returning calls are decoded
into plain Python objects here.
"""

import json as _json

from ._mmshape import (  # noqa: F401
    ConfigError,
    Domain,
    ResourceError,
    Space,
    __version__,
    apply_gradient,
    capacity,
    dirichlet_energy,
    dirichlet_form,
    domain_of_points,
    eigenvalues,
    empty_domain,
    energy_set_reduce,
    full_domain,
    grid,
    is_in_h0,
    penalized_minimizer,
    quasi_support,
    sobolev_norm,
    solve_bvp,
    torsion,
)
from . import _mmshape as _native


def space_from_json(text):
    """Build a space from its JSON description (string or dict)."""
    if not isinstance(text, str):
        text = _json.dumps(text)
    return _native.space_from_json(text)


def audit_axioms(space, trials=200, seed=0):
    """Run the axiom audit and return the report as a dict."""
    return _json.loads(_native.audit_axioms(space, trials, seed))


def optimize(space, objective="phi", phi=None, c=1.0, method="local_search", seed=0,
             restarts=8, iters=30):
    """Minimise a spectral functional or the Dirichlet energy under a
    measure budget; returns the result record as a dict."""
    if phi is None:
        phi = {"kind": "single_k", "k": 1}
    out = _native.optimize(space, objective, _json.dumps(phi), c, method, seed, restarts,
                           iters)
    return _json.loads(out)


def run_experiment(config):
    """Run one experiment config (dict or JSON string); returns
    (result, manifest, out_dir)."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    result, manifest, out_dir = _native.run_experiment(config)
    return _json.loads(result), _json.loads(manifest), out_dir
