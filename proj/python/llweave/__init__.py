"""Service composition by linear-logic proof search, with pi-calculus extraction and simulation."""

import json as _json

from ._core import (
    Composition,
    Formula,
    LlweaveError,
    Process,
    ProcessDef,
    Sequent,
    ServiceSpec,
    StepSession as _StepSession,
    Theorem,
    assemble,
    assume,
    ax,
    client,
    compose,
    cut,
    edge_report_dot,
    encode,
    identity_expand,
    instantiate,
    load_registry,
    load_request,
    par,
    plus_l,
    plus_r,
    run_trace,
    stub,
    tensor,
    with_,
)

__all__ = [
    "Composition", "Formula", "LlweaveError", "Process", "ProcessDef", "Sequent", "ServiceSpec",
    "StepSession", "Theorem", "assemble", "assume", "ax", "client", "compose", "cut",
    "edge_report_dot", "encode", "identity_expand", "instantiate", "load_registry", "load_request",
    "par", "plus_l", "plus_r", "proof", "run", "stub", "stubs_for", "tensor", "with_",
]


def proof(theorem):
    """Proof tree of a theorem as nested dicts."""
    return _json.loads(theorem.proof_json())


def run(process, policy="first", seed=None, script=None, step_limit=10000):
    """Run to termination or deadlock and return the trace document."""
    return _json.loads(run_trace(process, policy, seed, script, step_limit))


def stubs_for(registry):
    return [stub(s) for s in registry]


class StepSession:
    """In-process counterpart of the step server: documents come back as dicts."""

    def __init__(self, initial):
        self._session = _StepSession(initial)

    def state(self):
        return _json.loads(self._session.state_json())

    def step(self, redex_id):
        return _json.loads(self._session.step_json(redex_id))

    def reset(self):
        return _json.loads(self._session.reset_json())
