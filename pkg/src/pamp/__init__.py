"""Mission planning against timed-automaton platform models.

Produces time-triggered plans that stay executable and safe on every
compliant platform run, either by solving one exists-forall query or by
refining candidate plans against counterexample traces.  Submodules load
lazily so lightweight entry points stay fast.
"""

_EXPORTS = {
    "DurativeAction": "model",
    "PAMPProblem": "model",
    "PlanEntry": "model",
    "TemporalPlanningProblem": "model",
    "TimeTriggeredPlan": "model",
    "TimedAutomaton": "model",
    "parse_problem_bundle": "formats",
    "serialize_problem_bundle": "formats",
    "parse_plan": "formats",
    "serialize_plan": "formats",
    "validate_plan": "texec",
    "solve": "engine",
    "SolveResult": "engine",
    "EngineConfig": "engine",
}

__all__ = sorted(_EXPORTS)


def __getattr__(name: str):
    module = _EXPORTS.get(name)
    if module is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    import importlib

    mod = importlib.import_module(f".{module}", __name__)
    value = getattr(mod, name)
    globals()[name] = value
    return value


def __dir__():
    return sorted(set(globals()) | set(_EXPORTS))
