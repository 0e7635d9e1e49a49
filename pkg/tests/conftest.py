import functools

from symred import cli
from symred.problem import load


@functools.lru_cache(maxsize=None)
def loaded(name):
    """Problem, kinematic report and state (basis, ansatz) for a bundled fixture."""
    p = load(name)
    report, state = cli.kinematic_part(p)
    return p, report, state
