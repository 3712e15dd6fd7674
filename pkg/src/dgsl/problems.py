"""Semilinear problem definitions -Delta u + N(u) = g and the built-in
manufactured-solution registry.

In the solver's convention f(x, u) = g(x) - N(u), so the sign assumption
f_u <= 0 becomes N'(u) >= 0. All callbacks must broadcast over numpy
arrays.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class ExactSolution:
    """Manufactured solution with analytic gradient and Laplacian."""

    value: Callable
    gradient: Callable      # returns (du/dx, du/dy)
    laplacian: Callable


@dataclass(frozen=True)
class Problem:
    """One semilinear problem: nonlinearity, its derivative, and source."""

    name: str
    nonlinearity: Callable          # N(u)
    d_nonlinearity: Callable        # N'(u)
    source: Callable                # g(x, y)
    exact: Optional[ExactSolution] = None


def verify_manufactured(problem: Problem, n_points: int = 50, seed: int = 0,
                        tol: float = 1e-10) -> float:
    """Max |g - (-Delta u + N(u))| at random interior points.

    Raises ValueError when the problem has no exact solution attached or
    the discrepancy exceeds `tol`.
    """
    if problem.exact is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution")
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.05, 0.95, n_points)
    y = rng.uniform(0.05, 0.95, n_points)
    lhs = -problem.exact.laplacian(x, y) + problem.nonlinearity(problem.exact.value(x, y))
    gap = float(np.abs(problem.source(x, y) - lhs).max())
    if gap > tol:
        raise ValueError(
            f"problem {problem.name!r} is not manufactured-consistent: gap {gap:.3e}"
        )
    return gap


def _sine_problem():
    pi = np.pi

    def value(x, y):
        return np.sin(pi * x) * np.sin(pi * y)

    def gradient(x, y):
        return (pi * np.cos(pi * x) * np.sin(pi * y),
                pi * np.sin(pi * x) * np.cos(pi * y))

    def laplacian(x, y):
        return -2.0 * pi ** 2 * np.sin(pi * x) * np.sin(pi * y)

    def source(x, y):
        s = np.sin(pi * x) * np.sin(pi * y)
        return 2.0 * pi ** 2 * s + s ** 3

    return Problem(
        name="sine",
        nonlinearity=lambda u: u ** 3,
        d_nonlinearity=lambda u: 3.0 * u ** 2,
        source=source,
        exact=ExactSolution(value, gradient, laplacian),
    )


_REGISTRY = {"sine": _sine_problem()}


def register_problem(problem: Problem):
    """Add a code-defined problem to the registry (name must be new)."""
    if problem.name in _REGISTRY:
        raise ValueError(f"problem {problem.name!r} already registered")
    _REGISTRY[problem.name] = problem


def get_problem(name: str) -> Problem:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown problem {name!r}; registered: {sorted(_REGISTRY)}"
        ) from None


def problem_names():
    return sorted(_REGISTRY)
