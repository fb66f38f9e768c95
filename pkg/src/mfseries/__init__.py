"""Numerical power series expansions of modular forms on Fuchsian groups.

Typical use::

    from mfseries.catalog import disc6_group
    from mfseries.fuchsian import compute_dirichlet_domain
    from mfseries.relations import ExpansionProblem
    from mfseries.pipeline import solve

    dom = compute_dirichlet_domain(disc6_group())
    res = solve(ExpansionProblem(dom, weight=4, N=35))
"""

from .mpnum import backend
from .pipeline import SolveOptions, solve
from .relations import ExpansionProblem

__version__ = "0.1.0"

__all__ = ["ExpansionProblem", "SolveOptions", "backend", "solve"]
