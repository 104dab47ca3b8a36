"""Travelling fronts and free-boundary dynamics for u_t = div(|grad u^m|^{p-2} grad u^m) + h(u)."""

__version__ = "0.1.0"

from .model import (
    Params,
    ReactionKind,
    ReactionSpec,
    make_reaction,
    reaction_stats,
    reduced_reaction,
    validate_params,
)

__all__ = [
    "Params",
    "ReactionKind",
    "ReactionSpec",
    "make_reaction",
    "reaction_stats",
    "reduced_reaction",
    "validate_params",
    "__version__",
]
