"""Dependence and cardinality information-flow analysis of a small
while-language, with an exhaustive hypercollecting-semantics oracle."""

from importlib import resources

from .lang import parse_program

__all__ = ["parse_program", "listing"]


def listing(name: str) -> str:
    """Source text of a bundled example program, e.g. ``listing("listing1")``."""
    return resources.files(__package__).joinpath("listings", f"{name}.hf").read_text(encoding="utf-8")
