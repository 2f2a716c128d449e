"""Best-in-problem optimisers as published, one program per training landscape."""

from __future__ import annotations

from importlib import resources

from ..interpreter.program import Program, parse_program

FIXTURE_NAMES = ("f1", "f9", "f12", "f13", "f14")


def fixture_text(name: str) -> str:
    if name not in FIXTURE_NAMES:
        raise KeyError(f"no fixture for {name!r}; available: {', '.join(FIXTURE_NAMES)}")
    return resources.files(__name__).joinpath(f"{name}.push").read_text().strip()


def load_fixture(name: str) -> Program:
    return parse_program(fixture_text(name))
