"""Built-in model catalog.

The catalog ships one canonical representative per workspace family (named
``<family>_<joint signature>``), a textbook planar two-link arm, and a set of
larger demo arms. Documents live as package data; extra documents can be
loaded from a directory at service start.
"""

from __future__ import annotations

from functools import cache
from importlib import resources
from pathlib import Path
from typing import Mapping

from .errors import ModelValidationError, UnknownModelError
from .model import RobotModel, load_model

__all__ = ["builtin_catalog", "catalog_by_name", "get_model", "load_models_dir"]


@cache
def builtin_catalog() -> tuple[RobotModel, ...]:
    """All built-in models, sorted by name."""
    root = resources.files("armsim").joinpath("models")
    models = []
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            models.append(load_model(entry.read_text(encoding="utf-8")))
    return tuple(models)


@cache
def catalog_by_name() -> Mapping[str, RobotModel]:
    return {m.name: m for m in builtin_catalog()}


def get_model(name: str, extra: Mapping[str, RobotModel] | None = None) -> RobotModel:
    """Look up a model by name in the catalog plus an optional extra mapping."""
    if extra is not None and name in extra:
        return extra[name]
    try:
        return catalog_by_name()[name]
    except KeyError:
        known = sorted(set(catalog_by_name()) | set(extra or ()))
        raise UnknownModelError(
            f"unknown model {name!r}; available: {', '.join(known)}"
        ) from None


def load_models_dir(path: str | Path) -> dict[str, RobotModel]:
    """Load every *.json model document in a directory, keyed by model name."""
    directory = Path(path)
    if not directory.is_dir():
        raise ModelValidationError(f"models directory {str(directory)!r} does not exist")
    out: dict[str, RobotModel] = {}
    for file in sorted(directory.glob("*.json")):
        model = load_model(file.read_text(encoding="utf-8"))
        if model.name in out:
            raise ModelValidationError(
                f"duplicate model name {model.name!r} in {str(directory)!r}"
            )
        out[model.name] = model
    return out
