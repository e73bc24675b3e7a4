"""Optimizer family: baselines, scalar auxiliary schemes, spectral schemes."""
from __future__ import annotations

from ..errors import ConfigError
from .base import Optimizer, StepInfo
from .baselines import Adam, AdamW, GradientDescent
from .muon import Muon
from .sav import Rsav, Sav, rsav_xi
from .spectral import SpecMuonPractical, SpecMuonTheory

_REGISTRY = {
    "gd": GradientDescent,
    "adam": Adam,
    "adamw": AdamW,
    "muon": Muon,
    "sav": Sav,
    "rsav": Rsav,
    "specmuon": SpecMuonPractical,
    "specmuon-theory": SpecMuonTheory,
}


def optimizer_names() -> list[str]:
    return sorted(_REGISTRY)


def make_optimizer(name: str, problem, **hyper) -> Optimizer:
    """Instantiate a registered optimizer bound to ``problem``."""
    try:
        cls = _REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown optimizer {name!r}; known: {', '.join(optimizer_names())}") from None
    try:
        return cls(problem, **hyper)
    except TypeError as exc:
        raise ConfigError(f"bad hyperparameters for {name!r}: {exc}") from None


__all__ = [
    "Adam", "AdamW", "GradientDescent", "Muon", "Optimizer", "Rsav", "Sav",
    "SpecMuonPractical", "SpecMuonTheory", "StepInfo", "make_optimizer",
    "optimizer_names", "rsav_xi",
]
