"""Reclamation scheme registry."""
from __future__ import annotations

from stampit.schemes.stamp import StampItScheme
from stampit.schemes.hazard import HazardPointerScheme
from stampit.schemes.epoch import EpochScheme
from stampit.schemes.quiescent import QuiescentStateScheme

SCHEME_NAMES = ("stamp-it", "hpr", "er", "ner", "qsr")


def make_scheme(name: str, **kwargs):
    """Instantiate a scheme by its CLI name."""
    if name == "stamp-it":
        return StampItScheme(**kwargs)
    if name == "hpr":
        return HazardPointerScheme(**kwargs)
    if name == "er":
        return EpochScheme(explicit_regions=False, **kwargs)
    if name == "ner":
        return EpochScheme(explicit_regions=True, **kwargs)
    if name == "qsr":
        return QuiescentStateScheme(**kwargs)
    raise ValueError(f"unknown scheme {name!r}; expected one of {SCHEME_NAMES}")


__all__ = [
    "SCHEME_NAMES",
    "make_scheme",
    "StampItScheme",
    "HazardPointerScheme",
    "EpochScheme",
    "QuiescentStateScheme",
]
