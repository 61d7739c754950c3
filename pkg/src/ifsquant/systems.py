"""Built-in example systems, shipped as spec files.

``gamma3``     ratios 3^-j, masses 2^-j on [0,1], gapped placement; its
               quantization dimension is log 2 / log 3 for every order r.
``dyadic``     ratios and masses 2^-j; the images tile [0,1] with no gaps,
               so the system is flagged thermodynamics-only (beta(q) = 1-q,
               kappa_r = 1).
``disk-gamma`` the planar analogue of gamma3: sub-disks of the unit disk
               with ratios 3^-j and masses 2^-j.
``uniform4``   four maps of ratio 1/5 with equal masses; a finite sanity
               case with kappa_r = log 4 / log 5.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import ValidationError
from .specio import load_system

BUILTIN_NAMES = ("gamma3", "dyadic", "disk-gamma", "uniform4")


def builtin_path(name):
    if name not in BUILTIN_NAMES:
        raise ValidationError(f"unknown built-in system {name!r}; "
                              f"choose from {', '.join(BUILTIN_NAMES)}")
    return resources.files("ifsquant.data") / f"{name}.json"


def load_builtin(name):
    return load_system(builtin_path(name))


def resolve_system(spec):
    """A system from a file path or a built-in name."""
    p = Path(spec)
    if p.exists():
        return load_system(p)
    if spec in BUILTIN_NAMES:
        return load_builtin(spec)
    raise ValidationError(f"no such system file or built-in name: {spec!r}")
