"""Dispersion models evaluable on the real frequency axis and on the
positive imaginary axis, plus the derived complex refractive index.

All models are causal with the +i gamma damping convention, so that the
imaginary part of the refractive index describes attenuation. On the
imaginary axis every model gives a real permittivity >= 1. The perfect
mirror is a sentinel variant handled specially by the Fresnel amplitudes
(r_TE = -1, r_TM = +1 exactly) rather than as a large-permittivity limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class PerfectMirror:
    """Ideal mirror sentinel; has no finite permittivity."""


@dataclass(frozen=True)
class Plasma:
    """Lossless plasma: eps(w) = 1 - wp^2 / w^2."""

    omega_p: float

    def __post_init__(self):
        if self.omega_p < 0:
            raise ValueError("omega_p must be >= 0")


@dataclass(frozen=True)
class Drude:
    """Ohmic metal: eps(w) = 1 - wp^2 / (w (w + i gamma))."""

    omega_p: float
    gamma: float

    def __post_init__(self):
        if self.omega_p < 0 or self.gamma < 0:
            raise ValueError("rate parameters must be >= 0")


@dataclass(frozen=True)
class ConstantEps:
    """Non-dispersive dielectric with eps >= 1."""

    eps: float

    def __post_init__(self):
        if self.eps < 1:
            raise ValueError("constant permittivity must be >= 1")


@dataclass(frozen=True)
class Lorentz:
    """Single resonance: eps(w) = 1 + wp^2 / (w0^2 - w^2 - i gamma w)."""

    omega_p: float
    omega_0: float
    gamma: float

    def __post_init__(self):
        if self.omega_p < 0 or self.omega_0 < 0 or self.gamma < 0:
            raise ValueError("rate parameters must be >= 0")


MaterialModel = Union[PerfectMirror, Plasma, Drude, ConstantEps, Lorentz]

# The medium surrounding / separating the objects is described by the same
# dispersion models; vacuum is the unit dielectric.
Medium = MaterialModel

VACUUM = ConstantEps(1.0)


def eps_imag_axis(model, xi):
    """Permittivity at imaginary frequency, eps(i xi), real and >= 1.

    Parameters
    ----------
    model : MaterialModel
    xi : float or ndarray
        Imaginary frequency, rad/s, > 0.

    Returns
    -------
    float or ndarray
        PerfectMirror returns +inf as a sentinel.
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= 0):
        raise DomainError("imaginary frequency must be > 0")
    if isinstance(model, PerfectMirror):
        out = np.full_like(xi, math.inf)
    elif isinstance(model, Plasma):
        out = 1.0 + model.omega_p**2 / xi**2
    elif isinstance(model, Drude):
        out = 1.0 + model.omega_p**2 / (xi * (xi + model.gamma))
    elif isinstance(model, ConstantEps):
        out = np.full_like(xi, model.eps)
    elif isinstance(model, Lorentz):
        out = 1.0 + model.omega_p**2 / (
            model.omega_0**2 + xi**2 + model.gamma * xi
        )
    else:
        raise TypeError(f"unknown material model {model!r}")
    return out if out.ndim else float(out)


def eps_real_axis(model, omega):
    """Permittivity at (possibly complex) frequency with Im omega >= 0.

    Uses the causal forms with +i gamma damping; at omega = i xi this
    reduces to eps_imag_axis.
    """
    w = np.asarray(omega, dtype=complex)
    if np.any(w == 0):
        raise DomainError("frequency must be nonzero")
    if isinstance(model, PerfectMirror):
        raise DomainError("perfect mirror has no finite permittivity")
    if isinstance(model, Plasma):
        out = 1.0 - model.omega_p**2 / w**2
    elif isinstance(model, Drude):
        out = 1.0 - model.omega_p**2 / (w * (w + 1j * model.gamma))
    elif isinstance(model, ConstantEps):
        out = np.full_like(w, model.eps)
    elif isinstance(model, Lorentz):
        out = 1.0 + model.omega_p**2 / (
            model.omega_0**2 - w**2 - 1j * model.gamma * w
        )
    else:
        raise TypeError(f"unknown material model {model!r}")
    return out if out.ndim else complex(out)


def refractive_index(model, omega):
    """Complex refractive index n = sqrt(eps) with Im n >= 0 (attenuation).

    On the imaginary axis (omega = i xi) the result is real and >= 1.

    Raises
    ------
    DomainError
        For the PerfectMirror sentinel or omega = 0.
    """
    eps = eps_real_axis(model, omega)
    n = np.sqrt(np.asarray(eps, dtype=complex))
    n = np.where(n.imag < 0, -n, n)
    return n if n.ndim else complex(n)


def is_dissipative(model):
    """True when the model has a strictly positive damping rate."""
    return (isinstance(model, Drude) or isinstance(model, Lorentz)) and model.gamma > 0


def material_from_dict(spec):
    """Build a material from a config mapping, e.g.
    {"model": "drude", "omega_p": 1.37e16, "gamma": 5.3e13}.

    Recognized models: perfect_mirror | plasma | drude | constant_eps |
    lorentz | vacuum.
    """
    if isinstance(spec, str):
        spec = {"model": spec}
    kind = spec.get("model", "").lower().replace("-", "_")
    try:
        if kind in ("perfect_mirror", "mirror", "ideal"):
            return PerfectMirror()
        if kind == "vacuum":
            return VACUUM
        if kind == "plasma":
            return Plasma(omega_p=float(spec["omega_p"]))
        if kind == "drude":
            return Drude(omega_p=float(spec["omega_p"]), gamma=float(spec["gamma"]))
        if kind in ("constant_eps", "dielectric"):
            return ConstantEps(eps=float(spec["eps"]))
        if kind == "lorentz":
            return Lorentz(
                omega_p=float(spec["omega_p"]),
                omega_0=float(spec["omega_0"]),
                gamma=float(spec["gamma"]),
            )
    except KeyError as exc:
        raise ValueError(f"material spec {spec!r} missing parameter {exc}") from exc
    raise ValueError(f"unknown material model {spec!r}")
