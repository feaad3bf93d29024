"""Named matrix generators accepted wherever experiment files take a matrix.

Available: ``identity``, ``sg(theta, phi)`` (spin direction basis, d=2),
``rotation(theta)`` (real plane rotation, d=2) and ``qft(d)`` (discrete
Fourier basis). Arguments are plain floats.
"""
from __future__ import annotations

import re

import numpy as np

from .errors import DimensionMismatchError, UnknownGeneratorError

__all__ = ["generator", "sg_basis", "rotation", "qft_basis", "is_generator_expr"]

_CALL = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(([^)]*)\))?\s*$")


def sg_basis(theta: float, phi: float = 0.0) -> np.ndarray:
    """Direction basis for a two-outcome spin measurement at polar angles (theta, phi)."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array(
        [[c, -s * np.exp(-1j * phi)], [s * np.exp(1j * phi), c]], dtype=complex
    )


def rotation(theta: float) -> np.ndarray:
    """Real rotation of the plane by ``theta``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def qft_basis(d: int) -> np.ndarray:
    """Discrete Fourier basis: F[j, k] = exp(2*pi*i*j*k/d) / sqrt(d)."""
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


def is_generator_expr(value) -> bool:
    return isinstance(value, str)


def generator(expr: str, dim: int) -> np.ndarray:
    """Resolve a generator expression like ``"sg(1.5708, 0)"`` to a dim x dim matrix."""
    m = _CALL.match(expr)
    if not m:
        raise UnknownGeneratorError(f"malformed generator expression {expr!r}")
    name, argstr = m.group(1), m.group(2)
    try:
        args = [float(tok) for tok in argstr.split(",") if tok.strip()] if argstr else []
    except ValueError:
        raise UnknownGeneratorError(f"non-numeric argument in generator expression {expr!r}") from None

    if name == "identity":
        if args:
            raise UnknownGeneratorError("identity takes no arguments")
        return np.eye(dim, dtype=complex)
    if name == "sg":
        if len(args) not in (1, 2):
            raise UnknownGeneratorError("sg takes (theta[, phi])")
        if dim != 2:
            raise DimensionMismatchError(f"sg generator is 2x2 but context has d={dim}")
        return sg_basis(*args)
    if name == "rotation":
        if len(args) != 1:
            raise UnknownGeneratorError("rotation takes (theta)")
        if dim != 2:
            raise DimensionMismatchError(f"rotation generator is 2x2 but context has d={dim}")
        return rotation(args[0])
    if name == "qft":
        if len(args) not in (0, 1):
            raise UnknownGeneratorError("qft takes an optional dimension")
        if args and int(args[0]) != dim:
            raise DimensionMismatchError(f"qft({int(args[0])}) does not match context d={dim}")
        return qft_basis(dim)
    raise UnknownGeneratorError(f"unknown generator {name!r}")
