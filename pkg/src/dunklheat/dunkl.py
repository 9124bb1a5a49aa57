"""Rational calculus for the sign-flip reflection group on R^d.

The group is generated by the coordinate reflections sigma_j (negate the
j-th coordinate).  A nonnegative multiplicity kappa_j is attached to each
axis; kappa = 0 recovers the classical operators exactly (the reflection
terms vanish identically, not just numerically).

Differential parts are evaluated by central differences with Richardson
extrapolation; reflection difference quotients are evaluated exactly.
Near the reflecting hyperplane |x_j| < axis_threshold the quotients are
replaced by their Taylor limits:

    kappa_j/x_j * [f(x) - f(sigma_j x)]                  -> 2 kappa_j d_j f(x)
    kappa_j/x_j^2 * [2 x_j d_j f - f(x) + f(sigma_j x)]  -> 2 kappa_j d_jj f(x)

Scalar fields are plain callables mapping a coordinate array to a float;
they must be safe to call concurrently.  All operations here are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, EvaluationError

__all__ = [
    "DEFAULT_FD",
    "FdProtocol",
    "Multiplicity",
    "PSI_LOG",
    "PSI_SQUARE",
    "Psi",
    "dunkl_derivative",
    "dunkl_gradient",
    "dunkl_laplacian",
    "gradient",
    "laplacian",
    "partial_derivative",
    "pi_psi",
    "reflect",
    "second_derivative",
    "weight",
]

ScalarField = Callable[[np.ndarray], float]


@dataclass(frozen=True, eq=False)
class Multiplicity:
    """Per-axis multiplicities kappa_j >= 0 with cached total."""

    kappa: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.kappa, dtype=float))
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("kappa must be a non-empty vector")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise DomainError(f"multiplicities must be finite and >= 0, got {arr}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "kappa", arr)

    @classmethod
    def zero(cls, d: int) -> "Multiplicity":
        return cls(np.zeros(d))

    @classmethod
    def isotropic(cls, value: float, d: int) -> "Multiplicity":
        return cls(np.full(d, float(value)))

    @property
    def dim(self) -> int:
        return self.kappa.size

    @property
    def lambda_total(self) -> float:
        return float(self.kappa.sum())

    @property
    def homogeneous_dim(self) -> float:
        """d + 2 lambda, the exponent governing dilation of the measure."""
        return self.dim + 2.0 * self.lambda_total


@dataclass(frozen=True)
class FdProtocol:
    """Finite-difference protocol: step, Richardson depth, axis cutoff."""

    step: float = 1e-4
    richardson_levels: int = 2
    axis_threshold: float = 1e-5

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError("step must be positive")
        if self.richardson_levels < 1:
            raise DomainError("richardson_levels must be >= 1")
        if not self.axis_threshold > 0:
            raise DomainError("axis_threshold must be positive")


DEFAULT_FD = FdProtocol()


def _as_point(x) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise DomainError("points must be 1-d coordinate arrays")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"point has non-finite coordinates: {arr}")
    return arr


def _eval(f: ScalarField, x: np.ndarray) -> float:
    v = float(f(x))
    if not math.isfinite(v):
        raise EvaluationError(f"field returned {v!r} at x={x}")
    return v


def reflect(x, axis: int) -> np.ndarray:
    """Negate coordinate ``axis`` (0-based) of the point ``x``."""
    pt = _as_point(x)
    if not 0 <= axis < pt.size:
        raise DomainError(f"axis {axis} out of range for dimension {pt.size}")
    out = pt.copy()
    out[axis] = -out[axis]
    return out


def weight(x, mult: Multiplicity) -> float:
    """The reflection-invariant weight prod_j |x_j|^(2 kappa_j).

    Homogeneous of degree 2*lambda, so the induced measure scales with
    exponent d + 2*lambda under dilation.  Zero when any x_j = 0 with
    kappa_j > 0.
    """
    pt = _as_point(x)
    if pt.size != mult.dim:
        raise DomainError(f"point dimension {pt.size} != multiplicity dimension {mult.dim}")
    return float(np.prod(np.abs(pt) ** (2.0 * mult.kappa)))


def _richardson(samples):
    # Neville table in h^2 for a sequence at steps h, h/2, h/4, ...
    tab = list(samples)
    n = len(tab)
    for m in range(1, n):
        factor = 4.0 ** m
        for k in range(n - 1, m - 1, -1):
            tab[k] = (factor * tab[k] - tab[k - 1]) / (factor - 1.0)
    return tab[-1]


def _step_for(x: np.ndarray, axis: int, fd: FdProtocol) -> float:
    return fd.step * max(1.0, abs(float(x[axis])))


def partial_derivative(f: ScalarField, x, axis: int, fd: FdProtocol = DEFAULT_FD) -> float:
    """Classical d_j f(x) by central differences + Richardson."""
    pt = _as_point(x)
    if not 0 <= axis < pt.size:
        raise DomainError(f"axis {axis} out of range for dimension {pt.size}")
    h0 = _step_for(pt, axis, fd)
    samples = []
    e = np.zeros_like(pt)
    e[axis] = 1.0
    for level in range(fd.richardson_levels):
        h = h0 / 2.0 ** level
        samples.append((_eval(f, pt + h * e) - _eval(f, pt - h * e)) / (2.0 * h))
    return _richardson(samples)


def second_derivative(f: ScalarField, x, axis: int, fd: FdProtocol = DEFAULT_FD,
                      center: float | None = None) -> float:
    """Classical d_jj f(x) by central differences + Richardson."""
    pt = _as_point(x)
    if not 0 <= axis < pt.size:
        raise DomainError(f"axis {axis} out of range for dimension {pt.size}")
    h0 = _step_for(pt, axis, fd)
    f0 = _eval(f, pt) if center is None else center
    samples = []
    e = np.zeros_like(pt)
    e[axis] = 1.0
    for level in range(fd.richardson_levels):
        h = h0 / 2.0 ** level
        samples.append((_eval(f, pt + h * e) - 2.0 * f0 + _eval(f, pt - h * e)) / (h * h))
    return _richardson(samples)


def gradient(f: ScalarField, x, fd: FdProtocol = DEFAULT_FD) -> np.ndarray:
    """Classical gradient of ``f`` at ``x``."""
    pt = _as_point(x)
    return np.array([partial_derivative(f, pt, j, fd) for j in range(pt.size)])


def laplacian(f: ScalarField, x, fd: FdProtocol = DEFAULT_FD) -> float:
    """Classical Laplacian of ``f`` at ``x``."""
    pt = _as_point(x)
    f0 = _eval(f, pt)
    return math.fsum(second_derivative(f, pt, j, fd, center=f0) for j in range(pt.size))


def dunkl_derivative(f: ScalarField, axis: int, x, mult: Multiplicity,
                     fd: FdProtocol = DEFAULT_FD) -> float:
    """First-order operator d_j f(x) + kappa_j [f(x) - f(sigma_j x)] / x_j.

    The differential part uses central differences per ``fd``; the
    reflection quotient is exact, with the Taylor limit 2 kappa_j d_j f
    taking over for |x_j| below the axis threshold.
    """
    pt = _as_point(x)
    kappa = float(mult.kappa[axis]) if 0 <= axis < mult.dim else None
    smooth = partial_derivative(f, pt, axis, fd)
    if kappa is None:
        raise DomainError(f"axis {axis} out of range for dimension {mult.dim}")
    if kappa == 0.0:
        return smooth
    xj = float(pt[axis])
    if abs(xj) < fd.axis_threshold:
        return smooth * (1.0 + 2.0 * kappa)
    return smooth + kappa * (_eval(f, pt) - _eval(f, reflect(pt, axis))) / xj


def dunkl_gradient(f: ScalarField, x, mult: Multiplicity,
                   fd: FdProtocol = DEFAULT_FD) -> np.ndarray:
    pt = _as_point(x)
    if pt.size != mult.dim:
        raise DomainError(f"point dimension {pt.size} != multiplicity dimension {mult.dim}")
    return np.array([dunkl_derivative(f, j, pt, mult, fd) for j in range(pt.size)])


def dunkl_laplacian(f: ScalarField, x, mult: Multiplicity,
                    fd: FdProtocol = DEFAULT_FD) -> float:
    """Laplacian plus per-axis kappa_j/x_j^2 [2 x_j d_j f - f(x) + f(sigma_j x)].

    Second derivatives by central differences + Richardson; the bracket
    is exact away from the axes and switches to 2 kappa_j d_jj f within
    the axis threshold.  Reduces to the classical Laplacian when all
    multiplicities vanish.
    """
    pt = _as_point(x)
    if pt.size != mult.dim:
        raise DomainError(f"point dimension {pt.size} != multiplicity dimension {mult.dim}")
    f0 = _eval(f, pt)
    terms = []
    for j in range(pt.size):
        d2 = second_derivative(f, pt, j, fd, center=f0)
        terms.append(d2)
        kappa = float(mult.kappa[j])
        if kappa == 0.0:
            continue
        xj = float(pt[j])
        if abs(xj) < fd.axis_threshold:
            terms.append(2.0 * kappa * d2)
        else:
            d1 = partial_derivative(f, pt, j, fd)
            refl = _eval(f, reflect(pt, j))
            terms.append(kappa * (2.0 * xj * d1 - f0 + refl) / (xj * xj))
    return math.fsum(terms)


@dataclass(frozen=True)
class Psi(object):
    """A scalar function with its first two derivatives, for chain rules."""

    value: Callable[[float], float]
    d1: Callable[[float], float]
    d2: Callable[[float], float]
    requires_positive: bool = False
    name: str = "psi"


PSI_LOG = Psi(math.log, lambda t: 1.0 / t, lambda t: -1.0 / (t * t),
              requires_positive=True, name="log")
PSI_SQUARE = Psi(lambda t: t * t, lambda t: 2.0 * t, lambda t: 2.0, name="square")


def pi_psi(f: ScalarField, psi: Psi, x, mult: Multiplicity,
           fd: FdProtocol = DEFAULT_FD) -> float:
    """The chain-rule defect: sum_j kappa_j pi(f(sigma_j x), f(x)) / x_j^2,

    with pi(a, b) = psi(a) - psi(b) - psi'(b)(a - b).  (The root pairing
    contributes <alpha, x>^2 = 2 x_j^2 against 2 kappa_j, collapsing to
    kappa_j / x_j^2 per axis.)  Vanishes for reflection-invariant f and
    for affine psi; nonpositive for psi = log and positive f.  Within the
    axis threshold the limit 2 kappa_j psi''(f(x)) (d_j f)^2 is used.
    """
    pt = _as_point(x)
    if pt.size != mult.dim:
        raise DomainError(f"point dimension {pt.size} != multiplicity dimension {mult.dim}")
    fx = _eval(f, pt)
    if psi.requires_positive and fx <= 0.0:
        raise DomainError(f"psi={psi.name} requires positive field values, got f(x)={fx}")
    terms = []
    for j in range(pt.size):
        kappa = float(mult.kappa[j])
        if kappa == 0.0:
            continue
        xj = float(pt[j])
        if abs(xj) < fd.axis_threshold:
            d1 = partial_derivative(f, pt, j, fd)
            terms.append(2.0 * kappa * psi.d2(fx) * d1 * d1)
            continue
        fs = _eval(f, reflect(pt, j))
        if psi.requires_positive and fs <= 0.0:
            raise DomainError(
                f"psi={psi.name} requires positive field values, got f(sigma_{j} x)={fs}")
        pi_val = psi.value(fs) - psi.value(fx) - psi.d1(fx) * (fs - fx)
        terms.append(kappa * pi_val / (xj * xj))
    return math.fsum(terms)
