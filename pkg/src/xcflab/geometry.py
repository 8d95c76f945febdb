"""Milnor-frame metrics and curvature of the unimodular 3-dimensional Lie groups.

A left-invariant metric is stored as its diagonal coefficients (A, B, C) in a
fixed Milnor frame, g = A f^1 f^1 + B f^2 f^2 + C f^3 f^3.  Sectional
curvatures are hard-coded per geometry; the cross curvature tensor is then
available through two independent routes (direct product of curvatures, and
inversion of the raised Einstein tensor).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import InvalidInputError, SingularTensorError


class Geometry(enum.Enum):
    """The five nontrivial unimodular geometries plus the flat abelian one.

    The value is the triple (c1, c2, c3) with [f_i, f_j] = c_k f_k circularly.
    """

    HEISENBERG = (2, 0, 0)
    SU2 = (2, 2, 2)
    E11 = (2, 0, -2)
    E2 = (2, 2, 0)
    SL2R = (-2, 2, 2)
    ABELIAN = (0, 0, 0)

    @property
    def bracket_constants(self) -> tuple[int, int, int]:
        return self.value

    @property
    def has_aux(self) -> bool:
        return self in _AUX_GEOMETRIES

    @classmethod
    def parse(cls, name) -> "Geometry":
        """Accept a Geometry or a case-insensitive name ('su2', 'E(1,1)', 'sl2r', ...)."""
        if isinstance(name, Geometry):
            return name
        if not isinstance(name, str):
            raise InvalidInputError(f"unsupported geometry: {name!r}")
        key = "".join(ch for ch in name.lower() if ch.isalnum())
        try:
            return _ALIASES[key]
        except KeyError:
            raise InvalidInputError(f"unsupported geometry: {name!r}") from None


_ALIASES = {
    "heisenberg": Geometry.HEISENBERG,
    "nil": Geometry.HEISENBERG,
    "su2": Geometry.SU2,
    "e11": Geometry.E11,
    "sol": Geometry.E11,
    "e2": Geometry.E2,
    "sl2r": Geometry.SL2R,
    "sl2": Geometry.SL2R,
    "abelian": Geometry.ABELIAN,
    "flat": Geometry.ABELIAN,
    "r3": Geometry.ABELIAN,
}

_AUX_GEOMETRIES = frozenset({Geometry.SU2, Geometry.E11, Geometry.E2, Geometry.SL2R})


@dataclass(frozen=True)
class MilnorMetric:
    """Diagonal metric coefficients in a Milnor frame; all strictly positive."""

    A: float
    B: float
    C: float

    def __post_init__(self):
        for name in ("A", "B", "C"):
            v = getattr(self, name)
            try:
                v = float(v)
            except (TypeError, ValueError):
                raise InvalidInputError(f"metric component {name}={v!r} is not a real number") from None
            if not (math.isfinite(v) and v > 0.0):
                raise InvalidInputError(f"metric component {name}={v!r} must be finite and > 0")
            object.__setattr__(self, name, v)

    def __iter__(self) -> Iterator[float]:
        yield self.A
        yield self.B
        yield self.C

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.A, self.B, self.C)

    def scaled(self, lam: float) -> "MilnorMetric":
        return MilnorMetric(lam * self.A, lam * self.B, lam * self.C)

    @classmethod
    def coerce(cls, m) -> "MilnorMetric":
        if isinstance(m, MilnorMetric):
            return m
        try:
            A, B, C = m
        except (TypeError, ValueError):
            raise InvalidInputError(f"expected three metric components, got {m!r}") from None
        return cls(A, B, C)


class SectionalCurvatures(NamedTuple):
    """k_i = K(f_j ^ f_k), circularly."""

    k1: float
    k2: float
    k3: float


class CrossCurvature(NamedTuple):
    """Components of h in the Milnor co-frame: h = h1 f^1 f^1 + h2 f^2 f^2 + h3 f^3 f^3."""

    h1: float
    h2: float
    h3: float


def _sectional_raw(geom: Geometry, A: float, B: float, C: float) -> tuple[float, float, float]:
    P = A * B * C
    if geom is Geometry.HEISENBERG:
        k = A / (B * C)
        return (-3.0 * k, k, k)
    if geom is Geometry.SU2:
        return (
            (B - C) ** 2 / P - 3.0 * A / (B * C) + 2.0 / B + 2.0 / C,
            (C - A) ** 2 / P - 3.0 * B / (C * A) + 2.0 / A + 2.0 / C,
            (A - B) ** 2 / P - 3.0 * C / (A * B) + 2.0 / A + 2.0 / B,
        )
    if geom is Geometry.E11:
        return (
            ((A - C) ** 2 - 4.0 * A * A) / P,
            (A + C) ** 2 / P,
            ((A - C) ** 2 - 4.0 * C * C) / P,
        )
    if geom is Geometry.E2:
        return (
            (B - A) * (B + 3.0 * A) / P,
            (A - B) * (A + 3.0 * B) / P,
            (A - B) ** 2 / P,
        )
    if geom is Geometry.SL2R:
        return (
            (-3.0 * A * A + B * B + C * C - 2.0 * B * C - 2.0 * A * C - 2.0 * A * B) / P,
            (-3.0 * B * B + A * A + C * C + 2.0 * B * C + 2.0 * A * C - 2.0 * A * B) / P,
            (-3.0 * C * C + A * A + B * B + 2.0 * B * C - 2.0 * A * C + 2.0 * A * B) / P,
        )
    if geom is Geometry.ABELIAN:
        return (0.0, 0.0, 0.0)
    raise InvalidInputError(f"unsupported geometry: {geom!r}")


def sectional_curvatures(geom, m) -> SectionalCurvatures:
    """Principal sectional curvatures (k1, k2, k3) of a left-invariant metric.

    >>> sectional_curvatures("heisenberg", (1, 1, 1))
    SectionalCurvatures(k1=-3.0, k2=1.0, k3=1.0)
    """
    geom = Geometry.parse(geom)
    m = MilnorMetric.coerce(m)
    return SectionalCurvatures(*_sectional_raw(geom, m.A, m.B, m.C))


def scalar_curvature(geom, m) -> float:
    """R = 2 (k1 + k2 + k3)."""
    k = sectional_curvatures(geom, m)
    return 2.0 * (k.k1 + k.k2 + k.k3)


def cross_curvature(geom, m) -> CrossCurvature:
    """Cross curvature in the Milnor co-frame, h_i = g_ii k_j k_l.

    Defined for every metric, including those with vanishing curvatures.
    """
    m = MilnorMetric.coerce(m)
    k1, k2, k3 = sectional_curvatures(geom, m)
    return CrossCurvature(m.A * k2 * k3, m.B * k3 * k1, m.C * k1 * k2)


def cross_curvature_via_einstein(m, k) -> CrossCurvature:
    """Cross curvature from the inverse of the raised Einstein tensor.

    Builds the Ricci tensor of the Milnor frame from R_ii = k_j + k_l
    (orthonormal), forms P^{ij} = g^{ik} g^{jl} R_kl - R g^{ij} / 2, inverts it
    and scales by det P / det g^{-1}.  Works with full 3x3 matrices, so it is an
    independent check of :func:`cross_curvature`.

    Raises
    ------
    SingularTensorError
        If some k_i vanishes (P is then not invertible).
    """
    m = MilnorMetric.coerce(m)
    k = np.asarray(tuple(k), dtype=float)
    if k.shape != (3,) or not np.all(np.isfinite(k)):
        raise InvalidInputError(f"expected three finite curvatures, got {k!r}")
    if np.any(k == 0.0):
        raise SingularTensorError("Einstein tensor is singular: a sectional curvature vanishes")

    g = np.diag(m.as_tuple())
    g_inv = np.linalg.inv(g)
    ric_on = np.array([k[1] + k[2], k[2] + k[0], k[0] + k[1]])
    # orthonormal e_i = f_i / sqrt(g_ii), so Ric(f_i, f_i) = g_ii * Ric(e_i, e_i)
    ric = g @ np.diag(ric_on)
    R = float(np.trace(g_inv @ ric))
    P = g_inv @ ric @ g_inv - 0.5 * R * g_inv
    try:
        V = np.linalg.inv(P)
    except np.linalg.LinAlgError as exc:
        raise SingularTensorError(str(exc)) from exc
    h = (np.linalg.det(P) / np.linalg.det(g_inv)) * V
    return CrossCurvature(float(h[0, 0]), float(h[1, 1]), float(h[2, 2]))
