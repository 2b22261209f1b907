"""Rank-one symmetric space geometry in horospherical coordinates.

A space is fixed by its root multiplicities ``(m1, m2)``.  Points live in
N-bar x A coordinates ``(v, w, s)`` with ``v`` of length ``m1``, ``w`` of
length ``m2`` and ``s`` the geodesic coordinate along A.  The radial
coordinate ``t`` (distance to the origin) is recovered from

    cosh(t)^2 = (cosh(s) + e^s |v|^2)^2 + e^{2s} |w|^2,

and the two natural volume elements are the radial density
``sinh(t)^m1 sinh(2t)^m2`` and the horospherical weight ``e^{2 rho s}``.
All normalization constants are set to 1; downstream checks are either
ratio-based or pin their own constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


class UnsupportedSpaceError(ValueError):
    """An operation was asked for on a space where it is not defined."""


@dataclass(frozen=True)
class SpaceParams:
    """Root multiplicities and the derived half-sum norm.

    rho equals (m1 + 2*m2)/2 exactly; it is stored rather than recomputed
    so every module agrees on the value bit-for-bit.
    """

    m1: int
    m2: int
    rho: float

    def __post_init__(self):
        if self.m1 < 1:
            raise ValueError(f"m1 must be >= 1, got {self.m1}")
        if self.m2 < 0:
            raise ValueError(f"m2 must be >= 0, got {self.m2}")
        expected = (self.m1 + 2 * self.m2) / 2.0
        if self.rho != expected:
            raise ValueError(f"rho must equal (m1 + 2*m2)/2 = {expected}, got {self.rho}")


def make_space(m1: int, m2: int) -> SpaceParams:
    """Build the parameter object for the space with multiplicities (m1, m2)."""
    m1 = int(m1)
    m2 = int(m2)
    return SpaceParams(m1=m1, m2=m2, rho=(m1 + 2 * m2) / 2.0)


@dataclass(frozen=True, eq=False)
class IwasawaPoint:
    """A point n(v, w) a(s) in horospherical coordinates."""

    v: np.ndarray
    w: np.ndarray
    s: float


def make_point(sp: SpaceParams, v, w=(), s: float = 0.0) -> IwasawaPoint:
    """Coerce coordinates to arrays and validate their lengths against sp."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float)) if len(np.atleast_1d(w)) else np.zeros(0)
    if v.shape != (sp.m1,):
        raise ValueError(f"v must have length m1={sp.m1}, got shape {v.shape}")
    if w.shape != (sp.m2,):
        raise ValueError(f"w must have length m2={sp.m2}, got shape {w.shape}")
    return IwasawaPoint(v=v, w=w, s=float(s))


def acosh_from_cosh_sq(c2):
    """arccosh(sqrt(c2)) for c2 >= 1, stable when c2 is barely above 1.

    Uses arccosh(x) = log1p((x-1) + sqrt(x^2-1)) with x-1 computed as
    (c2-1)/(x+1) to avoid cancellation near the identity.
    """
    c2 = np.maximum(np.asarray(c2, dtype=float), 1.0)
    x = np.sqrt(c2)
    d = c2 - 1.0
    return np.log1p(d / (x + 1.0) + np.sqrt(d))


def cartan_radius_sq_components(v_norm_sq, w_norm_sq, s):
    """cosh(t)^2 from |v|^2, |w|^2 and s (vectorized)."""
    s = np.asarray(s, dtype=float)
    bracket = np.cosh(s) + np.exp(s) * np.asarray(v_norm_sq, dtype=float)
    return bracket * bracket + np.exp(2.0 * s) * np.asarray(w_norm_sq, dtype=float)


def cartan_radius_components(v_norm_sq, w_norm_sq, s):
    """Radial coordinate t from |v|^2, |w|^2 and s (vectorized)."""
    return acosh_from_cosh_sq(cartan_radius_sq_components(v_norm_sq, w_norm_sq, s))


def cartan_radius(sp: SpaceParams, p: IwasawaPoint) -> float:
    """Distance from the point to the origin."""
    v_sq = float(np.dot(p.v, p.v))
    w_sq = float(np.dot(p.w, p.w)) if sp.m2 else 0.0
    return float(cartan_radius_components(v_sq, w_sq, p.s))


def conjugate_by_a(p: IwasawaPoint, s0: float) -> IwasawaPoint:
    """Conjugation action of a(s0): scales v by e^{-s0} and w by e^{-2 s0}."""
    return IwasawaPoint(v=np.exp(-s0) * p.v, w=np.exp(-2.0 * s0) * p.w, s=p.s)


def distance(sp: SpaceParams, z: IwasawaPoint, zp: IwasawaPoint) -> float:
    """Geodesic distance between two points; real hyperbolic spaces only.

    The point-level group reduction z^{-1} z' = n(e^s (v'-v)) a(s'-s) needs
    the abelian group law on the v-factor, which holds only when m2 = 0.
    """
    if sp.m2 != 0:
        raise UnsupportedSpaceError(
            "point-level operations require m2 = 0 (real hyperbolic spaces)")
    u = np.exp(z.s) * (zp.v - z.v)
    return float(cartan_radius_components(float(np.dot(u, u)), 0.0, zp.s - z.s))


def radial_density(sp: SpaceParams, t):
    """Radial volume density sinh(t)^m1 * sinh(2t)^m2."""
    t = np.asarray(t, dtype=float)
    out = np.sinh(t) ** sp.m1
    if sp.m2:
        out = out * np.sinh(2.0 * t) ** sp.m2
    return out


def iwasawa_weight(sp: SpaceParams, s):
    """Horospherical volume weight e^{2 rho s}."""
    return np.exp(2.0 * sp.rho * np.asarray(s, dtype=float))


def ball_volume(sp: SpaceParams, r: float) -> float:
    """Volume of the ball of radius r about the origin (radial normalization).

    Computed by adaptive quadrature of the radial density; strictly
    increasing in r.
    """
    r = float(r)
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if r == 0.0:
        return 0.0
    val, _ = quad(lambda t: float(radial_density(sp, t)), 0.0, r, limit=200)
    return float(val)


def slice_radius(r, ds):
    """Half-width of the |u| section of a ball of radius r at A-offset ds.

    For m2 = 0 the set {u : d(o, n(u) a(ds)) < r} is the ball
    |u| < sqrt(e^{-ds} (cosh r - cosh ds)), empty when |ds| >= r.
    """
    r = np.asarray(r, dtype=float)
    ds = np.asarray(ds, dtype=float)
    gap = np.maximum(np.cosh(r) - np.cosh(ds), 0.0)
    return np.sqrt(np.exp(-ds) * gap)


def max_slice_radius(r):
    """Largest |u| section over all A-offsets: sinh(r)/sqrt(2)."""
    return math.sinh(float(r)) / math.sqrt(2.0)
