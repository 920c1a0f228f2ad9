"""Radial interaction kernels with compact support and unit mass."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import simpson

from .errors import ZeroMass

PROFILES = ("box", "tent", "gaussian", "table")

# Simpson subintervals used for normalization; even, so r = 0 is a panel boundary.
NORMALIZATION_PANELS = 4096


def _raw_profile(profile, r, radius, height, sigma, samples):
    r = np.abs(np.asarray(r, dtype=float))
    inside = r <= radius
    if profile == "box":
        vals = np.full_like(r, height)
    elif profile == "tent":
        vals = height * (1.0 - r / radius)
    elif profile == "gaussian":
        vals = height * np.exp(-0.5 * (r / sigma) ** 2)
    elif profile == "table":
        rs, ks = samples
        vals = np.interp(r, rs, ks, right=0.0)
    else:
        raise ValueError(f"unknown kernel profile {profile!r}")
    return np.where(inside, vals, 0.0)


@dataclass(frozen=True)
class Kernel:
    """A radial kernel ``K(r) = norm_const * raw(|r|)`` supported in ``[-radius, radius]``.

    Build instances with :func:`normalize` (or :func:`make_kernel`); the constructor
    does not check unit mass.
    """

    profile: str
    radius: float
    norm_const: float
    sigma: float | None = None
    samples: tuple | None = field(default=None, repr=False)
    height: float = 1.0

    def __call__(self, r):
        return eval_kernel(self, r)

    @property
    def peak(self):
        return float(eval_kernel(self, 0.0))

    def scaled(self, factor):
        """Kernel multiplied by ``factor``; unit mass no longer holds."""
        return replace(self, norm_const=self.norm_const * factor)

    def mass(self, panels=NORMALIZATION_PANELS):
        r = np.linspace(-self.radius, self.radius, panels + 1)
        return float(simpson(eval_kernel(self, r), x=r))

    def to_dict(self):
        d = {"profile": self.profile, "radius": self.radius}
        if self.sigma is not None:
            d["sigma"] = self.sigma
        if self.samples is not None:
            d["samples"] = [list(p) for p in zip(*self.samples)]
        if self.height != 1.0:
            d["height"] = self.height
        return d


def eval_kernel(kernel: Kernel, r):
    """K(|r|); vectorized, zero outside the support."""
    vals = kernel.norm_const * _raw_profile(
        kernel.profile, r, kernel.radius, kernel.height, kernel.sigma, kernel.samples
    )
    return vals if np.ndim(vals) else float(vals)


def normalize(profile, radius, *, sigma=None, samples=None, height=1.0) -> Kernel:
    """Scale a raw profile so that its integral over the real line is one.

    ``samples`` (table profiles only) is a sequence of ``(r, value)`` pairs with
    increasing ``r`` starting at 0; the profile is linearly interpolated between
    them and vanishes beyond the last one.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown kernel profile {profile!r}")
    radius = float(radius)
    if not radius > 0:
        raise ValueError("kernel radius must be positive")
    if profile == "gaussian":
        if sigma is None or not sigma > 0:
            raise ValueError("gaussian profile needs sigma > 0")
        sigma = float(sigma)
    table = None
    if profile == "table":
        if samples is None or len(samples) < 2:
            raise ValueError("table profile needs at least two samples")
        rs = np.array([s[0] for s in samples], dtype=float)
        ks = np.array([s[1] for s in samples], dtype=float)
        if rs[0] != 0 or np.any(np.diff(rs) <= 0):
            raise ValueError("table radii must start at 0 and increase strictly")
        if np.any(ks < 0):
            raise ValueError("table values must be nonnegative")
        table = (tuple(rs), tuple(ks))
    raw = Kernel(profile, radius, 1.0, sigma, table, float(height))
    mass = raw.mass()
    if mass <= 1e-14:
        raise ZeroMass(f"{profile} profile has mass {mass:.3g}")
    kernel = replace(raw, norm_const=1.0 / mass)
    if not kernel.peak > 0:
        raise ValueError("kernel must be positive at the origin")
    return kernel


def make_kernel(spec: dict) -> Kernel:
    """Kernel from its JSON description ``{"profile", "radius", "sigma"?, ...}``."""
    return normalize(
        spec["profile"],
        spec["radius"],
        sigma=spec.get("sigma"),
        samples=spec.get("samples"),
        height=spec.get("height", 1.0),
    )


def interval_distance(I, J):
    """dist between two intervals given as (lo, hi) pairs."""
    return max(0.0, J[0] - I[1], I[0] - J[1])


@dataclass
class HypothesisReport:
    passed: bool
    distance: float
    radius: float
    peak: float
    reasons: list = field(default_factory=list)


def validate_hypothesis(kernelJ: Kernel, partition) -> HypothesisReport:
    """Check that J is positive at 0 and reaches across the gap between A and B."""
    dist = interval_distance(partition.A, partition.B)
    peak = kernelJ.peak
    reasons = []
    if not dist < kernelJ.radius:
        reasons.append(f"dist(A,B) = {dist:g} is not below the J support radius {kernelJ.radius:g}")
    if not peak > 0:
        reasons.append("J(0) is not positive")
    return HypothesisReport(not reasons, dist, kernelJ.radius, peak, reasons)
