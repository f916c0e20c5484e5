"""Boundary data v0(r) for the strip problem."""
import dataclasses

import numpy as np
import scipy.interpolate

from harmonicns.core import constants
from harmonicns.core.errors import ConfigError

KINDS = ("gaussian", "exp-decay", "constant", "zero", "custom")


@dataclasses.dataclass(frozen=True)
class BoundaryProfile:
    """Smooth boundary data on the line s = pi/2.

    Args:
        kind (str): One of ``KINDS``.
        amplitude (float): Overall scale.
        center (float): Shift in r, for the decaying kinds.
        width (float): Gaussian width, or inverse decay rate for ``exp-decay``.
        samples (tuple[tuple[float]] or None): ``(r, value)`` pairs for the
            ``custom`` kind, sorted in r, interpolated with a cubic spline and
            extended by zero; the first and last values must be zero.

    """

    kind: str = constants.DEFAULT_PROFILE_KIND
    amplitude: float = constants.DEFAULT_PROFILE_AMPLITUDE
    center: float = 0.
    width: float = constants.DEFAULT_PROFILE_WIDTH
    samples: tuple = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError("profile.kind", f"unknown profile {self.kind!r}")
        if self.width <= 0.:
            raise ConfigError("profile.width", "must be positive")
        if self.kind == "custom" and (self.samples is None
                                      or len(self.samples) < 4):
            raise ConfigError("profile.samples", "need at least 4 samples")
        if self.kind == "custom" and (self.samples[0][1] or self.samples[-1][1]):
            raise ConfigError("profile.samples",
                              "end samples must vanish to extend by zero")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        x = (r - self.center)/self.width
        if self.kind == "gaussian":
            values = self.amplitude*np.exp(-x*x)
        elif self.kind == "exp-decay":
            values = self.amplitude/np.cosh(x)
        elif self.kind == "constant":
            values = np.full_like(r, self.amplitude)
        elif self.kind == "zero":
            values = np.zeros_like(r)
        else:
            nodes, data = np.asarray(self.samples, dtype=float).T
            spline = scipy.interpolate.CubicSpline(nodes, data)
            inside = (r >= nodes[0]) & (r <= nodes[-1])
            values = np.where(inside, spline(np.clip(r, nodes[0], nodes[-1])), 0.)
        return values

    def scaled(self, factor):
        """Return the profile multiplied by ``factor``."""
        if self.kind == "custom":
            samples = tuple((r, factor*v) for r, v in self.samples)
            return dataclasses.replace(self, samples=samples)
        return dataclasses.replace(self, amplitude=factor*self.amplitude)

    @property
    def is_trivial(self):
        """bool: Whether the profile vanishes identically."""
        if self.kind == "zero":
            return True
        if self.kind == "custom":
            return not any(v for _, v in self.samples)
        return self.amplitude == 0.

    def comparison_ratio(self, r, p_top):
        """Largest ``|v0(r)|/(p_top e^-|r|)`` over the nodes ``r``."""
        r = np.asarray(r, dtype=float)
        return float(np.max(abs(self(r))*np.exp(abs(r))/p_top))

    def to_dict(self):
        """Return a JSON-ready dictionary."""
        data = dataclasses.asdict(self)
        if self.samples is not None:
            data["samples"] = [list(pair) for pair in self.samples]
        return data

    @classmethod
    def from_dict(cls, data):
        """Build a profile from a dictionary as produced by ``to_dict``."""
        data = dict(data)
        if data.get("samples") is not None:
            data["samples"] = tuple(tuple(pair) for pair in data["samples"])
        unknown = set(data) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ConfigError("profile", f"unknown keys {sorted(unknown)}")
        return cls(**data)


def shifted_gaussians(shifts=constants.DEFAULT_SHIFTS,
                      amplitude=constants.DEFAULT_PROFILE_AMPLITUDE):
    """Gaussian profiles centered at ``shifts``; their solutions are independent."""
    return [BoundaryProfile("gaussian", amplitude, center=shift)
            for shift in shifts]
