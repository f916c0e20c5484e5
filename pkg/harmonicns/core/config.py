"""Run configuration: defaults, JSON documents and command line overrides.

Values are resolved as flags > JSON file > defaults from ``constants``.

"""
import dataclasses
import json
import pathlib

from harmonicns.core import constants
from harmonicns.core.errors import ConfigError
from harmonicns.strip.profiles import KINDS, BoundaryProfile, shifted_gaussians


@dataclasses.dataclass(frozen=True)
class GridConfig:
    """Truncated strip grid."""

    R: float = constants.DEFAULT_R
    n_r: int = constants.DEFAULT_NR
    n_s: int = constants.DEFAULT_NS

    def validate(self):
        if not self.R > 0.:
            raise ConfigError("grid.R", "must be positive")
        for name in ("n_r", "n_s"):
            if getattr(self, name) < constants.MIN_NODES:
                raise ConfigError(f"grid.{name}",
                                  f"need at least {constants.MIN_NODES} nodes")


@dataclasses.dataclass(frozen=True)
class ProfileConfig:
    """Boundary data on s = pi/2 and the shifts of the independent profiles."""

    kind: str = constants.DEFAULT_PROFILE_KIND
    amplitude: float = constants.DEFAULT_PROFILE_AMPLITUDE
    center: float = 0.
    width: float = constants.DEFAULT_PROFILE_WIDTH
    shifts: tuple = constants.DEFAULT_SHIFTS

    def validate(self):
        if self.kind not in KINDS or self.kind == "custom":
            raise ConfigError("profile.kind", f"unknown profile {self.kind!r}")
        if not self.width > 0.:
            raise ConfigError("profile.width", "must be positive")
        if len(self.shifts) < 2:
            raise ConfigError("profile.shifts", "need at least two independent profiles")

    def profile(self):
        """Return the ``BoundaryProfile``."""
        return BoundaryProfile(self.kind, self.amplitude, self.center, self.width)

    def independent_profiles(self):
        """Return shifted Gaussians with the configured amplitude."""
        return shifted_gaussians(self.shifts, self.amplitude)


_NESTED = {"grid": GridConfig, "profile": ProfileConfig}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Everything a run of the command line runner depends on.

    Attributes:
        grid (GridConfig): Strip grid.
        profile (ProfileConfig): Boundary data.
        samples (int): Pointwise samples for geometry and bound checks.
        supersolution_samples (int): Samples of the supersolution check.
        psi_deltas (tuple[float]): Decay rates of the corner growth fits.
        psi_samples (int): Samples per corner growth fit.
        f1_samples (int): Samples of the f1 bound.
        probes (int): Residual probes in the disk.
        quadrature_levels (int): Mesh levels of each ladder.
        convergence_threshold (float): Relative tolerance of the ladders.
        f0 (float): Amplitude of the modulated solutions.
        k (tuple[float]): Decay rates as multiples of k_star.
        nu (float): Viscosity.
        output_dir (str): Output directory.
        theta_factor (bool): Include 2 pi in the norms.
        seed (int): Random seed.
        show_violations (bool): Report inadmissible rates without failing.
        record_timings (bool): Put timings into the manifest.
        manufactured (bool): Solve the manufactured problem instead.

    """

    grid: GridConfig = dataclasses.field(default_factory=GridConfig)
    profile: ProfileConfig = dataclasses.field(default_factory=ProfileConfig)
    samples: int = constants.DEFAULT_BOUND_SAMPLES
    supersolution_samples: int = constants.DEFAULT_SUPERSOLUTION_SAMPLES
    psi_deltas: tuple = constants.DEFAULT_PSI_DELTAS
    psi_samples: int = constants.DEFAULT_PSI_SAMPLES
    f1_samples: int = 10**5
    probes: int = constants.DEFAULT_PROBES
    quadrature_levels: int = constants.DEFAULT_QUADRATURE_LEVELS
    convergence_threshold: float = constants.CONVERGENCE_THRESHOLD
    f0: float = constants.DEFAULT_F0
    k: tuple = constants.DEFAULT_K_MULTIPLIERS
    nu: float = constants.DEFAULT_NU
    output_dir: str = str(constants.DEFAULT_OUTPUT_DIR)
    theta_factor: bool = True
    seed: int = constants.DEFAULT_SEED
    show_violations: bool = False
    record_timings: bool = False
    manufactured: bool = False

    @classmethod
    def from_dict(cls, data):
        """Build a config from a (possibly partial) nested dictionary."""
        data = dict(data)
        names = {field.name for field in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown configuration key")
        for key, nested in _NESTED.items():
            if key in data:
                value = dict(data[key])
                nested_names = {field.name for field in dataclasses.fields(nested)}
                extra = set(value) - nested_names
                if extra:
                    raise ConfigError(f"{key}.{sorted(extra)[0]}",
                                      "unknown configuration key")
                if "shifts" in value:
                    value["shifts"] = tuple(value["shifts"])
                data[key] = nested(**value)
        for key in ("psi_deltas", "k"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    @classmethod
    def from_json(cls, path):
        """Load a config from a JSON document."""
        try:
            data = json.loads(pathlib.Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as error:
            raise ConfigError("config", f"cannot read {path}: {error}") from error
        if not isinstance(data, dict):
            raise ConfigError("config", "the document must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self):
        data = dataclasses.asdict(self)
        for key in ("psi_deltas", "k"):
            data[key] = list(data[key])
        data["profile"]["shifts"] = list(data["profile"]["shifts"])
        return data

    def with_overrides(self, overrides):
        """Return a copy with dotted-name overrides, ignoring ``None`` values.

        Args:
            overrides (dict): For example ``{"grid.R": 10., "nu": 0.5}``.

        """
        data = self.to_dict()
        for name, value in overrides.items():
            if value is None:
                continue
            target = data
            *parents, leaf = name.split(".")
            for parent in parents:
                target = target[parent]
            target[leaf] = value
        return RunConfig.from_dict(data)

    def validate(self):
        """Raise ``ConfigError`` naming the first invalid field."""
        self.grid.validate()
        self.profile.validate()
        positive = ("samples", "psi_samples", "f1_samples", "probes")
        for name in positive:
            if getattr(self, name) < 1:
                raise ConfigError(name, "must be at least 1")
        if self.supersolution_samples < 1000:
            raise ConfigError("supersolution_samples", "must be at least 1000")
        if self.psi_samples < 8:
            raise ConfigError("psi_samples", "must be at least 8")
        if not self.psi_deltas or any(not 0. < d <= 2. for d in self.psi_deltas):
            raise ConfigError("psi_deltas", "need values in (0, 2]")
        if self.quadrature_levels < 2:
            raise ConfigError("quadrature_levels", "must be at least 2")
        if not self.convergence_threshold > 0.:
            raise ConfigError("convergence_threshold", "must be positive")
        if self.f0 == 0.:
            raise ConfigError("f0", "must be nonzero")
        if not self.k:
            raise ConfigError("k", "the modulation list is empty")
        if any(k < 0. for k in self.k):
            raise ConfigError("k", "multiples of k_star must be nonnegative")
        if self.nu < 0.:
            raise ConfigError("nu", "must be nonnegative")
        return self
