"""Poisson impurity configurations on the box (-L/2, L/2)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ValidationError


@dataclass(frozen=True)
class ModelParameters:
    """Model and thermodynamic parameters for one run.

    The box length is not stored; it follows from ``L_N = N / rho``.
    """

    intensity: float
    strength: float
    inverse_temperature: float
    density: float
    particle_number: int

    def __post_init__(self):
        for name in ("intensity", "strength", "inverse_temperature", "density"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
        if int(self.particle_number) != self.particle_number or self.particle_number < 1:
            raise ParameterError(f"particle_number must be a positive integer, got {self.particle_number!r}")

    @property
    def box_length(self) -> float:
        return self.particle_number / self.density

    def with_size(self, particle_number: int) -> "ModelParameters":
        return ModelParameters(self.intensity, self.strength, self.inverse_temperature,
                               self.density, int(particle_number))


@dataclass(frozen=True, eq=False)
class ImpurityConfiguration:
    box_length: float
    atoms: np.ndarray
    seed_tag: str = field(default="")

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        if atoms.ndim != 1:
            raise ValidationError("atoms must be a one-dimensional sequence")
        atoms.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        if not (np.isfinite(self.box_length) and self.box_length > 0):
            raise ValidationError(f"box_length must be positive, got {self.box_length!r}")
        half = 0.5 * self.box_length
        if atoms.size:
            if not np.all(np.isfinite(atoms)):
                raise ValidationError("atoms must be finite")
            if atoms[0] <= -half or atoms[-1] >= half:
                raise ValidationError("atoms must lie strictly inside (-L/2, L/2)")
            if np.any(np.diff(atoms) <= 0):
                raise ValidationError("atoms must be strictly increasing")

    def __eq__(self, other):
        if not isinstance(other, ImpurityConfiguration):
            return NotImplemented
        return (self.box_length == other.box_length
                and np.array_equal(self.atoms, other.atoms))

    def __len__(self):
        return self.atoms.size

    @property
    def gaps(self) -> np.ndarray:
        """Lengths (l_0, ..., l_m) between wall, atoms and wall."""
        half = 0.5 * self.box_length
        return np.diff(np.concatenate(([-half], self.atoms, [half])))

    def to_json(self) -> str:
        return json.dumps({"box_length": float(self.box_length),
                           "atoms": [float(a) for a in self.atoms]})

    @classmethod
    def from_json(cls, text: str) -> "ImpurityConfiguration":
        data = json.loads(text)
        if set(data) - {"box_length", "atoms"}:
            raise ValidationError(f"unknown keys {sorted(set(data) - {'box_length', 'atoms'})}")
        return configuration_from_points(data["atoms"], data["box_length"])


def realization_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based stream for realization ``index`` of experiment ``seed``.

    Philox keyed by a SeedSequence on (seed, index); the stream for a given
    pair never depends on which other realizations were drawn.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def sample_configuration(length: float, intensity: float, seed: int,
                         index: int = 0) -> ImpurityConfiguration:
    """Draw m ~ Poisson(intensity * length), then m sorted uniform atoms."""
    if not (np.isfinite(length) and length > 0):
        raise ParameterError(f"length must be positive, got {length!r}")
    if not (np.isfinite(intensity) and intensity > 0):
        raise ParameterError(f"intensity must be positive, got {intensity!r}")
    rng = realization_rng(seed, index)
    half = 0.5 * length
    m = int(rng.poisson(intensity * length))
    atoms = np.sort(rng.uniform(-half, half, size=m))
    # the endpoint -L/2 and coincident draws have probability ~2^-53 per atom
    while atoms.size and (atoms[0] <= -half or np.any(np.diff(atoms) <= 0)):
        atoms = np.sort(rng.uniform(-half, half, size=m))
    return ImpurityConfiguration(float(length), atoms, seed_tag=f"{int(seed)}:{int(index)}")


def configuration_from_points(points, length: float) -> ImpurityConfiguration:
    """Validate user-supplied atom positions; duplicates are rejected, not merged."""
    if not (np.isfinite(length) and length > 0):
        raise ValidationError(f"length must be positive, got {length!r}")
    atoms = np.sort(np.asarray(points, dtype=float).ravel())
    if atoms.size and np.any(np.diff(atoms) == 0):
        raise ValidationError("duplicate atom positions")
    return ImpurityConfiguration(float(length), atoms, seed_tag="user")
