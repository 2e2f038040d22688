"""Model data for a central spin-1/2 dephasing against a bath of N spins.

Conventions used throughout the package:

* The system qubit starts in ``a|up> + b|down>``; bath spin i starts in
  ``alpha_i|up> + beta_i|down>``. All four amplitudes are complex and each
  pair is normalized to 1 within 1e-12.
* The interaction couples the system's z-projection to each bath spin's
  z-projection with strength ``g_i``; there are no self-Hamiltonians.
  Initial states are pure products.
* Units are dimensionless: g carries radians per unit time, so ``g * t``
  is a phase. Nothing in the package fixes a time scale.
* Observables are stored by their independent Hermitian entries only:
  the diagonal is real and the upper off-diagonal entry is the conjugate
  of the lower one, so a 2x2 Hermitian matrix is (x_uu, x_dd, x_du).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import (
    ConfigError,
    EmptyEnvironmentError,
    InvalidParameterError,
    NormalizationError,
)

NORMALIZATION_TOLERANCE = 1e-12


def _abs2(z: complex) -> float:
    return z.real * z.real + z.imag * z.imag


def _check_pair(x: complex, y: complex, which: str) -> None:
    if not (math.isfinite(x.real) and math.isfinite(x.imag)
            and math.isfinite(y.real) and math.isfinite(y.imag)):
        raise InvalidParameterError(f"{which}: amplitudes must be finite")
    residual = abs(_abs2(x) + _abs2(y) - 1.0)
    if residual > NORMALIZATION_TOLERANCE:
        raise NormalizationError(which, residual)


@dataclass(frozen=True)
class EnvironmentSpin:
    """One bath spin: initial amplitudes and its coupling to the system.

    ``alpha`` multiplies |up>, ``beta`` multiplies |down>, and ``g`` is the
    coupling strength in radians per unit time (finite and nonzero).
    """

    alpha: complex
    beta: complex
    g: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "g", float(self.g))
        _check_pair(self.alpha, self.beta, "environment spin")
        if not math.isfinite(self.g) or self.g == 0.0:
            raise InvalidParameterError(
                f"environment spin: coupling g must be finite and nonzero, got {self.g!r}"
            )


@dataclass(frozen=True)
class SpinBathModel:
    """The full system: central amplitudes (a, b) and an ordered spin bath."""

    a: complex
    b: complex
    spins: tuple[EnvironmentSpin, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "spins", tuple(self.spins))
        if len(self.spins) == 0:
            raise EmptyEnvironmentError("a model needs at least one environment spin")
        _check_pair(self.a, self.b, "system")

    @property
    def n_spins(self) -> int:
        return len(self.spins)


def new_model(
    a: complex,
    b: complex,
    spins: Iterable[tuple[complex, complex, float]],
) -> SpinBathModel:
    """Build a validated model from raw (alpha, beta, g) triples.

    Raises NormalizationError naming the offending pair (with its residual),
    EmptyEnvironmentError for an empty bath, and InvalidParameterError for
    non-finite entries or zero couplings.
    """
    built = []
    for i, (alpha, beta, g) in enumerate(spins):
        try:
            built.append(EnvironmentSpin(alpha, beta, g))
        except NormalizationError as exc:
            raise NormalizationError(f"spin {i + 1}", exc.residual) from None
        except InvalidParameterError as exc:
            raise InvalidParameterError(f"spin {i + 1}: {exc}") from None
    if not built:
        raise EmptyEnvironmentError("a model needs at least one environment spin")
    return SpinBathModel(a, b, tuple(built))


@dataclass(frozen=True)
class RelevantObservable:
    """Hermitian observable on the system qubit alone (identity on the bath).

    Entries: s_uu = <up|O|up>, s_dd = <down|O|down>, s_du = <down|O|up>;
    the remaining entry is conj(s_du) by Hermiticity.
    """

    s_uu: float
    s_dd: float
    s_du: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "s_uu", float(self.s_uu))
        object.__setattr__(self, "s_dd", float(self.s_dd))
        object.__setattr__(self, "s_du", complex(self.s_du))
        for name in ("s_uu", "s_dd"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"observable {name} must be finite")
        if not (math.isfinite(self.s_du.real) and math.isfinite(self.s_du.imag)):
            raise InvalidParameterError("observable s_du must be finite")

    @classmethod
    def identity(cls) -> "RelevantObservable":
        return cls(1.0, 1.0, 0j)


@dataclass(frozen=True)
class LocalObservable:
    """Hermitian observable on a single bath spin (same entry convention)."""

    e_uu: float
    e_dd: float
    e_du: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "e_uu", float(self.e_uu))
        object.__setattr__(self, "e_dd", float(self.e_dd))
        object.__setattr__(self, "e_du", complex(self.e_du))
        for name in ("e_uu", "e_dd"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"local observable {name} must be finite")
        if not (math.isfinite(self.e_du.real) and math.isfinite(self.e_du.imag)):
            raise InvalidParameterError("local observable e_du must be finite")

    @classmethod
    def identity(cls) -> "LocalObservable":
        return cls(1.0, 1.0, 0j)


@dataclass(frozen=True)
class FullObservable:
    """Tensor-product observable: system part times one local factor per spin."""

    system_part: RelevantObservable
    env_parts: tuple[LocalObservable, ...]

    def __post_init__(self):
        object.__setattr__(self, "env_parts", tuple(self.env_parts))

    @classmethod
    def identity_environment(cls, system_part: RelevantObservable, n: int) -> "FullObservable":
        return cls(system_part, tuple(LocalObservable.identity() for _ in range(n)))


# ---------------------------------------------------------------------------
# Random generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniformPositive:
    """Couplings drawn uniformly from (0, g_max]; zero is excluded."""

    g_max: float = 1.0


@dataclass(frozen=True)
class Equal:
    """Every coupling equal to g."""

    g: float


CouplingLaw = UniformPositive | Equal


class PhaseLaw(Enum):
    """Phase protocol for the bath amplitudes.

    ZERO keeps alpha, beta real nonnegative (phases never enter r(t)).
    UNIFORM gives each an independent phase uniform on [0, 2*pi); phases
    do enter full-observable expectations through Re(alpha*conj(beta)*e_du).
    """

    ZERO = "zero"
    UNIFORM = "uniform"


def generate_random(
    n: int,
    seed: int,
    coupling_law: CouplingLaw = UniformPositive(1.0),
    phase_law: PhaseLaw = PhaseLaw.ZERO,
) -> SpinBathModel:
    """Draw a seeded random model following the simulation protocol.

    The system qubit is fixed balanced (a = b = sqrt(1/2)); each bath spin
    draws |alpha_i|^2 uniformly on [0, 1] with |beta_i|^2 = 1 - |alpha_i|^2.

    The generator is numpy's default PCG64 seeded with ``seed``, and the
    draw order per spin is fixed so identical inputs reproduce identical
    models bit for bit on any platform:

    1. ``u`` uniform on [0, 1) -> |alpha_i|^2
    2. two phase draws (only when phase_law is UNIFORM)
    3. one coupling draw (only when coupling_law is UniformPositive),
       mapped as ``g = g_max * (1 - v)`` so g lies in (0, g_max].
    """
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    if isinstance(coupling_law, UniformPositive):
        if not (math.isfinite(coupling_law.g_max) and coupling_law.g_max > 0):
            raise InvalidParameterError(
                f"g_max must be positive, got {coupling_law.g_max!r}"
            )
    elif isinstance(coupling_law, Equal):
        if not math.isfinite(coupling_law.g) or coupling_law.g == 0.0:
            raise InvalidParameterError(
                f"equal coupling g must be finite and nonzero, got {coupling_law.g!r}"
            )
    else:
        raise InvalidParameterError(f"unknown coupling law {coupling_law!r}")

    rng = np.random.default_rng(seed)
    root_half = math.sqrt(0.5)
    spins = []
    for _ in range(n):
        u = rng.random()
        amp_a = math.sqrt(u)
        amp_b = math.sqrt(1.0 - u)
        if phase_law is PhaseLaw.UNIFORM:
            pa = 2.0 * math.pi * rng.random()
            pb = 2.0 * math.pi * rng.random()
            alpha = complex(amp_a * math.cos(pa), amp_a * math.sin(pa))
            beta = complex(amp_b * math.cos(pb), amp_b * math.sin(pb))
        else:
            alpha = complex(amp_a, 0.0)
            beta = complex(amp_b, 0.0)
        if isinstance(coupling_law, UniformPositive):
            g = coupling_law.g_max * (1.0 - rng.random())
        else:
            g = coupling_law.g
        spins.append(EnvironmentSpin(alpha, beta, g))
    return SpinBathModel(complex(root_half), complex(root_half), tuple(spins))


# ---------------------------------------------------------------------------
# Serialization (JSON-compatible schema)
# ---------------------------------------------------------------------------
#
# {
#   "a": [re, im], "b": [re, im],
#   "spins": [{"alpha": [re, im], "beta": [re, im], "g": float}, ...]
# }

def _complex_pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def model_to_dict(model: SpinBathModel) -> dict[str, Any]:
    """Serialize a model to the documented JSON-compatible schema."""
    return {
        "a": _complex_pair(model.a),
        "b": _complex_pair(model.b),
        "spins": [
            {"alpha": _complex_pair(s.alpha), "beta": _complex_pair(s.beta), "g": s.g}
            for s in model.spins
        ],
    }


def _parse_complex(value: Any, path: str) -> complex:
    if (not isinstance(value, Sequence)) or isinstance(value, (str, bytes)) or len(value) != 2:
        raise ConfigError(path, "expected a [re, im] pair")
    re, im = value
    if not isinstance(re, (int, float)) or isinstance(re, bool):
        raise ConfigError(f"{path}[0]", "expected a number")
    if not isinstance(im, (int, float)) or isinstance(im, bool):
        raise ConfigError(f"{path}[1]", "expected a number")
    return complex(float(re), float(im))


def _parse_real(value: Any, path: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(path, "expected a number")
    return float(value)


def model_from_dict(data: Any, path: str = "model") -> SpinBathModel:
    """Parse and validate a model from the documented schema.

    All failures, structural or semantic, surface as ConfigError carrying
    the dotted path of the offending field.
    """
    if not isinstance(data, dict):
        raise ConfigError(path, "expected an object")
    for key in ("a", "b", "spins"):
        if key not in data:
            raise ConfigError(f"{path}.{key}", "missing required field")
    unknown = set(data) - {"a", "b", "spins"}
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown field")
    a = _parse_complex(data["a"], f"{path}.a")
    b = _parse_complex(data["b"], f"{path}.b")
    raw_spins = data["spins"]
    if not isinstance(raw_spins, list) or not raw_spins:
        raise ConfigError(f"{path}.spins", "expected a non-empty array")
    spins = []
    for i, entry in enumerate(raw_spins):
        spin_path = f"{path}.spins[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(spin_path, "expected an object")
        for key in ("alpha", "beta", "g"):
            if key not in entry:
                raise ConfigError(f"{spin_path}.{key}", "missing required field")
        unknown_keys = set(entry) - {"alpha", "beta", "g"}
        if unknown_keys:
            raise ConfigError(f"{spin_path}.{sorted(unknown_keys)[0]}", "unknown field")
        alpha = _parse_complex(entry["alpha"], f"{spin_path}.alpha")
        beta = _parse_complex(entry["beta"], f"{spin_path}.beta")
        g = _parse_real(entry["g"], f"{spin_path}.g")
        try:
            spins.append(EnvironmentSpin(alpha, beta, g))
        except (NormalizationError, InvalidParameterError) as exc:
            raise ConfigError(spin_path, str(exc)) from None
    try:
        return SpinBathModel(a, b, tuple(spins))
    except (NormalizationError, InvalidParameterError) as exc:
        raise ConfigError(path, str(exc)) from None
