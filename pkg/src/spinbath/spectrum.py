"""Exact discrete frequency content of r(t) and the brute-force oracle.

Expanding the product form of r(t) term by term gives a finite
trigonometric sum: each of the 2^N choices of alpha-or-beta per spin
contributes one frequency

    omega_nu = sum_i (-1)^{p_i} g_i        (p_i the per-spin choice bit)

with nonnegative weight  w_nu = prod_i |gamma_i|^2,  where gamma_i is
alpha_i when p_i = 1 and beta_i when p_i = 0. The bit convention places
spin 1 at the most significant digit of nu, so nu = 1 flips the sign of
g_N and nu = 0 carries +sum(g) with weight prod |beta|^2. The sum

    r(t) = sum_nu w_nu e^{+i omega_nu t}

is an exact identity with the product form, checked to 1e-10 in tests.

Collision handling is exact rather than approximate: couplings are
rescaled to integers over a common power-of-two denominator (every float
is a dyadic rational), signed subset sums are formed in arbitrary
precision, and only the final division back to float rounds. Equal
couplings therefore collide bit-exactly and merge at tolerance zero;
random couplings collide with probability zero.

The brute-force expectation at the bottom shares no code with the
closed forms in :mod:`spinbath.evolution`: it materializes the full
2^(N+1) state vector, derives every basis energy by bit counting over
the couplings, and contracts the observable tensor factor by factor.
It exists purely as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CapExceededError,
    DimensionMismatchError,
    IndexOutOfRangeError,
    InvalidParameterError,
)
from .model import FullObservable, SpinBathModel

ENUMERATION_CAP = 26
ORACLE_CAP = 12

_WEIGHT_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SpectralLine:
    """One aggregated frequency: its weight mass and how many indices hit it."""

    omega: float
    weight: float
    multiplicity: int

    def __post_init__(self):
        if not math.isfinite(self.omega):
            raise InvalidParameterError("line omega must be finite")
        if self.weight < 0:
            raise InvalidParameterError("line weight must be nonnegative")
        if self.multiplicity < 1:
            raise InvalidParameterError("line multiplicity must be >= 1")


@dataclass(frozen=True)
class SpectralDecomposition:
    """All frequencies of r(t) for an N-spin model, merged and sorted."""

    lines: tuple[SpectralLine, ...]
    n_spins: int

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        if self.n_spins < 1:
            raise InvalidParameterError("n_spins must be >= 1")
        if not self.lines:
            raise InvalidParameterError("a decomposition needs at least one line")
        omegas = [line.omega for line in self.lines]
        if any(b <= a for a, b in zip(omegas, omegas[1:])):
            raise InvalidParameterError("line omegas must be strictly increasing")
        total_mult = sum(line.multiplicity for line in self.lines)
        if total_mult != 1 << self.n_spins:
            raise InvalidParameterError(
                f"multiplicities sum to {total_mult}, expected 2^{self.n_spins}"
            )
        total_weight = math.fsum(line.weight for line in self.lines)
        if abs(total_weight - 1.0) > _WEIGHT_SUM_TOLERANCE:
            raise InvalidParameterError(
                f"weights sum to {total_weight!r}, expected 1 within 1e-12"
            )

    @property
    def n_lines(self) -> int:
        return len(self.lines)


@dataclass(frozen=True)
class EnergyLevel:
    """One Hamiltonian eigenvalue with its degeneracy."""

    energy: float
    degeneracy: int

    def __post_init__(self):
        if self.degeneracy < 1:
            raise InvalidParameterError("degeneracy must be >= 1")


# ---------------------------------------------------------------------------
# Exact integer scaling of the couplings
# ---------------------------------------------------------------------------

def _scaled_couplings(model: SpinBathModel) -> tuple[list[int], int]:
    """Represent every g_i exactly as M_i / D with integer M_i and common D.

    Floats are dyadic rationals, so each as_integer_ratio denominator is a
    power of two and D is simply their maximum.
    """
    ratios = [s.g.as_integer_ratio() for s in model.spins]
    common = max(d for _, d in ratios)
    return [num * (common // den) for num, den in ratios], common


def _signed_sums(scaled: list[int]) -> list[int]:
    """All 2^N signed sums of the scaled couplings, indexed by nu.

    Built by doubling from the last spin so that spin 1 lands at the most
    significant bit; within each doubling the +g (bit 0) block precedes
    the -g (bit 1) block. Arbitrary-precision integers keep collisions
    exact at any magnitude ratio of the couplings.
    """
    sums = [0]
    for m in reversed(scaled):
        sums = [s + m for s in sums] + [s - m for s in sums]
    return sums


def _check_index(model: SpinBathModel, nu: int) -> None:
    limit = 1 << model.n_spins
    if not (0 <= nu < limit):
        raise IndexOutOfRangeError(
            f"nu = {nu} outside [0, 2^{model.n_spins}) = [0, {limit})"
        )


def omega_of_index(model: SpinBathModel, nu: int) -> float:
    """Frequency of term nu: sum_i (-1)^{p_i} g_i, spin 1 at the MSB of nu."""
    _check_index(model, nu)
    scaled, common = _scaled_couplings(model)
    n = model.n_spins
    total = 0
    for i, m in enumerate(scaled):
        bit = (nu >> (n - 1 - i)) & 1
        total += -m if bit else m
    return total / common


def weight_of_index(model: SpinBathModel, nu: int) -> float:
    """Weight of term nu: product of |alpha|^2 (bit 1) or |beta|^2 (bit 0).

    Factors multiply last spin first, matching the enumeration order of
    spectral_decomposition bit for bit.
    """
    _check_index(model, nu)
    n = model.n_spins
    weight = 1.0
    for i in range(n - 1, -1, -1):
        spin = model.spins[i]
        bit = (nu >> (n - 1 - i)) & 1
        z = spin.alpha if bit else spin.beta
        weight *= z.real * z.real + z.imag * z.imag
    return weight


def _require_cap(n: int, cap: int, bytes_per_state: int, what: str) -> None:
    if n > cap:
        estimate = (1 << (n + 1)) * bytes_per_state
        raise CapExceededError(
            f"{what} over {n} spins needs roughly {estimate / 1e6:.0f} MB "
            f"(2^{n + 1} states); the cap is {cap} spins. Reduce N or raise the cap."
        )


def _merge_sorted(
    values: np.ndarray,
    weights: np.ndarray | None,
    radius: float,
) -> tuple[np.ndarray, np.ndarray | None, np.ndarray]:
    """Group consecutive sorted values whose gaps are <= radius.

    Returns (representatives, merged weights or None, group sizes). A group
    of identical values keeps that exact value; otherwise the representative
    is the weight-averaged position (plain mean if the mass is zero).
    """
    order = np.argsort(values, kind="stable")
    v = values[order]
    w = weights[order] if weights is not None else None
    splits = np.flatnonzero(np.diff(v) > radius)
    starts = np.concatenate(([0], splits + 1))
    stops = np.concatenate((splits + 1, [len(v)]))
    reps = np.empty(len(starts))
    merged = np.empty(len(starts)) if w is not None else None
    sizes = (stops - starts).astype(np.int64)
    for k, (lo, hi) in enumerate(zip(starts, stops)):
        block = v[lo:hi]
        if w is not None:
            mass = float(np.sum(w[lo:hi]))
            merged[k] = mass
        if block[0] == block[-1]:
            reps[k] = block[0]
        elif w is not None and mass > 0.0:
            reps[k] = float(np.sum(block * w[lo:hi]) / mass)
        else:
            reps[k] = float(np.mean(block))
    return reps, merged, sizes


def spectral_decomposition(
    model: SpinBathModel,
    omega_tolerance: float = 0.0,
    *,
    max_spins: int = ENUMERATION_CAP,
) -> SpectralDecomposition:
    """Enumerate all 2^N (omega, weight) terms and merge coincident lines.

    Lines whose frequencies differ by at most ``omega_tolerance * max|g|``
    (an absolute radius) are merged, summing weights and multiplicities.
    At the default tolerance 0 only bit-exact collisions merge, which is
    exactly what equal couplings produce under the integer scaling.
    """
    if omega_tolerance < 0:
        raise InvalidParameterError("omega_tolerance must be >= 0")
    n = model.n_spins
    _require_cap(n, max_spins, 48, "spectral enumeration")

    scaled, common = _scaled_couplings(model)
    sums = _signed_sums(scaled)
    omegas = np.fromiter((s / common for s in sums), dtype=np.float64, count=len(sums))

    weights = np.ones(1)
    for spin in reversed(model.spins):
        a2 = spin.alpha.real**2 + spin.alpha.imag**2
        b2 = spin.beta.real**2 + spin.beta.imag**2
        weights = np.concatenate([weights * b2, weights * a2])

    radius = omega_tolerance * max(abs(s.g) for s in model.spins)
    reps, merged, sizes = _merge_sorted(omegas, weights, radius)
    lines = tuple(
        SpectralLine(float(o), float(w), int(m))
        for o, w, m in zip(reps, merged, sizes)
    )
    return SpectralDecomposition(lines, n)


def r_from_spectrum(dec: SpectralDecomposition, t: float) -> complex:
    """Evaluate the trigonometric sum sum_lines weight * e^{+i omega t}."""
    omegas = np.array([line.omega for line in dec.lines])
    weights = np.array([line.weight for line in dec.lines])
    return complex(np.sum(weights * np.exp(1j * omegas * t)))


def hamiltonian_spectrum(
    model: SpinBathModel,
    merge_tolerance: float = 0.0,
    *,
    max_spins: int = ENUMERATION_CAP,
) -> list[EnergyLevel]:
    """All 2^(N+1) eigenvalues +-(1/2) sum_i (+-g_i), merged by degeneracy.

    The system's up branch carries +half the signed coupling sum of the
    bath pattern and the down branch the negation, so the level multiset
    is negation symmetric. Levels within ``merge_tolerance * max|g|`` are
    merged; degeneracies always total 2^(N+1).
    """
    if merge_tolerance < 0:
        raise InvalidParameterError("merge_tolerance must be >= 0")
    n = model.n_spins
    _require_cap(n, max_spins, 48, "eigenvalue enumeration")

    scaled, common = _scaled_couplings(model)
    sums = _signed_sums(scaled)
    double = 2 * common
    all_ints = sums + [-s for s in sums]
    energies = np.fromiter(
        (s / double for s in all_ints), dtype=np.float64, count=len(all_ints)
    )
    radius = merge_tolerance * max(abs(s.g) for s in model.spins)
    reps, _, sizes = _merge_sorted(energies, None, radius)
    levels = [EnergyLevel(float(e), int(d)) for e, d in zip(reps, sizes)]
    total = sum(level.degeneracy for level in levels)
    if total != 1 << (n + 1):
        raise InvalidParameterError(
            f"degeneracies sum to {total}, expected 2^{n + 1}"
        )
    return levels


def degeneracy_count(n: int, l: int) -> int:
    """Number of eigenvectors at bath flip count l: 2 * C(n, l).

    Exact integer arithmetic; the documented OverflowError can only occur
    if the result is later forced into a fixed-width type by the caller.
    """
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    if not 0 <= l <= n:
        raise InvalidParameterError(f"l must lie in [0, {n}], got {l}")
    return 2 * math.comb(n, l)


def brute_force_expectation(
    model: SpinBathModel,
    obs: FullObservable,
    t: float,
    *,
    max_spins: int = ORACLE_CAP,
) -> float:
    """Full state-vector expectation, independent of every closed form.

    Builds |psi(0)> as an explicit Kronecker product (system first, then
    spins in order), phases each basis state by e^{-i E t} with E obtained
    by bit counting the up/down pattern against the couplings, applies the
    observable one tensor factor at a time, and contracts. Cost and memory
    are exponential; guarded by the oracle cap.
    """
    n = model.n_spins
    if len(obs.env_parts) != n:
        raise DimensionMismatchError(
            f"observable has {len(obs.env_parts)} environment parts, model has {n} spins"
        )
    _require_cap(n, max_spins, 16 * 4, "state-vector oracle")

    psi = np.array([model.a, model.b], dtype=np.complex128)
    for spin in model.spins:
        psi = np.kron(psi, np.array([spin.alpha, spin.beta], dtype=np.complex128))

    dim_env = 1 << n
    env_index = np.arange(dim_env)
    env_energy = np.zeros(dim_env)
    for i, spin in enumerate(model.spins):
        bit = (env_index >> (n - 1 - i)) & 1
        env_energy += np.where(bit == 0, 0.5 * spin.g, -0.5 * spin.g)
    energy = np.concatenate([env_energy, -env_energy])

    psi_t = psi * np.exp(-1j * energy * t)

    s = obs.system_part
    matrices = [
        np.array(
            [[s.s_uu, np.conj(s.s_du)], [s.s_du, s.s_dd]], dtype=np.complex128
        )
    ]
    for part in obs.env_parts:
        matrices.append(
            np.array(
                [[part.e_uu, np.conj(part.e_du)], [part.e_du, part.e_dd]],
                dtype=np.complex128,
            )
        )

    acted = psi_t.reshape((2,) * (n + 1))
    for site, matrix in enumerate(matrices):
        acted = np.tensordot(matrix, acted, axes=([1], [site]))
        acted = np.moveaxis(acted, 0, site)
    value = np.vdot(psi_t, acted.reshape(-1))
    return float(value.real)
