"""Per-user SINR under group decorrelating detection and matched filtering.

All users share one cross-correlation ``rho`` between signature waveforms.
A user in coalition ``omega`` (the users the base station jointly detects
with it) gets::

                                     P_i
    SINR_i = ---------------------------------------------------------
             s2/(1-rho) * (1+rho(n-2))/(1+rho(n-1)) + (rho/(1+rho(n-1)))^2 * I

where ``n = |omega|``, ``s2`` is the noise variance and ``I`` is the total
received power of every signal outside ``omega``: known users in other
blocks plus all unknown (undetected) users.  With ``n == 1`` the
expression collapses to the matched-filter SINR
``P_i / (s2 + rho^2 * sum_{j != i} P_j)``.

Values are linear; conversion to dB is left to reporting code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .partition import Coalition, CoalitionStructure


@dataclass(frozen=True)
class SystemParams:
    """Cross-correlation ``rho``, noise variance and common transmit power (linear)."""

    rho: float = 0.4
    noise_var: float = 1.0
    tx_power: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.rho) and 0 <= self.rho < 1):
            raise ValueError(f"rho must be in [0,1), got {self.rho}")
        if not (math.isfinite(self.noise_var) and self.noise_var > 0):
            raise ValueError(f"noise_var must be positive, got {self.noise_var}")
        if not (math.isfinite(self.tx_power) and self.tx_power > 0):
            raise ValueError(f"tx_power must be positive, got {self.tx_power}")

    @classmethod
    def from_snr_db(cls, snr_db: float, rho: float = 0.4, noise_var: float = 1.0):
        """Transmit power set so that ``tx_power / noise_var`` equals ``snr_db``."""
        return cls(rho=rho, noise_var=noise_var,
                   tx_power=noise_var * 10.0 ** (snr_db / 10.0))

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.tx_power / self.noise_var)


@dataclass(frozen=True)
class ReceivedPowers:
    """Received powers at one base station.

    ``known[i]`` is ``h_i^2 * P`` for known user ``i``; ``unknown_total``
    is the summed received power of every user the station does not detect.
    """

    known: tuple[float, ...]
    unknown_total: float = 0.0

    def __post_init__(self):
        known = tuple(float(p) for p in self.known)
        if not known:
            raise ValueError("at least one known user is required")
        for i, p in enumerate(known):
            if not (math.isfinite(p) and p > 0):
                raise ValueError(f"received power of user {i + 1} must be positive, got {p}")
        u = float(self.unknown_total)
        if not (math.isfinite(u) and u >= 0):
            raise ValueError(f"unknown_total must be >= 0, got {u}")
        object.__setattr__(self, "known", known)
        object.__setattr__(self, "unknown_total", u)

    @classmethod
    def from_gains(cls, gains: Iterable[float], tx_power: float,
                   unknown_gains: Iterable[float] = ()) -> ReceivedPowers:
        return cls(tuple(g * tx_power for g in gains),
                   math.fsum(g * tx_power for g in unknown_gains))

    @property
    def n_known(self) -> int:
        return len(self.known)

    def scaled(self, factor: float) -> ReceivedPowers:
        return ReceivedPowers(tuple(p * factor for p in self.known),
                              self.unknown_total * factor)


@dataclass(frozen=True)
class PayoffVector:
    """Linear SINR of each known user, indexed by player id."""

    sinr: tuple[float, ...]

    def __post_init__(self):
        sinr = tuple(float(s) for s in self.sinr)
        for i, s in enumerate(sinr):
            if not (math.isfinite(s) and s > 0):
                raise ValueError(f"SINR of user {i + 1} must be positive, got {s}")
        object.__setattr__(self, "sinr", sinr)

    def __len__(self):
        return len(self.sinr)

    def __getitem__(self, i):
        return self.sinr[i]

    def __iter__(self):
        return iter(self.sinr)

    def as_array(self) -> np.ndarray:
        return np.array(self.sinr)

    def db(self) -> tuple[float, ...]:
        return tuple(10.0 * math.log10(s) for s in self.sinr)


def _check_members(powers: ReceivedPowers, members: Iterable[int]):
    for m in members:
        if not 0 <= m < powers.n_known:
            raise ValueError(f"user {m + 1} is not a known user "
                             f"(station has {powers.n_known})")


def outside_power(powers: ReceivedPowers, coalition: Coalition) -> float:
    """Total received power of every signal not detected jointly with ``coalition``."""
    inside = set(coalition.members)
    return math.fsum([p for j, p in enumerate(powers.known) if j not in inside]
                     + [powers.unknown_total])


def decorrelator_denominator(params: SystemParams, size: int, interference: float) -> float:
    """Noise-plus-residual-interference term for a coalition of ``size`` users."""
    rho = params.rho
    noise = (params.noise_var / (1.0 - rho)) * (1.0 + rho * (size - 2)) / (1.0 + rho * (size - 1))
    leak = rho / (1.0 + rho * (size - 1))
    return noise + leak * leak * interference


def sinr_decorrelator(params: SystemParams, powers: ReceivedPowers,
                      coalition: Coalition, user: int) -> float:
    """SINR of ``user`` when the station jointly decorrelates ``coalition``."""
    if user not in coalition:
        raise ValueError(f"user {user + 1} is not in coalition {coalition}")
    _check_members(powers, coalition)
    return powers.known[user] / decorrelator_denominator(
        params, len(coalition), outside_power(powers, coalition))


def sinr_matched_filter(params: SystemParams, powers: ReceivedPowers, user: int) -> float:
    """SINR of ``user`` under single-user matched filtering."""
    _check_members(powers, [user])
    others = math.fsum([p for j, p in enumerate(powers.known) if j != user]
                       + [powers.unknown_total])
    return powers.known[user] / (params.rho ** 2 * others + params.noise_var)


def payoffs_for_structure(params: SystemParams, powers: ReceivedPowers,
                          structure: CoalitionStructure) -> PayoffVector:
    if not isinstance(structure, CoalitionStructure):
        raise ValueError(f"expected a CoalitionStructure, got {structure!r}")
    if structure.n_players != powers.n_known:
        raise ValueError(f"structure {structure} covers {structure.n_players} users "
                         f"but the station has {powers.n_known} known users")
    sinr = [0.0] * powers.n_known
    for block in structure.blocks:
        denom = decorrelator_denominator(params, len(block), outside_power(powers, block))
        for i in block:
            sinr[i] = powers.known[i] / denom
    return PayoffVector(tuple(sinr))


def total_payoff(vector: PayoffVector | Sequence[float],
                 subset: Coalition | Iterable[int] | None = None) -> float:
    """Sum of linear SINRs over ``subset`` (all users when omitted)."""
    values = tuple(vector)
    if subset is None:
        return math.fsum(values)
    idx = list(subset)
    for i in idx:
        if not 0 <= i < len(values):
            raise ValueError(f"user {i + 1} out of range for a vector of {len(values)}")
    return math.fsum(values[i] for i in idx)
