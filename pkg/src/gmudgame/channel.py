"""Planar geometry and the log-distance path-loss model with log-normal shadowing.

The uplink power gain of a link at distance ``d`` is, in dB::

    |h|^2 (dB) = K - 10 mu log10(d) - psi

with ``psi`` a zero-mean Gaussian shadowing term whose standard deviation
``sigma_s`` is given in dB.

Randomness always comes from an explicit :class:`numpy.random.Generator`.
:func:`run_stream` derives an independent generator for each Monte Carlo run
from ``(seed, run_index)``, so runs can be executed in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RNG_ALGORITHM = "numpy PCG64, SeedSequence(seed, spawn_key=(run_index,))"


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"position coordinates must be finite, got ({self.x}, {self.y})")

    def distance_to(self, other: Position) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class FadingParams:
    """Path-loss constant ``k_db`` (K, dB), exponent ``mu`` and shadowing std ``sigma_s_db``."""

    k_db: float = 0.0
    mu: float = 3.0
    sigma_s_db: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.k_db):
            raise ValueError(f"k_db must be finite, got {self.k_db}")
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if not (math.isfinite(self.sigma_s_db) and self.sigma_s_db >= 0):
            raise ValueError(f"sigma_s_db must be >= 0, got {self.sigma_s_db}")


@dataclass(frozen=True)
class ChannelGain:
    """Linear power gain ``|h|^2`` of one link."""

    gain_sq: float

    def __post_init__(self):
        if not (math.isfinite(self.gain_sq) and self.gain_sq > 0):
            raise ValueError(f"channel power gain must be positive and finite, got {self.gain_sq}")

    @property
    def db(self) -> float:
        return 10.0 * math.log10(self.gain_sq)


def path_loss_db(fading: FadingParams, distance: float, shadowing_draw: float = 0.0) -> float:
    """Link power gain in dB: ``K - 10 mu log10(d) - psi``."""
    if not distance > 0:
        raise ValueError(f"distance must be positive, got {distance}")
    return fading.k_db - 10.0 * fading.mu * math.log10(distance) - shadowing_draw


def gain_linear(db_value: float) -> ChannelGain:
    if not math.isfinite(db_value):
        raise ValueError(f"dB value must be finite, got {db_value}")
    return ChannelGain(10.0 ** (db_value / 10.0))


def db_from_linear(value: float) -> float:
    return 10.0 * math.log10(value)


def run_stream(seed: int, run_index: int = 0) -> np.random.Generator:
    """Generator for Monte Carlo run ``run_index`` under master ``seed``."""
    if seed < 0 or run_index < 0:
        raise ValueError("seed and run_index must be non-negative")
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(run_index),))))


def draw_shadowing(rng: np.random.Generator, sigma_s: float) -> float:
    """One shadowing sample in dB with standard deviation ``sigma_s``.

    A standard normal is always consumed, so the stream position does not
    depend on ``sigma_s``; ``sigma_s == 0`` returns exactly 0.0.
    """
    if sigma_s < 0:
        raise ValueError(f"sigma_s must be >= 0, got {sigma_s}")
    z = float(rng.standard_normal())
    if sigma_s == 0:
        return 0.0
    return sigma_s * z


def link_gain(ms_pos: Position, bs_pos: Position, fading: FadingParams,
              rng: np.random.Generator) -> ChannelGain:
    distance = ms_pos.distance_to(bs_pos)
    if distance == 0:
        raise ValueError(f"mobile at {ms_pos} coincides with its base station")
    psi = draw_shadowing(rng, fading.sigma_s_db)
    return gain_linear(path_loss_db(fading, distance, psi))
