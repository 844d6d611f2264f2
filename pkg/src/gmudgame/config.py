"""Flat ``key = value`` configuration files and the figure presets.

Example::

    # single station, SNR sweep
    scenario = single_bs
    seed = 1
    system.rho = 0.4
    system.snr_db = 27
    fading.k_db = 133
    fading.mu = 3
    fading.sigma_s_db = 0
    sweep.variable = snr_db
    sweep.start = -40
    sweep.stop = 40
    sweep.step = 2

Geometry keys depend on the scenario: ``geometry.distances`` for
``single_bs``; ``geometry.separation`` and ``geometry.offsets`` for
``two_bs``; ``station.<id> = x y`` and ``user.<n> = x y <station id>`` for
``custom``.  ``structures`` is a whitespace-separated list of structure
labels such as ``1234 12|3|4``.  Noise variance is fixed to 1, so
``system.snr_db`` sets the transmit power.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .channel import FadingParams, Position
from .experiment import (DEFAULT_K_DB, DEFAULT_MU, DEFAULT_RHO, DEFAULT_SNR_DB,
                         SINGLE_BS_DISTANCES, TWO_BS_OFFSETS, TWO_BS_SEPARATION,
                         SWEEP_VARIABLES, MobileUser, Scenario, Station, SweepSpec,
                         build_single_bs_scenario, build_two_bs_scenario)
from .partition import parse_structure
from .payoff import SystemParams

SCENARIOS = ("single_bs", "two_bs", "custom")

SCALAR_KEYS = {
    "scenario", "seed", "mc_runs", "output",
    "system.rho", "system.snr_db",
    "fading.k_db", "fading.mu", "fading.sigma_s_db",
    "geometry.distances", "geometry.separation", "geometry.offsets",
    "sweep.variable", "sweep.start", "sweep.stop", "sweep.step", "sweep.values",
    "structures",
}


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    scenario: Scenario
    sweep: SweepSpec | None = None
    structures: list[str] | None = None
    output: str | None = None
    source: str = "<config>"
    entries: dict[str, str] = field(default_factory=dict)
    snr_db: float = DEFAULT_SNR_DB


class _Reader:
    def __init__(self, entries, lines, source):
        self.entries = entries
        self.lines = lines
        self.source = source

    def fail(self, key, message):
        line = self.lines.get(key)
        where = f"{self.source}:{line}" if line else self.source
        raise ConfigError(f"{where}: key '{key}': {message}")

    def has(self, key):
        return key in self.entries

    def text(self, key, default=None):
        return self.entries.get(key, default)

    def number(self, key, default=None):
        if key not in self.entries:
            if default is None:
                self.fail(key, "missing required value")
            return float(default)
        try:
            return float(self.entries[key])
        except ValueError:
            self.fail(key, f"expected a number, got {self.entries[key]!r}")

    def integer(self, key, default):
        if key not in self.entries:
            return default
        try:
            return int(self.entries[key])
        except ValueError:
            self.fail(key, f"expected an integer, got {self.entries[key]!r}")

    def numbers(self, key):
        try:
            return [float(t) for t in self.entries[key].replace(",", " ").split()]
        except ValueError:
            self.fail(key, f"expected a list of numbers, got {self.entries[key]!r}")

    def check(self, key, build):
        try:
            return build()
        except ValueError as exc:
            self.fail(key, str(exc))


def parse_lines(text: str, source: str = "<config>"):
    entries, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        if not (key in SCALAR_KEYS or key.startswith(("station.", "user."))):
            raise ConfigError(f"{source}:{lineno}: key '{key}': unknown key")
        if key in entries:
            raise ConfigError(f"{source}:{lineno}: key '{key}': duplicate key "
                              f"(first set on line {lines[key]})")
        entries[key] = value
        lines[key] = lineno
    return entries, lines


def parse_config(text: str, source: str = "<config>", overrides: dict | None = None) -> Config:
    entries, lines = parse_lines(text, source)
    for key, value in (overrides or {}).items():
        entries[key] = str(value)
        lines.pop(key, None)
    r = _Reader(entries, lines, source)

    kind = r.text("scenario", "single_bs")
    if kind not in SCENARIOS:
        r.fail("scenario", f"must be one of {', '.join(SCENARIOS)}, got {kind!r}")
    seed = r.integer("seed", 0)
    if seed < 0:
        r.fail("seed", "must be a non-negative integer")
    mc_runs = r.integer("mc_runs", 1)
    if mc_runs < 1:
        r.fail("mc_runs", "must be a positive integer")

    rho = r.number("system.rho", DEFAULT_RHO)
    r.check("system.rho", lambda: SystemParams(rho=rho))
    snr_db = r.number("system.snr_db", DEFAULT_SNR_DB)
    r.check("system.snr_db", lambda: SystemParams.from_snr_db(snr_db, rho))

    k_db = r.number("fading.k_db", DEFAULT_K_DB)
    r.check("fading.k_db", lambda: FadingParams(k_db=k_db))
    mu = r.number("fading.mu", DEFAULT_MU)
    r.check("fading.mu", lambda: FadingParams(mu=mu))
    sigma = r.number("fading.sigma_s_db", 0.0)
    r.check("fading.sigma_s_db", lambda: FadingParams(sigma_s_db=sigma))
    fading = FadingParams(k_db, mu, sigma)

    if kind == "single_bs":
        distances = (r.numbers("geometry.distances") if r.has("geometry.distances")
                     else SINGLE_BS_DISTANCES)
        scenario = r.check("geometry.distances", lambda: build_single_bs_scenario(
            distances, fading, snr_db, rho, mc_runs, seed))
    elif kind == "two_bs":
        separation = r.number("geometry.separation", TWO_BS_SEPARATION)
        offsets = TWO_BS_OFFSETS
        if r.has("geometry.offsets"):
            flat = r.numbers("geometry.offsets")
            if len(flat) % 2 or not flat:
                r.fail("geometry.offsets", "expected x,y pairs")
            offsets = tuple(zip(flat[::2], flat[1::2]))
        scenario = r.check("geometry.separation", lambda: build_two_bs_scenario(
            separation, offsets, fading, snr_db, rho, mc_runs, seed))
    else:
        scenario = _custom_scenario(r, fading, snr_db, rho, mc_runs, seed)

    sweep = None
    if r.has("sweep.variable"):
        variable = r.text("sweep.variable")
        if variable not in SWEEP_VARIABLES:
            r.fail("sweep.variable", f"must be one of {', '.join(SWEEP_VARIABLES)}, "
                                     f"got {variable!r}")
        if r.has("sweep.values"):
            values = r.numbers("sweep.values")
            sweep = r.check("sweep.values", lambda: SweepSpec(variable, values))
        else:
            start, stop, step = (r.number("sweep.start"), r.number("sweep.stop"),
                                 r.number("sweep.step"))
            sweep = r.check("sweep.step",
                            lambda: SweepSpec.grid(variable, start, stop, step))
    elif any(r.has(k) for k in ("sweep.values", "sweep.start", "sweep.stop", "sweep.step")):
        r.fail("sweep.variable", "missing; other sweep.* keys are set")

    structures = None
    if r.has("structures"):
        structures = r.text("structures").split()
        sizes = {len(scenario.known_users(s.id)) for s in scenario.stations}
        for label in structures:
            for n in sizes:
                r.check("structures", lambda: parse_structure(label, n))

    return Config(scenario, sweep, structures, r.text("output"), source, entries, snr_db)


def _custom_scenario(r, fading, snr_db, rho, mc_runs, seed):
    stations, users = [], []
    for key in [k for k in r.entries if k.startswith("station.")]:
        xy = r.numbers(key)
        if len(xy) != 2:
            r.fail(key, "expected 'x y'")
        stations.append(Station(key.split(".", 1)[1], r.check(key, lambda: Position(*xy))))
    user_keys = [k for k in r.entries if k.startswith("user.")]
    for key in sorted(user_keys, key=lambda k: (len(k), k)):
        parts = r.entries[key].replace(",", " ").split()
        if len(parts) != 3:
            r.fail(key, "expected 'x y station_id'")
        try:
            uid = int(key.split(".", 1)[1])
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            r.fail(key, "expected user.<integer> = x y station_id")
        users.append(MobileUser(uid, r.check(key, lambda: Position(x, y)), parts[2]))
    if not stations:
        r.fail("station.<id>", "a custom scenario needs at least one station")
    first = user_keys[0] if user_keys else "user.<n>"
    return r.check(first, lambda: Scenario(
        tuple(stations), tuple(users), fading,
        SystemParams.from_snr_db(snr_db, rho), mc_runs, seed, "custom"))


def load_config(path: str | os.PathLike, overrides: dict | None = None) -> Config:
    with open(path) as fh:
        text = fh.read()
    return parse_config(text, str(path), overrides)


# Presets share one single-station layout (fig1-fig4) and one two-station
# layout (fig5); see experiment.py for the default geometry.
PRESETS = {
    "fig1": """
        # per-structure payoffs at SNR 27 dB, no shadowing
        scenario = single_bs
        system.snr_db = 27
        sweep.variable = snr_db
        sweep.values = 27
    """,
    "fig2": """
        # group payoffs versus SNR
        scenario = single_bs
        sweep.variable = snr_db
        sweep.start = -40
        sweep.stop = 40
        sweep.step = 2
    """,
    "fig3": """
        # group payoffs versus shadowing standard deviation, 10 realizations
        scenario = single_bs
        system.snr_db = 27
        mc_runs = 10
        sweep.variable = sigma_s_db
        sweep.start = 0
        sweep.stop = 12
        sweep.step = 1
    """,
    "fig4": """
        # group payoffs versus path-loss exponent
        scenario = single_bs
        system.snr_db = 27
        sweep.variable = mu
        sweep.start = 0.5
        sweep.stop = 8
        sweep.step = 0.25
    """,
    "fig5": """
        # two stations with four users each, selected structures
        scenario = two_bs
        sweep.variable = snr_db
        sweep.start = -60
        sweep.stop = 20
        sweep.step = 2
        structures = 1234 12|3|4 12|34 1|2|3|4
    """,
}


def preset_config(name: str, seed: int | None = None) -> Config:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    overrides = {"seed": seed} if seed is not None else None
    return parse_config(PRESETS[name], f"preset:{name}", overrides)
