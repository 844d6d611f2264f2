"""Scenarios, seeded Monte Carlo parameter sweeps and CSV output.

A scenario places base stations and mobiles in the plane.  For each station
the mobiles homed there are its known users (players of that station's
game); every other mobile is an unknown user whose received power adds to
the interference.

Every Monte Carlo run ``r`` draws its shadowing from ``run_stream(seed, r)``,
and the same stream is replayed at every sweep point, so curves along a
sweep are computed on common channel realizations.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Sequence

import numpy as np

from . import __version__
from .channel import (RNG_ALGORITHM, FadingParams, Position, link_gain,
                      run_stream)
from .game import (StructureEvaluation, core_of, deviation_table, evaluate_all,
                   evaluate_structures, first_blocking)
from .partition import (MAX_PLAYERS, CoalitionStructure, enumerate_structures,
                        parse_structure)
from .payoff import ReceivedPowers, SystemParams

# Implementer-chosen defaults.  The distances and the path-loss constant are
# tuned together so that received SNRs span the noise-limited and the
# interference-limited regimes over the swept transmit SNR ranges.
DEFAULT_K_DB = 133.0
DEFAULT_MU = 3.0
DEFAULT_RHO = 0.4
DEFAULT_SNR_DB = 27.0
SINGLE_BS_DISTANCES = (400.0, 450.0, 1000.0)
TWO_BS_SEPARATION = 600.0
# user offsets around BS1: two near users, then two far users facing BS2
TWO_BS_OFFSETS = ((-60.0, 50.0), (-50.0, -70.0), (180.0, 90.0), (200.0, -60.0))

SWEEP_VARIABLES = ("snr_db", "sigma_s_db", "mu")

CSV_COLUMNS = ("station_id", "sweep_variable", "sweep_value", "run_index",
               "structure_label", "user_id", "sinr_linear", "sinr_db",
               "gain_over_noncoop_linear", "in_core", "in_core_of_mean")
OFFSET_COLUMN = "sinr_db_shifted_presentation_only"


@dataclass(frozen=True)
class Station:
    id: str
    position: Position


@dataclass(frozen=True)
class MobileUser:
    id: int
    position: Position
    home: str


@dataclass(frozen=True)
class Scenario:
    stations: tuple[Station, ...]
    users: tuple[MobileUser, ...]
    fading: FadingParams = FadingParams()
    system: SystemParams = SystemParams()
    mc_runs: int = 1
    seed: int = 0
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "stations", tuple(self.stations))
        object.__setattr__(self, "users", tuple(self.users))
        ids = [s.id for s in self.stations]
        if not ids:
            raise ValueError("a scenario needs at least one station")
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate station ids: {ids}")
        user_ids = [u.id for u in self.users]
        if len(set(user_ids)) != len(user_ids):
            raise ValueError(f"duplicate user ids: {user_ids}")
        for u in self.users:
            if u.home not in ids:
                raise ValueError(f"user {u.id} is homed at unknown station {u.home!r}")
            for s in self.stations:
                if u.position.distance_to(s.position) == 0:
                    raise ValueError(f"user {u.id} coincides with station {s.id}")
        for sid in ids:
            count = len(self.known_users(sid))
            if count == 0:
                raise ValueError(f"station {sid} has no users")
            if count > MAX_PLAYERS:
                raise ValueError(f"station {sid} has {count} users, at most {MAX_PLAYERS} allowed")
        if int(self.mc_runs) != self.mc_runs or self.mc_runs < 1:
            raise ValueError(f"mc_runs must be a positive integer, got {self.mc_runs}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")

    def known_users(self, station_id: str) -> list[MobileUser]:
        return [u for u in self.users if u.home == station_id]

    def received_powers(self, rng: np.random.Generator,
                        system: SystemParams | None = None,
                        fading: FadingParams | None = None) -> dict[str, ReceivedPowers]:
        """Draw one channel realization and return each station's received powers.

        Links are drawn station by station, users in scenario order.
        """
        system = system or self.system
        fading = fading or self.fading
        out = {}
        for s in self.stations:
            gains = {u.id: link_gain(u.position, s.position, fading, rng).gain_sq
                     for u in self.users}
            known = [gains[u.id] for u in self.users if u.home == s.id]
            unknown = [gains[u.id] for u in self.users if u.home != s.id]
            out[s.id] = ReceivedPowers.from_gains(known, system.tx_power, unknown)
        return out

    def at(self, variable: str, value: float) -> Scenario:
        """Copy of the scenario with one sweep variable set."""
        if variable == "snr_db":
            system = SystemParams.from_snr_db(value, self.system.rho, self.system.noise_var)
            return replace(self, system=system)
        if variable == "sigma_s_db":
            return replace(self, fading=replace(self.fading, sigma_s_db=value))
        if variable == "mu":
            return replace(self, fading=replace(self.fading, mu=value))
        raise ValueError(f"unknown sweep variable {variable!r}; "
                         f"expected one of {', '.join(SWEEP_VARIABLES)}")

    def config_lines(self) -> list[str]:
        lines = [f"scenario = {self.name}",
                 f"seed = {self.seed}",
                 f"mc_runs = {self.mc_runs}",
                 f"system.rho = {self.system.rho!r}",
                 f"system.noise_var = {self.system.noise_var!r}",
                 f"system.snr_db = {self.system.snr_db!r}",
                 f"fading.k_db = {self.fading.k_db!r}",
                 f"fading.mu = {self.fading.mu!r}",
                 f"fading.sigma_s_db = {self.fading.sigma_s_db!r}"]
        lines += [f"station.{s.id} = {s.position.x!r} {s.position.y!r}" for s in self.stations]
        lines += [f"user.{u.id} = {u.position.x!r} {u.position.y!r} {u.home}" for u in self.users]
        return lines


def _polar(r: float, deg: float) -> Position:
    a = math.radians(deg)
    return Position(r * math.cos(a), r * math.sin(a))


def build_single_bs_scenario(distances: Sequence[float] = SINGLE_BS_DISTANCES,
                             fading: FadingParams | None = None,
                             snr_db: float = DEFAULT_SNR_DB, rho: float = DEFAULT_RHO,
                             mc_runs: int = 1, seed: int = 0) -> Scenario:
    """One station at the origin with its users at the given distances.

    The default puts two users near the station at comparable distances and
    a third one far away.  Users are spread at equal angles; only distance
    matters for a single station.
    """
    distances = [float(d) for d in distances]
    if not distances:
        raise ValueError("at least one user distance is required")
    for d in distances:
        if not (math.isfinite(d) and d > 0):
            raise ValueError(f"user distances must be positive, got {d}")
    if fading is None:
        fading = FadingParams(k_db=DEFAULT_K_DB, mu=DEFAULT_MU)
    step = 360.0 / len(distances)
    users = tuple(MobileUser(i + 1, _polar(d, 90.0 + i * step), "BS1")
                  for i, d in enumerate(distances))
    return Scenario((Station("BS1", Position(0.0, 0.0)),), users, fading,
                    SystemParams.from_snr_db(snr_db, rho), mc_runs, seed, "single_bs")


def build_two_bs_scenario(separation: float = TWO_BS_SEPARATION,
                          offsets: Sequence[tuple[float, float]] = TWO_BS_OFFSETS,
                          fading: FadingParams | None = None,
                          snr_db: float = DEFAULT_SNR_DB, rho: float = DEFAULT_RHO,
                          mc_runs: int = 1, seed: int = 0) -> Scenario:
    """Two stations on the x axis with mirror-image user layouts.

    ``offsets`` are user positions relative to BS1; BS2's users are their
    reflection through the midpoint's vertical axis.  With the default
    offsets users 1 and 2 of each cell are near their station and users 3
    and 4 are far, towards the other cell.
    """
    if not (math.isfinite(separation) and separation > 0):
        raise ValueError(f"station separation must be positive, got {separation}")
    if fading is None:
        fading = FadingParams(k_db=DEFAULT_K_DB, mu=DEFAULT_MU)
    bs1, bs2 = Position(0.0, 0.0), Position(float(separation), 0.0)
    users = []
    for i, (dx, dy) in enumerate(offsets):
        users.append(MobileUser(i + 1, Position(dx, dy), "BS1"))
    for i, (dx, dy) in enumerate(offsets):
        users.append(MobileUser(len(offsets) + i + 1, Position(separation - dx, dy), "BS2"))
    return Scenario((Station("BS1", bs1), Station("BS2", bs2)), tuple(users), fading,
                    SystemParams.from_snr_db(snr_db, rho), mc_runs, seed, "two_bs")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"unknown sweep variable {self.variable!r}; "
                             f"expected one of {', '.join(SWEEP_VARIABLES)}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("a sweep needs at least one value")
        diffs = np.diff(values)
        if len(values) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("sweep values must be strictly monotonic")
        object.__setattr__(self, "values", values)

    @classmethod
    def grid(cls, variable: str, start: float, stop: float, step: float) -> SweepSpec:
        """Inclusive arithmetic grid from ``start`` to ``stop``."""
        if step == 0 or (stop - start) / step < 0:
            raise ValueError(f"bad sweep grid {start}..{stop} step {step}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return cls(variable, tuple(round(start + i * step, 10) for i in range(n)))


@dataclass
class StationSweep:
    """Per-station sweep data.

    Arrays are indexed ``[point, run, structure, user]``.
    """

    station_id: str
    structures: tuple[CoalitionStructure, ...]
    payoffs: np.ndarray
    baseline: np.ndarray
    in_core: np.ndarray
    mean_in_core: np.ndarray

    @property
    def n_users(self) -> int:
        return self.payoffs.shape[-1]

    def structure_index(self, structure: CoalitionStructure | str) -> int:
        if isinstance(structure, str):
            structure = parse_structure(structure, self.n_users)
        return self.structures.index(structure)

    def mean_payoffs(self) -> np.ndarray:
        return self.payoffs.mean(axis=1)

    def group_totals(self) -> np.ndarray:
        """Mean group payoff per ``[point, structure]``."""
        return self.payoffs.sum(axis=3).mean(axis=1)

    def noncoop_totals(self) -> np.ndarray:
        return self.baseline.sum(axis=2).mean(axis=1)

    def gain_over_noncoop(self) -> np.ndarray:
        return self.group_totals() - self.noncoop_totals()[:, None]

    def relative_gain(self) -> np.ndarray:
        return self.gain_over_noncoop() / self.noncoop_totals()[:, None]

    def core_frequency(self) -> np.ndarray:
        return self.in_core.mean(axis=1)

    def curve(self, structure: CoalitionStructure | str) -> np.ndarray:
        return self.group_totals()[:, self.structure_index(structure)]


@dataclass
class SweepResult:
    spec: SweepSpec
    scenario: Scenario
    stations: list[StationSweep]
    metadata: dict[str, str] = field(default_factory=dict)

    def station(self, station_id: str) -> StationSweep:
        for st in self.stations:
            if st.station_id == station_id:
                return st
        raise KeyError(station_id)


def _resolve_structures(structures, n_users: int) -> tuple[CoalitionStructure, ...]:
    if structures is None:
        return tuple(enumerate_structures(n_users))
    out = []
    for s in structures:
        s = parse_structure(s, n_users) if isinstance(s, str) else s
        if not isinstance(s, CoalitionStructure) or s.n_players != n_users:
            raise ValueError(f"structure filter {s} is not a partition of {n_users} users")
        if s not in out:
            out.append(s)
    if not out:
        raise ValueError("structure filter is empty")
    return tuple(out)


def run_sweep(scenario: Scenario, spec: SweepSpec,
              structures: Iterable[CoalitionStructure | str] | None = None) -> SweepResult:
    """Evaluate every station's game at each sweep point and Monte Carlo run."""
    structures = list(structures) if structures is not None else None
    station_ids = [s.id for s in scenario.stations]
    sizes = {sid: len(scenario.known_users(sid)) for sid in station_ids}
    cands = {sid: _resolve_structures(structures, sizes[sid]) for sid in station_ids}
    n_pts, n_runs = len(spec.values), scenario.mc_runs
    payoffs = {sid: np.empty((n_pts, n_runs, len(cands[sid]), sizes[sid])) for sid in station_ids}
    baseline = {sid: np.empty((n_pts, n_runs, sizes[sid])) for sid in station_ids}
    in_core = {sid: np.zeros((n_pts, n_runs, len(cands[sid])), dtype=bool) for sid in station_ids}
    mean_core = {sid: np.zeros((n_pts, len(cands[sid])), dtype=bool) for sid in station_ids}

    for p, value in enumerate(spec.values):
        point = scenario.at(spec.variable, value)
        dev_sums: dict[str, list] = {}
        for r in range(n_runs):
            powers = point.received_powers(run_stream(scenario.seed, r))
            for sid in station_ids:
                n = sizes[sid]
                evals = evaluate_structures(
                    point.system, powers[sid],
                    (CoalitionStructure.singletons(n),) + cands[sid])
                base, evals = evals[0], evals[1:]
                table = deviation_table(point.system, powers[sid])
                report = core_of(evals, table)
                core_set = set(report.core_members)
                baseline[sid][p, r] = base.payoffs.sinr
                for k, ev in enumerate(evals):
                    payoffs[sid][p, r, k] = ev.payoffs.sinr
                    in_core[sid][p, r, k] = ev.structure in core_set
                acc = dev_sums.setdefault(sid, [(s, np.zeros(len(s))) for s, _ in table])
                for (_, total), (_, after) in zip(acc, table):
                    total += after
        for sid in station_ids:
            mean_table = [(s, tuple(total / n_runs)) for s, total in dev_sums[sid]]
            mean_pay = payoffs[sid][p].mean(axis=0)
            for k in range(len(cands[sid])):
                mean_core[sid][p, k] = first_blocking(mean_pay[k], mean_table) is None

    stations = [StationSweep(sid, cands[sid], payoffs[sid], baseline[sid],
                             in_core[sid], mean_core[sid]) for sid in station_ids]
    return SweepResult(spec, scenario, stations, _metadata(scenario, spec, structures))


def _metadata(scenario: Scenario, spec: SweepSpec, structures) -> dict[str, str]:
    lines = scenario.config_lines()
    lines.append(f"sweep.variable = {spec.variable}")
    lines.append("sweep.values = " + " ".join(repr(v) for v in spec.values))
    if structures is not None:
        lines.append("structures = " + " ".join(str(s) for s in structures))
    digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()
    return {"version": __version__, "seed": str(scenario.seed), "rng": RNG_ALGORITHM,
            "config_sha256": digest, "config": "\n".join(lines)}


def _fmt(x: float) -> str:
    return repr(float(x))


def _db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 else -math.inf


def result_rows(result: SweepResult) -> list[dict[str, str]]:
    """CSV rows in output order: station, point, runs then mean, structure, users then total."""
    var = result.spec.variable
    rows = []
    for st in result.stations:
        n_pts, n_runs, n_struct, n_users = st.payoffs.shape
        mean_pay = st.mean_payoffs()
        mean_base = st.baseline.mean(axis=1)
        freq = st.core_frequency()
        for p, value in enumerate(result.spec.values):
            blocks = [(str(r), st.payoffs[p, r], st.baseline[p, r], st.in_core[p, r], None)
                      for r in range(n_runs)]
            blocks.append(("mean", mean_pay[p], mean_base[p], freq[p], st.mean_in_core[p]))
            for run_label, pay, base, core_flag, mean_flag in blocks:
                base_total = math.fsum(base)
                for k, structure in enumerate(st.structures):
                    core_val = (_fmt(core_flag[k]) if mean_flag is not None
                                else str(int(core_flag[k])))
                    mean_val = "" if mean_flag is None else str(int(mean_flag[k]))
                    common = {"station_id": st.station_id, "sweep_variable": var,
                              "sweep_value": _fmt(value), "run_index": run_label,
                              "structure_label": structure.label(),
                              "in_core": core_val, "in_core_of_mean": mean_val}
                    for i in range(n_users):
                        rows.append(dict(common, user_id=str(i + 1),
                                         sinr_linear=_fmt(pay[k, i]),
                                         sinr_db=_fmt(_db(pay[k, i])),
                                         gain_over_noncoop_linear=_fmt(pay[k, i] - base[i])))
                    total = math.fsum(pay[k])
                    rows.append(dict(common, user_id="total", sinr_linear=_fmt(total),
                                     sinr_db=_fmt(_db(total)),
                                     gain_over_noncoop_linear=_fmt(total - base_total)))
    return rows


def _add_presentation_offset(rows: list[dict[str, str]]):
    # Shift user dB values by |min SINR dB| at each sweep point so bar charts
    # start at zero; presentation only.
    lows: dict[str, float] = {}
    for row in rows:
        if row["user_id"] != "total":
            v = float(row["sinr_db"])
            key = row["sweep_value"]
            lows[key] = min(lows.get(key, math.inf), v)
    for row in rows:
        if row["user_id"] == "total":
            row[OFFSET_COLUMN] = ""
        else:
            row[OFFSET_COLUMN] = _fmt(float(row["sinr_db"]) + abs(lows[row["sweep_value"]]))


def emit_results(result: SweepResult, destination: str | os.PathLike | IO[str],
                 presentation_offset: bool = False) -> str:
    """Write ``result`` as CSV with a ``#`` metadata header; returns the text."""
    buf = io.StringIO()
    meta = result.metadata
    buf.write("# gmudgame sweep results\n")
    for key in ("version", "seed", "rng", "config_sha256"):
        buf.write(f"# {key}: {meta.get(key, '')}\n")
    for line in meta.get("config", "").splitlines():
        buf.write(f"# config: {line}\n")
    rows = result_rows(result)
    columns = list(CSV_COLUMNS)
    if presentation_offset:
        _add_presentation_offset(rows)
        columns.append(OFFSET_COLUMN)
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    text = buf.getvalue()
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", newline="") as fh:
            fh.write(text)
    return text


def read_results(source: str | os.PathLike | IO[str]) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Parse a CSV written by :func:`emit_results` into (metadata, rows)."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, newline="") as fh:
            text = fh.read()
    meta: dict[str, str] = {}
    config = []
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            content = line[1:].strip()
            key, sep, value = content.partition(": ")
            if not sep:
                continue
            if key == "config":
                config.append(value)
            else:
                meta[key] = value
        else:
            body.append(line)
    meta["config"] = "\n".join(config)
    return meta, list(csv.DictReader(body))


def direct_evaluations(scenario: Scenario, station_id: str,
                       run_index: int = 0) -> list[StructureEvaluation]:
    """Evaluate all structures of one station for one channel realization."""
    powers = scenario.received_powers(run_stream(scenario.seed, run_index))
    return evaluate_all(scenario.system, powers[station_id])
