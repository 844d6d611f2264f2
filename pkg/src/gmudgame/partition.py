"""Coalitions, coalition structures and set-partition enumeration.

Players are identified by 0-based integer indices.  Text labels use the
1-based digit notation common in the coalition-game literature, e.g. the
structure ``{{0, 1}, {2}}`` renders as ``"12|3"``.  With more than nine
players, members inside a block are comma separated (``"1,2,10|3"``).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

MAX_PLAYERS = 12

PlayerId = int


@dataclass(frozen=True, order=True)
class Coalition:
    """Non-empty, sorted set of player indices."""

    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(int(m) for m in self.members)
        if not members:
            raise ValueError("a coalition must have at least one member")
        if any(m < 0 for m in members):
            raise ValueError(f"player ids must be non-negative, got {members}")
        if len(set(members)) != len(members):
            raise ValueError(f"duplicate player ids in coalition {members}")
        object.__setattr__(self, "members", tuple(sorted(members)))

    @classmethod
    def of(cls, *members: int) -> Coalition:
        return cls(tuple(members))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, player):
        return player in self.members

    def label(self, n_players: int | None = None) -> str:
        wide = (n_players if n_players is not None else max(self.members) + 1) > 9
        sep = "," if wide else ""
        return sep.join(str(m + 1) for m in self.members)

    def __str__(self):
        return self.label()


@dataclass(frozen=True)
class CoalitionStructure:
    """A partition of players ``0..n_players-1`` into coalitions.

    Blocks are kept in canonical order (sorted by smallest member), so
    equality, hashing and labels are deterministic.
    """

    blocks: tuple[Coalition, ...]

    def __post_init__(self):
        blocks = tuple(b if isinstance(b, Coalition) else Coalition(tuple(b))
                       for b in self.blocks)
        if not blocks:
            raise ValueError("a coalition structure needs at least one block")
        seen: set[int] = set()
        for block in blocks:
            overlap = seen.intersection(block.members)
            if overlap:
                raise ValueError(
                    f"blocks are not disjoint: player(s) "
                    f"{sorted(p + 1 for p in overlap)} appear twice")
            seen.update(block.members)
        n = len(seen)
        if seen != set(range(n)):
            raise ValueError(
                "blocks must cover players 1..n without gaps, got "
                f"{sorted(p + 1 for p in seen)}")
        object.__setattr__(self, "blocks",
                           tuple(sorted(blocks, key=lambda b: b.members[0])))

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> CoalitionStructure:
        return cls(tuple(Coalition(tuple(b)) for b in blocks))

    @classmethod
    def grand(cls, n_players: int) -> CoalitionStructure:
        _check_count(n_players)
        return cls((Coalition(tuple(range(n_players))),))

    @classmethod
    def singletons(cls, n_players: int) -> CoalitionStructure:
        _check_count(n_players)
        return cls(tuple(Coalition((i,)) for i in range(n_players)))

    @property
    def n_players(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def players(self) -> tuple[int, ...]:
        return tuple(range(self.n_players))

    def block_of(self, player: int) -> Coalition:
        for block in self.blocks:
            if player in block:
                return block
        raise ValueError(f"player {player + 1} is not in structure {self}")

    def is_grand(self) -> bool:
        return len(self.blocks) == 1

    def is_noncooperative(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def label(self) -> str:
        n = self.n_players
        return "|".join(b.label(n) for b in self.blocks)

    def __str__(self):
        return self.label()

    def __repr__(self):
        return f"CoalitionStructure({self.label()!r})"


def _check_count(n: int, what: str = "player_count"):
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"{what} must be an integer, got {n!r}")
    if not 1 <= n <= MAX_PLAYERS:
        raise ValueError(f"{what} must be in 1..{MAX_PLAYERS}, got {n}")


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """Yield the restricted growth strings of length ``n`` in lexicographic order.

    A string ``a`` satisfies ``a[0] == 0`` and ``a[i] <= 1 + max(a[:i])``;
    each one encodes a set partition where ``a[i]`` is the block of element i.
    """
    a = [0] * n
    # prefix_max[i] = max(a[:i]) for i >= 1
    prefix_max = [0] * n
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] > prefix_max[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        top = max(prefix_max[i], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            prefix_max[j] = top


def structure_from_rgs(rgs: Sequence[int]) -> CoalitionStructure:
    blocks: list[list[int]] = []
    for player, b in enumerate(rgs):
        if b == len(blocks):
            blocks.append([])
        blocks[b].append(player)
    return CoalitionStructure(tuple(Coalition(tuple(b)) for b in blocks))


def iter_structures(player_count: int) -> Iterator[CoalitionStructure]:
    _check_count(player_count)
    for rgs in restricted_growth_strings(player_count):
        yield structure_from_rgs(rgs)


def enumerate_structures(player_count: int) -> list[CoalitionStructure]:
    """All coalition structures of ``player_count`` players.

    The result has Bell-number length and follows restricted-growth-string
    order, so for three players it is ``123, 12|3, 13|2, 1|23, 1|2|3``.
    """
    return list(iter_structures(player_count))


def complement(coalition: Coalition | Iterable[int],
               universe: Iterable[int]) -> frozenset[int]:
    """Players of ``universe`` outside ``coalition``."""
    members = set(coalition)
    universe = frozenset(universe)
    stray = members - universe
    if stray:
        raise ValueError(
            f"player(s) {sorted(p + 1 for p in stray)} are not in the universe")
    return universe - members


def subsets(players: Sequence[int]) -> list[Coalition]:
    """Every non-empty subset of ``players``, ordered by size then lexicographically."""
    players = sorted(set(players))
    if not players:
        raise ValueError("subsets() needs at least one player")
    _check_count(len(players), "number of players")
    return [Coalition(c) for k in range(1, len(players) + 1)
            for c in combinations(players, k)]


def parse_structure(label: str, n_players: int | None = None) -> CoalitionStructure:
    """Inverse of :meth:`CoalitionStructure.label`.

    ``"12|3"`` parses digit by digit.  Labels that contain a comma, or do not
    parse digit by digit, are read as comma-separated 1-based numbers.
    """
    text = label.strip()
    if not text:
        raise ValueError("empty structure label")
    parts = [part.strip() for part in text.split("|")]
    if not all(parts):
        raise ValueError(f"empty block in structure label {label!r}")
    # digit-per-member first; wide labels (10+ players) never parse that way
    attempts = [] if "," in text else [[list(part) for part in parts]]
    attempts.append([part.split(",") for part in parts])
    error = None
    for tokens in attempts:
        try:
            blocks = [[int(t) - 1 for t in block] for block in tokens]
            structure = CoalitionStructure.from_blocks(blocks)
            break
        except ValueError as exc:
            error = exc
    else:
        raise ValueError(f"bad structure label {label!r}: {error}") from None
    if n_players is not None and structure.n_players != n_players:
        raise ValueError(
            f"structure {label!r} covers {structure.n_players} players, "
            f"expected {n_players}")
    return structure
