"""Instance model for restricted max-min fair allocation.

Every resource has a single value; a player either desires a resource (and
values it at the resource's value) or does not (and values it at zero).  All
numeric quantities are exact rationals: the analysis this package verifies
rests on exact equalities such as 1 - 4*(6/23)/3 == 15/23, which do not
survive floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    DuplicateId,
    EmptyPlayers,
    InvalidInstance,
    InvalidTarget,
    NegativeValue,
    UnknownPlayer,
    UnknownResource,
)

#: Fraction of the optimal target that every player is guaranteed to receive.
GUARANTEE_FRACTION = Fraction(6, 23)


def parse_rational(raw) -> Fraction:
    """Parse an exact rational from "p/q" or decimal strings, ints or Fractions.

    Floats are rejected: their binary expansion would silently break the exact
    arithmetic contract.
    """
    if isinstance(raw, Fraction):
        return raw
    if isinstance(raw, bool):
        raise InvalidInstance(f"not a rational value: {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        raise InvalidInstance(
            f"float value {raw!r} is not exact; pass a string like '1/3' or '0.25'"
        )
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInstance(f"cannot parse rational from {raw!r}") from exc
    raise InvalidInstance(f"cannot parse rational from {raw!r}")


def format_rational(q: Fraction) -> str:
    """Render a Fraction as "p/q" (or "p" for integers) for bit-exact files."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Instance:
    """An allocation problem: players, valued resources, per-player desires.

    Immutable after construction; the input order of players and resources is
    the universal tie-breaking order used by every deterministic choice
    downstream.
    """

    players: tuple[str, ...]
    resources: tuple[str, ...]
    value: Mapping[str, Fraction]
    desire: Mapping[str, frozenset[str]]
    _player_index: dict[str, int] = field(init=False, repr=False, compare=False)
    _resource_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_player_index", {p: i for i, p in enumerate(self.players)}
        )
        object.__setattr__(
            self, "_resource_index", {r: i for i, r in enumerate(self.resources)}
        )

    @property
    def num_players(self) -> int:
        return len(self.players)

    @property
    def num_resources(self) -> int:
        return len(self.resources)

    def player_index(self, player: str) -> int:
        try:
            return self._player_index[player]
        except KeyError:
            raise UnknownPlayer(f"unknown player {player!r}") from None

    def resource_index(self, resource: str) -> int:
        try:
            return self._resource_index[resource]
        except KeyError:
            raise UnknownResource(f"unknown resource {resource!r}") from None

    def desired_by(self, player: str) -> frozenset[str]:
        self.player_index(player)
        return self.desire.get(player, frozenset())

    def desirers(self, resource: str) -> list[str]:
        """Players that desire `resource`, in input order."""
        self.resource_index(resource)
        return [p for p in self.players if resource in self.desire.get(p, frozenset())]

    def sorted_resources(self, bundle: Iterable[str]) -> list[str]:
        """Canonical (input-order) listing of a resource set."""
        return sorted(bundle, key=self.resource_index)

    def scaled(self, factor: Fraction) -> "Instance":
        """A copy with every resource value multiplied by `factor`."""
        return Instance(
            players=self.players,
            resources=self.resources,
            value={r: v * factor for r, v in self.value.items()},
            desire=self.desire,
        )

    def to_json_dict(self) -> dict:
        return {
            "players": list(self.players),
            "resources": [
                {"id": r, "value": format_rational(self.value[r])}
                for r in self.resources
            ],
            "desires": {p: self.sorted_resources(self.desire[p]) for p in self.players},
        }


def validate_instance(raw) -> Instance:
    """Build a well-formed Instance from an untyped description.

    `raw` follows the instance JSON layout: {"players": [id], "resources":
    [{"id": id, "value": rational}], "desires": {player: [resource]}}.
    Ids keep their input order; values may be "p/q" strings, decimal strings
    or ints.
    """
    if not isinstance(raw, Mapping):
        raise InvalidInstance("instance description must be a mapping")
    try:
        raw_players = list(raw["players"])
        raw_resources = list(raw["resources"])
    except KeyError as exc:
        raise InvalidInstance(f"missing field: {exc.args[0]!r}") from None
    raw_desires = raw.get("desires", {})

    if not raw_players:
        raise EmptyPlayers("instance must have at least one player")

    players: list[str] = []
    seen = set()
    for p in raw_players:
        if not isinstance(p, str):
            raise InvalidInstance(f"player id must be a string: {p!r}")
        if p in seen:
            raise DuplicateId(f"duplicate player id {p!r}")
        seen.add(p)
        players.append(p)

    resources: list[str] = []
    value: dict[str, Fraction] = {}
    seen = set()
    for entry in raw_resources:
        if isinstance(entry, Mapping):
            rid, rawval = entry.get("id"), entry.get("value")
        else:
            try:
                rid, rawval = entry  # (id, value) pairs are accepted programmatically
            except (TypeError, ValueError):
                raise InvalidInstance(f"malformed resource entry: {entry!r}") from None
        if not isinstance(rid, str):
            raise InvalidInstance(f"resource id must be a string: {rid!r}")
        if rid in seen:
            raise DuplicateId(f"duplicate resource id {rid!r}")
        seen.add(rid)
        v = parse_rational(rawval)
        if v < 0:
            raise NegativeValue(f"resource {rid!r} has negative value {v}")
        resources.append(rid)
        value[rid] = v

    resource_set = set(resources)
    desire: dict[str, frozenset[str]] = {}
    for p in players:
        wanted = raw_desires.get(p, [])
        for r in wanted:
            if r not in resource_set:
                raise UnknownResource(f"player {p!r} desires unknown resource {r!r}")
        desire[p] = frozenset(wanted)
    for p in raw_desires:
        if p not in desire:
            raise UnknownPlayer(f"desires reference unknown player {p!r}")

    return Instance(
        players=tuple(players),
        resources=tuple(resources),
        value=value,
        desire=desire,
    )


def bundle_value(instance: Instance, player: str, bundle: Iterable[str]) -> Fraction:
    """Total value of `bundle` for `player`: undesired resources contribute 0."""
    desired = instance.desired_by(player)
    total = Fraction(0)
    for r in set(bundle):
        instance.resource_index(r)
        if r in desired:
            total += instance.value[r]
    return total


@dataclass(frozen=True)
class NormalizedInstance:
    """An instance rescaled so that the target value becomes 1.

    Each desired resource is classified against the threshold 6/23: `fat`
    resources reach it on their own, `thin` ones do not.  Desired resources of
    value zero belong to neither class (they can never help reach the
    threshold) but remain legal and may be handed out when completing an
    allocation.
    """

    base: Instance
    threshold: Fraction
    fat: Mapping[str, frozenset[str]]
    thin: Mapping[str, frozenset[str]]
    fat_resources: frozenset[str]

    def is_fat(self, resource: str) -> bool:
        return resource in self.fat_resources

    def value(self, resource: str) -> Fraction:
        return self.base.value[resource]


def normalize(instance: Instance, target: Fraction) -> NormalizedInstance:
    """Scale all values by 1/target and classify desired resources fat/thin."""
    target = Fraction(target)
    if target <= 0:
        raise InvalidTarget(f"target must be positive, got {target}")
    scaled = instance.scaled(Fraction(1, 1) / target)
    threshold = GUARANTEE_FRACTION
    fat_resources = frozenset(
        r for r in scaled.resources if scaled.value[r] >= threshold
    )
    fat: dict[str, frozenset[str]] = {}
    thin: dict[str, frozenset[str]] = {}
    for p in scaled.players:
        wanted = scaled.desired_by(p)
        fat[p] = frozenset(r for r in wanted if r in fat_resources)
        thin[p] = frozenset(
            r for r in wanted if 0 < scaled.value[r] < threshold
        )
    return NormalizedInstance(
        base=scaled,
        threshold=threshold,
        fat=fat,
        thin=thin,
        fat_resources=fat_resources,
    )
