"""Local-search construction of a perfect matching in the bundle hypergraph.

Players are matched either to one fat resource or to a minimal bundle of thin
resources reaching the 6/23 threshold.  To match one more player the search
grows a chronological sequence of blockers: each blocker pairs a candidate
edge with the matching edges currently occupying its resources.  A blocker
with no blocking edges is contracted (its candidate enters the matching,
freeing an earlier blocking edge and truncating the sequence); otherwise a new
addable edge is built on top.  The signature of the blocker sequence strictly
decreases lexicographically at every step, so each extension terminates.

A search that halts with no addable edge and no removable blocker is returned
as a first-class Stuck outcome: it happens exactly when the target exceeds
the configuration-LP optimum, and the stuck state is the raw material for an
infeasibility certificate (see `certificates`).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional

from .errors import (
    MatchingNotPerfect,
    NoRemovableBlocker,
    NotAddable,
    PlayerAlreadyMatched,
)
from .instances import GUARANTEE_FRACTION, Instance, NormalizedInstance, bundle_value

FAT = "fat"
THIN = "thin"

INFINITY = float("inf")

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Edge:
    """A hyperedge: one fat resource, or a minimal thin bundle, for a player."""

    player: str
    bundle: frozenset[str]
    kind: str


@dataclass(frozen=True)
class Matching:
    """A set of edges sharing no player and no resource."""

    edges: frozenset[Edge]

    def __post_init__(self):
        players = [e.player for e in self.edges]
        if len(set(players)) != len(players):
            raise ValueError("matching edges share a player")
        total = sum(len(e.bundle) for e in self.edges)
        union = set()
        for e in self.edges:
            union |= e.bundle
        if len(union) != total:
            raise ValueError("matching edges share a resource")

    @classmethod
    def empty(cls) -> "Matching":
        return cls(edges=frozenset())

    @classmethod
    def of(cls, edges: Iterable[Edge]) -> "Matching":
        return cls(edges=frozenset(edges))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.edges)

    def players(self) -> frozenset[str]:
        return frozenset(e.player for e in self.edges)

    def resources(self) -> frozenset[str]:
        out = set()
        for e in self.edges:
            out |= e.bundle
        return frozenset(out)

    def edge_of(self, player: str) -> Optional[Edge]:
        for e in self.edges:
            if e.player == player:
                return e
        return None

    def sharing(self, bundle: frozenset[str]) -> list[Edge]:
        return [e for e in self.edges if e.bundle & bundle]

    def with_edge(self, edge: Edge) -> "Matching":
        return Matching(edges=self.edges | {edge})

    def replace(self, old: Edge, new: Edge) -> "Matching":
        if old not in self.edges:
            raise ValueError("edge to replace is not in the matching")
        return Matching(edges=(self.edges - {old}) | {new})


@dataclass(frozen=True)
class Blocker:
    """A candidate edge plus the matching edges keeping it out."""

    candidate: Edge
    blocking: tuple[Edge, ...]

    @property
    def removable(self) -> bool:
        return not self.blocking


@dataclass(frozen=True)
class Signature:
    """Blocking-set sizes followed by an infinite sentinel; ordered lexicographically."""

    entries: tuple

    def __lt__(self, other: "Signature") -> bool:
        return self.entries < other.entries

    def __le__(self, other: "Signature") -> bool:
        return self.entries <= other.entries


class SearchState:
    """Mutable state of one extension run: matching, blockers, coverage.

    `covered` and the activation order are maintained incrementally by the
    step functions but are always recomputable from the blocker sequence;
    `oracle.check_state_invariants` compares both forms.
    """

    def __init__(
        self,
        normalized: NormalizedInstance,
        matching: Matching,
        root_player: str,
    ):
        normalized.base.player_index(root_player)
        if matching.edge_of(root_player) is not None:
            raise PlayerAlreadyMatched(f"{root_player!r} is already matched")
        self.normalized = normalized
        self.matching = matching
        self.root_player = root_player
        self.blockers: list[Blocker] = []
        self.covered: set[str] = set()
        self.active_order: list[str] = [root_player]

    @property
    def active(self) -> frozenset[str]:
        return frozenset(self.active_order)

    def is_active(self, player: str) -> bool:
        return player in self.active_order

    def recompute_covered(self) -> set[str]:
        out: set[str] = set()
        for b in self.blockers:
            out |= b.candidate.bundle
            for e in b.blocking:
                out |= e.bundle
        return out

    def recompute_active_order(self) -> list[str]:
        index = self.normalized.base.player_index
        order = [self.root_player]
        for b in self.blockers:
            order.extend(sorted((e.player for e in b.blocking), key=index))
        return order


def make_fat_edge(ni: NormalizedInstance, player: str, resource: str) -> Edge:
    if resource not in ni.fat.get(player, frozenset()):
        raise ValueError(f"{resource!r} is not a fat resource desired by {player!r}")
    return Edge(player=player, bundle=frozenset({resource}), kind=FAT)


def make_thin_edge(ni: NormalizedInstance, player: str, bundle: Iterable[str]) -> Edge:
    bundle = frozenset(bundle)
    if not is_minimal_thin_edge(ni, player, bundle):
        raise ValueError(f"{sorted(bundle)} is not a minimal thin bundle for {player!r}")
    return Edge(player=player, bundle=bundle, kind=THIN)


def is_minimal_thin_edge(
    ni: NormalizedInstance, player: str, bundle: Iterable[str]
) -> bool:
    """True iff `bundle` is all-thin for the player, reaches the threshold,
    and every single removal drops below it."""
    bundle = frozenset(bundle)
    thin = ni.thin.get(player)
    if thin is None:
        ni.base.player_index(player)
        thin = frozenset()
    for r in bundle:
        ni.base.resource_index(r)
    if not bundle or not bundle <= thin:
        return False
    total = sum((ni.value(r) for r in bundle), _ZERO)
    if total < ni.threshold:
        return False
    smallest = min(ni.value(r) for r in bundle)
    return total - smallest < ni.threshold


def edge_in_hypergraph(ni: NormalizedInstance, edge: Edge) -> bool:
    if edge.kind == FAT:
        return (
            len(edge.bundle) == 1
            and next(iter(edge.bundle)) in ni.fat.get(edge.player, frozenset())
        )
    if edge.kind == THIN:
        return is_minimal_thin_edge(ni, edge.player, edge.bundle)
    return False


def _greedy_thin_bundle(
    ni: NormalizedInstance, available: list[str]
) -> Optional[frozenset[str]]:
    """Accumulate thin resources until the threshold, then trim to minimality.

    `available` fixes the accumulation order; trimming removes resources in
    ascending value (ties by index) while the bundle stays at or above the
    threshold.  With a descending-value order the trim is a no-op, but it
    guarantees minimality under any order (e.g. the randomized policy).
    """
    chosen: list[str] = []
    total = _ZERO
    for r in available:
        chosen.append(r)
        total += ni.value(r)
        if total >= ni.threshold:
            break
    if total < ni.threshold:
        return None
    index = ni.base.resource_index
    for r in sorted(chosen, key=lambda r: (ni.value(r), index(r))):
        if total - ni.value(r) >= ni.threshold:
            chosen.remove(r)
            total -= ni.value(r)
    return frozenset(chosen)


def find_addable_edge(
    ni: NormalizedInstance,
    state: SearchState,
    rng: Optional[random.Random] = None,
) -> Optional[Edge]:
    """An edge for an active player avoiding every covered resource, or None.

    Deterministic policy: scan active players in activation order; prefer the
    smallest-index uncovered fat resource, otherwise grow a thin bundle
    greedily by descending value.  Passing `rng` switches to a seeded uniform
    choice among all candidate edges (one thin candidate per player).
    """
    index = ni.base.resource_index
    covered = state.covered
    candidates: list[Edge] = []
    for q in state.active_order:
        fat_avail = sorted(
            (r for r in ni.fat.get(q, frozenset()) if r not in covered), key=index
        )
        # Canonical order before any use: set iteration order is not stable
        # across processes, and the seeded policy must be.
        thin_avail = sorted(
            (r for r in ni.thin.get(q, frozenset()) if r not in covered), key=index
        )
        if rng is None:
            if fat_avail:
                return Edge(player=q, bundle=frozenset({fat_avail[0]}), kind=FAT)
            thin_avail.sort(key=lambda r: (-ni.value(r), index(r)))
            bundle = _greedy_thin_bundle(ni, thin_avail)
            if bundle is not None:
                return Edge(player=q, bundle=bundle, kind=THIN)
        else:
            candidates.extend(
                Edge(player=q, bundle=frozenset({r}), kind=FAT) for r in fat_avail
            )
            rng.shuffle(thin_avail)
            bundle = _greedy_thin_bundle(ni, thin_avail)
            if bundle is not None:
                candidates.append(Edge(player=q, bundle=bundle, kind=THIN))
    if rng is not None and candidates:
        return candidates[rng.randrange(len(candidates))]
    return None


def build_step(state: SearchState, edge: Edge) -> SearchState:
    """Append the blocker for an addable edge; activates newly blocked players."""
    ni = state.normalized
    if not state.is_active(edge.player):
        raise NotAddable(f"player {edge.player!r} is not active")
    if edge.bundle & state.covered:
        raise NotAddable(
            f"edge reuses covered resources {sorted(edge.bundle & state.covered)}"
        )
    if not edge_in_hypergraph(ni, edge):
        raise NotAddable(f"not an edge of the hypergraph: {edge}")
    index = ni.base.player_index
    blocking = tuple(
        sorted(state.matching.sharing(edge.bundle), key=lambda e: index(e.player))
    )
    state.blockers.append(Blocker(candidate=edge, blocking=blocking))
    state.covered |= edge.bundle
    for e in blocking:
        state.covered |= e.bundle
        assert not state.is_active(e.player)  # blocking edges never repeat players
        state.active_order.append(e.player)
    return state


def contract_step(state: SearchState) -> Optional[Matching]:
    """Contract the lowest-index removable blocker.

    Returns the final matching when the candidate matches the root player;
    otherwise swaps the candidate for the blocking edge that activated its
    player, truncates the sequence after the activating blocker, and returns
    None with the state updated in place.
    """
    k = next((i for i, b in enumerate(state.blockers) if b.removable), None)
    if k is None:
        raise NoRemovableBlocker("every blocker still has blocking edges")
    candidate = state.blockers[k].candidate
    q = candidate.player
    if q == state.root_player:
        return state.matching.with_edge(candidate)

    activators = [
        (j, e)
        for j, b in enumerate(state.blockers)
        for e in b.blocking
        if e.player == q
    ]
    assert len(activators) == 1  # an active player has exactly one activator
    j, freed = activators[0]
    assert j < k
    state.matching = state.matching.replace(freed, candidate)
    kept = tuple(e for e in state.blockers[j].blocking if e is not freed)
    state.blockers[j] = Blocker(candidate=state.blockers[j].candidate, blocking=kept)
    del state.blockers[j + 1 :]
    state.covered = state.recompute_covered()
    state.active_order = state.recompute_active_order()
    return None


def signature(state: SearchState) -> Signature:
    return Signature(
        entries=tuple(len(b.blocking) for b in state.blockers) + (INFINITY,)
    )


@dataclass(frozen=True)
class TraceEvent:
    """One step of an extension run, for logging and signature monitoring."""

    step: int
    kind: str  # build | contract | terminate | stuck
    player: Optional[str]
    bundle: tuple[str, ...]
    blocker_index: Optional[int]
    signature: Signature

    def to_json_dict(self) -> dict:
        return {
            "step": self.step,
            "kind": self.kind,
            "player": self.player,
            "bundle": list(self.bundle),
            "blocker_index": self.blocker_index,
            "signature": [
                "inf" if e == INFINITY else e for e in self.signature.entries
            ],
        }


@dataclass(frozen=True)
class ExtendOutcome:
    status: str  # extended | stuck
    matching: Optional[Matching]
    state: SearchState
    trace: tuple[TraceEvent, ...]

    @property
    def extended(self) -> bool:
        return self.status == "extended"

    @property
    def builds(self) -> int:
        return sum(1 for ev in self.trace if ev.kind == "build")

    @property
    def contracts(self) -> int:
        return sum(1 for ev in self.trace if ev.kind in ("contract", "terminate"))

    @property
    def signatures(self) -> tuple[Signature, ...]:
        """Signature sequence of the run: initial state, then every state
        change (terminal events do not alter the blocker sequence)."""
        seq = [Signature((INFINITY,))]
        for ev in self.trace:
            if ev.kind in ("build", "contract"):
                seq.append(ev.signature)
        return tuple(seq)


def extend_matching(
    ni: NormalizedInstance,
    matching: Matching,
    root_player: str,
    *,
    rng: Optional[random.Random] = None,
    on_step: Optional[Callable[[SearchState], None]] = None,
) -> ExtendOutcome:
    """Grow `matching` by one edge so that `root_player` becomes matched.

    Alternates contraction (whenever a removable blocker exists) with
    building an addable edge.  Returns Stuck with the halted state when
    neither move is available, which is possible only if the normalized
    instance is infeasible at target 1.  `on_step` runs after every step,
    e.g. to audit invariants.
    """
    state = SearchState(ni, matching, root_player)
    trace: list[TraceEvent] = []
    last_sig = signature(state)

    def emit(kind, player, bundle, blocker_index):
        trace.append(
            TraceEvent(
                step=len(trace),
                kind=kind,
                player=player,
                bundle=tuple(ni.base.sorted_resources(bundle)) if bundle else (),
                blocker_index=blocker_index,
                signature=signature(state),
            )
        )

    while True:
        removable = next(
            (i for i, b in enumerate(state.blockers) if b.removable), None
        )
        if removable is not None:
            touched = state.blockers[removable].candidate
            result = contract_step(state)
            if result is not None:
                emit("terminate", touched.player, touched.bundle, removable)
                if on_step is not None:
                    on_step(state)
                return ExtendOutcome(
                    status="extended",
                    matching=result,
                    state=state,
                    trace=tuple(trace),
                )
            emit("contract", touched.player, touched.bundle, removable)
        else:
            edge = find_addable_edge(ni, state, rng)
            if edge is None:
                emit("stuck", None, None, None)
                return ExtendOutcome(
                    status="stuck", matching=None, state=state, trace=tuple(trace)
                )
            build_step(state, edge)
            emit("build", edge.player, edge.bundle, len(state.blockers) - 1)
        if on_step is not None:
            on_step(state)
        # Progress guard: every step strictly drops the signature.
        sig = signature(state)
        assert sig < last_sig
        last_sig = sig


@dataclass(frozen=True)
class SearchOutcome:
    status: str  # perfect | stuck
    matching: Optional[Matching]
    state: Optional[SearchState]
    extensions: tuple[ExtendOutcome, ...]

    @property
    def perfect(self) -> bool:
        return self.status == "perfect"

    @property
    def builds(self) -> int:
        return sum(e.builds for e in self.extensions)

    @property
    def contracts(self) -> int:
        return sum(e.contracts for e in self.extensions)


def find_perfect_matching(
    ni: NormalizedInstance,
    *,
    rng: Optional[random.Random] = None,
    on_step: Optional[Callable[[SearchState], None]] = None,
) -> SearchOutcome:
    """Match every player by repeated extension, or surface the first Stuck state."""
    matching = Matching.empty()
    extensions: list[ExtendOutcome] = []
    for p in ni.base.players:
        if matching.edge_of(p) is not None:
            continue
        outcome = extend_matching(ni, matching, p, rng=rng, on_step=on_step)
        extensions.append(outcome)
        if not outcome.extended:
            return SearchOutcome(
                status="stuck",
                matching=None,
                state=outcome.state,
                extensions=tuple(extensions),
            )
        matching = outcome.matching
    return SearchOutcome(
        status="perfect",
        matching=matching,
        state=None,
        extensions=tuple(extensions),
    )


def complete_allocation(
    instance: Instance, matching: Matching, target: Fraction
) -> dict[str, set[str]]:
    """Turn a perfect matching into a full partition of the resources.

    Every player keeps their matched bundle (worth at least 6/23 of the
    target); each leftover resource goes to the lowest-index player desiring
    it, or to the first player when nobody does.
    """
    target = Fraction(target)
    matched_players = matching.players()
    missing = [p for p in instance.players if p not in matched_players]
    if missing:
        raise MatchingNotPerfect(f"unmatched players: {missing}")
    allocation: dict[str, set[str]] = {p: set() for p in instance.players}
    for e in matching:
        worth = bundle_value(instance, e.player, e.bundle)
        if worth < GUARANTEE_FRACTION * target:
            raise MatchingNotPerfect(
                f"bundle for {e.player!r} is worth {worth}, below the "
                f"guarantee at target {target}"
            )
        allocation[e.player] |= set(e.bundle)

    taken = matching.resources()
    for r in instance.resources:
        if r in taken:
            continue
        desirers = instance.desirers(r)
        owner = desirers[0] if desirers else instance.players[0]
        allocation[owner].add(r)
    return allocation
