"""Dual certificates extracted from stuck search states.

When the local search halts with no addable edge and no removable blocker,
prices built from the halted state prove that the normalized instance is
infeasible at target 1: every active player is priced at 1 - 4/3 * (6/23) =
15/23, covered fat resources likewise, and covered thin resources at
min(value, 5/23).  The certificate is feasible for the configuration dual and
has positive objective, so scaling it up makes the dual unbounded.

Construction is never trusted: `verify_certificate_feasibility` re-derives
feasibility with the exact pricing search (covering every case of the
underlying analysis at once), and `check_blocker_balances` re-plays the
per-blocker accounting that makes the objective positive, which localizes any
failure to a single blocker.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .configlp import min_cost_configuration
from .errors import StateNotStuck
from .instances import NormalizedInstance, format_rational
from .matching import SearchState, find_addable_edge

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class BlockerGroup:
    """Players activated by one blocker and the resources its edges cover."""

    index: int
    players: tuple[str, ...]
    resources: tuple[str, ...]


@dataclass(frozen=True)
class DualCertificate:
    y: Mapping[str, Fraction]
    z: Mapping[str, Fraction]
    blocker_groups: tuple[BlockerGroup, ...]

    @property
    def objective(self) -> Fraction:
        return sum(self.y.values(), _ZERO) - sum(self.z.values(), _ZERO)

    def scaled(self, factor: Fraction) -> "DualCertificate":
        factor = Fraction(factor)
        return DualCertificate(
            y={p: v * factor for p, v in self.y.items()},
            z={r: v * factor for r, v in self.z.items()},
            blocker_groups=self.blocker_groups,
        )

    def balance(self, group: BlockerGroup) -> Fraction:
        inflow = sum((self.y[p] for p in group.players), _ZERO)
        outflow = sum((self.z[r] for r in group.resources), _ZERO)
        return inflow - outflow

    def to_json_dict(self) -> dict:
        return {
            "y": {p: format_rational(v) for p, v in self.y.items()},
            "z": {r: format_rational(v) for r, v in self.z.items()},
            "objective": format_rational(self.objective),
            "blockers": [
                {
                    "index": g.index,
                    "players": list(g.players),
                    "resources": list(g.resources),
                    "balance": format_rational(self.balance(g)),
                }
                for g in self.blocker_groups
            ],
        }


def assert_stuck(ni: NormalizedInstance, state: SearchState) -> None:
    """Raise StateNotStuck unless neither move is available.

    The deterministic edge policy is complete: it returns an edge whenever an
    uncovered fat resource exists for an active player or the uncovered thin
    resources of an active player together reach the threshold, which are
    exactly the conditions under which any addable edge exists.
    """
    if any(b.removable for b in state.blockers):
        raise StateNotStuck("a removable blocker exists")
    edge = find_addable_edge(ni, state)
    if edge is not None:
        raise StateNotStuck(f"addable edge exists: {edge}")


def construct_dual_certificate(
    ni: NormalizedInstance, state: SearchState
) -> DualCertificate:
    """Prices proving CLP(1) infeasible, computed from a stuck state."""
    assert_stuck(ni, state)
    active_price = _ONE - Fraction(4, 3) * ni.threshold
    thin_cap = Fraction(5, 6) * ni.threshold
    active = state.active
    covered = state.covered

    y = {p: (active_price if p in active else _ZERO) for p in ni.base.players}
    z = {}
    for r in ni.base.resources:
        if r not in covered:
            z[r] = _ZERO
        elif ni.is_fat(r):
            z[r] = active_price
        else:
            z[r] = min(ni.value(r), thin_cap)

    player_index = ni.base.player_index
    groups = []
    for i, b in enumerate(state.blockers):
        players = tuple(
            sorted((e.player for e in b.blocking), key=player_index)
        )
        resources = set(b.candidate.bundle)
        for e in b.blocking:
            resources |= e.bundle
        groups.append(
            BlockerGroup(
                index=i,
                players=players,
                resources=tuple(ni.base.sorted_resources(resources)),
            )
        )
    return DualCertificate(y=y, z=z, blocker_groups=tuple(groups))


@dataclass(frozen=True)
class FeasibilityReport:
    """Per-player margins min-config-cost minus y; feasible iff none negative."""

    passed: bool
    margins: Mapping[str, Optional[Fraction]]
    failures: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "margins": {
                p: (None if m is None else format_rational(m))
                for p, m in self.margins.items()
            },
            "failures": list(self.failures),
        }


def verify_certificate_feasibility(
    ni: NormalizedInstance, cert: DualCertificate
) -> FeasibilityReport:
    """Check y_p <= cost of the cheapest configuration at prices z, per player.

    Players with no configuration at target 1 are vacuously satisfied and
    reported with a None margin.
    """
    margins: dict[str, Optional[Fraction]] = {}
    failures = []
    for p in ni.base.players:
        priced = min_cost_configuration(ni.base, p, cert.z, _ONE)
        if priced is None:
            margins[p] = None
            continue
        cost, _ = priced
        margin = cost - cert.y[p]
        margins[p] = margin
        if margin < 0:
            failures.append(
                f"player {p!r}: cheapest configuration costs {cost} < y = {cert.y[p]}"
            )
    return FeasibilityReport(
        passed=not failures, margins=margins, failures=tuple(failures)
    )


@dataclass(frozen=True)
class BalanceReport:
    """Per-blocker accounting showing the certificate objective is positive."""

    passed: bool
    balances: tuple[Fraction, ...]
    objective: Fraction
    failures: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "balances": [format_rational(b) for b in self.balances],
            "objective": format_rational(self.objective),
            "failures": list(self.failures),
        }


def check_blocker_balances(
    ni: NormalizedInstance, state: SearchState, cert: DualCertificate
) -> BalanceReport:
    """Assert each blocker's player prices cover its resource prices.

    Blocker groups partition the active players (minus the root) and the
    covered resources, so the certificate objective decomposes as the root
    price plus the per-blocker balances; non-negative balances make it at
    least 15/23.
    """
    assert_stuck(ni, state)
    active_price = _ONE - Fraction(4, 3) * ni.threshold
    failures = []
    balances = []
    for g in cert.blocker_groups:
        balance = cert.balance(g)
        balances.append(balance)
        if balance < 0:
            failures.append(
                f"blocker {g.index}: player prices fall short by {-balance}"
            )
    objective = cert.objective
    decomposed = cert.y[state.root_player] + sum(balances, _ZERO)
    if objective != decomposed:
        failures.append(
            f"objective {objective} != root price + balances {decomposed}"
        )
    if cert.y[state.root_player] != active_price:
        failures.append("root player is not priced as active")
    if objective < active_price:
        failures.append(
            f"objective {objective} below the root price {active_price}"
        )
    return BalanceReport(
        passed=not failures,
        balances=tuple(balances),
        objective=objective,
        failures=tuple(failures),
    )
