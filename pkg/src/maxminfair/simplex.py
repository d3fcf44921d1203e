"""Self-contained exact linear programming over rationals.

Two-phase primal simplex on a dense tableau of Fractions with Bland's
anti-cycling pivot rule, so every solve terminates and is deterministic.
Optimal outcomes carry exact primal and dual solutions; `verify_outcome`
re-checks them from scratch (feasibility, dual feasibility, equal objectives,
complementary slackness) without trusting the solver.

Scale note: instances in this package have a handful of rows and at most a
few thousand columns, where exact dense pivoting is entirely adequate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DimensionMismatch

RELATIONS = ("<=", ">=", "=")

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class LinearProgram:
    """min or max of objective . x subject to rows, with every x_j >= 0."""

    sense: str
    objective: tuple[Fraction, ...]
    rows: tuple[tuple[tuple[Fraction, ...], str, Fraction], ...]

    @classmethod
    def build(cls, sense, objective, rows) -> "LinearProgram":
        if sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
        obj = tuple(Fraction(c) for c in objective)
        packed = []
        for coeffs, rel, rhs in rows:
            coeffs = tuple(Fraction(c) for c in coeffs)
            if len(coeffs) != len(obj):
                raise DimensionMismatch(
                    f"row width {len(coeffs)} != objective width {len(obj)}"
                )
            if rel not in RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
            packed.append((coeffs, rel, Fraction(rhs)))
        return cls(sense=sense, objective=obj, rows=tuple(packed))

    @classmethod
    def minimize(cls, objective, rows) -> "LinearProgram":
        return cls.build("min", objective, rows)

    @classmethod
    def maximize(cls, objective, rows) -> "LinearProgram":
        return cls.build("max", objective, rows)

    @property
    def num_vars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpOutcome:
    """Solver verdict; primal/dual/objective are set only when optimal.

    Dual sign convention (for `sense == "min"`): the multiplier of a ">="
    row is >= 0, of a "<=" row is <= 0, of an "=" row is free, and
    dual . rhs equals the primal objective.  For "max" the inequality signs
    flip.  `verify_outcome` enforces exactly this convention.
    """

    status: str
    primal: Optional[tuple[Fraction, ...]] = None
    dual: Optional[tuple[Fraction, ...]] = None
    objective: Optional[Fraction] = None


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Exact optimum with primal and dual solutions, or Infeasible/Unbounded."""
    if not isinstance(lp, LinearProgram):
        lp = LinearProgram.build(*lp)
    maximize = lp.sense == "max"
    n = lp.num_vars
    m = len(lp.rows)
    cost = [(-c if maximize else c) for c in lp.objective]

    # Normalize to non-negative right-hand sides, recording flipped rows so
    # the duals can be mapped back to the rows as stated.
    flipped = [False] * m
    norm_rows: list[tuple[list[Fraction], str, Fraction]] = []
    for i, (coeffs, rel, rhs) in enumerate(lp.rows):
        if len(coeffs) != n:
            raise DimensionMismatch(f"row {i} width {len(coeffs)} != {n}")
        coeffs = list(coeffs)
        if rhs < 0:
            coeffs = [-c for c in coeffs]
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
            flipped[i] = True
        norm_rows.append((coeffs, rel, rhs))

    # Standard form: one slack/surplus per inequality, one artificial per row
    # (full identity start keeps the inverse basis readable under the
    # artificial block for exact dual extraction).
    n_slack = sum(1 for _, rel, _ in norm_rows if rel != "=")
    total = n + n_slack + m
    art_start = n + n_slack

    tableau: list[list[Fraction]] = []
    slack_pos = 0
    for i, (coeffs, rel, rhs) in enumerate(norm_rows):
        row = list(coeffs) + [_ZERO] * (n_slack + m) + [rhs]
        if rel != "=":
            row[n + slack_pos] = _ONE if rel == "<=" else -_ONE
            slack_pos += 1
        row[art_start + i] = _ONE
        tableau.append(row)
    basis = [art_start + i for i in range(m)]

    full_cost_phase2 = cost + [_ZERO] * (n_slack + m)

    def reduced_costs(full_cost: list[Fraction]) -> list[Fraction]:
        red = list(full_cost)
        for k, bi in enumerate(basis):
            cb = full_cost[bi]
            if cb:
                row = tableau[k]
                for j in range(total):
                    if row[j]:
                        red[j] -= cb * row[j]
        return red

    def pivot(row_k: int, col_j: int) -> None:
        prow = tableau[row_k]
        inv = _ONE / prow[col_j]
        for j in range(total + 1):
            if prow[j]:
                prow[j] *= inv
        nonzero = [j for j in range(total + 1) if prow[j]]
        for i in range(m):
            if i == row_k:
                continue
            factor = tableau[i][col_j]
            if factor:
                row = tableau[i]
                for j in nonzero:
                    row[j] -= factor * prow[j]
        factor = red[col_j]
        if factor:
            for j in nonzero:
                red[j] -= factor * prow[j]
        basis[row_k] = col_j

    def run_simplex(allowed_max: int) -> str:
        # Bland's rule: smallest-index entering column with negative reduced
        # cost; leaving row by min ratio, ties to the smallest basis index.
        while True:
            enter = -1
            for j in range(allowed_max):
                if red[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL
            leave = -1
            best: Optional[Fraction] = None
            for i in range(m):
                a = tableau[i][enter]
                if a > 0:
                    ratio = tableau[i][total] / a
                    if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return UNBOUNDED
            pivot(leave, enter)

    # Phase 1: drive the artificial variables to zero.
    phase1_cost = [_ZERO] * art_start + [_ONE] * m
    red = reduced_costs(phase1_cost) + [_ZERO]
    status = run_simplex(total)
    assert status == OPTIMAL  # phase-1 objective is bounded below by 0
    shortfall = sum(
        (tableau[k][total] for k, bi in enumerate(basis) if bi >= art_start),
        _ZERO,
    )
    if shortfall > 0:
        return LpOutcome(status=INFEASIBLE)

    # Pivot leftover zero-level artificials out where a structural column
    # allows it; rows with no such column are redundant and stay inert.
    for k in range(m):
        if basis[k] >= art_start:
            for j in range(art_start):
                if tableau[k][j]:
                    pivot(k, j)
                    break

    # Phase 2 on the real objective, artificial columns barred from entering.
    red = reduced_costs(full_cost_phase2) + [_ZERO]
    status = run_simplex(art_start)
    if status == UNBOUNDED:
        return LpOutcome(status=UNBOUNDED)

    primal = [_ZERO] * n
    for k, bi in enumerate(basis):
        if bi < n:
            primal[bi] = tableau[k][total]
    objective = sum((c * x for c, x in zip(cost, primal)), _ZERO)

    # Duals: c_B . B^{-1}, read under the artificial identity block, then
    # mapped back through any row flips.
    dual = []
    for i in range(m):
        col = art_start + i
        y = sum(
            (full_cost_phase2[basis[k]] * tableau[k][col] for k in range(m)),
            _ZERO,
        )
        dual.append(-y if flipped[i] else y)

    if maximize:
        objective = -objective
        dual = [-y for y in dual]
    return LpOutcome(
        status=OPTIMAL,
        primal=tuple(primal),
        dual=tuple(dual),
        objective=objective,
    )


def verify_outcome(lp: LinearProgram, outcome: LpOutcome) -> list[str]:
    """Independent exact check of an Optimal outcome; returns violations.

    Verifies primal feasibility, dual signs and feasibility, equality of the
    two objectives, and complementary slackness, all with exact arithmetic.
    An empty list certifies optimality (weak duality makes the certificate
    self-contained).
    """
    if outcome.status != OPTIMAL:
        return [f"outcome status is {outcome.status}, not {OPTIMAL}"]
    problems: list[str] = []
    x = outcome.primal
    y = outcome.dual
    n = lp.num_vars
    if x is None or len(x) != n:
        return ["primal solution missing or wrong width"]
    if y is None or len(y) != len(lp.rows):
        return ["dual solution missing or wrong width"]

    minimize = lp.sense == "min"
    for j, xj in enumerate(x):
        if xj < 0:
            problems.append(f"x[{j}] = {xj} < 0")

    activities = []
    for i, (coeffs, rel, rhs) in enumerate(lp.rows):
        act = sum((a * xj for a, xj in zip(coeffs, x)), _ZERO)
        activities.append(act)
        ok = act <= rhs if rel == "<=" else act >= rhs if rel == ">=" else act == rhs
        if not ok:
            problems.append(f"row {i}: activity {act} violates {rel} {rhs}")
        lo = (rel == ">=") if minimize else (rel == "<=")
        hi = (rel == "<=") if minimize else (rel == ">=")
        if lo and y[i] < 0:
            problems.append(f"dual[{i}] = {y[i]} has wrong sign for {rel} row")
        if hi and y[i] > 0:
            problems.append(f"dual[{i}] = {y[i]} has wrong sign for {rel} row")

    for j in range(n):
        aty = sum((lp.rows[i][0][j] * y[i] for i in range(len(lp.rows))), _ZERO)
        cj = lp.objective[j]
        if minimize:
            if aty > cj:
                problems.append(f"dual infeasible at column {j}: {aty} > {cj}")
            if x[j] > 0 and aty != cj:
                problems.append(f"complementary slackness broken at column {j}")
        else:
            if aty < cj:
                problems.append(f"dual infeasible at column {j}: {aty} < {cj}")
            if x[j] > 0 and aty != cj:
                problems.append(f"complementary slackness broken at column {j}")

    primal_obj = sum((c * xj for c, xj in zip(lp.objective, x)), _ZERO)
    dual_obj = sum((lp.rows[i][2] * y[i] for i in range(len(lp.rows))), _ZERO)
    if primal_obj != dual_obj:
        problems.append(f"objective mismatch: primal {primal_obj}, dual {dual_obj}")
    if outcome.objective != primal_obj:
        problems.append(
            f"reported objective {outcome.objective} != computed {primal_obj}"
        )
    for i, (_, rel, rhs) in enumerate(lp.rows):
        if y[i] != 0 and activities[i] != rhs and rel != "=":
            problems.append(f"complementary slackness broken at row {i}")
    return problems
