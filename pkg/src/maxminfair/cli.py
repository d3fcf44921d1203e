"""Command-line surface: generate, solve, verify, and gap experiments.

Reports go to standard output as JSON; allocations, instances and traces are
written to files given by flags.  Exit codes are a stable contract for
scripting: 0 success/allocated, 1 failed verification, 2 certified
infeasible, 3 input error, 4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .certificates import (
    check_blocker_balances,
    construct_dual_certificate,
    verify_certificate_feasibility,
)
from .configlp import DEFAULT_BREAKPOINT_BUDGET, compute_T_star
from .errors import BudgetExceeded, InvalidInstance, MaxMinFairError
from .generators import KINDS, generate_instance
from .instances import (
    GUARANTEE_FRACTION,
    Instance,
    bundle_value,
    format_rational,
    normalize,
    parse_rational,
    validate_instance,
)
from .matching import complete_allocation, find_perfect_matching
from .oracle import brute_force_opt, verify_allocation

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3
EXIT_BUDGET = 4

ALLOCATED = "Allocated"
CERTIFIED_INFEASIBLE = "Certified-Infeasible"


@dataclass(frozen=True)
class RunReport:
    """Outcome summary of one solve run."""

    players: int
    resources: int
    t_star: dict
    target: Fraction
    outcome: str
    per_player_values: Optional[dict]
    min_value: Optional[Fraction]
    ratio: Optional[Fraction]
    builds: int
    contracts: int
    wall_time: float
    certificate: Optional[dict] = None

    def to_json_dict(self) -> dict:
        return {
            "players": self.players,
            "resources": self.resources,
            "t_star": self.t_star,
            "target": format_rational(self.target),
            "outcome": self.outcome,
            "per_player_values": self.per_player_values,
            "min_value": None if self.min_value is None else format_rational(self.min_value),
            "ratio": None if self.ratio is None else format_rational(self.ratio),
            "builds": self.builds,
            "contracts": self.contracts,
            "wall_time_seconds": round(self.wall_time, 6),
            "certificate": self.certificate,
        }


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _load_instance(path: str) -> Instance:
    return validate_instance(_load_json(path))


def _resolve_t_star(instance: Instance, delta: Fraction, budget: int):
    """Exact optimal target when the breakpoint budget allows, else a bracket."""
    try:
        t_star, _ = compute_T_star(instance, "exact", budget=budget)
        return t_star, {"mode": "exact", "value": format_rational(t_star)}
    except BudgetExceeded:
        lo, _ = compute_T_star(instance, "bisect", delta=delta)
        return lo, {
            "mode": "bracket",
            "feasible": format_rational(lo),
            "infeasible_beyond": format_rational(lo + delta),
        }


def _trivial_allocation(instance: Instance) -> dict[str, set[str]]:
    """Leftover rule applied to everything; used when the target is zero."""
    allocation: dict[str, set[str]] = {p: set() for p in instance.players}
    for r in instance.resources:
        desirers = instance.desirers(r)
        owner = desirers[0] if desirers else instance.players[0]
        allocation[owner].add(r)
    return allocation


def cmd_solve(args) -> int:
    start = time.perf_counter()
    instance = _load_instance(args.instance)
    delta = parse_rational(args.delta)
    t_star, t_star_info = _resolve_t_star(instance, delta, args.budget)
    target = t_star if args.target == "auto" else parse_rational(args.target)

    builds = contracts = 0
    certificate_json = None
    trace_rows: list[dict] = []

    if target == 0:
        allocation = _trivial_allocation(instance)
        outcome = ALLOCATED
    else:
        ni = normalize(instance, target)
        result = find_perfect_matching(ni)
        builds, contracts = result.builds, result.contracts
        for ext_index, ext in enumerate(result.extensions):
            for ev in ext.trace:
                row = ev.to_json_dict()
                row["extension"] = ext_index
                trace_rows.append(row)
        if result.perfect:
            allocation = complete_allocation(instance, result.matching, target)
            outcome = ALLOCATED
        else:
            outcome = CERTIFIED_INFEASIBLE
            cert = construct_dual_certificate(ni, result.state)
            feasibility = verify_certificate_feasibility(ni, cert)
            balances = check_blocker_balances(ni, result.state, cert)
            certificate_json = cert.to_json_dict()
            certificate_json["feasibility_check"] = feasibility.to_json_dict()
            certificate_json["balance_check"] = balances.to_json_dict()
            if not (feasibility.passed and balances.passed):
                print("internal error: certificate failed verification", file=sys.stderr)
                return EXIT_FAIL
            allocation = None

    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as handle:
            for row in trace_rows:
                handle.write(json.dumps(row) + "\n")

    min_value = None
    per_player = None
    ratio = None
    if allocation is not None:
        per_player = {
            p: format_rational(bundle_value(instance, p, allocation[p]))
            for p in instance.players
        }
        min_value = min(bundle_value(instance, p, allocation[p]) for p in instance.players)
        if t_star_info["mode"] == "exact" and t_star > 0:
            ratio = min_value / t_star

        allocation_json = {
            "target": format_rational(target),
            "min_value": format_rational(min_value),
            "allocation": {
                p: instance.sorted_resources(allocation[p]) for p in instance.players
            },
        }
        if args.out:
            with open(args.out, "w", encoding="utf-8") as handle:
                json.dump(allocation_json, handle, indent=2)
            emitted = _load_json(args.out)["allocation"]
        else:
            emitted = allocation_json["allocation"]
        # Self-audit: re-verify the emitted allocation before reporting.
        audited = verify_allocation(instance, emitted)
        if audited < GUARANTEE_FRACTION * target:
            print(
                f"internal error: allocation audit {audited} below the "
                f"guarantee at target {target}",
                file=sys.stderr,
            )
            return EXIT_FAIL

    report = RunReport(
        players=instance.num_players,
        resources=instance.num_resources,
        t_star=t_star_info,
        target=target,
        outcome=outcome,
        per_player_values=per_player,
        min_value=min_value,
        ratio=ratio,
        builds=builds,
        contracts=contracts,
        wall_time=time.perf_counter() - start,
        certificate=certificate_json,
    )
    print(json.dumps(report.to_json_dict(), indent=2))
    return EXIT_OK if outcome == ALLOCATED else EXIT_INFEASIBLE


def cmd_gen(args) -> int:
    instance = generate_instance(args.kind, args.players, args.resources, args.seed)
    payload = json.dumps(instance.to_json_dict(), indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(payload + "\n")
    else:
        print(payload)
    return EXIT_OK


def cmd_gap(args) -> int:
    rows = []
    max_gap: Optional[Fraction] = None
    for trial in range(args.trials):
        instance = generate_instance(
            args.kind, args.players, args.resources, args.seed + trial
        )
        t_star, _ = compute_T_star(instance, "exact", budget=args.budget)
        opt = brute_force_opt(instance)
        min_value = None
        ratio = None
        if t_star > 0:
            ni = normalize(instance, t_star)
            result = find_perfect_matching(ni)
            assert result.perfect  # guaranteed at targets within the optimum
            allocation = complete_allocation(instance, result.matching, t_star)
            min_value = min(
                bundle_value(instance, p, allocation[p]) for p in instance.players
            )
            ratio = min_value / t_star
        degenerate = opt == 0
        gap = None if degenerate else t_star / opt
        if gap is not None and (max_gap is None or gap > max_gap):
            max_gap = gap
        rows.append(
            {
                "trial": trial,
                "t_star": format_rational(t_star),
                "opt": format_rational(opt),
                "gap": None if gap is None else format_rational(gap),
                "degenerate": degenerate,
                "min_value": None if min_value is None else format_rational(min_value),
                "ratio": None if ratio is None else format_rational(ratio),
            }
        )
    print(
        json.dumps(
            {
                "rows": rows,
                "summary": {
                    "trials": args.trials,
                    "max_gap": None if max_gap is None else format_rational(max_gap),
                },
            },
            indent=2,
        )
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    instance = _load_instance(args.instance)
    payload = _load_json(args.allocation)
    if not isinstance(payload, dict) or "allocation" not in payload:
        raise InvalidInstance("allocation file must contain an 'allocation' object")
    threshold = parse_rational(args.threshold)
    min_value = verify_allocation(instance, payload["allocation"])
    passed = min_value >= threshold
    print(
        json.dumps(
            {
                "min_value": format_rational(min_value),
                "threshold": format_rational(threshold),
                "passed": passed,
            },
            indent=2,
        )
    )
    return EXIT_OK if passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxminfair",
        description="Exact solver and verifier for restricted max-min fair allocation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve an instance end to end")
    solve.add_argument("--instance", required=True, help="instance JSON path")
    solve.add_argument("--target", default="auto", help="'auto' or an exact rational")
    solve.add_argument("--delta", default="1/1000", help="bracket width for oversized instances")
    solve.add_argument("--budget", type=int, default=DEFAULT_BREAKPOINT_BUDGET)
    solve.add_argument("--trace", default=None, help="write step trace lines here")
    solve.add_argument("--out", default=None, help="write the allocation JSON here")
    solve.set_defaults(func=cmd_solve)

    gen = sub.add_parser("gen", help="generate a random instance")
    gen.add_argument("--kind", choices=KINDS, default="uniform")
    gen.add_argument("--players", type=int, required=True)
    gen.add_argument("--resources", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=cmd_gen)

    gap = sub.add_parser("gap", help="measure LP-vs-integral gaps on random instances")
    gap.add_argument("--kind", choices=KINDS, default="uniform")
    gap.add_argument("--players", type=int, required=True)
    gap.add_argument("--resources", type=int, required=True)
    gap.add_argument("--trials", type=int, default=10)
    gap.add_argument("--seed", type=int, default=0)
    gap.add_argument("--budget", type=int, default=DEFAULT_BREAKPOINT_BUDGET)
    gap.set_defaults(func=cmd_gap)

    verify = sub.add_parser("verify", help="check an allocation against a threshold")
    verify.add_argument("--instance", required=True)
    verify.add_argument("--allocation", required=True)
    verify.add_argument("--threshold", default="0")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidInstance, MaxMinFairError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
