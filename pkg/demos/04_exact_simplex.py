"""The exact rational LP engine on its own.

Every solve returns exact primal and dual solutions; `verify_outcome`
re-checks feasibility, dual feasibility, equal objectives and complementary
slackness from scratch, so optimality never rests on trust.
"""

from fractions import Fraction

from maxminfair import LinearProgram, solve_lp, verify_outcome

F = Fraction

lp = LinearProgram.maximize(
    [3, 1, 2],
    [
        ([F(1), F(1), F(3)], "<=", F(30)),
        ([F(2), F(2), F(5)], "<=", F(24)),
        ([F(4), F(1), F(2)], "<=", F(36)),
    ],
)

outcome = solve_lp(lp)
print(f"status: {outcome.status}")
print(f"primal: {[str(x) for x in outcome.primal]}")
print(f"dual:   {[str(y) for y in outcome.dual]}")
print(f"objective: {outcome.objective}")

violations = verify_outcome(lp, outcome)
print(f"independent verification: {'clean' if not violations else violations}")

infeasible = LinearProgram.minimize([0], [([F(1)], "<=", F(-1))])
print(f"\ncontradictory bounds: {solve_lp(infeasible).status}")

unbounded = LinearProgram.maximize([1], [([F(-1)], "<=", F(1))])
print(f"growing objective:    {solve_lp(unbounded).status}")
