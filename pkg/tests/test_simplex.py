from fractions import Fraction

from jointfeas.simplex import solve_equality_feasibility

F = Fraction


def check_farkas(rows, rhs, farkas):
    n = len(rows[0])
    for j in range(n):
        assert sum(farkas[i] * rows[i][j] for i in range(len(rows))) >= 0
    assert sum(farkas[i] * rhs[i] for i in range(len(rows))) < 0


def test_simple_feasible_system():
    # x1 + x2 = 1, x1 - x2 = 0  ->  x = (1/2, 1/2)
    rows = [[F(1), F(1)], [F(1), F(-1)]]
    rhs = [F(1), F(0)]
    res = solve_equality_feasibility(rows, rhs)
    assert res.feasible
    x = res.solution
    assert x[0] + x[1] == 1 and x[0] - x[1] == 0
    assert all(v >= 0 for v in x)


def test_infeasible_system_gives_valid_farkas():
    # x1 + x2 = 1, x1 + x2 = 2 simultaneously
    rows = [[F(1), F(1)], [F(1), F(1)]]
    rhs = [F(1), F(2)]
    res = solve_equality_feasibility(rows, rhs)
    assert not res.feasible
    check_farkas(rows, rhs, res.farkas)


def test_negative_rhs_normalization():
    # -x1 = -3 -> x1 = 3
    rows = [[F(-1), F(0)]]
    rhs = [F(-3)]
    res = solve_equality_feasibility(rows, rhs)
    assert res.feasible and res.solution[0] == 3


def test_nonnegativity_binds():
    # x1 - x2 = -1 with x >= 0 is feasible (x2 = 1); x1 alone cannot be negative
    res = solve_equality_feasibility([[F(1), F(-1)]], [F(-1)])
    assert res.feasible
    res = solve_equality_feasibility([[F(1)]], [F(-1)])
    assert not res.feasible
    check_farkas([[F(1)]], [F(-1)], res.farkas)


def test_degenerate_zero_row():
    rows = [[F(0), F(0)], [F(1), F(1)]]
    res = solve_equality_feasibility(rows, [F(0), F(1)])
    assert res.feasible
    res = solve_equality_feasibility(rows, [F(1), F(1)])
    assert not res.feasible
    check_farkas(rows, [F(1), F(1)], res.farkas)


def test_exactness_with_awkward_fractions():
    rows = [[F(1, 3), F(1, 7), F(2, 5)], [F(5, 11), F(-3, 13), F(1, 2)]]
    rhs = [F(9, 35), F(1, 4)]
    res = solve_equality_feasibility(rows, rhs)
    if res.feasible:
        x = res.solution
        for row, b in zip(rows, rhs):
            assert sum(c * v for c, v in zip(row, x)) == b
    else:
        check_farkas(rows, rhs, res.farkas)
