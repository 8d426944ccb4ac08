from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
import pytest

from minmaxrank import (
    DistanceKind,
    Infeasible,
    Instance,
    Permutation,
    RankingClass,
    SetDistanceKind,
    Unbounded,
    brute_force,
    build_footrule_program,
    build_kendall_lp,
    kendall_class_costs,
    make_partial_ranking,
    make_permutation,
    minmax_objective,
    pairwise_weights,
    solve,
    tie_mass,
)
from minmaxrank.lp import Constraint, LinearProgram, Variable
from minmaxrank._rng import generator

from conftest import random_instance, random_permutation

TOL = 1e-6


def gap_instance():
    return Instance(
        4,
        (
            RankingClass((Permutation.identity(4),), Fraction(1)),
            RankingClass((make_permutation([2, 1, 3, 4]),), Fraction(1)),
        ),
    )


class TestPairwiseWeights:
    def test_single_identity_class(self):
        inst = Instance(3, (RankingClass((Permutation.identity(3),), 1),))
        w = pairwise_weights(inst).w
        for x in range(3):
            for y in range(3):
                expect = 1 if x < y else 0
                assert w[0][x][y] == expect

    def test_identity_and_reversal(self):
        cls = RankingClass(
            (Permutation.identity(3), make_permutation([3, 2, 1])), Fraction(1)
        )
        w = pairwise_weights(Instance(3, (cls,))).w
        for x in range(3):
            for y in range(3):
                assert w[0][x][y] == (Fraction(1, 2) if x != y else 0)

    def test_tied_pair_contributes_nothing(self):
        inst = Instance(
            3, (RankingClass((make_partial_ranking([{1, 2}, {3}]),), 1),)
        )
        w = pairwise_weights(inst).w
        assert w[0][0][1] == 0 and w[0][1][0] == 0
        assert w[0][0][2] == 1 and w[0][1][2] == 1
        assert w[0][2][0] == 0 and w[0][2][1] == 0

    def test_permutation_class_pair_sums(self, rng):
        for _ in range(20):
            inst = random_instance(rng)
            pw = pairwise_weights(inst)
            for k, cls in enumerate(inst.classes):
                total = Fraction(0)
                for x in range(inst.n):
                    for y in range(inst.n):
                        if x != y:
                            total += pw.w[k][x][y]
                        if x < y:
                            assert pw.w[k][x][y] + pw.w[k][y][x] == cls.weight
                        assert 0 <= pw.w[k][x][y] <= cls.weight
                assert total == cls.weight * inst.n * (inst.n - 1) / 2

    def test_triangle_property(self, rng):
        for _ in range(20):
            inst = random_instance(rng, allow_ties=True)
            pw = pairwise_weights(inst)
            for k in range(inst.num_classes):
                wk = pw.w[k]
                for x, y, z in permutations(range(inst.n), 3):
                    assert wk[x][y] + wk[y][z] >= wk[x][z]


class TestTieMass:
    def test_zero_for_permutations(self, rng):
        inst = random_instance(rng)
        assert all(t == 0 for t in tie_mass(inst).t)

    def test_partial_average(self):
        cls = RankingClass(
            (
                make_partial_ranking([{1, 2, 3}]),
                make_partial_ranking([{1}, {2}, {3}]),
            ),
            1,
        )
        assert tie_mass(Instance(3, (cls,))).t[0] == Fraction(3, 2)


class TestKendallLP:
    def test_gap_instance_optimum(self):
        sol = solve(build_kendall_lp(gap_instance()))
        assert abs(sol.objective - 0.5) < TOL
        assert abs(sol.u_pair[0, 1] - 0.5) < TOL
        assert abs(sol.u_pair[1, 0] - 0.5) < TOL

    def test_singleton_class_integral_zero(self):
        p = make_permutation([2, 3, 1])
        sol = solve(build_kendall_lp(Instance(3, (RankingClass((p,), 1),))))
        assert abs(sol.objective) < TOL
        for x in range(1, 4):
            for y in range(1, 4):
                if x == y:
                    continue
                expect = 1.0 if p.rank_of(x) < p.rank_of(y) else 0.0
                assert abs(sol.u_pair[x - 1, y - 1] - expect) < TOL

    def test_single_partial_class_tie_shift(self):
        inst = Instance(
            3, (RankingClass((make_partial_ranking([{1, 2}, {3}]),), 1),)
        )
        sol = solve(build_kendall_lp(inst))
        assert abs(sol.objective - 0.5) < TOL

    def test_feasibility_invariants(self, rng):
        for _ in range(10):
            inst = random_instance(rng, allow_ties=True)
            sol = solve(build_kendall_lp(inst))
            u = sol.u_pair
            n = inst.n
            for x, y in combinations(range(n), 2):
                assert abs(u[x, y] + u[y, x] - 1.0) < TOL
            for x, y, z in combinations(range(n), 3):
                assert u[x, y] + u[y, z] + u[z, x] >= 1.0 - TOL
                assert u[y, x] + u[z, y] + u[x, z] >= 1.0 - TOL
            assert (u >= -TOL).all() and (u <= 1.0 + TOL).all()

    def test_objective_at_integral_point_matches_exact_cost(self, rng):
        for _ in range(15):
            inst = random_instance(rng, allow_ties=True)
            perm = random_permutation(rng, inst.n)
            costs = kendall_class_costs(inst, perm)
            assert max(costs) == minmax_objective(
                perm, inst, DistanceKind.KEMENY, SetDistanceKind.MEDIAN
            )

    def test_relaxation_lower_bounds_optimum(self, rng):
        for _ in range(15):
            inst = random_instance(rng)
            sol = solve(build_kendall_lp(inst))
            w = brute_force(inst, DistanceKind.KENDALL_TAU, SetDistanceKind.MEDIAN)
            assert sol.objective <= float(w.value) + TOL


class TestFootruleProgram:
    def test_singleton_zero_at_own_ranks(self):
        p = make_permutation([2, 3, 1])
        sol = solve(build_footrule_program(Instance(3, (RankingClass((p,), 1),))))
        assert abs(sol.objective) < TOL
        assert np.allclose(sol.u_pos, [2.0, 3.0, 1.0], atol=1e-6)

    def test_two_class_example(self):
        inst = Instance(
            3,
            (
                RankingClass((Permutation.identity(3),), 1),
                RankingClass((make_permutation([2, 1, 3]),), 1),
            ),
        )
        sol = solve(build_footrule_program(inst))
        assert abs(sol.objective - 1.0) < TOL

    def test_weight_homogeneity(self, rng):
        inst = random_instance(rng)
        doubled = Instance(
            inst.n,
            tuple(RankingClass(c.members, 2 * c.weight) for c in inst.classes),
        )
        a = solve(build_footrule_program(inst)).objective
        b = solve(build_footrule_program(doubled)).objective
        assert abs(b - 2 * a) < TOL

    def test_relaxation_lower_bounds_optimum(self, rng):
        for _ in range(15):
            inst = random_instance(rng)
            sol = solve(build_footrule_program(inst))
            w = brute_force(inst, DistanceKind.SPEARMAN_FOOTRULE, SetDistanceKind.MEDIAN)
            assert sol.objective <= float(w.value) + TOL


class TestSolveErrors:
    def test_infeasible(self):
        prog = LinearProgram(
            variables=[Variable("x", 0.0, 1.0)],
            objective={0: 1.0},
            constraints=[Constraint({0: 1.0}, ">=", 2.0)],
            kind="positional",
            n=1,
            meta={"q": 0, "pos_index": [0], "class_pos": [np.zeros((1, 1))],
                  "lam_over_m": [1.0]},
        )
        with pytest.raises(Infeasible):
            solve(prog)

    def test_unbounded(self):
        prog = LinearProgram(
            variables=[Variable("x", None, None)],
            objective={0: 1.0},
            constraints=[],
            kind="positional",
            n=1,
            meta={"q": 0, "pos_index": [0], "class_pos": [np.zeros((1, 1))],
                  "lam_over_m": [1.0]},
        )
        with pytest.raises(Unbounded):
            solve(prog)
