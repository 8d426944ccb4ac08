"""Linear/convex program construction and solving for the minmax relaxations.

Two programs are built here:

* the Kendall/Kemeny relaxation over pairwise order variables u[x][y] in
  [0,1] with pairing equalities u[x][y] + u[y][x] = 1 and triangle
  constraints, minimizing the epigraph variable q of the weighted class
  costs (tied pairs inside a class contribute the constant weight*T_k/2);
* the footrule program over free positions u(1..n), reformulated exactly
  as an LP by splitting the absolute deviations into nonnegative slacks.

Programs are solved with scipy's HiGHS backend.  Fractional solutions keep
the raw variable values; the reported objective is recomputed from the
variables so it always equals the worst class cost implied by them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from .rankings import Instance, as_partial, position


class SolverError(RuntimeError):
    pass


class Infeasible(SolverError):
    pass


class Unbounded(SolverError):
    pass


class IterationLimit(SolverError):
    pass


#: solver tolerance on constraint violation and optimality
EPSILON = 1e-7


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float | None = 0.0
    upper: float | None = None


@dataclass(frozen=True)
class Constraint:
    coeffs: dict[int, float]
    sense: str  # "<=", ">=" or "=="
    rhs: float


@dataclass
class LinearProgram:
    """A minimization LP plus the metadata needed to read its solution back."""

    variables: list[Variable]
    objective: dict[int, float]
    constraints: list[Constraint]
    kind: str  # "pairwise" or "positional"
    n: int
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PairwiseWeights:
    """Per-class weighted pairwise preference counts.

    ``w[k][x][y]`` (0-based indices, elements x+1 and y+1) is the class
    weight over class size times the number of members ranking x+1 strictly
    above y+1, as an exact Fraction.  Ties contribute to neither direction.
    """

    w: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @property
    def num_classes(self) -> int:
        return len(self.w)

    @property
    def n(self) -> int:
        return len(self.w[0])

    def as_array(self) -> np.ndarray:
        """Float view, shape (C, n, n)."""
        return np.array(
            [[[float(v) for v in row] for row in cls] for cls in self.w]
        )


@dataclass(frozen=True)
class TieMass:
    """Per-class average number of tied pairs; zero for permutation classes."""

    t: tuple[Fraction, ...]


@dataclass(frozen=True)
class FractionalSolution:
    kind: str  # "pairwise" or "positional"
    objective: float
    u_pair: np.ndarray | None = None  # (n, n) in [0, 1], diagonal 0
    u_pos: np.ndarray | None = None  # (n,) real positions


def pairwise_weights(inst: Instance) -> PairwiseWeights:
    """Weighted fraction of each class ranking x strictly above y."""
    n = inst.n
    out = []
    for cls in inst.classes:
        counts = [[0] * n for _ in range(n)]
        for member in cls.members:
            part = as_partial(member)
            tw = part._twice_positions
            for x in range(n):
                for y in range(n):
                    if tw[x] < tw[y]:
                        counts[x][y] += 1
        unit = cls.weight / cls.m
        out.append(
            tuple(tuple(unit * c for c in row) for row in counts)
        )
    return PairwiseWeights(tuple(out))


def tie_mass(inst: Instance) -> TieMass:
    """Average tied-pair count per class (the constant part of its cost)."""
    return TieMass(
        tuple(
            Fraction(sum(as_partial(m).tied_pair_count() for m in cls.members), cls.m)
            for cls in inst.classes
        )
    )


def kendall_class_costs(inst: Instance, perm) -> list[Fraction]:
    """Exact per-class cost of the Kendall program at an integral solution.

    For a permutation pi this equals weight * median Kemeny distance to the
    class (weight * median Kendall tau when the class has no ties).
    """
    weights = pairwise_weights(inst)
    ties = tie_mass(inst)
    tw = as_partial(perm)._twice_positions
    n = inst.n
    costs = []
    for k, cls in enumerate(inst.classes):
        wk = weights.w[k]
        acc = cls.weight * ties.t[k] / 2
        for x in range(n):
            for y in range(n):
                # u[y][x] = 1 iff pi ranks y above x
                if tw[y] < tw[x]:
                    acc += wk[x][y]
        costs.append(acc)
    return costs


def build_kendall_lp(inst: Instance) -> LinearProgram:
    """The pairwise-order relaxation of minmax Kendall/Kemeny aggregation."""
    n = inst.n
    weights = pairwise_weights(inst)
    ties = tie_mass(inst)
    wf = weights.as_array()
    shifts = np.array(
        [float(cls.weight * ties.t[k] / 2) for k, cls in enumerate(inst.classes)]
    )

    variables = [Variable("q", 0.0, None)]
    objective = {0: 1.0}
    pair_index: dict[tuple[int, int], int] = {}
    for x in range(1, n + 1):
        for y in range(1, n + 1):
            if x != y:
                pair_index[(x, y)] = len(variables)
                variables.append(Variable(f"u_{x}_{y}", 0.0, 1.0))

    constraints = []
    # class cost epigraph: sum_{x!=y} w^k[x][y] u[y][x] - q <= -shift_k
    for k in range(inst.num_classes):
        coeffs: dict[int, float] = {0: -1.0}
        for x in range(1, n + 1):
            for y in range(1, n + 1):
                if x == y:
                    continue
                c = wf[k, x - 1, y - 1]
                if c != 0.0:
                    idx = pair_index[(y, x)]
                    coeffs[idx] = coeffs.get(idx, 0.0) + c
        constraints.append(Constraint(coeffs, "<=", -shifts[k]))
    # pairing: u[x][y] + u[y][x] = 1
    for x, y in combinations(range(1, n + 1), 2):
        constraints.append(
            Constraint({pair_index[(x, y)]: 1.0, pair_index[(y, x)]: 1.0}, "==", 1.0)
        )
    # triangles, both cyclic orientations per unordered triple
    for x, y, z in combinations(range(1, n + 1), 3):
        constraints.append(
            Constraint(
                {
                    pair_index[(x, y)]: 1.0,
                    pair_index[(y, z)]: 1.0,
                    pair_index[(z, x)]: 1.0,
                },
                ">=",
                1.0,
            )
        )
        constraints.append(
            Constraint(
                {
                    pair_index[(y, x)]: 1.0,
                    pair_index[(z, y)]: 1.0,
                    pair_index[(x, z)]: 1.0,
                },
                ">=",
                1.0,
            )
        )

    meta = {"q": 0, "pair_index": pair_index, "wf": wf, "shifts": shifts}
    return LinearProgram(variables, objective, constraints, "pairwise", n, meta)


def build_footrule_program(inst: Instance) -> LinearProgram:
    """Minmax weighted L1 distance to the member positions, split into an LP."""
    n = inst.n
    variables = [Variable("q", 0.0, None)]
    objective = {0: 1.0}
    pos_index = []
    for h in range(1, n + 1):
        pos_index.append(len(variables))
        variables.append(Variable(f"u_{h}", None, None))

    constraints = []
    class_pos = []
    lam_over_m = []
    for k, cls in enumerate(inst.classes):
        lam = float(cls.weight) / cls.m
        lam_over_m.append(lam)
        pos_mat = np.array(
            [[float(position(m, h)) for h in range(1, n + 1)] for m in cls.members]
        )
        class_pos.append(pos_mat)
        cost_coeffs: dict[int, float] = {0: -1.0}
        for g, member in enumerate(cls.members):
            for h in range(1, n + 1):
                e_idx = len(variables)
                variables.append(Variable(f"e_{k}_{g}_{h}", 0.0, None))
                target = pos_mat[g, h - 1]
                # e >= u(h) - target and e >= target - u(h)
                constraints.append(
                    Constraint({pos_index[h - 1]: 1.0, e_idx: -1.0}, "<=", target)
                )
                constraints.append(
                    Constraint({pos_index[h - 1]: -1.0, e_idx: -1.0}, "<=", -target)
                )
                cost_coeffs[e_idx] = lam
        constraints.append(Constraint(cost_coeffs, "<=", 0.0))

    meta = {"q": 0, "pos_index": pos_index, "class_pos": class_pos,
            "lam_over_m": lam_over_m}
    return LinearProgram(variables, objective, constraints, "positional", n, meta)


def _pairwise_objective(u: np.ndarray, wf: np.ndarray, shifts: np.ndarray) -> float:
    costs = shifts + (wf * u.T[None, :, :]).sum(axis=(1, 2))
    return float(costs.max())


def _positional_objective(u: np.ndarray, meta: dict) -> float:
    costs = [
        lam * np.abs(u[None, :] - pos).sum()
        for lam, pos in zip(meta["lam_over_m"], meta["class_pos"])
    ]
    return float(max(costs))


def solve(lp: LinearProgram) -> FractionalSolution:
    """Solve with HiGHS and read the structured solution back out."""
    nvars = len(lp.variables)
    c = np.zeros(nvars)
    for idx, coef in lp.objective.items():
        c[idx] = coef

    ub_rows, ub_data, ub_cols, b_ub = [], [], [], []
    eq_rows, eq_data, eq_cols, b_eq = [], [], [], []
    for con in lp.constraints:
        if con.sense == "==":
            row = len(b_eq)
            for idx, coef in con.coeffs.items():
                eq_rows.append(row)
                eq_cols.append(idx)
                eq_data.append(coef)
            b_eq.append(con.rhs)
        else:
            sign = 1.0 if con.sense == "<=" else -1.0
            row = len(b_ub)
            for idx, coef in con.coeffs.items():
                ub_rows.append(row)
                ub_cols.append(idx)
                ub_data.append(sign * coef)
            b_ub.append(sign * con.rhs)

    A_ub = (
        csr_matrix((ub_data, (ub_rows, ub_cols)), shape=(len(b_ub), nvars))
        if b_ub
        else None
    )
    A_eq = (
        csr_matrix((eq_data, (eq_rows, eq_cols)), shape=(len(b_eq), nvars))
        if b_eq
        else None
    )
    bounds = [(v.lower, v.upper) for v in lp.variables]

    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=A_eq,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bounds,
        method="highs",
    )
    if res.status == 2:
        raise Infeasible(res.message)
    if res.status == 3:
        raise Unbounded(res.message)
    if res.status == 1:
        raise IterationLimit(res.message)
    if res.status != 0:
        raise SolverError(res.message)

    x = res.x
    if lp.kind == "pairwise":
        u = np.zeros((lp.n, lp.n))
        for (a, b), idx in lp.meta["pair_index"].items():
            u[a - 1, b - 1] = x[idx]
        objective = _pairwise_objective(u, lp.meta["wf"], lp.meta["shifts"])
        return FractionalSolution("pairwise", objective, u_pair=u)
    if lp.kind == "positional":
        u = np.array([x[idx] for idx in lp.meta["pos_index"]])
        objective = _positional_objective(u, lp.meta)
        return FractionalSolution("positional", objective, u_pos=u)
    raise SolverError(f"unknown program kind {lp.kind!r}")
