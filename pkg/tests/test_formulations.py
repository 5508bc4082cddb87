import itertools

import numpy as np
import pytest

from misdpkit.errors import NegativeCapacity
from misdpkit.formulations import (
    QcqpInstance,
    Qmp1Instance,
    Qmp2Instance,
    build_bsdp_qcqp,
    build_bsdp_qmp1,
    build_bsdp_qmp2,
)
from misdpkit.linalg import SymMat, num_rank
from misdpkit.model import validate
from misdpkit.verify import natural_optimum, oracle, solve_by_enumeration


def rand_sym(rng, n, lo, hi):
    a = rng.integers(lo, hi + 1, (n, n))
    return np.tril(a) + np.tril(a, -1).T


class TestQcqp:
    def test_stable_set_k2(self):
        inst = QcqpInstance(
            2,
            np.zeros((2, 2), dtype=int),
            np.array([-1, -1]),
            quads=[(np.array([[0, 1], [1, 0]]), None, 0)],
        )
        m = build_bsdp_qcqp(inst)
        assert validate(m) == []
        res = solve_by_enumeration(m)
        assert res.optimum == -1  # max stable set of K_2 is 1

    def test_single_variable(self):
        inst = QcqpInstance(1, np.zeros((1, 1), dtype=int), np.array([1]))
        res = solve_by_enumeration(build_bsdp_qcqp(inst))
        assert res.optimum == 0

    def test_compact_same_feasible_set(self):
        rng = np.random.default_rng(3)
        for _ in range(6):
            n = 3
            a1, a2 = rng.integers(-2, 3, n), rng.integers(-2, 3, n)
            x_star = rng.integers(0, 2, n)
            inst = QcqpInstance(
                n,
                rand_sym(rng, n, -2, 2),
                rng.integers(-2, 3, n),
                lin_eq=[(a1, int(a1 @ x_star)), (a2, int(a2 @ x_star))],
            )
            plain = solve_by_enumeration(build_bsdp_qcqp(inst, compact=False))
            compact = solve_by_enumeration(build_bsdp_qcqp(inst, compact=True))
            assert plain.feasible_count == compact.feasible_count
            assert plain.optimum == compact.optimum

    def test_aggregated_row_iff_all_equalities(self):
        # binary points: the Gram-aggregated equality holds iff every source
        # equality does (exhaustive over n <= 3, p <= 2, random integer data)
        rng = np.random.default_rng(9)
        for _ in range(10):
            n = int(rng.integers(1, 4))
            p = int(rng.integers(1, 3))
            rows = [(rng.integers(-3, 4, n), int(rng.integers(-3, 4))) for _ in range(p)]
            s = np.zeros((n + 1, n + 1))
            for a, b in rows:
                v = np.concatenate([[-float(b)], a.astype(float)])
                s += np.outer(v, v)
            for bits in itertools.product((0, 1), repeat=n):
                x = np.array(bits)
                y = np.concatenate([[1.0], x.astype(float)])
                agg = float(y @ s @ y)
                all_eq = all(int(a @ x) == b for a, b in rows)
                assert (abs(agg) < 1e-9) == all_eq

    def test_equivalence_random_family(self):
        rng = np.random.default_rng(17)
        for _ in range(8):
            n = int(rng.integers(2, 5))
            inst = QcqpInstance(
                n,
                rand_sym(rng, n, -3, 3),
                rng.integers(-3, 4, n),
                quads=[(rand_sym(rng, n, 0, 2), None, int(rng.integers(1, 8)))],
            )
            res = solve_by_enumeration(build_bsdp_qcqp(inst))
            orc = oracle("qcqp", inst)
            assert res.optimum == orc.optimum
            assert res.feasible_count == orc.feasible_count


class TestQmp1:
    def test_mkcs_triangle(self):
        q0 = -np.eye(3, dtype=int)
        edges = [(0, 1), (0, 2), (1, 2)]
        quads = [(np.array([[int({i, j} == {u, v}) for j in range(3)] for i in range(3)]), 0)
                 for u, v in edges]
        inst = Qmp1Instance(3, 2, q0, quads=quads)
        m = build_bsdp_qmp1(inst)
        res = solve_by_enumeration(m)
        assert res.optimum == -2  # triangle has a 2-colorable subgraph of size 2

    def test_full_trace(self):
        inst = Qmp1Instance(3, 3, -np.eye(3, dtype=int))
        assert solve_by_enumeration(build_bsdp_qmp1(inst)).optimum == -3

    def test_zero_capacity(self):
        inst = Qmp1Instance(2, 2, -np.eye(2, dtype=int), caps=[(np.ones(2, dtype=int), 0)])
        res = solve_by_enumeration(build_bsdp_qmp1(inst))
        # nothing can be covered: only the zero matrix survives the capacity
        assert res.optimum == 0 and res.feasible_count == 1

    def test_negative_capacity_rejected(self):
        with pytest.raises(NegativeCapacity):
            Qmp1Instance(2, 1, np.zeros((2, 2), dtype=int), caps=[(np.ones(2, dtype=int), -1)])

    def test_equivalence_random_family(self):
        rng = np.random.default_rng(23)
        for trial in range(10):
            n = int(rng.integers(2, 5))
            k = int(rng.integers(1, 4))
            inst = Qmp1Instance(
                n, k, rand_sym(rng, n, -2, 2),
                quads=[(rand_sym(rng, n, 0, 2), -int(rng.integers(2, 9)))],
                caps=[(rng.integers(0, 3, n), int(rng.integers(1, 5)))],
                partition=bool(trial % 2) and k >= n // 2 + 1,
            )
            res = solve_by_enumeration(build_bsdp_qmp1(inst))
            orc = oracle("qmp1", inst)
            assert res.optimum == orc.optimum
            assert res.feasible_count == orc.feasible_count


class TestQmp2:
    def test_qmkp_shape(self):
        # one knapsack of capacity 1, two unit items with unit profits
        inst = Qmp2Instance(
            2, 1,
            np.zeros((2, 2), dtype=int),
            -0.5 * np.ones((2, 1)),
            constraints=[(np.zeros((2, 2), dtype=int), 0.5 * np.ones((2, 1)), -1)],
        )
        res = solve_by_enumeration(build_bsdp_qmp2(inst))
        assert natural_optimum(build_bsdp_qmp2(inst), res.optimum) == res.optimum == -1

    def test_trivial(self):
        inst = Qmp2Instance(1, 1, np.zeros((1, 1), dtype=int))
        assert solve_by_enumeration(build_bsdp_qmp2(inst)).optimum == 0

    def test_equivalence_random_family(self):
        rng = np.random.default_rng(31)
        for _ in range(6):
            n = int(rng.integers(2, 4))
            k = int(rng.integers(1, 3))
            inst = Qmp2Instance(
                n, k, rand_sym(rng, n, -2, 2), rng.integers(-2, 3, (n, k)),
                int(rng.integers(-2, 3)),
                constraints=[
                    (rand_sym(rng, n, 0, 1), rng.integers(0, 2, (n, k)), -int(rng.integers(3, 9)))
                ],
                partition=bool(rng.integers(0, 2)),
            )
            res = solve_by_enumeration(build_bsdp_qmp2(inst))
            orc = oracle("qmp2", inst)
            assert res.optimum == orc.optimum
            assert res.feasible_count == orc.feasible_count

    def test_exact_rank_forces_rank_k(self):
        inst = Qmp2Instance(3, 2, np.zeros((3, 3), dtype=int), exact_rank=True)
        m = build_bsdp_qmp2(inst)
        res = solve_by_enumeration(m)
        assert res.feasible_count > 0
        # the objective is identically zero, so every feasible point is a minimizer
        for point in res.minimizers:
            x = np.zeros((3, 3))
            for i in range(3):
                for j in range(i, 3):
                    x[i, j] = x[j, i] = point[f"X[{i},{j}]"]
            assert num_rank(SymMat(x, check_symmetry=False)) == 2
