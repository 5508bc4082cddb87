import numpy as np
import pytest

from misdpkit.errors import (
    DimensionMismatch,
    EvenOrder,
    InfeasibleItem,
    ParseError,
    SizeMismatch,
    VariantPrecondition,
)
from misdpkit.linalg import SymMat, num_rank
from misdpkit.problems import (
    GPP_VARIANTS,
    Graph,
    GppInstance,
    QapInstance,
    build_gpp,
    build_kep_assoc,
    build_matrix_completion,
    build_mkcs,
    build_qap,
    build_qbpp,
    build_qmkp,
    build_sils,
    build_stable_set,
    build_tsp_cvetkovic,
    build_tsp_lee,
    build_tsp_qap,
    cycle_adjacency,
    graph_from_dimacs,
    graph_to_dimacs,
    parse_qaplib,
)
from misdpkit.verify import natural_optimum, oracle, solve_by_enumeration


def solve(model, budget=10**7):
    res = solve_by_enumeration(model, budget=budget)
    return natural_optimum(model, res.optimum), res


def metric(n, rng=None, lo=1, hi=9):
    rng = rng or np.random.default_rng(0)
    d = rng.integers(lo, hi + 1, (n, n))
    return np.tril(d, -1) + np.tril(d, -1).T


class TestGraph:
    def test_dimacs_round_trip(self):
        g = Graph.cycle(5)
        assert graph_from_dimacs(graph_to_dimacs(g)) == g

    def test_dimacs_weighted(self):
        text = "c comment\np edge 3 2\ne 1 2 4\ne 2 3 1\n"
        g = graph_from_dimacs(text)
        assert g.weights[0, 1] == 4 and g.weights[1, 2] == 1

    def test_dimacs_errors(self):
        with pytest.raises(ParseError):
            graph_from_dimacs("e 1 2\n")
        with pytest.raises(ParseError):
            graph_from_dimacs("p edge 2 1\nq 1 2\n")

    def test_laplacian(self):
        lap = Graph.cycle(4).laplacian()
        assert np.array_equal(np.diag(lap), [2, 2, 2, 2])
        assert lap.sum() == 0


class TestQaplib:
    def test_parse(self):
        text = "3\n\n0 1 2\n1 0 1\n2 1 0\n\n0 2 1\n2 0 2\n1 2 0\n"
        inst = parse_qaplib(text)
        assert inst.n == 3 and inst.a[0, 2] == 2 and inst.b[1, 2] == 2

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            parse_qaplib("")
        with pytest.raises(ParseError):
            parse_qaplib("3\n1 2 3\n")


class TestStableSet:
    def test_spec_examples(self):
        assert solve(build_stable_set(Graph.complete(3)))[0] == 1
        assert solve(build_stable_set(Graph.cycle(5)))[0] == 2
        assert solve(build_stable_set(Graph.empty(3)))[0] == 3

    def test_counts_match_oracle(self):
        g = Graph.cycle(5)
        _, res = solve(build_stable_set(g))
        assert res.feasible_count == oracle("stable_set", g).feasible_count == 11


class TestMkcs:
    def test_spec_examples(self):
        assert solve(build_mkcs(Graph.complete(3), 2))[0] == 2
        g = Graph.cycle(5)
        assert solve(build_mkcs(g, 5))[0] == 5
        assert solve(build_mkcs(g, 2))[0] == 4


class TestQbpp:
    def test_spec_examples(self):
        z0 = np.zeros((2, 2), dtype=int)
        assert abs(solve(build_qbpp([1, 1], 2, 1, z0))[0] - 1) < 1e-6
        assert abs(solve(build_qbpp([2, 2], 2, 1, z0))[0] - 2) < 1e-6
        one = np.zeros((1, 1), dtype=int)
        assert abs(solve(build_qbpp([1], 5, 3, one))[0] - 3) < 1e-6

    def test_infeasible_item(self):
        with pytest.raises(InfeasibleItem):
            build_qbpp([3, 1], 2, 1, np.zeros((2, 2), dtype=int))

    def test_split_instance_bin_count(self):
        # forced split: the resolved scalar sits at the rank of the packing
        _, res = solve(build_qbpp([2, 2], 2, 1, np.zeros((2, 2), dtype=int)))
        assert abs(res.minimizers[0]["z"] - 2) < 1e-5

    def test_bisection_boundary(self):
        # the resolved scalar is feasible, and infeasible when nudged down
        from misdpkit.linalg import is_psd

        m = build_qbpp([1, 1], 2, 1, np.zeros((2, 2), dtype=int))
        _, res = solve(m)
        point = dict(res.minimizers[0])
        z = point["z"]
        pencil = m.pencils[0]
        assert is_psd(pencil.evaluate(point))
        point["z"] = z - 1e-6 * max(1.0, abs(z))
        assert not is_psd(pencil.evaluate(point), tol=1e-9)


class TestQmkp:
    def test_spec_examples(self):
        assert solve(build_qmkp([1, 1], [1], [1, 1], np.zeros((2, 2), dtype=int)))[0] == 1
        big = 100 * (np.ones((2, 2), dtype=int) - np.eye(2, dtype=int))
        assert solve(build_qmkp([1, 1], [4], [1, 1], big))[0] == 202
        assert solve(build_qmkp([1, 1], [0], [1, 1], np.zeros((2, 2), dtype=int)))[0] == 0


class TestQap:
    def test_spec_examples(self):
        inst = QapInstance.make([[0, 1], [1, 0]], [[0, 1], [1, 0]])
        assert solve(build_qap(inst))[0] == 2
        inst = QapInstance.make([[0]], [[0]], [[7]])
        assert solve(build_qap(inst))[0] == 7

    def test_random_matches_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            a = rng.integers(0, 4, (3, 3))
            a = np.tril(a) + np.tril(a, -1).T
            b = rng.integers(0, 4, (3, 3))
            b = np.tril(b) + np.tril(b, -1).T
            inst = QapInstance.make(a, b)
            assert solve(build_qap(inst))[0] == oracle("qap", inst).optimum

    def test_schur_forcing(self):
        # at every integer-feasible point the Y block equals X B X^T
        inst = QapInstance.make([[0, 1], [1, 0]], [[1, 2], [2, 0]])
        _, res = solve(build_qap(inst))
        for point in res.minimizers:
            x = np.array([[point[f"X[{i},{j}]"] for j in range(2)] for i in range(2)])
            y = np.zeros((2, 2))
            for i in range(2):
                for j in range(i, 2):
                    y[i, j] = y[j, i] = float(point[f"Y[{i},{j}]"])
            assert np.max(np.abs(y - x @ inst.b @ x.T)) <= 1e-7


class TestTsp:
    def test_tsp_qap(self):
        assert solve(build_tsp_qap(metric(3, lo=1, hi=1)))[0] == 3
        d = np.array([
            [0, 1, 2, 1],
            [1, 0, 1, 2],
            [2, 1, 0, 1],
            [1, 2, 1, 0],
        ])
        assert solve(build_tsp_qap(d))[0] == 4
        d5 = metric(5, np.random.default_rng(7))
        assert solve(build_tsp_qap(d5), budget=2**26)[0] == oracle("tsp", d5).optimum

    def test_cvetkovic(self):
        d = np.ones((5, 5), dtype=int) - np.eye(5, dtype=int)
        opt, res = solve(build_tsp_cvetkovic(d))
        assert opt == 5 and res.feasible_count == 12
        d6 = metric(6, np.random.default_rng(8))
        assert solve(build_tsp_cvetkovic(d6))[0] == oracle("tsp", d6).optimum

    def test_cvetkovic_rejects_triangle_pair(self):
        # two disjoint triangles satisfy the degree rows but fail the pencil
        m = build_tsp_cvetkovic(np.ones((6, 6), dtype=int) - np.eye(6, dtype=int))
        point = {name: 0 for name, _ in m.variables}
        for u, v in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]:
            point[f"X[{u},{v}]"] = 1
        from misdpkit.model import eval_point

        res = eval_point(m, point)
        assert not res.feasible
        assert any("pencil" in v for v in res.violations)

    def test_lee(self):
        d = np.ones((5, 5), dtype=int) - np.eye(5, dtype=int)
        assert solve(build_tsp_lee(d))[0] == 5
        rng = np.random.default_rng(9)
        for _ in range(3):
            d5 = metric(5, rng)
            lee = solve(build_tsp_lee(d5))[0]
            cve = solve(build_tsp_cvetkovic(d5))[0]
            assert lee == cve == oracle("tsp", d5).optimum

    def test_lee_n7_matches_tour_oracle(self):
        d7 = metric(7, np.random.default_rng(42))
        opt, res = solve(build_tsp_lee(d7))
        orc = oracle("tsp", d7)
        assert opt == orc.optimum
        assert res.feasible_count == orc.feasible_count == 360

    def test_lee_rejects_even(self):
        with pytest.raises(EvenOrder):
            build_tsp_lee(np.zeros((6, 6)))


class TestGpp:
    def test_spec_examples(self):
        c4 = GppInstance.make(Graph.cycle(4), 2, (2, 2))
        assert solve(build_gpp(c4, "equipartition"))[0] == 2
        p3 = GppInstance.make(Graph.path(3), 2, (2, 1))
        assert solve(build_gpp(p3, "bisection"))[0] == 1
        k4 = GppInstance.make(Graph.complete(4), 2, (2, 2))
        for variant in GPP_VARIANTS:
            assert solve(build_gpp(k4, variant), budget=2**20)[0] == 4

    def test_variant_preconditions(self):
        inst = GppInstance.make(Graph.path(3), 2, (2, 1))
        with pytest.raises(VariantPrecondition):
            build_gpp(inst, "equipartition")
        with pytest.raises(VariantPrecondition):
            build_gpp(GppInstance.make(Graph.complete(4), 2, (2, 2)), "nope")

    def test_gbp_block_structure(self):
        from misdpkit.dpsd import block_form01

        inst = GppInstance.make(Graph.complete(4), 2, (3, 1))
        _, res = solve(build_gpp(inst, "bisection"))
        for point in res.minimizers:
            x = np.zeros((4, 4), dtype=np.int64)
            for i in range(4):
                for j in range(i, 4):
                    x[i, j] = x[j, i] = round(point[f"X[{i},{j}]"])
            mass = int(x.sum())
            assert mass == 3 * 3 + 1 * 1
            _, sizes, n_z = block_form01(SymMat(x, check_symmetry=False))
            assert len(sizes) == 2 and n_z == 0


class TestKepAssoc:
    def test_gep_correspondence(self):
        inst = GppInstance.make(Graph.cycle(4), 2, (2, 2))
        gep_opt, gep = solve(build_gpp(inst, "equipartition"))
        kep_opt, kep = solve(build_kep_assoc(inst))
        assert gep_opt == kep_opt
        assert gep.feasible_count == kep.feasible_count

    def test_k4(self):
        inst = GppInstance.make(Graph.complete(4), 2, (2, 2))
        assert solve(build_kep_assoc(inst))[0] == 4

    def test_m1_forces_empty_within(self):
        # k = n classes of size 1: the within-class bound pins X_2 to zero
        inst = GppInstance.make(Graph.complete(3), 3, (1, 1, 1))
        _, res = solve(build_kep_assoc(inst))
        assert res.feasible_count == 1
        point = res.minimizers[0]
        assert all(v == 0 for name, v in point.items() if name.startswith("X2"))

    def test_degree_row_variant_agrees(self):
        inst = GppInstance.make(Graph.cycle(4), 2, (2, 2))
        a = solve(build_kep_assoc(inst, degree_rows=False))
        b = solve(build_kep_assoc(inst, degree_rows=True))
        assert a[0] == b[0] and a[1].feasible_count == b[1].feasible_count

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            GppInstance.make(Graph.complete(4), 2, (3, 2))
        with pytest.raises(SizeMismatch):
            build_kep_assoc(GppInstance.make(Graph.complete(4), 2, (3, 1)))


class TestCompletion:
    def test_fully_observed(self):
        obs = {(i, j): 1 for i in range(2) for j in range(2)}
        opt, _ = solve(build_matrix_completion((2, 2), obs, [0, 1]))
        assert abs(opt - 2) < 1e-7

    def test_diagonal_observed(self):
        opt, _ = solve(build_matrix_completion((2, 2), {(0, 0): 1, (1, 1): 1}, [0, 1]))
        assert abs(opt - 2) < 1e-7

    def test_empty_domain_zero(self):
        opt, _ = solve(build_matrix_completion((2, 2), {}, [0]))
        assert abs(opt) < 1e-9

    def test_nonsquare(self):
        opt, res = solve(build_matrix_completion((1, 2), {(0, 0): 2}, [0, 1]))
        orc = oracle("completion", (1, 2), {(0, 0): 2}, (0, 1))
        assert abs(opt - orc.optimum) < 1e-7


class TestSils:
    def test_spec_examples(self):
        assert solve(build_sils(np.eye(2, dtype=int), np.array([1, 0]), 1))[0] == 0
        from fractions import Fraction

        assert solve(build_sils(np.eye(2, dtype=int), np.array([1, 1]), 1))[0] == Fraction(1, 2)
        assert solve(build_sils(np.eye(2, dtype=int), np.array([1, 1]), 0))[0] == 1

    def test_dimension_errors(self):
        with pytest.raises(DimensionMismatch):
            build_sils(np.eye(2, dtype=int), np.array([1, 1, 1]), 1)
        with pytest.raises(DimensionMismatch):
            build_sils(np.eye(2, dtype=int), np.array([1, 1]), 3)


def test_cycle_adjacency_first_row():
    b = cycle_adjacency(5)
    assert list(b[0]) == [0, 1, 0, 0, 1]
    assert np.array_equal(b, b.T)
    assert num_rank(SymMat(2 * np.eye(5, dtype=np.int64) + b, check_symmetry=False)) == 5


class TestGepAssocPointwiseMap:
    def test_feasible_point_bijection(self):
        # X <-> (X1, X2) = (J - X, X - I) carries each equipartition-model
        # feasible point to an association-model feasible point with the same
        # objective (exhaustive over all symmetric binary X with unit
        # diagonal, n = 4, k = 2)
        import itertools

        from misdpkit.model import eval_point

        inst = GppInstance.make(Graph.cycle(4), 2, (2, 2))
        gep = build_gpp(inst, "equipartition")
        kep = build_kep_assoc(inst)
        pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        checked = 0
        for bits in itertools.product((0, 1), repeat=6):
            point_gep = {f"X[{i},{i}]": 1 for i in range(4)}
            point_kep = {}
            for (i, j), b in zip(pairs, bits):
                point_gep[f"X[{i},{j}]"] = b
                point_kep[f"X2[{i},{j}]"] = b
                point_kep[f"X1[{i},{j}]"] = 1 - b
            res_gep = eval_point(gep, point_gep)
            res_kep = eval_point(kep, point_kep)
            assert res_gep.feasible == res_kep.feasible
            if res_gep.feasible:
                checked += 1
                assert res_gep.objective == res_kep.objective
        assert checked == 3  # the three equipartitions of a 4-set
