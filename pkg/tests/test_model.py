from fractions import Fraction

import numpy as np
import pytest

from misdpkit.cbf import export_cbf, import_cbf
from misdpkit.errors import IncompleteAssignment, ParseError
from misdpkit.model import (
    LinRow,
    MatrixPencil,
    MisdpModel,
    Objective,
    VarDomain,
    eval_point,
    export_json,
    import_json,
    validate,
)


def stable_set_k2_model():
    """Hand-built bordered model for the 2-vertex single-edge stable set."""
    e = np.zeros((3, 3))
    pencil_const = e.copy()
    pencil_const[0, 0] = 1.0
    t_x0 = np.zeros((3, 3))
    t_x0[0, 1] = t_x0[1, 0] = t_x0[1, 1] = 1.0
    t_x1 = np.zeros((3, 3))
    t_x1[0, 2] = t_x1[2, 0] = t_x1[2, 2] = 1.0
    t_x01 = np.zeros((3, 3))
    t_x01[1, 2] = t_x01[2, 1] = 1.0
    return MisdpModel(
        variables=[
            ("x[0]", VarDomain.binary()),
            ("x[1]", VarDomain.binary()),
            ("X[0,1]", VarDomain.continuous(0, 1)),
        ],
        objective=Objective("min", {"x[0]": -1, "x[1]": -1}),
        rows=[LinRow((("X[0,1]", 1),), "==", 0, label="edge")],
        pencils=[MatrixPencil(pencil_const, [("x[0]", t_x0), ("x[1]", t_x1), ("X[0,1]", t_x01)])],
        metadata={"problem": "stable_set", "sense_original": "max"},
    )


class TestValidate:
    def test_empty_model(self):
        m = MisdpModel([], Objective("min", {}))
        assert validate(m) == []

    def test_unknown_variable_in_pencil(self):
        m = MisdpModel(
            [("x", VarDomain.binary())],
            Objective("min", {"x": 1}),
            pencils=[MatrixPencil(np.zeros((1, 1)), [("ghost", np.ones((1, 1)))])],
        )
        assert len(validate(m)) == 1

    def test_asymmetric_pencil_rejected(self):
        with pytest.raises(ValueError):
            MatrixPencil(np.zeros((2, 2)), [("x", np.array([[0, 1], [0, 0]]))])


class TestEvalPoint:
    def test_stable_set_points(self):
        m = stable_set_k2_model()
        good = {"x[0]": 1, "x[1]": 0, "X[0,1]": 0}
        r = eval_point(m, good)
        assert r.feasible and r.objective == -1
        bad = {"x[0]": 1, "x[1]": 1, "X[0,1]": 1}
        r = eval_point(m, bad)
        assert not r.feasible
        zeros = {"x[0]": 0, "x[1]": 0, "X[0,1]": 0}
        r = eval_point(m, zeros)
        assert r.feasible and r.objective == 0

    def test_incomplete(self):
        with pytest.raises(IncompleteAssignment):
            eval_point(stable_set_k2_model(), {"x[0]": 1})

    def test_exact_on_integer_data(self):
        m = MisdpModel(
            [("a", VarDomain.integer_range(0, 10))],
            Objective("min", {"a": Fraction(1, 3)}),
            rows=[LinRow((("a", Fraction(1, 3)),), "==", Fraction(2, 3))],
        )
        r = eval_point(m, {"a": 2}, tol=0)
        assert r.feasible and r.objective == Fraction(2, 3)
        r = eval_point(m, {"a": 3}, tol=0)
        assert not r.feasible

    def test_variable_order_invariance(self):
        m = stable_set_k2_model()
        shuffled = MisdpModel(
            list(reversed(m.variables)), m.objective, m.rows, m.pencils, m.metadata
        )
        a = {"x[0]": 1, "x[1]": 0, "X[0,1]": 0}
        assert eval_point(m, a).objective == eval_point(shuffled, a).objective
        assert eval_point(m, a).feasible == eval_point(shuffled, a).feasible


class TestJsonRoundTrip:
    def test_round_trip_and_byte_stability(self):
        m = stable_set_k2_model()
        text = export_json(m)
        assert export_json(m) == text  # exporting twice is byte-identical
        again = import_json(text)
        assert again == m
        assert export_json(again) == text

    def test_fraction_and_finite_set(self):
        m = MisdpModel(
            [("u", VarDomain.finite_set([-2, 0, 3])), ("v", VarDomain.continuous())],
            Objective("min", {"u": Fraction(1, 2)}, Fraction(-3, 7)),
            rows=[LinRow((("u", 1), ("v", Fraction(2, 5))), "<=", 4)],
        )
        again = import_json(export_json(m))
        assert again == m
        assert again.objective.constant == Fraction(-3, 7)
        assert again.variables[0][1].values == (-2, 0, 3)

    def test_parse_error(self):
        with pytest.raises(ParseError):
            import_json("{not json")
        with pytest.raises(ParseError):
            import_json('{"format":"other"}')


class TestCbfRoundTrip:
    def test_round_trip_equal_model(self):
        m = stable_set_k2_model()
        text = export_cbf(m)
        again = import_cbf(text)
        assert again == m

    def test_byte_stability(self):
        m = stable_set_k2_model()
        t1 = export_cbf(m)
        t2 = export_cbf(import_cbf(t1))
        assert t1 == t2

    def test_int_section_and_psdcon(self):
        m = stable_set_k2_model()
        text = export_cbf(m)
        assert "INT\n2\n0\n1" in text
        assert "PSDCON\n1\n3" in text

    def test_single_binary_min(self):
        m = MisdpModel(
            [("x", VarDomain.binary())], Objective("min", {"x": 1})
        )
        text = export_cbf(m)
        assert "INT\n1\n0" in text
        assert import_cbf(text) == m

    def test_ternary_bounds_as_rows(self):
        m = MisdpModel([("t", VarDomain.ternary())], Objective("min", {"t": 1}))
        text = export_cbf(m)
        # two synthesized bound rows, dropped again on import
        assert "# misdpkit-boundrows: 2" in text
        assert import_cbf(text).rows == []

    def test_foreign_file_without_comments(self):
        raw = "\n".join(
            [
                "VER", "2", "",
                "OBJSENSE", "MIN", "",
                "VAR", "2 1", "F 2", "",
                "INT", "1", "0", "",
                "OBJACOORD", "1", "1 2.5", "",
            ]
        )
        m = import_cbf(raw)
        assert m.variables[0][1].is_integer
        assert not m.variables[1][1].is_integer
        assert m.objective.coeffs == {"v1": 2.5}

    def test_parse_error_has_line(self):
        with pytest.raises(ParseError):
            import_cbf("VER\n2\n\nNOSECTION\n")
