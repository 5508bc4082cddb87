"""Conic Benchmark Format (v2) subset writer and reader.

Scalar variables live in F or L+ cones; remaining domain bounds become
trailing linear rows so external MISDP solvers see the full integer hull.
Because CBF has no notion of binary/ternary/finite-set domains, the exact
domain list, the count of synthesized bound rows and the model metadata are
carried in '#' comment lines; import_cbf uses them for a lossless round trip
and falls back to a generic reading on foreign files.
"""

import json
import warnings
from fractions import Fraction

import numpy as np

from .errors import ParseError
from .model import (
    BINARY,
    FINITE_SET,
    INTEGER_RANGE,
    TERNARY,
    LinRow,
    MatrixPencil,
    MisdpModel,
    Objective,
    VarDomain,
    validate,
)

_REL_CONE = {"==": "L=", "<=": "L-", ">=": "L+"}
_CONE_REL = {v: k for k, v in _REL_CONE.items()}
_FOREIGN_INT_BOUND = 2**31


def _num(v) -> str:
    return f"{float(v):.17g}"


def _enc_bound(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float) and not v.is_integer():
        return repr(v)
    return str(int(v))


def _dec_bound(s: str):
    if s == "":
        return None
    if "/" in s:
        p, q = s.split("/")
        return Fraction(int(p), int(q))
    try:
        return int(s)
    except ValueError:
        return float(s)


def _domain_code(d: VarDomain) -> str:
    if d.kind == BINARY:
        return "b"
    if d.kind == TERNARY:
        return "t"
    if d.kind == INTEGER_RANGE:
        return f"i:{_enc_bound(d.lo)}:{_enc_bound(d.hi)}"
    if d.kind == FINITE_SET:
        return "f:" + "|".join(_enc_bound(v) for v in d.values)
    if d.lo is None and d.hi is None:
        return "c"
    return f"c:{_enc_bound(d.lo)}:{_enc_bound(d.hi)}"


def _domain_from_code(code: str) -> VarDomain:
    if code == "b":
        return VarDomain.binary()
    if code == "t":
        return VarDomain.ternary()
    if code == "c":
        return VarDomain.continuous()
    kind, _, rest = code.partition(":")
    if kind == "i":
        lo, _, hi = rest.partition(":")
        return VarDomain.integer_range(_dec_bound(lo), _dec_bound(hi))
    if kind == "f":
        return VarDomain.finite_set(_dec_bound(v) for v in rest.split("|"))
    if kind == "c":
        lo, _, hi = rest.partition(":")
        return VarDomain.continuous(_dec_bound(lo), _dec_bound(hi))
    raise ParseError(f"unknown domain code {code!r}")


def _var_cone(d: VarDomain) -> str:
    return "L+" if d.lo == 0 else "F"


def _bound_rows(variables):
    """Rows encoding the domain bounds not captured by the variable cone."""
    rows = []
    for name, d in variables:
        lo, hi = d.lo, d.hi
        if d.kind == FINITE_SET:
            vals = d.values
            if vals != tuple(range(int(vals[0]), int(vals[-1]) + 1)):
                warnings.warn(
                    f"finite_set domain of {name!r} exported as its integer-range hull",
                    stacklevel=3,
                )
            lo, hi = vals[0], vals[-1]
        if lo is not None and not (lo == 0 and _var_cone(d) == "L+"):
            rows.append(LinRow(((name, 1),), ">=", lo))
        if hi is not None:
            rows.append(LinRow(((name, 1),), "<=", hi))
    return rows


def export_cbf(model: MisdpModel) -> str:
    defects = validate(model)
    if defects:
        raise ValueError(f"model has defects: {defects}")
    index = {name: i for i, (name, _) in enumerate(model.variables)}
    bound_rows = _bound_rows(model.variables)
    all_rows = list(model.rows) + bound_rows

    out = ["VER", "2", ""]
    out.append("# misdpkit-domains: " + " ".join(_domain_code(d) for _, d in model.variables))
    out.append("# misdpkit-names: " + " ".join(n for n, _ in model.variables))
    out.append(f"# misdpkit-boundrows: {len(bound_rows)}")
    if model.metadata:
        out.append("# misdpkit-meta: " + json.dumps(model.metadata, sort_keys=True, separators=(",", ":")))
    out.append("")

    out += ["OBJSENSE", model.objective.sense.upper(), ""]

    groups = []
    for _, d in model.variables:
        cone = _var_cone(d)
        if groups and groups[-1][0] == cone:
            groups[-1][1] += 1
        else:
            groups.append([cone, 1])
    out += ["VAR", f"{len(model.variables)} {len(groups)}"]
    out += [f"{cone} {cnt}" for cone, cnt in groups]
    out.append("")

    ints = [i for i, (_, d) in enumerate(model.variables) if d.is_integer]
    if ints:
        out += ["INT", str(len(ints))]
        out += [str(i) for i in ints]
        out.append("")

    if model.pencils:
        out += ["PSDCON", str(len(model.pencils))]
        out += [str(p.order) for p in model.pencils]
        out.append("")

    if all_rows:
        rgroups = []
        for row in all_rows:
            cone = _REL_CONE[row.rel]
            if rgroups and rgroups[-1][0] == cone:
                rgroups[-1][1] += 1
            else:
                rgroups.append([cone, 1])
        out += ["CON", f"{len(all_rows)} {len(rgroups)}"]
        out += [f"{cone} {cnt}" for cone, cnt in rgroups]
        out.append("")

    obj_entries = sorted(
        ((index[n], c) for n, c in model.objective.coeffs.items() if c != 0),
    )
    if obj_entries:
        out += ["OBJACOORD", str(len(obj_entries))]
        out += [f"{j} {_num(c)}" for j, c in obj_entries]
        out.append("")
    if model.objective.constant != 0:
        out += ["OBJBCOORD", _num(model.objective.constant), ""]

    acoord = []
    bcoord = []
    for k, row in enumerate(all_rows):
        for n, c in row.coeffs:
            if c != 0:
                acoord.append((k, index[n], c))
        if row.rhs != 0:
            bcoord.append((k, -row.rhs))
    acoord.sort(key=lambda e: (e[0], e[1]))
    if acoord:
        out += ["ACOORD", str(len(acoord))]
        out += [f"{k} {j} {_num(c)}" for k, j, c in acoord]
        out.append("")
    if bcoord:
        out += ["BCOORD", str(len(bcoord))]
        out += [f"{k} {_num(v)}" for k, v in bcoord]
        out.append("")

    hcoord = []
    dcoord = []
    for p, pencil in enumerate(model.pencils):
        for name, mat in pencil.terms:
            j = index[name]
            for r in range(pencil.order):
                for c in range(r + 1):
                    if mat[r, c] != 0.0:
                        hcoord.append((p, j, r, c, mat[r, c]))
        for r in range(pencil.order):
            for c in range(r + 1):
                if pencil.const[r, c] != 0.0:
                    dcoord.append((p, r, c, pencil.const[r, c]))
    hcoord.sort(key=lambda e: (e[0], e[1], e[2], e[3]))
    dcoord.sort(key=lambda e: (e[0], e[1], e[2]))
    if hcoord:
        out += ["HCOORD", str(len(hcoord))]
        out += [f"{p} {j} {r} {c} {_num(v)}" for p, j, r, c, v in hcoord]
        out.append("")
    if dcoord:
        out += ["DCOORD", str(len(dcoord))]
        out += [f"{p} {r} {c} {_num(v)}" for p, r, c, v in dcoord]
        out.append("")

    return "\n".join(out).rstrip("\n") + "\n"


class _Reader:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.pos = 0
        self.comments = {}

    def next(self):
        while self.pos < len(self.lines):
            line = self.lines[self.pos]
            self.pos += 1
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                body = s[1:].strip()
                if body.startswith("misdpkit-"):
                    key, _, val = body.partition(":")
                    self.comments[key.strip()] = val.strip()
                continue
            return s
        return None

    def expect(self, what):
        tok = self.next()
        if tok is None:
            raise ParseError(f"unexpected end of file, expected {what}", line=self.pos)
        return tok

    def error(self, msg):
        raise ParseError(msg, line=self.pos)


def import_cbf(text: str) -> MisdpModel:
    rd = _Reader(text)
    sense = "min"
    var_cones = []
    int_vars = set()
    psd_dims = []
    row_cones = []
    obj_coeffs = {}
    obj_const = 0.0
    acoord, bcoord, hcoord, dcoord = [], [], [], []

    tok = rd.next()
    while tok is not None:
        if tok == "VER":
            ver = rd.expect("version")
            if ver not in ("1", "2", "3"):
                rd.error(f"unsupported CBF version {ver}")
        elif tok == "OBJSENSE":
            sense = rd.expect("objective sense").lower()
            if sense not in ("min", "max"):
                rd.error(f"bad OBJSENSE {sense!r}")
        elif tok == "VAR":
            head = rd.expect("VAR header").split()
            total, ngroups = int(head[0]), int(head[1])
            for _ in range(ngroups):
                cone, cnt = rd.expect("VAR group").split()
                var_cones.extend([cone] * int(cnt))
            if len(var_cones) != total:
                rd.error("VAR group sizes do not sum to the variable count")
        elif tok == "INT":
            cnt = int(rd.expect("INT count"))
            for _ in range(cnt):
                int_vars.add(int(rd.expect("INT index")))
        elif tok == "PSDCON":
            cnt = int(rd.expect("PSDCON count"))
            for _ in range(cnt):
                psd_dims.append(int(rd.expect("PSDCON dimension")))
        elif tok == "CON":
            head = rd.expect("CON header").split()
            total, ngroups = int(head[0]), int(head[1])
            for _ in range(ngroups):
                cone, cnt = rd.expect("CON group").split()
                if cone not in _CONE_REL:
                    rd.error(f"unsupported row cone {cone!r}")
                row_cones.extend([cone] * int(cnt))
            if len(row_cones) != total:
                rd.error("CON group sizes do not sum to the row count")
        elif tok == "OBJACOORD":
            cnt = int(rd.expect("OBJACOORD count"))
            for _ in range(cnt):
                j, v = rd.expect("OBJACOORD entry").split()
                obj_coeffs[int(j)] = float(v)
        elif tok == "OBJBCOORD":
            obj_const = float(rd.expect("OBJBCOORD value"))
        elif tok == "ACOORD":
            cnt = int(rd.expect("ACOORD count"))
            for _ in range(cnt):
                k, j, v = rd.expect("ACOORD entry").split()
                acoord.append((int(k), int(j), float(v)))
        elif tok == "BCOORD":
            cnt = int(rd.expect("BCOORD count"))
            for _ in range(cnt):
                k, v = rd.expect("BCOORD entry").split()
                bcoord.append((int(k), float(v)))
        elif tok == "HCOORD":
            cnt = int(rd.expect("HCOORD count"))
            for _ in range(cnt):
                p, j, r, c, v = rd.expect("HCOORD entry").split()
                hcoord.append((int(p), int(j), int(r), int(c), float(v)))
        elif tok == "DCOORD":
            cnt = int(rd.expect("DCOORD count"))
            for _ in range(cnt):
                p, r, c, v = rd.expect("DCOORD entry").split()
                dcoord.append((int(p), int(r), int(c), float(v)))
        else:
            rd.error(f"unsupported CBF section {tok!r}")
        tok = rd.next()

    nv = len(var_cones)
    if "misdpkit-names" in rd.comments and rd.comments["misdpkit-names"]:
        names = rd.comments["misdpkit-names"].split()
        if len(names) != nv:
            raise ParseError("misdpkit-names length mismatch")
    else:
        names = [f"v{i}" for i in range(nv)]

    if "misdpkit-domains" in rd.comments:
        domains = [_domain_from_code(c) for c in rd.comments["misdpkit-domains"].split()]
        if len(domains) != nv:
            raise ParseError("misdpkit-domains length mismatch")
    else:
        domains = []
        for i, cone in enumerate(var_cones):
            lo = 0 if cone == "L+" else None
            if i in int_vars:
                domains.append(VarDomain.integer_range(lo if lo is not None else -_FOREIGN_INT_BOUND,
                                                       _FOREIGN_INT_BOUND))
            else:
                domains.append(VarDomain.continuous(lo))

    n_bound = int(rd.comments.get("misdpkit-boundrows", "0"))
    metadata = json.loads(rd.comments["misdpkit-meta"]) if "misdpkit-meta" in rd.comments else {}

    n_rows = len(row_cones)
    row_coeffs = [[] for _ in range(n_rows)]
    row_rhs = [0.0] * n_rows
    for k, j, v in acoord:
        if not 0 <= k < n_rows or not 0 <= j < nv:
            raise ParseError(f"ACOORD entry out of range: {(k, j)}")
        row_coeffs[k].append((names[j], v))
    for k, v in bcoord:
        row_rhs[k] = -v
    keep = n_rows - n_bound
    rows = [
        LinRow(tuple(row_coeffs[k]), _CONE_REL[row_cones[k]], row_rhs[k])
        for k in range(keep)
    ]

    consts = [np.zeros((d, d)) for d in psd_dims]
    terms = [{} for _ in psd_dims]
    for p, r, c, v in dcoord:
        consts[p][r, c] = v
        consts[p][c, r] = v
    for p, j, r, c, v in hcoord:
        mat = terms[p].setdefault(names[j], np.zeros((psd_dims[p], psd_dims[p])))
        mat[r, c] = v
        mat[c, r] = v
    pencils = [
        MatrixPencil(consts[p], sorted(terms[p].items(), key=lambda kv: names.index(kv[0])))
        for p in range(len(psd_dims))
    ]

    objective = Objective(sense, {names[j]: v for j, v in sorted(obj_coeffs.items())}, obj_const)
    return MisdpModel(list(zip(names, domains)), objective, rows, pencils, metadata)
