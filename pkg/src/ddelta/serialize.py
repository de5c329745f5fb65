"""JSON codecs for every core type; exact values round-trip bit-exactly.

GaussianRational <-> [re_num, re_den, im_num, im_den]
PolyC            <-> list of those, ascending degree
ExpPoly          <-> {"terms": [{"sigma": j, "poly": [...]}, ...]}
HElement         <-> {"num": ExpPoly, "den": PolyC, "unit": {"c": GR, "k": int}}
HMatrix          <-> {"rows": r, "cols": c, "entries": [[HElement, ...], ...]}
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .charzeros import ZeroCluster
from .currents import CurrentEval, GrowthCert
from .errors import SchemaViolationError
from .exppoly import ExpPoly
from .hring import (
    EntiretyCertificate,
    HElement,
    LadderEvidence,
    SeriesEvidence,
)
from .matsmith import HMatrix, SmithDecomposition
from .polys import Poly
from .scalars import GaussianRational
from .synthesis import ExpSolution, Trajectory


def _need(obj, key, path):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaViolationError(f"missing field '{key}'", path)
    return obj[key]


def gr_to_json(c: GaussianRational):
    return [c.re.numerator, c.re.denominator, c.im.numerator, c.im.denominator]


def gr_from_json(data, path="") -> GaussianRational:
    if not (isinstance(data, list) and len(data) == 4 and all(isinstance(x, int) for x in data)):
        raise SchemaViolationError("GaussianRational must be [re_n, re_d, im_n, im_d]", path)
    if data[1] == 0 or data[3] == 0:
        raise SchemaViolationError("zero denominator in rational", path)
    return GaussianRational(Fraction(data[0], data[1]), Fraction(data[2], data[3]))


def poly_to_json(p: Poly):
    return [gr_to_json(c) for c in p.coeffs]


def poly_from_json(data, path="") -> Poly:
    if not isinstance(data, list):
        raise SchemaViolationError("polynomial must be a coefficient list", path)
    return Poly([gr_from_json(c, f"{path}[{i}]") for i, c in enumerate(data)])


def exppoly_to_json(a: ExpPoly):
    return {
        "terms": [
            {"sigma": j, "poly": poly_to_json(p)} for j, p in sorted(a.terms.items())
        ]
    }


def exppoly_from_json(data, path="") -> ExpPoly:
    terms = _need(data, "terms", path)
    if not isinstance(terms, list):
        raise SchemaViolationError("'terms' must be a list", f"{path}.terms")
    out = {}
    for i, t in enumerate(terms):
        tpath = f"{path}.terms[{i}]"
        j = _need(t, "sigma", tpath)
        if not isinstance(j, int):
            raise SchemaViolationError("'sigma' must be an integer", f"{tpath}.sigma")
        out[j] = poly_from_json(_need(t, "poly", tpath), f"{tpath}.poly")
    return ExpPoly(out)


def helement_to_json(q: HElement):
    return {
        "num": exppoly_to_json(q.num),
        "den": poly_to_json(q.den),
        "unit": {"c": gr_to_json(q.unit_c), "k": q.unit_k},
    }


def helement_from_json(data, path="") -> HElement:
    num = exppoly_from_json(_need(data, "num", path), f"{path}.num")
    den = poly_from_json(_need(data, "den", path), f"{path}.den")
    unit = _need(data, "unit", path)
    c = gr_from_json(_need(unit, "c", f"{path}.unit"), f"{path}.unit.c")
    k = _need(unit, "k", f"{path}.unit")
    if not isinstance(k, int):
        raise SchemaViolationError("'k' must be an integer", f"{path}.unit.k")
    return HElement.make(num, den, c, k)


def hmatrix_to_json(m: HMatrix):
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [[helement_to_json(m[i, j]) for j in range(m.cols)] for i in range(m.rows)],
    }


def hmatrix_from_json(data, path="") -> HMatrix:
    rows = _need(data, "rows", path)
    cols = _need(data, "cols", path)
    entries = _need(data, "entries", path)
    if not isinstance(entries, list) or len(entries) != rows:
        raise SchemaViolationError("entry grid does not match 'rows'", f"{path}.entries")
    grid = []
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != cols:
            raise SchemaViolationError(
                "entry row does not match 'cols'", f"{path}.entries[{i}]"
            )
        grid.append(
            [helement_from_json(e, f"{path}.entries[{i}][{j}]") for j, e in enumerate(row)]
        )
    return HMatrix(grid)


def certificate_to_json(cert: EntiretyCertificate):
    entries = []
    for psi, mult, ev in cert.entries:
        if isinstance(ev, SeriesEvidence):
            entries.append(
                {
                    "factor": poly_to_json(psi),
                    "multiplicity": mult,
                    "kind": "series",
                    "coefficients": [gr_to_json(c) for c in ev.coefficients],
                }
            )
        else:
            entries.append(
                {
                    "factor": poly_to_json(psi),
                    "multiplicity": mult,
                    "kind": "ladder",
                    "quotients": [
                        {"k": k, "sigma": j, "poly": poly_to_json(q)}
                        for (k, j), q in ev.quotients
                    ],
                }
            )
    return {"den": poly_to_json(cert.den), "entries": entries}


def cluster_to_json(c: ZeroCluster):
    return {
        "center": [c.center.real, c.center.imag],
        "multiplicity": c.multiplicity,
        "radius": c.radius,
    }


def expsolution_to_json(s: ExpSolution):
    return {
        "modes": [
            {"alpha": [a.real, a.imag], "coeffs": [[c.real, c.imag] for c in cs]}
            for a, cs in s.modes
        ]
    }


def expsolution_from_json(data, path="") -> ExpSolution:
    modes = _need(data, "modes", path)
    out = []
    for i, m in enumerate(modes):
        a = _need(m, "alpha", f"{path}.modes[{i}]")
        cs = _need(m, "coeffs", f"{path}.modes[{i}]")
        out.append((complex(a[0], a[1]), tuple(complex(c[0], c[1]) for c in cs)))
    return ExpSolution.make(out)


def trajectory_to_csv(t: Trajectory) -> str:
    lines = ["x,re,im"]
    for x, v in zip(t.grid, t.values):
        lines.append(f"{x!r},{v.real!r},{v.imag!r}")
    return "\n".join(lines) + "\n"


def trajectory_from_csv(text: str) -> Trajectory:
    import numpy as np

    rows = [line for line in text.strip().splitlines() if line]
    if not rows or rows[0].strip() != "x,re,im":
        raise SchemaViolationError("trajectory CSV must start with 'x,re,im'", "header")
    xs, vs = [], []
    for i, line in enumerate(rows[1:]):
        parts = line.split(",")
        if len(parts) != 3:
            raise SchemaViolationError("expected 3 columns", f"line {i + 2}")
        try:
            xs.append(float(parts[0]))
            vs.append(complex(float(parts[1]), float(parts[2])))
        except ValueError as err:
            raise SchemaViolationError(f"bad number: {err}", f"line {i + 2}")
    if len(xs) < 2:
        raise SchemaViolationError("trajectory needs at least 2 samples", "body")
    return Trajectory(
        grid=np.array(xs), values=np.array(vs), step=float(xs[1] - xs[0])
    )


def trajectory_to_json(t: Trajectory):
    return {
        "step": t.step,
        "samples": [[float(x), v.real, v.imag] for x, v in zip(t.grid, t.values)],
    }


def current_to_json(c: CurrentEval):
    return {
        "value": [c.value.real, c.value.imag],
        "lambda_schedule": list(c.lambda_schedule),
        "residual": c.residual,
        "samples": [[v.real, v.imag] for v in c.samples],
        "convention": c.convention,
    }


def growthcert_to_json(g: GrowthCert):
    return {
        "C": g.C,
        "M": g.M,
        "N": g.N,
        "denom_witness": poly_to_json(g.denom_witness),
        "sample_count": g.sample_count,
        "max_abs_point": g.max_abs_point,
        "dominated": g.dominated,
    }


def smith_to_json(dec: SmithDecomposition):
    return {
        "V": hmatrix_to_json(dec.V),
        "D": hmatrix_to_json(dec.D),
        "W": hmatrix_to_json(dec.W),
        "rank": dec.rank,
    }
