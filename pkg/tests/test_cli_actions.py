"""One exercise per CLI action, wiring bundles the way the README documents."""

import io
import json
import os
from contextlib import redirect_stdout

import pytest

from dqkit.cli import dispatch

CORPUS = os.path.join(os.path.dirname(__file__), "..", "corpus")


def doc(name):
    return json.load(open(os.path.join(CORPUS, name)))


def run(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = dispatch(argv)
    return code, json.loads(buf.getvalue())


def bundle_file(tmp_path, entries, name="b.json"):
    p = tmp_path / name
    p.write_text(json.dumps({"kind": "bundle", "payload": entries}))
    return str(p)


def poly_doc(dim, expr):
    return {"kind": "poly", "dim": dim, "payload": expr}


def form_doc(dim, terms, degree=None):
    payload = terms if degree is None else {"degree": degree, "terms": terms}
    return {"kind": "form", "dim": dim, "payload": payload}


def mv_doc(dim, terms):
    return {"kind": "multivec", "dim": dim, "payload": terms}


class TestPoissonActions:
    def test_bracket(self, tmp_path):
        path = bundle_file(
            tmp_path,
            {"pi": doc("so3.json"), "f": poly_doc(3, "x"), "g": poly_doc(3, "y")},
        )
        code, report = run(["poisson", "bracket", "--in", path])
        assert code == 0 and report["payload"] == "x3"

    def test_dpi(self, tmp_path):
        path = bundle_file(
            tmp_path,
            {"pi": doc("pi_std.json"), "a": mv_doc(2, [{"indices": [1], "coeff": "x"}])},
        )
        code, report = run(["poisson", "dpi", "--in", path])
        assert code == 0
        assert report["payload"]["terms"] == [{"coeff": "1", "indices": [1, 2]}]

    def test_koszul(self, tmp_path):
        path = bundle_file(
            tmp_path,
            {
                "pi": doc("pi_std.json"),
                "alpha": form_doc(2, [{"indices": [1], "coeff": "x"}]),
                "beta": form_doc(2, [{"indices": [2], "coeff": "1"}]),
            },
        )
        code, report = run(["poisson", "koszul", "--in", path])
        assert code == 0
        assert report["payload"]["terms"] == [{"coeff": "1", "indices": [1]}]

    def test_hamiltonian(self, tmp_path):
        path = bundle_file(tmp_path, {"pi": doc("pi_std.json"), "f": poly_doc(2, "x")})
        code, report = run(["poisson", "hamiltonian", "--in", path])
        assert code == 0
        assert report["payload"]["terms"] == [{"coeff": "1", "indices": [2]}]


class TestAlgebroidActions:
    def test_check(self):
        code, report = run(
            ["algebroid", "check", "--in", os.path.join(CORPUS, "algebroid_so3.json")]
        )
        assert code == 0 and report["payload"]["algebroid"]

    def test_from_poisson(self):
        code, report = run(
            ["algebroid", "from-poisson", "--in", os.path.join(CORPUS, "so3.json")]
        )
        assert code == 0
        assert report["payload"]["rank"] == 3
        assert {"pair": [1, 2], "coeffs": ["0", "0", "1"]} in report["payload"]["structure"]

    def test_d(self, tmp_path):
        path = bundle_file(
            tmp_path,
            {
                "algebroid": doc("algebroid_so3.json"),
                "omega": form_doc(3, [{"indices": [1], "coeff": "x"}]),
            },
        )
        code, report = run(["algebroid", "d", "--in", path])
        assert code == 0
        assert report["payload"]["degree"] == 2

    def test_ext_curv(self, tmp_path):
        path = bundle_file(
            tmp_path,
            {
                "algebroid": doc("algebroid_so3.json"),
                "twist": form_doc(3, [], degree=2),
                "lam": form_doc(3, [{"indices": [2], "coeff": "x"}]),
            },
        )
        code, report = run(["algebroid", "ext-curv", "--in", path])
        assert code == 0
        assert report["payload"]["degree"] == 2


class TestDiffopActions:
    def test_apply(self, tmp_path):
        op = {
            "kind": "diffop",
            "dim": 2,
            "payload": {
                "arity": 2,
                "terms": [{"coeff": "1", "orders": [[1, 0], [0, 1]]}],
            },
        }
        path = bundle_file(
            tmp_path, {"op": op, "f1": poly_doc(2, "x^2"), "f2": poly_doc(2, "x*y")}
        )
        code, report = run(["diffop", "apply", "--in", path])
        assert code == 0 and report["payload"] == "2*x1^2"

    def test_compose(self, tmp_path):
        dx = {
            "kind": "diffop",
            "dim": 2,
            "payload": {"arity": 1, "terms": [{"coeff": "1", "orders": [[1, 0]]}]},
        }
        path = bundle_file(tmp_path, {"outer": dx, "inner": dx})
        code, report = run(["diffop", "compose", "--in", path, "--slot", "1"])
        assert code == 0
        assert report["payload"]["terms"] == [{"coeff": "1", "orders": [[2, 0]]}]

    def test_delta(self, tmp_path):
        q = {
            "kind": "diffop",
            "dim": 2,
            "payload": {"arity": 1, "terms": [{"coeff": "1/2", "orders": [[2, 0]]}]},
        }
        p = tmp_path / "q.json"
        p.write_text(json.dumps(q))
        code, report = run(["diffop", "delta", "--in", str(p)])
        assert code == 0
        assert report["payload"]["terms"] == [
            {"coeff": "1", "orders": [[1, 0], [1, 0]]}
        ]

    def test_cocycle(self, tmp_path):
        p1 = {
            "kind": "diffop",
            "dim": 2,
            "payload": {
                "arity": 2,
                "terms": [
                    {"coeff": "1/2", "orders": [[1, 0], [0, 1]]},
                    {"coeff": "-1/2", "orders": [[0, 1], [1, 0]]},
                ],
            },
        }
        p = tmp_path / "p.json"
        p.write_text(json.dumps(p1))
        code, report = run(["diffop", "cocycle", "--in", str(p)])
        assert code == 0 and report["ok"]


class TestStarActions:
    def test_invert(self):
        code, report = run(
            ["star", "invert", "--in", os.path.join(CORPUS, "gauge_halfdx2.json")]
        )
        assert code == 0
        assert report["payload"]["R"][0]["terms"][0]["coeff"] == "-1/2"

    def test_adexp(self, tmp_path):
        path = bundle_file(
            tmp_path,
            {
                "star": doc("moyal_plane.json"),
                "alpha": poly_doc(2, "x"),
                "b": poly_doc(2, "y"),
            },
        )
        code, report = run(["star", "adexp", "--in", path])
        assert code == 0
        assert report["payload"] == ["x2", "1", "0", "0"]

    def test_nabla_and_curvature(self, tmp_path):
        gauge_id = {
            "kind": "gauge",
            "dim": 2,
            "order": 3,
            "payload": {
                "R": [
                    {"arity": 1, "terms": []},
                    {"arity": 1, "terms": []},
                    {"arity": 1, "terms": []},
                ]
            },
        }
        entries = {
            "star": doc("moyal_plane.json"),
            "gauge": gauge_id,
            "xi0": mv_doc(2, {"degree": 1, "terms": []}),
            "xi1": mv_doc(2, [{"indices": [1], "coeff": "x"}]),
            "f": poly_doc(2, "x"),
            "m": poly_doc(2, "y"),
        }
        path = bundle_file(tmp_path, entries)
        code, report = run(["star", "nabla", "--in", path])
        assert code == 0
        # {x, y} + xi1(x) m = 1 + x y
        assert report["payload"] == "x1*x2 + 1"
        code, report = run(["star", "nabla-curv", "--in", path])
        assert code == 0
        assert report["payload"]["terms"] == [{"coeff": "1", "indices": [1, 2]}]


class TestErrorPaths:
    def test_specialize_rejects_nonassociative(self):
        code, report = run(
            ["star", "specialize", "--in", os.path.join(CORPUS, "badstar.json")]
        )
        assert code == 1
        assert "associative" in report["payload"]["error"]

    def test_subprincipal_rejects_non_special_section(self, tmp_path):
        path = bundle_file(
            tmp_path,
            {"star": doc("moyal_plane.json"), "gauge": doc("gauge_halfdx2.json")},
        )
        code, report = run(["star", "subprincipal", "--in", path])
        assert code == 1

    def test_kappa_rejects_dB_mismatch(self, tmp_path):
        path = bundle_file(
            tmp_path,
            {"qc": doc("qc_r3.json"), "B": form_doc(3, [], degree=2)},
        )
        code, report = run(["kappa", "--in", path])
        assert code == 1
        assert "dB != H" in report["payload"]["error"]

    def test_dimension_mismatch_is_input_error(self, tmp_path):
        path = bundle_file(
            tmp_path,
            {"pi": doc("pi_std.json"), "f": poly_doc(3, "x"), "g": poly_doc(3, "y")},
        )
        code, report = run(["poisson", "bracket", "--in", path])
        assert code == 2
