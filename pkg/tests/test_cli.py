import io
import json
from importlib import resources

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transval import errors as E
from transval.cli.main import EXIT_CODES, exit_code, run
from transval.cli.parser import parse_poly, parse_series, parse_sigma_rational
from transval.fields import QQ, field_from_spec
from transval.sigma import SigmaRational


def tvf(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def tvf_doc(*argv):
    code, out, err = tvf(*argv, "--json")
    assert code == 0, err
    doc = json.loads(out)
    assert doc["schema"] == "transval/v1" and doc["command"] == argv[0]
    return doc


def tvf_json(*argv):
    return tvf_doc(*argv)["result"]


def schema(name):
    text = resources.files("transval.cli").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


# -- expression parser --------------------------------------------------------------

def test_parse_examples():
    S = SigmaRational.sigma()
    assert parse_sigma_rational("s^2 + s/2") == S**2 + S / 2
    assert parse_sigma_rational("p", 3) == SigmaRational(3)
    f = parse_poly("x^(s+1) - 2*x + t^(-1)", QQ)
    assert f.degree == parse_poly("x^(s+1)", QQ).degree
    s = parse_series("t^(-1) - t^(1/2) + O(t^(s))", QQ)
    assert s.prec == S and str(s) == "t^(-1) - t^(1/2) + O(t^(s))"


def test_parse_errors_carry_position():
    with pytest.raises(E.ParseError) as info:
        parse_poly("x^(s", QQ)
    assert (info.value.line, info.value.col) == (1, 4)
    with pytest.raises(E.ExprTypeError):
        parse_poly("x^(p)", QQ, 1)
    with pytest.raises(E.ParseError):
        parse_poly("x +* 1", QQ)


def test_parse_generator_of_extension():
    F = field_from_spec("F4", 2)
    f = parse_poly("g*x^(s) + g^2*x + t^(-1)", F, 2)
    g = F.gen
    assert parse_poly(str(f), F, 2) == f
    assert g * g * g == F.one


_atoms = st.sampled_from(["x", "x^(s)", "x^(s+1)", "x^2", "x^(s^2)", "t", "t^(-1)", "t^(1/s)", "1", "g", "g^2"])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(_atoms, _atoms, st.sampled_from(["+", "-", "*"])), min_size=1, max_size=4))
def test_render_parse_round_trip(parts):
    F = field_from_spec("F4", 2)
    text = " + ".join(f"({a}) {op} ({b})" for a, b, op in parts)
    f = parse_poly(text, F, 2)
    assert parse_poly(str(f), F, 2) == f


# -- commands ----------------------------------------------------------------------

def test_tropical_json():
    assert tvf_json("tropical", "--p", "2", "x^(s)-x-t^(-1)") == {"roots": [{"num": "-1", "den": "s"}]}


def test_herbrand_above_root():
    res = tvf_json("herbrand", "--p", "3", "x^(p)-x-t^(-1)", "--above-root")
    slopes = [pc["slope"]["terms"] for pc in res["pieces"]]
    assert slopes == [[{"i": 0, "num": 3, "pden": 1}], [{"i": 0, "num": 1, "pden": 1}]]
    assert res["singularPoints"] == [{"num": "0", "den": "1"}]


def test_specialize_text():
    code, out, _ = tvf("specialize", "--p", "2", "--q", "4", "x^(s)-x")
    assert code == 0 and out == "x^4 + x\n"
    code, out, _ = tvf("specialize", "--p", "3", "--q", "3", "x^(s)-x")
    assert out == "x^3 - x\n"


def test_solve_text():
    code, out, _ = tvf("solve", "--p", "2", "x^(s)-x", "t^(-1)", "--budget", "3")
    assert code == 0
    assert out.splitlines()[0] == "root: t^(-1/s) + t^(-1/s^2) + t^(-1/s^3)"
    assert "converged: false" in out


def test_cut_and_asroot():
    res = tvf_json("cut", "--p", "2", "t^(-1)", "--n", "3")
    assert res["limit"] == {"num": "0", "den": "1"} and res["closedAtLimit"] is False
    assert len(res["samples"]) == 4
    res = tvf_json("asroot", "--p", "2", "t^(-1)", "--n", "2")
    assert res["root"]["text"] == "t^(-1/2) + t^(-1/4)"


INVOCATIONS = [
    ("taylor", "--p", "2", "x^(s+1)"),
    ("polygon", "--p", "2", "x^(s)-x-t^(-1)"),
    ("tropical", "x^2 - t"),
    ("herbrand", "--p", "2", "x^(s)-x-t^(-1)"),
    ("herbrand", "--p", "2", "x-1", "--center", "0", "--radius", "1"),
    ("solve", "--p", "2", "x^(s)-x", "t^(-1)", "--budget", "3"),
    ("lift", "--p", "2", "x^2-x-t", "--prec", "8"),
    ("ball", "--p", "2", "x-1", "--center", "0", "--radius", "1"),
    ("ball", "x^2 - t", "--radius", "1/2"),
    ("distances", "--p", "2", "--field", "F4", "--q", "4", "x^(s)-x"),
    ("specialize", "--p", "2", "--q", "4", "x^(s)-x"),
    ("asroot", "--p", "2", "t^(-1)"),
    ("cut", "--p", "3", "t^(-1)"),
]


@pytest.mark.parametrize("argv", INVOCATIONS, ids=lambda a: " ".join(a))
def test_json_output_matches_schema(argv):
    jsonschema.validate(tvf_doc(*argv), schema(argv[0]))


@pytest.mark.parametrize("argv", INVOCATIONS, ids=lambda a: " ".join(a))
def test_text_output(argv):
    code, out, err = tvf(*argv)
    assert code == 0 and out.strip() and not err


# -- exit codes --------------------------------------------------------------------

def _subclasses(cls):
    for sub in cls.__subclasses__():
        yield sub
        yield from _subclasses(sub)


def test_exit_code_table_is_exhaustive():
    for cls in _subclasses(E.TransvalError):
        assert cls in EXIT_CODES, cls.__name__
    assert exit_code(E.ParseError("x", 1, 1)) == 1
    assert exit_code(E.BudgetExceeded("x")) == 2


@pytest.mark.parametrize(
    "argv,code",
    [
        ((), 1),
        (("frobnicate", "x"), 1),
        (("tropical", "x^(s"), 1),
        (("tropical", "x^(p)"), 1),
        (("tropical", "--p", "4", "x"), 1),
        (("lift", "--p", "2", "x^2-x-t"), 1),
        (("tropical", "0"), 2),
        (("asroot", "t^(-1)"), 2),
        (("asroot", "--p", "2", "t"), 2),
        (("lift", "--p", "2", "x-1", "--prec", "3"), 2),
        (("solve", "--p", "2", "x^(s)-x", "t^(-1)", "--prec", "1", "--budget", "2"), 0),
    ],
)
def test_exit_codes(argv, code):
    got, _, err = tvf(*argv)
    assert got == code, err
    if code:
        assert err.startswith("tvf: ")


# -- configuration ------------------------------------------------------------------

def test_budget_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "tvf.conf"
    cfg.write_text("# defaults\np = 2\nbudget = 2\n")
    base = ("solve", "x^(s)-x", "t^(-1)", "--config", str(cfg))
    assert tvf_json(*base)["report"]["steps"] == 2
    monkeypatch.setenv("TRANSVAL_BUDGET", "3")
    assert tvf_json(*base)["report"]["steps"] == 3
    assert tvf_json(*base, "--budget", "5")["report"]["steps"] == 5
    assert tvf_json(*base, "--p", "3")["report"]["steps"] == 3


def test_bad_config(tmp_path):
    cfg = tmp_path / "bad.conf"
    cfg.write_text("p 2\n")
    assert tvf("tropical", "x", "--config", str(cfg))[0] == 1
    assert tvf("tropical", "x", "--config", str(tmp_path / "missing"))[0] == 1


# -- plots -------------------------------------------------------------------------

def _svg(tmp_path, *argv):
    path = tmp_path / "plot.svg"
    code, _, err = tvf("herbrand", *argv, "--svg", str(path))
    assert code == 0, err
    return path.read_text()


def test_plot_two_segments(tmp_path):
    svg = _svg(tmp_path, "--p", "3", "x^(p)-x-t^(-1)", "--above-root")
    assert svg.startswith("<svg") and svg.count('class="breakpoint"') == 1
    assert svg.count('class="slope"') == 2
    assert "display q = 4" in svg


def test_plot_single_segment(tmp_path):
    svg = _svg(tmp_path, "x", "--display-q", "7")
    assert svg.count('class="breakpoint"') == 0 and svg.count("<polyline") == 1
    assert "display q = 7" in svg


def test_plot_empty(tmp_path):
    from transval.cli.plot import emit_plot

    svg = emit_plot(None)
    assert svg.count('class="axis"') == 2 and "<polyline" not in svg
