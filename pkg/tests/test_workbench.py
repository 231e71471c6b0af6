"""Catalog loading, entry runs, cross-checks, reports, and the CLI."""
import os
from pathlib import Path

import pytest

from qlwb import cli
from qlwb.groups import GradedAb
from qlwb.variety import ComponentRef, VarietyData
from qlwb.workbench import (CatalogEntry, CatalogError, check_all, k_rows,
                            load_catalog, make_resolver, report,
                            report_section, run_entry)

GOLDENS = Path(__file__).parent / "goldens"


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


@pytest.fixture(scope="module")
def full_run(catalog):
    return check_all(catalog)


# ---------------------------------------------------------------------------
# loading


def test_catalog_loads_every_file(catalog):
    from qlwb.workbench import CATALOG_DIR
    stems = {p.stem for p in CATALOG_DIR.glob("*.toml")}
    assert set(catalog) == stems
    assert len(catalog) >= 30


def test_entry_fields(catalog):
    e = catalog["enriques"]
    assert e.variety.dim == 2
    assert e.title == "Enriques surface"
    assert e.expected["qldim"] == (2, 2)
    assert e.citations["data"]
    assert catalog["k3"].k_rational_symbol == "K_n(S,Q)"
    assert catalog["gr27-section-6"].gr_section == (2, 7, 6)


def test_every_entry_has_cited_expectations(catalog):
    for entry in catalog.values():
        assert "qldim" in entry.expected
        for key in entry.expected:
            assert entry.citations.get(key), (entry.name, key)


def _write(tmp_path, name, text):
    (tmp_path / f"{name}.toml").write_text(text)
    return tmp_path


BASE = '''
name = "{name}"
title = "test"
dim = 2
h_int = ["Z", "0", "Z^2", "0", "Z"]
{extra}
[expected]
qldim = [0, 2]

[citations]
data = ["somewhere"]
qldim = ["somewhere"]
'''


def test_loader_rejects_name_mismatch(tmp_path):
    _write(tmp_path, "alpha", BASE.format(name="beta", extra=""))
    with pytest.raises(CatalogError, match="beta.*does not match"):
        load_catalog(tmp_path)


def test_loader_rejects_wrong_h_length(tmp_path):
    bad = BASE.format(name="alpha", extra="").replace(
        '["Z", "0", "Z^2", "0", "Z"]', '["Z", "0", "Z"]')
    _write(tmp_path, "alpha", bad)
    with pytest.raises(CatalogError, match=r"alpha: \[h_int\] need 5"):
        load_catalog(tmp_path)


def test_loader_rejects_unknown_flag(tmp_path):
    _write(tmp_path, "alpha", BASE.format(
        name="alpha", extra="[flags]\nshiny = true\n"))
    with pytest.raises(CatalogError, match=r"alpha: \[flags\].*shiny"):
        load_catalog(tmp_path)


def test_loader_rejects_hodge_conflict(tmp_path):
    _write(tmp_path, "alpha", BASE.format(
        name="alpha", extra='[hodge]\n"1,0" = 1\n"0,1" = 2\n'))
    with pytest.raises(CatalogError, match=r"alpha: \[hodge\]"):
        load_catalog(tmp_path)


def test_loader_rejects_uncited_expectation(tmp_path):
    text = BASE.format(name="alpha", extra="") + '\nktau = [0, 2]\n'
    # appending after [citations] puts ktau in the wrong table; build a
    # correct file with an extra expected key instead
    text = BASE.format(name="alpha", extra="").replace(
        "qldim = [0, 2]", "qldim = [0, 2]\nktau = [0, 2]")
    _write(tmp_path, "alpha", text)
    with pytest.raises(CatalogError, match="'ktau' has no citation"):
        load_catalog(tmp_path)


def test_loader_rejects_interval_outside_dimension(tmp_path):
    bad = BASE.format(name="alpha", extra="").replace(
        "qldim = [0, 2]", "qldim = [0, 3]")
    _write(tmp_path, "alpha", bad)
    with pytest.raises(CatalogError, match=r"expected.qldim"):
        load_catalog(tmp_path)


def test_loader_rejects_bad_sod_string(tmp_path):
    _write(tmp_path, "alpha", BASE.format(
        name="alpha", extra='sod = ["mystery:3"]\n'))
    with pytest.raises(CatalogError, match=r"alpha: \[sod\]"):
        load_catalog(tmp_path)


def test_loader_rejects_dangling_component(tmp_path):
    _write(tmp_path, "alpha", BASE.format(
        name="alpha", extra='sod = ["variety:ghost"]\n'))
    with pytest.raises(CatalogError, match="'ghost' is not in the catalog"):
        load_catalog(tmp_path)


def test_loader_rejects_poincare_violation(tmp_path):
    bad = BASE.format(name="alpha", extra="").replace(
        '["Z", "0", "Z^2", "0", "Z"]', '["Z", "0", "Z^2", "Z^5", "Z"]')
    _write(tmp_path, "alpha", bad)
    with pytest.raises(CatalogError, match=r"alpha: \[data\]"):
        load_catalog(tmp_path)


# ---------------------------------------------------------------------------
# running entries


def test_run_entry_enriques(catalog):
    run = run_entry(catalog["enriques"])
    assert run.ok, [c for c in run.checks if not c.passed]
    names = {c.name for c in run.checks}
    assert {"qldim", "ktau", "ku", "ku_mod", "gysin[alpha]",
            "twisted-qldim[alpha]", "twisted-ku[alpha]"} <= names
    assert str(run.ku[0]) == "Z^12 + Z/2"
    assert str(run.twisted_ku["alpha"][0]) == "Z^12"


def test_run_entry_flags_wrong_expectation(catalog):
    import dataclasses
    entry = catalog["k3"]
    wrong = dict(entry.expected)
    wrong["qldim"] = (0, 0)
    bad = CatalogEntry(
        name=entry.name, title=entry.title, variety=entry.variety,
        expected=wrong, citations=entry.citations, notes=entry.notes,
        k_rational_symbol=entry.k_rational_symbol,
        gr_section=entry.gr_section, path=entry.path)
    run = run_entry(bad)
    bad_checks = [c for c in run.checks if c.status == "fail"]
    assert any(c.name == "qldim" for c in bad_checks)
    assert "expected [0, 0]" in bad_checks[0].detail


def test_check_all_green(full_run):
    assert full_run.ok, full_run.failures()
    assert len(full_run.runs) >= 30
    assert full_run.cross


def test_check_all_parallel_identical(catalog, full_run):
    par = check_all(catalog, parallel=True)
    assert par.render() == full_run.render()


def test_cross_checks_cover_decompositions(full_run):
    names = {c.name for c in full_run.cross}
    assert "derived-weight artin-mumford ~ enriques" in names
    assert "ku-additivity hpt-22" in names
    assert any(n.startswith("derived-weight hpt-22") for n in names)


# ---------------------------------------------------------------------------
# K-group rows in each mode


def test_k_rows_phantom_collapse(catalog):
    rows = k_rows(catalog["barlow"], 0, range(0, 5))
    assert rows == {n: "0" for n in range(0, 5)}


def test_k_rows_variety_mode(catalog):
    rows = k_rows(catalog["k3"], 2, [0, 1, 2])
    assert rows[0] == "Z^3 + CH_0(S)_hom"
    assert rows[1] == "(Q/Z)^24 + K_n(S,Q)"
    assert rows[2] == "K_n(S,Q)"


def test_k_rows_curve_decomposition(catalog):
    # no distinguished component: degree 0 needs Chow data the entry
    # does not record, but the high range assembles from the entry's KU
    with pytest.raises(ValueError, match="K_0 needs Chow data"):
        k_rows(catalog["two-quadrics-g2"], 1, [0, 1])
    rows = k_rows(catalog["two-quadrics-g2"], 1, [1, 2])
    assert rows[1] == "(Q/Z)^4 + K_n(X,Q)"


def test_k_rows_component_mode(catalog):
    rows = k_rows(catalog["fano3-cubic"], 1, [0, 1, 2])
    assert rows[0] == "Z^2 + IJ(X)"
    assert rows[1] == "(Q/Z)^2 + K_n(X,Q)"
    assert rows[2] == "(Q/Z)^10 + K_n(X,Q)"


# ---------------------------------------------------------------------------
# the component resolver


def _tiny_entry(name, sod):
    v = VarietyData(name=name, dim=2,
                    h_int=GradedAb.from_strings(["Z", "0", "Z^2", "0", "Z"]),
                    sod=sod)
    return CatalogEntry(name=name, title=name, variety=v,
                        expected={"qldim": (0, 2)},
                        citations={"data": ("x",), "qldim": ("x",)},
                        notes=(), k_rational_symbol="K_n(X,Q)",
                        gr_section=None, path="<memory>")


def test_resolver_detects_cycles():
    cat = {
        "a": _tiny_entry("a", (ComponentRef.variety("b"),)),
        "b": _tiny_entry("b", (ComponentRef.variety("a"),)),
    }
    resolve = make_resolver(cat)
    with pytest.raises(CatalogError, match="cyclic.*a -> b -> a"):
        resolve(ComponentRef.variety("a"))


def test_resolver_memoizes(catalog):
    resolve = make_resolver(catalog)
    first = resolve(ComponentRef.variety("enriques"))
    assert resolve(ComponentRef.variety("enriques")) is first
    assert first.interval == (2, 2)


def test_resolver_rejects_leaf_kinds(catalog):
    resolve = make_resolver(catalog)
    with pytest.raises(CatalogError, match="exceptional"):
        resolve(ComponentRef.exceptional())


# ---------------------------------------------------------------------------
# reports


def test_golden_e2_grid(catalog):
    want = (GOLDENS / "enriques-e2-grid.txt").read_text().rstrip("\n")
    got = report_section(catalog["enriques"], "e2-grid")
    assert got == want


def test_golden_hodge_diamond(catalog):
    want = (GOLDENS / "gr27-section-6-hodge.txt").read_text().rstrip("\n")
    got = report_section(catalog["gr27-section-6"], "hodge")
    assert got == want


def test_report_markdown_structure(catalog):
    text = report(catalog["enriques"], fmt="markdown")
    assert text.startswith("# enriques")
    for section in ("## cohomology", "## e2-grid", "## qldim", "## ku"):
        assert section in text


def test_report_rejects_unknown_format(catalog):
    with pytest.raises(ValueError, match="unknown format"):
        report(catalog["enriques"], fmt="html")


def test_report_section_lists_alternatives(catalog):
    with pytest.raises(ValueError, match="available:.*e2-grid"):
        report_section(catalog["enriques"], "nope")


def test_serre_fills_lower_half_of_diamond(catalog):
    # or-section-surface records only the top half of its diamond
    text = report_section(catalog["or-section-surface"], "hodge")
    rows = [r.split() for r in text.splitlines()]
    assert rows[2] == ["9", "65", "9"]
    assert rows[0] == ["1"] and rows[-1] == ["1"]


# ---------------------------------------------------------------------------
# CLI


def test_cli_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert "enriques" in out and "cubic-5fold" in out


def test_cli_qldim(capsys):
    assert cli.main(["qldim", "enriques"]) == 0
    assert "[2,2]" in capsys.readouterr().out


def test_cli_e2_coefficients(capsys):
    assert cli.main(["e2", "enriques"]) == 0
    assert cli.main(["e2", "enriques", "--coeff", "z/2"]) == 0
    out = capsys.readouterr().out
    assert "(Z/2)^11" in out
    with pytest.raises(SystemExit):
        cli.main(["e2", "enriques", "--coeff", "q"])


def test_cli_ku_mod(capsys):
    assert cli.main(["ku", "enriques", "--mod", "2"]) == 0
    assert "(Z/2)^14" in capsys.readouterr().out


def test_cli_gysin_and_ktheory(capsys):
    assert cli.main(["gysin", "enriques"]) == 0
    assert "H^2(P) = Z^11 + Z/2" in capsys.readouterr().out
    assert cli.main(["ktheory", "k3", "--n", "0..1"]) == 0
    assert "CH_0(S)_hom" in capsys.readouterr().out


def test_cli_hodge(capsys):
    assert cli.main(["hodge", "--gr", "2,7", "--codim", "6"]) == 0
    assert "h^{2,2} = 57" in capsys.readouterr().out


def test_cli_unknown_entry():
    with pytest.raises(SystemExit, match="no entry"):
        cli.main(["qldim", "atlantis"])


def test_cli_check_exit_code(capsys):
    assert cli.main(["check"]) == 0
    assert "0 failure(s)" in capsys.readouterr().out


def test_cli_check_fails_on_bad_catalog(tmp_path, capsys):
    bad = BASE.format(name="alpha", extra="").replace(
        "qldim = [0, 2]", "qldim = [1, 1]")
    _write(tmp_path, "alpha", bad)
    assert cli.main(["--catalog", str(tmp_path), "check"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_cli_report_runs(capsys):
    assert cli.main(["report", "cubic-5fold"]) == 0
    out = capsys.readouterr().out
    assert "Z^42" in out and "-- checks --" in out
