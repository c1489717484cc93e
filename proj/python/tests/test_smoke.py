from pathlib import Path

import pytest

import voxcalc

IDENTITIES = Path(__file__).resolve().parents[2] / "identities"


def test_parse_round_trip():
    text = (IDENTITIES / "eq2_4.vid").read_text()
    rendered = voxcalc.parse(text)
    assert voxcalc.parse(rendered) == rendered


def test_parse_error_is_value_error():
    with pytest.raises(ValueError, match="unclosed"):
        voxcalc.parse("Res[x2 x2^q")


def test_check_passes_on_fock():
    r = voxcalc.check(str(IDENTITIES / "eq2_1.vid"), lam="-1/2", weight=2, degree=1)
    assert r["passed"] and r["complete"]
    assert r["samples"] > 0
    assert r["witness"] is None


def test_mutation_has_a_deterministic_witness():
    path = str(IDENTITIES / "eq2_5.vid")
    a = voxcalc.check(path, mutate=1, threads=1)
    b = voxcalc.check(path, mutate=1, threads=2)
    assert not a["passed"]
    assert a["witness"] and a["witness"].startswith("u=")
    assert a["report"] == b["report"]


def test_zhu_basis_sizes():
    assert [len(voxcalc.zhu_basis(n)) for n in (2, 3, 4)] == [3, 4, 5]


def test_scalar_module_matches_fock():
    r = voxcalc.build_module("scalar:λ=1", degree=3)
    assert r["dims"] == [1, 1, 2, 3]
    assert r["J_cap_M_trivial"] and r["T_after_S"]
