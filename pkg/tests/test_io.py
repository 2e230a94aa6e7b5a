"""Operad documents: round trips, canonical bytes, located errors."""

import copy
import json

import pytest

from operadlab.algebras import check_algebra
from operadlab.deform import is_artinian
from operadlab.ibmod import self_ib, square_zero
from operadlab.io import (DimensionMismatch, FormatError, OperadAxiomError, dumps, fixture_path,
                          load_document, load_operad, parse_algebra, parse_artinian, parse_operad,
                          serialize, serialize_operad)
from operadlab.linalg import GF
from operadlab.operads import check_operad, preset


def same_tables(P, Q, top):
    assert list(P.all_seqs(top)) == list(Q.all_seqs(top))
    for s in P.all_seqs(top):
        assert P.dim(s) == Q.dim(s)
        assert list(P.level(s).degrees) == list(Q.level(s).degrees)
        assert P.level(s).d == Q.level(s).d
        n = len(s[0])
        for t in range(n - 1):
            assert P.transposition_matrix(s, t) == Q.transposition_matrix(s, t)
    for s1 in P.all_seqs(top):
        for slot in range(len(s1[0])):
            for s2 in P.all_seqs(top - len(s1[0]) + 1):
                if s2[1] != s1[0][slot]:
                    continue
                for i in range(P.dim(s1)):
                    for j in range(P.dim(s2)):
                        assert P.compose_basis(s1, i, slot, s2, j) == Q.compose_basis(s1, i, slot, s2, j)


@pytest.mark.parametrize("make,top", [
    (lambda: preset("ass", N=3), 3),
    (lambda: preset("com", N=4), 4),
    (lambda: preset("com", N=3, field=GF(5)), 3),
    (lambda: preset("nilpotent", N=4, k=2), 4),
    (lambda: square_zero(preset("com", N=3), self_ib(preset("com", N=3))), 3),
])
def test_round_trip(make, top):
    P = make()
    text = serialize(P, top)
    Q = parse_operad(text)
    same_tables(P, Q, top)
    # canonical: a second pass is byte identical
    assert serialize(Q, top) == text
    assert check_operad(Q).ok


@pytest.mark.parametrize("fixture,name,params", [("com4.json", "com", {}),
                                                  ("nilpotent2.json", "nilpotent", {"k": 2})])
def test_fixtures_match_presets(fixture, name, params):
    P = load_operad(fixture_path(fixture))
    Q = preset(name, N=4, **params)
    same_tables(P, Q, 4)
    with open(fixture_path(fixture), encoding="utf-8") as fh:
        assert fh.read() == dumps(serialize_operad(P))


def test_field_is_kept():
    doc = serialize_operad(preset("com", N=2, field=GF(7)))
    assert doc["field"] == "7"
    assert parse_operad(doc).F.p == 7


def base():
    return load_document(fixture_path("com4.json"))


def test_dimension_mismatch_is_located():
    doc = base()
    doc["compositions"][1]["shape"][2] += 1
    with pytest.raises(DimensionMismatch) as e:
        parse_operad(doc)
    assert e.value.where == "$.compositions[1].shape"
    doc = base()
    doc["levels"][0]["differential"]["shape"] = [2, 2]
    with pytest.raises(DimensionMismatch) as e:
        parse_operad(doc)
    assert e.value.where == "$.levels[0].differential.shape"


@pytest.mark.parametrize("edit,where", [
    (lambda d: d.update(formatVersion=9), "$.formatVersion"),
    (lambda d: d.update(kind="algebra"), "$.kind"),
    (lambda d: d.update(field="6"), "$.field"),
    (lambda d: d.update(aboveMaxArity="maybe"), "$.aboveMaxArity"),
    (lambda d: d["levels"][1]["basis"][0].update(degree="x"), "$.levels[1].basis[0]"),
    (lambda d: d["levels"][2].update(output="red"), "$.levels[2]"),
    (lambda d: d.update(units={}), "$.units"),
])
def test_errors_name_their_position(edit, where):
    doc = base()
    edit(doc)
    with pytest.raises(FormatError) as e:
        parse_operad(doc)
    assert e.value.where == where
    assert where in str(e.value)


def test_invalid_json_reports_line():
    with pytest.raises(FormatError) as e:
        parse_operad('{"formatVersion": 1,\n "kind": }')
    assert "line 2" in str(e.value)


def test_axiom_failure_is_reported():
    doc = base()
    c = next(c for c in doc["compositions"] if c["seq1"]["inputs"] == ["*", "*"] and c["slot"] == 0
             and len(c["seq2"]["inputs"]) == 2)
    c["entries"][0][3] = "2"
    with pytest.raises(OperadAxiomError) as e:
        parse_operad(doc)
    assert not e.value.report.ok
    assert "sequential_associativity" in e.value.report.names()
    # the check can be skipped, e.g. to inspect a broken document
    assert not check_operad(parse_operad(copy.deepcopy(doc), check=False)).ok


def test_optional_blocks():
    P = preset("com", N=4)
    A = parse_algebra({"basis": [{"name": "1", "degree": 0}, {"name": "x", "degree": 0}],
                       "unit": "1", "products": [[0, 0, 0, "1"], [0, 1, 1, "1"], [1, 0, 1, "1"]]}, P)
    assert check_algebra(A).ok
    R = parse_artinian({"basis": [{"name": "1", "degree": 0}, {"name": "e", "degree": 0}],
                        "unit": "1", "products": [[0, 0, 0, "1"], [0, 1, 1, "1"], [1, 0, 1, "1"]],
                        "augmentation": {"1": "1"}})
    assert is_artinian(R).ok
    with pytest.raises(FormatError):
        parse_artinian({"basis": [{"name": "1", "degree": 0}], "unit": "u"})
    assert json.loads(serialize(P))["maxArity"] == 4
