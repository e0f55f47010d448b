import shutil

import pytest

from vbdss.errors import KbLoadError
from vbdss.kb import disease_classes, kb_report, load_kb
from vbdss.ontology import validate_bfo_alignment
from vbdss.vocab import VBD_NS

V = VBD_NS


def test_shipped_kb_loads_clean(kb):
    assert kb.schema.warnings == []
    assert validate_bfo_alignment(kb.schema) == []


def test_bfo_spine_present(kb):
    classes = kb.schema.classes
    for name in (
        "entity", "continuant", "occurrent",
        "independent_continuant", "generically_dependent_continuant",
        "specifically_dependent_continuant", "realizable_entity",
        "role", "disposition", "site", "immaterial_entity",
        "spatial_region", "three_dimensional_spatial_region",
    ):
        assert V + name in classes, name
    assert (V + "continuant", V + "entity") in kb.schema.subclass_edges
    assert (V + "occurrent", V + "entity") in kb.schema.subclass_edges
    assert kb.schema.is_subclass_of(V + "site", V + "immaterial_entity")
    assert kb.schema.is_subclass_of(V + "three_dimensional_spatial_region", V + "spatial_region")
    assert kb.schema.is_subclass_of(V + "role", V + "realizable_entity")
    assert kb.schema.is_subclass_of(V + "disposition", V + "realizable_entity")


def test_diseases_are_dispositions(kb):
    expected = {
        V + "Lymphatic_Filariasis", V + "Chikungunya", V + "Dengue",
        V + "Malaria", V + "Kala_azar", V + "Japanese_Encephalitis",
    }
    assert set(disease_classes(kb.schema)) == expected
    for disease in expected:
        assert kb.schema.is_subclass_of(disease, V + "disposition")


def test_programme_concepts_present(kb):
    classes = kb.schema.classes
    for role in ("SPO", "DVBD_CO", "MTS", "KTS", "ASHA", "MPHW"):
        assert V + role in classes
        assert kb.schema.is_subclass_of(V + role, V + "role")
    for agg in ("NVBDCP", "MoHFW", "NGO", "ICMR", "NIMR"):
        assert kb.schema.is_subclass_of(V + agg, V + "object_aggregate")
    for obj in ("patient", "mosquito", "sand_fly", "bed_net", "DDT", "diagnostic_kit", "blood_smear"):
        assert kb.schema.is_subclass_of(V + obj, V + "object")
    for site in ("PHC", "CHC", "malaria_clinic"):
        assert kb.schema.is_subclass_of(V + site, V + "site")
    for gdc in ("form", "register", "report", "result"):
        assert kb.schema.is_subclass_of(V + gdc, V + "generically_dependent_continuant")
    for quality in ("name", "gender", "age"):
        assert kb.schema.is_subclass_of(V + quality, V + "quality")


def test_rule_census(kb):
    counts = {src: len(rs) for src, rs in kb.rules_by_source().items()}
    assert counts["table2"] == 6
    assert counts["table3"] == 5
    assert counts["table4"] == 6
    assert counts["prose"] >= 13
    assert sum(counts.values()) >= 30
    printed = [r for r in kb.rules if r.source.startswith("table")]
    assert len(printed) == 17
    # table numbering gap is preserved: no t4r3
    assert {r.id for r in kb.rules if r.source == "table4"} == {
        "t4r1", "t4r2", "t4r4", "t4r5", "t4r6", "t4r7",
    }


def test_prose_rules_carry_citations(kb):
    for rule in kb.rules_by_source()["prose"]:
        assert rule.note, rule.id


def test_every_rule_predicate_declared(kb):
    from vbdss.rules import BUILTIN, CLASS

    for rule in kb.rules:
        for atom in rule.body + rule.head:
            if atom.kind == BUILTIN:
                continue
            if atom.kind == CLASS:
                assert atom.predicate in kb.schema.classes
            else:
                assert kb.schema.is_property(atom.predicate)


def test_fixture_roster(kb):
    assert {"patient1", "rk"} <= set(kb.fixtures)
    negatives = [n for n in kb.fixtures if n.startswith("negative_control")]
    assert len(negatives) == 2


def test_report_shape(kb):
    report = kb_report(kb)
    assert report.class_count == len(kb.schema.classes)
    assert sum(report.rule_counts.values()) == len(kb.rules)
    text = report.render()
    assert "rules: " in text and "diseases: " in text


def test_kb_with_undeclared_rule_predicate_fails(tmp_path, kb):
    broken = tmp_path / "kb"
    shutil.copytree(kb.root, broken)
    rules = broken / "rules" / "prose.rules"
    rules.write_text(
        rules.read_text() + "\n# basis: made up\nrule bad: patient(?p) -> totally_Unknown(?p, true)\n"
    )
    with pytest.raises(KbLoadError) as err:
        load_kb(broken)
    assert "totally_Unknown" in str(err.value)


def test_missing_directory_is_load_error(tmp_path):
    with pytest.raises(KbLoadError):
        load_kb(tmp_path / "nope")


def test_empty_kb_directory_is_error_not_empty_report(tmp_path):
    (tmp_path / "kb").mkdir()
    with pytest.raises(KbLoadError):
        load_kb(tmp_path / "kb")


def test_queries_and_bench_datasets_ship(kb):
    assert set(kb.queries) == {"q1", "q2", "q3", "q4", "q5", "q6"}
    datasets = kb.bench_datasets()
    assert len(datasets) == 4
    sizes = [len(g) for _, g in sorted(datasets.items())]
    assert sizes == sorted(sizes) and sizes[0] > 0


def test_emission_mapping_covers_vocabulary(kb):
    mapping = kb.emission_mapping()
    for concept in set(kb.lexicon.vocabulary.values()):
        assert concept in mapping
