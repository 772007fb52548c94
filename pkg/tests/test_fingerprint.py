import pytest
from hypothesis import given
from hypothesis import strategies as st

from joomaudit.fingerprint import (
    BadBasePath,
    ExtensionCatalogEntry,
    ProbeResult,
    UnknownProbeId,
    core_probe_set,
    default_catalog,
    discover_base_path,
    evaluate,
    extension_probe_set,
    load_catalog,
)

TOP10 = {
    "com_akeeba": "Akeeba Backup",
    "com_acymailing": "AcyMailing",
    "com_advancedmodules": "Advanced Module Manager",
    "com_jevents": "JEvents",
    "com_extplorer": "eXtplorer",
    "com_phocagallery": "Phoca Gallery",
    "com_comprofiler": "Community Builder",
    "com_arkeditor": "Ark Editor",
    "com_oziogallery3": "Ozio Gallery",
    "/media/sigplus": "Sigplus",
}


def test_core_probes_root():
    probes = core_probe_set("/")
    assert len(probes) == 4
    assert all(p.path.startswith("/") and not p.path.startswith("//") for p in probes)
    by_path = {p.path: p.expect_markers for p in probes}
    assert by_path["/robots.txt"] == ("Joomla!",)
    assert by_path["/web.config.txt"] == ("joomla",)
    assert by_path["/administrator/manifests/files/joomla.xml"] == ("<name>files_joomla</name>",)
    assert by_path["/language/en-GB/en-GB.xml"] == ("Joomla",)


def test_core_probes_prefixed():
    assert all(p.path.startswith("/site/") for p in core_probe_set("/site/"))


@pytest.mark.parametrize("base", ["nope", "/site", "site/", ""])
def test_bad_base(base):
    with pytest.raises(BadBasePath):
        core_probe_set(base)
    with pytest.raises(BadBasePath):
        extension_probe_set(default_catalog(), base)


def test_catalog_is_top10():
    assert {e.identifier_path: e.name for e in default_catalog()} == TOP10


def test_extension_probes():
    probes = extension_probe_set(default_catalog(), "/")
    by_path = {p.path: p for p in probes}
    akeeba = by_path["/administrator/components/com_akeeba/akeeba.xml"]
    assert akeeba.expect_markers == ("Akeeba",) and akeeba.extension == "Akeeba Backup"
    assert "/administrator/components/com_akeeba/manifest.xml" in by_path
    assert by_path["/media/sigplus/js/initialization.js"].expect_markers == ("sigplus",)
    assert "/administrator/components/com_oziogallery3/oziogallery3.xml" in by_path
    assert extension_probe_set([], "/") == []
    assert len({p.probe_id for p in probes}) == len(probes)


def test_load_catalog_override():
    entries = load_catalog('{"name": "X", "identifier": "com_x", "marker": "XX", "files": ["x.xml"]}\n')
    assert entries == [ExtensionCatalogEntry("X", "com_x", "XX", ("x.xml",))]
    assert [p.path for p in extension_probe_set(entries, "/j/")] == ["/j/administrator/components/com_x/x.xml"]


@pytest.mark.parametrize(
    "chain, base",
    [
        (["http://h/"], "/"),
        (["http://h/", "https://h/site/"], "/site/"),
        (["http://h/", "https://h/site/index.php"], "/site/"),
        (["http://h/", "https://h/index.php"], "/"),
        (["http://h"], "/"),
        (["http://h/", "http://h/a/b"], "/a/b/"),
        (["http://h/", "http://h/a/b/?x=1"], "/a/b/"),
    ],
)
def test_discover_base_path(chain, base):
    assert discover_base_path(chain) == base


def _probes():
    return core_probe_set("/") + extension_probe_set(default_catalog(), "/")


def _result_for(path, status, body):
    (spec,) = [p for p in _probes() if p.path == path]
    return ProbeResult(spec.probe_id, status, body, "http://h" + path)


def test_akeeba_hit_implies_core():
    res = _result_for("/administrator/components/com_akeeba/akeeba.xml", 200, b"<name>Akeeba Backup</name>")
    det = evaluate("h", "/", [res], _probes())
    assert "Akeeba Backup" in det.extensions
    assert det.core_detected
    assert det.evidence and det.evidence[0][0] == res.probe_id
    assert "Akeeba" in det.evidence[0][1]


def test_all_404():
    results = [ProbeResult(p.probe_id, 404, b"", "") for p in _probes()]
    det = evaluate("h", "/", results, _probes())
    assert (det.core_detected, det.extensions, det.evidence) == (False, frozenset(), ())


def test_parked_page_is_not_a_hit():
    body = b"<html><body>This domain is parked. Buy it now!</body></html>"
    results = [ProbeResult(p.probe_id, 200, body, "") for p in _probes()]
    assert not evaluate("h", "/", results, _probes()).core_detected


def test_marker_case_sensitive():
    res = _result_for("/robots.txt", 200, b"joomla! lower case")
    assert not evaluate("h", "/", [res], _probes()).core_detected


def test_non_200_with_marker_misses():
    res = _result_for("/robots.txt", 403, b"Joomla!")
    assert not evaluate("h", "/", [res], _probes()).core_detected


def test_unknown_probe_id():
    with pytest.raises(UnknownProbeId):
        evaluate("h", "/", [ProbeResult("nope", 200, b"", "")], _probes())


marker_free = st.binary(max_size=300).filter(
    lambda b: not any(m.encode() in b for p in _probes() for m in p.expect_markers)
)
outcomes = st.tuples(st.sampled_from([200, 301, 403, 404, 500, None]), st.binary(max_size=200))


@given(marker_free)
def test_marker_necessity(body):
    results = [ProbeResult(p.probe_id, 200, body, "") for p in _probes()]
    det = evaluate("h", "/", results, _probes())
    assert not det.core_detected and not det.extensions


@given(st.lists(st.tuples(st.sampled_from(_probes()), outcomes, st.booleans()), max_size=30), st.data())
def test_monotonic_and_evidence_complete(items, data):
    results = []
    for spec, (status, body), plant in items:
        if plant:
            body = body + spec.expect_markers[0].encode()
        results.append(ProbeResult(spec.probe_id, status, body if status == 200 else b"", ""))
    cut = data.draw(st.integers(0, len(results)))
    small = evaluate("h", "/", results[:cut], _probes())
    big = evaluate("h", "/", results, _probes())
    assert small.extensions <= big.extensions
    assert big.core_detected or not small.core_detected
    fired = {pid for pid, _ in big.evidence}
    by_id = {p.probe_id: p for p in _probes()}
    for name in big.extensions:
        assert any(by_id[pid].extension == name for pid in fired)
    if big.extensions:
        assert big.core_detected
