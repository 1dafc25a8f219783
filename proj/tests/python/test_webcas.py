import io
import pathlib
import zipfile

import pytest

import webcas

ROOT = pathlib.Path(__file__).resolve().parents[2]

LISTING = """@base <http://example.org/Student> .
@prefix s: <http://persemid.bfh.ch/vocab/student#> .

<#> a s:Student ;
    s:webid <http://example.org/StudentWebID> ;
    s:name "Dent" ;
    s:vorname "Stu" ;
    s:email "stu.dent@example.org" ;
    s:matrikelnummer "1-234-56" ;
    s:permission <http://hmsc.example.org/webid#id> .
"""


def test_turtle_round_trip():
    g = webcas.Graph.parse(LISTING)
    assert len(g) == 7
    assert ("<http://example.org/Student#>", "<http://persemid.bfh.ch/vocab/student#name>", '"Dent"') in g.triples()
    back = webcas.Graph.parse(g.to_turtle())
    assert back.isomorphic(g)
    with pytest.raises(webcas.ParseError):
        webcas.Graph.parse("<a> <b> .")


def test_webid_verification():
    who = "https://student.example/profile/stu#id"
    ident = webcas.generate_identity("Stu", who, 30)
    doc = who.split("#")[0]
    assert webcas.verify_webid(ident.certificate_pem, {doc: ident.profile.to_turtle()})["webid"] == who
    other = webcas.generate_identity("Mallory", who, 30)
    r = webcas.verify_webid(other.certificate_pem, {doc: ident.profile.to_turtle()})
    assert (r["ok"], r["reason"]) == (False, "KeyMismatch")
    assert webcas.verify_webid(ident.certificate_pem, {})["reason"] == "ProfileUnreachable"


def test_access_and_packages(tmp_path):
    uni = webcas.Service("https://bachelor.example", tmp_path / "uni")
    stu = webcas.Service("https://student.example", tmp_path / "stu")
    uni.create_actor("bfh", {"foaf:name": "Bachelor University"}, "cas:University")
    stu.create_actor("stu", {"s:name": "Dent", "s:vorname": "Stu"})
    master = "https://master.example/profile/hmsc#id"

    doc = uni.store_document("bfh", b"%PDF diploma", "diploma.pdf", "application/pdf")
    assert uni.check_access(doc, master) == "Deny(NoPermission)"
    assert uni.check_access(doc, None) == "Deny(Unauthenticated)"
    assert uni.check_access("https://bachelor.example/documents/none", master) == "Deny(NoSuchResource)"
    uni.grant("bfh", doc, master)
    assert uni.check_access(doc, master) == "Allow(Granted)"
    uni.revoke("bfh", doc, master)
    assert uni.check_access(doc, master) == "Deny(NoPermission)"

    # A student space composes an application from one of its own documents.
    cv = stu.store_document("stu", b"curriculum", "cv.pdf", "application/pdf")
    app = stu.compose_application("stu", [cv], ["s:name"])
    stu.grant("stu", app, master)
    data = stu.export_package(app)
    assert webcas.validate_package(data) == []

    with zipfile.ZipFile(io.BytesIO(data)) as z:
        assert z.testzip() is None
        names = z.namelist()
        assert "manifest.ttl" in names
        manifest = webcas.Graph.parse(z.read("manifest.ttl").decode())
        payloads = [z.read(n) for n in names if n.startswith("documents/")]
    assert payloads == [b"curriculum"]
    assert not any("student#permission" in p for _, p, _ in manifest.triples())

    report = uni.import_package("bfh", data)
    assert report["documents_added"] == 1
    assert report["source"] == app
    assert report["local"].startswith("https://bachelor.example/dossiers/")


def test_bad_archives_rejected(tmp_path):
    svc = webcas.Service("https://cas.example", tmp_path / "cas")
    svc.create_actor("a")
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as z:
        z.writestr("manifest.ttl", "")
        z.writestr("documents/../../escape", "x")
    rules = {i["rule"] for i in webcas.validate_package(buf.getvalue())}
    assert "path-traversal" in rules
    with pytest.raises(webcas.PackageError):
        svc.import_package("a", buf.getvalue())
    assert not (tmp_path / "escape").exists()


def test_state_machine():
    states, events = webcas.states(), webcas.events()
    legal = 0
    for s in states:
        for e in events:
            try:
                webcas.advance(s, e)
                legal += 1
            except webcas.Error:
                pass
    assert legal == 8


def test_scenario():
    lines = webcas.run_scenario(ROOT / "demo.conf")
    assert len(lines) == 10
    assert lines[-1].split("\t")[3].startswith("DecisionRetrieved")
    assert sum(line.split("\t")[3].startswith("Denied") for line in lines) == 2
