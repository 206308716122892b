"""Service endpoints: request/response wiring over the core package."""

import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from starlette.testclient import TestClient

from mucalc.service.app import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


CHAIN = {"worlds": ["w0", "w1", "w2"],
         "edges": [["w0", "w1"], ["w1", "w2"]],
         "valuation": {"p": ["w2"]}}


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_normalize(client):
    data = client.post("/normalize", json={"formula": "mu x. (x \\/ p)"}).json()
    assert data["well_named"] == "p"
    assert data["alternation_depth"] == 0


def test_normalize_parse_error(client):
    resp = client.post("/normalize", json={"formula": "mu x."})
    assert resp.status_code == 422
    assert "ParseError" in resp.json()["detail"]


def test_modelcheck(client):
    data = client.post("/modelcheck", json={
        "formula": "mu x. (<>x \\/ p)", "model": CHAIN, "world": "w0"}).json()
    assert data["holds"] and data["denotation"] == ["w0", "w1", "w2"]
    resp = client.post("/modelcheck", json={
        "formula": "p", "model": CHAIN, "world": "nowhere"})
    assert resp.status_code == 422


def test_sat_both_verdicts(client):
    sat = client.post("/sat", json={"formula": "nu x. <>x"}).json()
    assert sat["verdict"] == "SAT" and sat["model"]["worlds"]
    unsat = client.post("/sat", json={"formula": "mu x. <>x"}).json()
    assert unsat["verdict"] == "UNSAT"
    assert unsat["refutation"]["nodes"]
    assert "digraph" in unsat["refutation_dot"]


def test_valid(client):
    assert client.post("/valid", json={"formula": "T"}).json()["valid"]
    data = client.post("/valid", json={"formula": "p"}).json()
    assert not data["valid"] and data["countermodel"]


def test_anf(client):
    data = client.post("/anf", json={"formula": "mu x. (p \\/ <>x)"}).json()
    assert data["is_anf"] and data["bisimulation_valid"]
    assert data["relation"]


def test_tableau(client):
    data = client.post("/tableau", json={"formula": "p /\\ q",
                                         "policy": "narrow"}).json()
    assert data["nodes"] >= 2
    resp = client.post("/tableau", json={"formula": "p", "policy": "bogus"})
    assert resp.status_code == 422


def test_bisim_and_consequence(client):
    same = "(p /\\ (q \\/ r)) /\\ (q \\/ r)"
    data = client.post("/bisim", json={"left": same, "right": same}).json()
    assert data["holds"]
    data = client.post("/consequence", json={"left": same, "right": same}).json()
    assert data["holds"]


def test_claim_g(client):
    data = client.post("/claim-g", json={"formula": "nabla{x, T} /\\ p",
                                         "variable": "x"}).json()
    assert data["valid"] and len(data["links"]) == 5
    resp = client.post("/claim-g", json={"formula": "nabla{x} /\\ nabla{q}",
                                         "variable": "x"})
    assert resp.status_code == 422


def test_refute_and_thin_check(client):
    data = client.post("/refute", json={"formula": "mu x. <>x"}).json()
    assert data["verdict"] == "UNSAT" and data["valid"] and data["thin"]
    check = client.post("/thin-check",
                        json={"refutation": data["refutation"]}).json()
    assert check["valid"] and check["thin"]


def test_proofcheck(client):
    ok = client.post("/proofcheck", json={"text": '(tau "p")'}).json()
    assert ok["ok"]
    bad = client.post("/proofcheck", json={
        "proof": {"rule": "bot", "params": [],
                  "conclusion": [{"kind": "top"}], "children": []}}).json()
    assert not bad["ok"] and bad["reason"]
    resp = client.post("/proofcheck", json={})
    assert resp.status_code == 422
