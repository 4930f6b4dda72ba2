import threading

import pytest
from fastapi.testclient import TestClient

from conftest import TOY10, toy_schema
from skg import KnowledgeGraph
from skg.service import ServiceConfig, create_app

TRAVERSE = {"starting_node": ["skills:java"],
            "nodes": [{"type": "title", "limit": 1, "discover_values": True}]}


@pytest.fixture
def client(tmp_path):
    cfg = ServiceConfig(data_dir=tmp_path)
    return TestClient(create_app(cfg, KnowledgeGraph(toy_schema())))


def test_update_then_traverse(client):
    r = client.post("/update", json=TOY10)
    assert r.status_code == 200 and r.json() == {"indexed": 10}
    r = client.post("/traverse", json=TRAVERSE)
    assert r.status_code == 200
    top = r.json()["nodes"][0]["values"][0]
    assert top["name"] == "engineer"
    assert top["relatedness"] == pytest.approx(0.6135, abs=1e-3)


def test_empty_update(client):
    assert client.post("/update", json=[]).json() == {"indexed": 0}


def test_malformed_update_commits_nothing(client):
    body = [TOY10[0], {"skills": ["x"]}, {"id": "bad", "salary": "high"}]
    r = client.post("/update", json=body)
    assert r.status_code == 400
    errs = r.json()["errors"]
    assert [e["index"] for e in errs] == [1, 2]
    assert r.json()["indexed"] == 0
    assert client.get("/schema").json()["doc_count"] == 0


def test_duplicate_ids_rejected(client):
    client.post("/update", json=TOY10[:2])
    r = client.post("/update", json=[TOY10[2], TOY10[0]])
    assert r.status_code == 400
    assert client.get("/schema").json()["doc_count"] == 2


def test_invalid_json_body(client):
    r = client.post("/update", content=b"[{", headers={"content-type": "application/json"})
    assert r.status_code == 400


def test_traverse_errors(client):
    client.post("/update", json=TOY10)
    r = client.post("/traverse", json={"starting_node": ["skills:java"], "nodes": [{"type": "salary"}]})
    assert r.status_code == 422
    assert client.post("/traverse", json={"starting_node": [], "nodes": []}).status_code == 400
    assert client.post("/traverse", json={"starting_node": ["skills:(java"]}).status_code == 400
    assert client.post("/traverse", json={"starting_node": ["x:y"], "nodez": []}).status_code == 400


def test_schema_endpoint(client):
    body = client.get("/schema").json()
    assert body["fields"] == {"skills": "exact_string", "title": "exact_string",
                              "keywords": "analyzed_text"}
    assert body["closed"] is True


def test_save_load_byte_identical(client, tmp_path):
    client.post("/update", json=TOY10)
    deep = {"starting_node": ["skills:java"],
            "nodes": [{"type": "title", "limit": 2, "values": ["nurse"],
                       "nodes": [{"type": "skills", "limit": 3}]}]}
    before = [client.post("/traverse", json=q).content for q in (TRAVERSE, deep)]
    r = client.post("/snapshot/save", json={"path": "toy.snap"})
    assert r.status_code == 200 and (tmp_path / "toy.snap").exists()
    client.post("/update", json=[{"id": "extra", "skills": ["java"], "title": "nurse"}])
    assert client.post("/traverse", json=TRAVERSE).content != before[0]
    assert client.post("/snapshot/load", json={"path": "toy.snap"}).json()["doc_count"] == 10
    after = [client.post("/traverse", json=q).content for q in (TRAVERSE, deep)]
    assert after == before


def test_load_errors(client, tmp_path):
    assert client.post("/snapshot/load", json={"path": "missing.snap"}).status_code == 404
    (tmp_path / "junk.snap").write_bytes(b"junk" * 10)
    assert client.post("/snapshot/load", json={"path": "junk.snap"}).status_code == 400
    assert client.post("/snapshot/load", json={}).status_code == 400


def test_concurrent_traversals_see_whole_snapshots(tmp_path):
    kg = KnowledgeGraph(toy_schema())
    kg.update(TOY10)
    client = TestClient(create_app(ServiceConfig(data_dir=tmp_path), kg))
    seen = set()
    errors = []

    def reader():
        for _ in range(30):
            body = client.post("/traverse", json={
                "starting_node": ["*:*"], "nodes": [{"type": "title", "limit": 10}]}).json()
            pops = {v["name"]: v["foreground_popularity"] for v in body["nodes"][0]["values"]}
            total = sum(pops.values())
            # every doc has one title, so totals equal a committed doc count
            if total % 5:
                errors.append(total)
            seen.add(total)

    threads = [threading.Thread(target=reader) for _ in range(3)]
    for t in threads:
        t.start()
    for i in range(6):
        kg.update([{"id": f"b{i}-{j}", "skills": ["java"], "title": "engineer"} for j in range(5)])
    for t in threads:
        t.join()
    assert not errors
    assert min(seen) >= 10
