"""HTTP facade tests over the in-process test client."""

import time

import pytest
from fastapi.testclient import TestClient

from brewopt.harness import analyze_campaign, default_inventory
from brewopt.service import create_app


@pytest.fixture
def client(tmp_path):
    app = create_app(out_dir=tmp_path / "jobs")
    with TestClient(app) as c:
        yield c


def easy_payload(trials=1, seed=11, target_error=30.0):
    return {
        "target": {"name": "quick", "abv": 5.0, "ibu": 40.0, "srm": 20.0,
                   "target_error": target_error},
        "algorithm": "DFO",
        "options": {"trials": trials, "population": 10, "max_fes": 200, "seed": seed},
    }


def wait_for(client, job_id, status="done", timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        snap = client.get(f"/api/jobs/{job_id}").json()
        if snap["status"] in (status, "failed"):
            return snap
        time.sleep(0.02)
    raise AssertionError(f"job {job_id} did not reach {status}")


class TestOptimizeFlow:
    def test_submit_and_complete(self, client, tmp_path):
        resp = client.post("/api/optimize", json=easy_payload(trials=3))
        assert resp.status_code == 202
        job_id = resp.json()["id"]

        first = client.get(f"/api/jobs/{job_id}").json()
        assert first["status"] in ("queued", "running", "done")

        snap = wait_for(client, job_id)
        assert snap["status"] == "done"
        results = snap["results"]
        assert len(results["solutions"]) >= 1
        sol = results["solutions"][0]
        assert set(sol["recipe"]) == set(default_inventory().names())
        assert sol["error"] <= 30.0
        assert snap["progress"]["best_error"] is not None
        # persisted in the campaign layout, consumable by the analyze pipeline
        job_dir = tmp_path / "jobs" / job_id
        assert (job_dir / "manifest.json").exists()
        analysis = analyze_campaign(job_dir)
        assert "DFO/quick" in analysis["cells"]

    def test_distance_summary_and_clusters_on_multi_trial(self, client):
        resp = client.post("/api/optimize", json=easy_payload(trials=4, seed=7))
        snap = wait_for(client, resp.json()["id"])
        results = snap["results"]
        if len(results["solutions"]) >= 2:
            assert results["distance_summary"] is not None
        if len(results["solutions"]) >= 3:
            assert results["cluster_report"] is not None
            assert sum(results["cluster_report"]["sizes"]) == len(results["solutions"])

    def test_progress_monotone(self, client):
        payload = easy_payload(trials=2, seed=3, target_error=0.5)
        payload["options"]["max_fes"] = 5000
        resp = client.post("/api/optimize", json=payload)
        job_id = resp.json()["id"]
        seen = []
        deadline = time.time() + 60
        while time.time() < deadline:
            snap = client.get(f"/api/jobs/{job_id}").json()
            if snap["progress"]["best_error"] is not None:
                seen.append(snap["progress"]["best_error"])
            if snap["status"] in ("done", "failed"):
                break
            time.sleep(0.01)
        assert snap["status"] == "done"
        assert all(b <= a + 1e-12 for a, b in zip(seen, seen[1:]))

    def test_seed_reproducibility(self, client):
        a = client.post("/api/optimize", json=easy_payload(seed=21))
        b = client.post("/api/optimize", json=easy_payload(seed=21))
        snap_a = wait_for(client, a.json()["id"])
        snap_b = wait_for(client, b.json()["id"])
        assert snap_a["results"]["solutions"] == snap_b["results"]["solutions"]


class TestValidation:
    def test_negative_target_rejected(self, client):
        payload = easy_payload()
        payload["target"]["ibu"] = -5.0
        resp = client.post("/api/optimize", json=payload)
        assert resp.status_code == 400
        assert any("target" in e["field"] for e in resp.json()["detail"])

    def test_unknown_algorithm_rejected(self, client):
        payload = easy_payload()
        payload["algorithm"] = "SGD"
        resp = client.post("/api/optimize", json=payload)
        assert resp.status_code == 400

    def test_missing_field_gets_400_with_field_name(self, client):
        resp = client.post("/api/optimize", json={"target": {"abv": 5.0}})
        assert resp.status_code == 400
        fields = {e["field"] for e in resp.json()["detail"]}
        assert any("ibu" in f for f in fields)

    def test_empty_inventory_rejected(self, client):
        assert client.put("/api/inventory", json={"ingredients": []}).status_code == 200
        resp = client.post("/api/optimize", json=easy_payload())
        assert resp.status_code == 400


class TestJobTable:
    def test_unknown_job(self, client):
        assert client.get("/api/jobs/nope").status_code == 404

    def test_delete_then_404(self, client):
        resp = client.post("/api/optimize", json=easy_payload())
        job_id = resp.json()["id"]
        assert client.delete(f"/api/jobs/{job_id}").status_code == 204
        assert client.get(f"/api/jobs/{job_id}").status_code == 404
        assert client.delete(f"/api/jobs/{job_id}").status_code == 404


class TestInventoryEndpoints:
    def test_default_is_stock_list(self, client):
        records = client.get("/api/inventory").json()["ingredients"]
        assert len(records) == 16
        names = [r["name"] for r in records]
        assert "Cascade" in names and "Safale S-04" in names

    def test_put_get_round_trip(self, client):
        records = client.get("/api/inventory").json()["ingredients"]
        smaller = records[:3]
        put = client.put("/api/inventory", json={"ingredients": smaller})
        assert put.status_code == 200
        assert client.get("/api/inventory").json()["ingredients"] == put.json()["ingredients"]

    def test_duplicate_name_rejected(self, client):
        records = client.get("/api/inventory").json()["ingredients"]
        resp = client.put("/api/inventory", json={"ingredients": [records[0], records[0]]})
        assert resp.status_code == 400

    def test_malformed_payload_rejected(self, client):
        assert client.put("/api/inventory", json={"ingredients": "nope"}).status_code == 400


class TestPresets:
    def test_table_presets(self, client):
        presets = client.get("/api/targets/presets").json()["presets"]
        assert [(p["name"], p["abv"], p["ibu"], p["srm"], p["target_error"]) for p in presets] == [
            ("Guinness Extra Stout", 5.00, 40.0, 40.0, 0.05899),
            ("Kozel Black", 3.80, 15.0, 24.0, 0.070560),
            ("Imperial Black IPA", 11.20, 150.0, 35.0, 0.00498),
        ]
