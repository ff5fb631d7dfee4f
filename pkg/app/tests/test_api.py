from fractions import Fraction

import pytest
from fastapi.testclient import TestClient

from app.core.config import settings
from app.main import app
from app.models.instance import Instance
from app.models.report import ReproductionCheck, ReproductionReport
from app.models.utility import AdditiveUtility
from app.services.instance_lab import appendix_c_instance
from app.utils.serialization import instance_hash

client = TestClient(app)
API = settings.API_PREFIX


def test_read_main():
    """Test that the root endpoint returns 200 OK"""
    response = client.get("/")
    assert response.status_code == 200
    assert response.json() == {
        "message": f"Welcome to {settings.APP_NAME}",
        "status": "online",
        "version": settings.TOOL_VERSION,
    }


def test_health_check():
    """Test that the health endpoint returns healthy status"""
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy"}


# === Instances ===

def test_generate_instance():
    response = client.post(f"{API}/instances/generate", json={"family": "appendix-c"})
    assert response.status_code == 200
    body = response.json()
    assert body["instance"]["theta"] == ["3/4", "1/2", "1/4"]
    assert body["instance"]["lambda"] == "1/2"
    assert body["instance_hash"] == instance_hash(appendix_c_instance())


def test_generate_unknown_family():
    response = client.post(f"{API}/instances/generate", json={"family": "nope", "n": 3})
    assert response.status_code == 422
    assert response.json()["error"] == "InputError"


def test_invalid_instance_is_rejected(instance_json):
    """theta must be sorted descending"""
    instance_json["theta"] = ["1/4", "1/2", "3/4"]
    response = client.post(f"{API}/lp/solve", json={"instance": instance_json, "k": 0})
    assert response.status_code == 422


# === Linear programs ===

def test_solve_private_lp(instance_json):
    response = client.post(f"{API}/lp/solve", json={"instance": instance_json, "k": 0, "emit_scheme": True})
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "optimal"
    assert body["value"] == "9/4"
    assert body["scheme"]["mu1"] == {"111": "1"}
    assert body["lp"] is None


def test_solve_with_export(instance_json):
    response = client.post(f"{API}/lp/solve", json={"instance": instance_json, "k": 1, "export": True})
    assert response.status_code == 200
    assert response.json()["lp"].startswith("maximize: ")


def test_solve_rejects_large_k(instance_json):
    response = client.post(f"{API}/lp/solve", json={"instance": instance_json, "k": 3})
    assert response.status_code == 422


def test_solve_refuses_oversized_instances():
    n = 13
    instance = Instance(n=n, lam=Fraction(1, 2), theta=(Fraction(0),) * n, utility=AdditiveUtility(n=n, weights=(1,) * n))
    payload = {"instance": instance.model_dump(mode="json", by_alias=True), "k": 0}
    response = client.post(f"{API}/lp/solve", json=payload)
    assert response.status_code == 413
    body = response.json()
    assert body["error"] == "SizeLimitError"
    assert body["estimate"] == str(2 ** 14)


# === Schemes ===

def test_construct_scheme(instance_json):
    response = client.post(f"{API}/schemes/construct", json={"instance": instance_json, "scheme": "public-prefix", "i": 3})
    assert response.status_code == 200
    assert response.json()["mu0"] == {"000": "3/4", "111": "1/4"}


def test_construct_missing_parameter(instance_json):
    response = client.post(f"{API}/schemes/construct", json={"instance": instance_json, "scheme": "public-prefix"})
    assert response.status_code == 422


def test_check_reports_first_violation(instance_json, private_c, caplog):
    payload = {
        "instance": instance_json,
        "scheme": private_c.model_dump(mode="json"),
        "check": "kworst",
        "k": 1,
    }
    response = client.post(f"{API}/schemes/check", json=payload)
    assert response.status_code == 200
    body = response.json()
    assert body["ok"] is False
    assert body["violation"]["receiver"] == 1
    assert body["violation"]["leaked"] == [[2, 0]]
    assert (body["violation"]["m0"], body["violation"]["m1"]) == ("1/4", "0")
    assert "Check kworst failed: receiver 1, signal 1, leaked [(2, 0)]" in caplog.text


# === Evaluation and brute force ===

def test_evaluate_on_cycle(instance_json, private_c, cycle_c):
    payload = {
        "instance": instance_json,
        "scheme": private_c.model_dump(mode="json"),
        "model": {"kind": "fixed", "pattern": cycle_c.model_dump(mode="json")},
    }
    response = client.post(f"{API}/evaluations", json=payload)
    assert response.status_code == 200
    assert response.json() == {"value": "2"}


def test_evaluate_by_monte_carlo(instance_json, private_c):
    payload = {
        "instance": instance_json,
        "scheme": private_c.model_dump(mode="json"),
        "model": {"kind": "kstar", "n": 3, "k": 1},
        "method": "monte_carlo",
        "samples": 100,
        "seed": 4,
    }
    response = client.post(f"{API}/evaluations", json=payload)
    assert response.status_code == 200
    body = response.json()
    assert body["samples"] == 100
    assert body["seed"] == 4
    assert "mean" in body and "stderr" in body


def test_bruteforce(two_receivers):
    payload = {
        "instance": two_receivers.model_dump(mode="json", by_alias=True),
        "alphabets": [2, 2],
        "pattern": {"n": 2, "edges": [[2, 1]]},
    }
    response = client.post(f"{API}/bruteforce", json=payload)
    assert response.status_code == 200
    body = response.json()
    assert body["lp_count"] == 64
    assert body["mode"] == "per_information_set"
    assert len(body["responses"]) == 6


def test_bruteforce_size_refusal(two_receivers, monkeypatch):
    monkeypatch.setattr(settings, "BRUTEFORCE_INFOSET_CAP", 10)
    payload = {
        "instance": two_receivers.model_dump(mode="json", by_alias=True),
        "alphabets": [2, 2],
        "pattern": {"n": 2, "edges": [[2, 1]]},
    }
    response = client.post(f"{API}/bruteforce", json=payload)
    assert response.status_code == 413


# === Reproduction ===

def test_reproduce(monkeypatch):
    def fake(mode):
        check = ReproductionCheck(name="opt_private", value=Fraction(9, 4), expected=Fraction(9, 4), passed=True)
        return ReproductionReport(tool_version=settings.TOOL_VERSION, checks=[check])

    monkeypatch.setattr("app.api.reproduce.reproduce_appendix_c", fake)
    response = client.get(f"{API}/reproduce/appendix-c")
    assert response.status_code == 200
    body = response.json()
    assert body["ok"] is True
    assert body["checks"][0]["value"] == "9/4"


@pytest.mark.parametrize("mode", ["per_information_set", "per_profile"])
def test_reproduce_accepts_search_modes(monkeypatch, mode):
    seen = []
    monkeypatch.setattr(
        "app.api.reproduce.reproduce_appendix_c",
        lambda chosen: seen.append(chosen) or ReproductionReport(tool_version=settings.TOOL_VERSION),
    )
    assert client.get(f"{API}/reproduce/appendix-c", params={"mode": mode}).status_code == 200
    assert seen[0].value == mode
