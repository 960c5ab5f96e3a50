"""HTTP API surface: endpoints, error mapping, parity with the library."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from beamsel import __version__
from beamsel.selection import ReducedChannel, isvd_select, mm_select
from beamsel.channel import BeamspaceChannel
from beamsel.service import app
from beamsel.simulate import csv_text, parse_config, run_sweep

client = TestClient(app)

TINY = "M=24\nK=2\nN_RF=3\ntrials=2\nsnr_db_list=10\nalgorithms=ssvd,isvd\n"


def test_health():
    body = client.get("/health").json()
    assert body == {"status": "ok", "version": __version__}


class TestSweepEndpoint:
    def test_matches_direct_run(self):
        response = client.post("/sweep", json={"config_text": TINY})
        assert response.status_code == 200
        body = response.json()
        direct = run_sweep(parse_config(TINY))
        assert body["csv"] == csv_text(direct)
        assert len(body["rows"]) == len(direct)
        assert body["rows"][0]["algorithm"] == direct[0].algorithm
        assert body["rows"][0]["mean_sumrate"] == direct[0].mean_sumrate

    def test_config_error_is_400(self):
        response = client.post("/sweep", json={"config_text": "trials=0"})
        assert response.status_code == 400
        assert "trials" in response.json()["detail"]

    def test_unknown_key_is_400_with_line(self):
        response = client.post("/sweep", json={"config_text": "nope=1"})
        assert response.status_code == 400
        assert "line 1" in response.json()["detail"]

    def test_preset_with_overrides(self):
        response = client.post(
            "/sweep",
            json={
                "preset": "fig1",
                "trials": 1,
                "values": [0.0],
                "algorithms": ["ssvd"],
                "seed": 5,
            },
        )
        assert response.status_code == 200
        rows = response.json()["rows"]
        assert len(rows) == 1
        assert rows[0]["seed"] == 5
        assert rows[0]["trials"] == 1

    def test_preset_and_config_conflict(self):
        response = client.post(
            "/sweep", json={"preset": "fig1", "config_text": "trials=1"}
        )
        assert response.status_code == 400

    def test_validation_error_is_422(self):
        response = client.post("/sweep", json={"trials": 0})
        assert response.status_code == 422


class TestTrialEndpoint:
    def test_deterministic(self):
        request = {"config_text": TINY, "trial_index": 1, "snr_db": 10.0}
        a = client.post("/trial", json=request).json()
        b = client.post("/trial", json=request).json()
        assert a == b
        assert set(a["rates"]) == {"ssvd", "isvd"}

    def test_seed_changes_rates(self):
        base = {"config_text": TINY, "trial_index": 0, "snr_db": 10.0}
        a = client.post("/trial", json=base).json()
        b = client.post("/trial", json={**base, "seed": 99}).json()
        assert a["rates"]["ssvd"] != b["rates"]["ssvd"]


class TestSelectEndpoint:
    @pytest.fixture()
    def matrix(self):
        rng = np.random.default_rng(17)
        return rng.standard_normal((9, 3)) + 1j * rng.standard_normal((9, 3))

    def payload(self, matrix, **kw):
        body = {
            "matrix": {"re": matrix.real.tolist(), "im": matrix.imag.tolist()},
            "algorithm": "isvd",
            "n_rf": 4,
            "n0": 0.01,
        }
        body.update(kw)
        return body

    def test_matches_library(self, matrix):
        response = client.post("/select", json=self.payload(matrix))
        assert response.status_code == 200
        body = response.json()
        direct = isvd_select(
            ReducedChannel(matrix, np.arange(1, 10)), 4, 1.0, 0.01, "fast"
        )
        assert body["selected_ids"] == direct.selected_ids
        assert body["criterion_trace"] == pytest.approx(direct.criterion_trace)
        assert body["op_count"] == direct.op_count

    def test_mm_baseline(self, matrix):
        response = client.post("/select", json=self.payload(matrix, algorithm="mm"))
        direct = mm_select(BeamspaceChannel(matrix, np.arange(1, 10)), 3, 4)
        assert response.json()["selected_ids"] == direct.selected_ids

    def test_reduce_then_select(self, matrix):
        response = client.post(
            "/select", json=self.payload(matrix, reduce_to=6, algorithm="ssvd")
        )
        assert response.status_code == 200
        assert len(response.json()["selected_ids"]) == 4

    def test_budget_error_is_400(self, matrix):
        response = client.post("/select", json=self.payload(matrix, n_rf=20))
        assert response.status_code == 400

    def test_ragged_matrix_rejected(self):
        body = {
            "matrix": {"re": [[1.0, 2.0], [3.0]], "im": [[0.0, 0.0], [0.0]]},
            "algorithm": "ssvd",
            "n_rf": 1,
        }
        assert client.post("/select", json=body).status_code == 422

    def test_nonfinite_matrix_rejected(self):
        raw = (
            '{"matrix": {"re": [[NaN]], "im": [[0.0]]},'
            ' "algorithm": "ssvd", "n_rf": 1}'
        )
        response = client.post(
            "/select", content=raw, headers={"content-type": "application/json"}
        )
        assert response.status_code in (400, 422)
