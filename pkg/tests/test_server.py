import json

import pytest
from fastapi.testclient import TestClient

from evosim.kernel import RunConfig, Simulation
from evosim.server import create_app


@pytest.fixture
def api():
    sim = Simulation(RunConfig(days=1))
    app = create_app(sim)
    with TestClient(app) as client:
        yield client, sim


class TestState:
    def test_state_shape(self, api):
        client, sim = api
        data = client.get("/state").json()
        assert data["day"] == 0 and data["tick"] == 0
        assert sorted(data["agents"]) == ["benjamin", "isabella", "sophia"]
        for agent in data["agents"].values():
            assert "position" in agent and "name" in agent
        assert {p["name"] for p in data["places"]} == {p.name for p in sim.world.places}
        assert data["grid"] == {"width": 64, "height": 64}

    def test_agent_detail(self, api):
        client, _ = api
        data = client.get("/agents/isabella").json()
        assert data["structure"]["basic_info"]["name"] == "Isabella"
        assert "dialog_memory" in data and "plan" in data

    def test_unknown_agent_404(self, api):
        client, _ = api
        assert client.get("/agents/nobody").status_code == 404


class TestRunControl:
    def test_step_advances_tick(self, api):
        client, sim = api
        out = client.post("/run/step").json()
        assert out == {"day": 1, "tick": 1}
        assert sim.tick == 1

    def test_full_day(self, api):
        client, sim = api
        out = client.post("/run/day").json()
        assert out["day"] == 1
        assert out["tick"] == sim.config.ticks_per_day

    def test_pause_blocks_stepping(self, api):
        client, _ = api
        client.post("/run/pause")
        assert client.post("/run/step").status_code == 409
        assert client.post("/run/day").status_code == 409
        client.post("/run/resume")
        assert client.post("/run/step").status_code == 200

    def test_step_rolls_over_day_boundary(self, api):
        client, sim = api
        client.post("/run/day")
        out = client.post("/run/step").json()
        assert out["day"] == 2 and out["tick"] == 1


class TestChat:
    def test_chat_round_trip(self, api):
        client, sim = api
        client.post("/run/step")
        before = len(sim.agents["sophia"].dialog_memory.records.get("user", []))
        resp = client.post("/agents/sophia/chat", json={"text": "how was your morning?"})
        assert resp.status_code == 200
        body = resp.json()
        assert body["reply"]
        assert len(sim.agents["sophia"].dialog_memory.records["user"]) == before + 1

    def test_empty_chat_422(self, api):
        client, _ = api
        assert client.post("/agents/sophia/chat", json={"text": "   "}).status_code == 422

    def test_unknown_agent_404(self, api):
        client, _ = api
        assert client.post("/agents/nobody/chat", json={"text": "hi"}).status_code == 404

    def test_busy_agent_409(self, api):
        client, _ = api
        client.post("/run/step")
        assert client.post("/agents/sophia/chat", json={"text": "one"}).status_code == 200
        assert client.post("/agents/sophia/chat", json={"text": "two"}).status_code == 409


class TestEnvironment:
    def test_valid_csv_staged(self, api):
        client, sim = api
        csv_text = RunConfig().world_text().strip() + \
            "\nTown,arcade,30,30,4,Relaxation;Social,games,10:00,22:00\n"
        resp = client.put("/environment", content=csv_text)
        assert resp.status_code == 200
        assert resp.json()["added"] == ["arcade"]
        assert sim.staged_world_csv is not None

    def test_invalid_csv_422_with_row(self, api):
        client, _ = api
        bad = RunConfig().world_text().strip() + \
            "\nTown,arcade,30,30,0,Relaxation,games,10:00,22:00\n"
        resp = client.put("/environment", content=bad)
        assert resp.status_code == 422
        assert "row" in resp.json()["detail"]


class TestLogsAndEvents:
    def test_logs_filtered_by_day(self, api):
        client, _ = api
        client.post("/run/day")
        all_records = client.get("/logs").json()
        day1 = client.get("/logs", params={"day": 1}).json()
        assert len(day1) < len(all_records)
        assert all(r["day"] == 1 for r in day1)

    def test_event_stream_replays_log(self, api):
        client, sim = api
        client.post("/run/step")
        with client.stream("GET", "/events") as resp:
            assert resp.headers["content-type"].startswith("text/event-stream")
            buffer = ""
            for chunk in resp.iter_text():
                buffer += chunk
                if buffer.count("\n\n") >= 3:
                    break
        frames = [f for f in buffer.split("\n\n") if f.strip()]
        first = frames[0].splitlines()
        assert first[0] == "id: 0"
        record = json.loads(first[1][len("data: "):])
        assert record["type"] == "config"
