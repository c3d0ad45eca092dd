"""HTTP facade over the kernel: run control, inspection, environment
editing, user chat, and a server-sent event stream of log records."""
from __future__ import annotations

import asyncio
import json

from fastapi import Body, FastAPI, HTTPException, Request, Response
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .environment import WorldParseError
from .hashing import canonical_json
from .kernel import BusyError, RunConfig, Simulation


class ChatBody(BaseModel):
    text: str


def create_app(sim: Simulation) -> FastAPI:
    app = FastAPI(title="evosim", version="0.1.0")
    app.state.sim = sim
    app.state.paused = False
    if not sim._initialized:
        sim.initialize()

    @app.get("/state")
    def get_state():
        snap = sim.snapshot()
        return {
            "day": snap["day"],
            "tick": snap["tick"],
            "clock": snap["clock"],
            "paused": app.state.paused,
            "agents": {a: {"position": v["position"],
                           "emotion": v["emotion"],
                           "name": v["structure"]["basic_info"]["name"]}
                       for a, v in snap["agents"].items()},
            "places": [{"name": p.name, "building": p.building, "x": p.x, "y": p.y,
                        "capacity": p.capacity, "affordances": sorted(p.affordances)}
                       for p in sim.world.places],
            "grid": {"width": sim.world.width, "height": sim.world.height},
        }

    @app.get("/agents/{agent_id}")
    def get_agent(agent_id: str):
        snap = sim.snapshot()
        if agent_id not in snap["agents"]:
            raise HTTPException(status_code=404, detail=f"unknown agent {agent_id!r}")
        return snap["agents"][agent_id]

    @app.get("/logs")
    def get_logs(day: int | None = None):
        records = sim.log.records
        if day is not None:
            records = [r for r in records if r["day"] == day]
        return records

    @app.post("/run/step")
    def run_step():
        if app.state.paused:
            raise HTTPException(status_code=409, detail="run is paused")
        if sim.tick >= sim.config.ticks_per_day or sim.day == 0:
            sim.start_day()
        sim.step_tick()
        if sim.tick >= sim.config.ticks_per_day:
            sim.end_day()
        return {"day": sim.day, "tick": sim.tick}

    @app.post("/run/day")
    def run_full_day():
        if app.state.paused:
            raise HTTPException(status_code=409, detail="run is paused")
        sim.run_day()
        return {"day": sim.day, "tick": sim.tick}

    @app.post("/run/pause")
    def pause():
        app.state.paused = True
        return {"paused": True}

    @app.post("/run/resume")
    def resume():
        app.state.paused = False
        return {"paused": False}

    @app.post("/agents/{agent_id}/chat")
    def chat(agent_id: str, body: ChatBody):
        if not body.text.strip():
            raise HTTPException(status_code=422, detail="empty chat text")
        try:
            return sim.submit_chat(agent_id, body.text)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown agent {agent_id!r}")
        except BusyError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.put("/environment")
    async def put_environment(request: Request):
        csv_text = (await request.body()).decode("utf-8")
        try:
            return sim.submit_env_update(csv_text)
        except WorldParseError as exc:
            raise HTTPException(status_code=422, detail={"row": exc.row, "error": str(exc)})

    @app.get("/events")
    async def events():
        async def stream():
            cursor = 0
            idle = 0
            while idle < 50:
                records = sim.log.records
                if cursor < len(records):
                    for rec in records[cursor:]:
                        yield f"id: {rec['seq']}\ndata: {canonical_json(rec)}\n\n"
                    cursor = len(records)
                    idle = 0
                else:
                    idle += 1
                    await asyncio.sleep(0.05)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app


def serve(config: RunConfig, host: str = "127.0.0.1", port: int = 8000,
          log_path: str | None = None) -> None:
    import uvicorn

    sim = Simulation(config, log_path=log_path)
    uvicorn.run(create_app(sim), host=host, port=port)
