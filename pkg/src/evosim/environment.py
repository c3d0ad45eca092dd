"""Building-Place-Goal world model, CSV ingestion, occupancy, travel time."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

CSV_HEADER = ["building", "place", "x", "y", "capacity", "affordances", "description", "open", "close"]

GOAL_TAGS = ("Learning", "Work", "Exercise", "Relaxation", "Social",
             "Appointment", "Meal", "Rest", "Creative", "Errand")


class WorldParseError(ValueError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class UnknownPlaceError(KeyError):
    pass


@dataclass(frozen=True)
class Building:
    name: str
    description: str = ""


@dataclass(frozen=True)
class Place:
    building: str
    name: str
    x: int
    y: int
    capacity: int
    affordances: frozenset[str]
    description: str
    open_min: int
    close_min: int


def _parse_hhmm(text: str, row: int, col: str) -> int:
    try:
        hh, mm = text.strip().split(":")
        minutes = int(hh) * 60 + int(mm)
    except ValueError as exc:
        raise WorldParseError(row, f"bad {col} time {text!r}") from exc
    if not 0 <= minutes <= 24 * 60:
        raise WorldParseError(row, f"{col} out of range")
    return minutes


@dataclass
class WorldMap:
    buildings: list[Building]
    places: list[Place]  # CSV row order preserved
    width: int = 64
    height: int = 64
    tick_minutes: int = 15
    move_speed: int = 4  # cells per tick

    def place(self, name: str) -> Place:
        for p in self.places:
            if p.name == name:
                return p
        raise UnknownPlaceError(name)

    def has_place(self, name: str) -> bool:
        return any(p.name == name for p in self.places)


def load_world(data: bytes | str, width: int = 64, height: int = 64,
               tick_minutes: int = 15, move_speed: int = 4) -> WorldMap:
    """Parse a world CSV (schema: building,place,x,y,capacity,affordances,description,open,close)."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise WorldParseError(1, "empty csv")
    header = [c.strip() for c in rows[0]]
    if header != CSV_HEADER:
        raise WorldParseError(1, f"header must be {','.join(CSV_HEADER)}")
    buildings: dict[str, Building] = {}
    places: list[Place] = []
    seen: set[tuple[str, str]] = set()
    for idx, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise WorldParseError(idx, f"expected {len(CSV_HEADER)} columns, got {len(row)}")
        building, place, xs, ys, caps, aff, desc, open_s, close_s = [c.strip() for c in row]
        if not building:
            raise WorldParseError(idx, "empty building name")
        if not place:
            raise WorldParseError(idx, "empty place name")
        if (building, place) in seen:
            raise WorldParseError(idx, f"duplicate place {place!r} in building {building!r}")
        seen.add((building, place))
        try:
            x, y = int(xs), int(ys)
        except ValueError as exc:
            raise WorldParseError(idx, f"bad coordinate ({xs!r}, {ys!r})") from exc
        if not (0 <= x < width and 0 <= y < height):
            raise WorldParseError(idx, f"coordinate ({x}, {y}) outside grid {width}x{height}")
        try:
            capacity = int(caps)
        except ValueError as exc:
            raise WorldParseError(idx, f"bad capacity {caps!r}") from exc
        if capacity < 1:
            raise WorldParseError(idx, "capacity < 1")
        tags = [t.strip() for t in aff.split(";") if t.strip()]
        for t in tags:
            if t not in GOAL_TAGS:
                raise WorldParseError(idx, f"unknown affordance {t!r}")
        open_min = _parse_hhmm(open_s, idx, "open")
        close_min = _parse_hhmm(close_s, idx, "close")
        if open_min >= close_min:
            raise WorldParseError(idx, "open must be before close")
        buildings.setdefault(building, Building(name=building))
        # Place names must be globally resolvable for plan references.
        if any(p.name == place for p in places):
            raise WorldParseError(idx, f"place name {place!r} already used in another building")
        places.append(Place(building=building, name=place, x=x, y=y, capacity=capacity,
                            affordances=frozenset(tags), description=desc,
                            open_min=open_min, close_min=close_min))
    return WorldMap(buildings=list(buildings.values()), places=places, width=width,
                    height=height, tick_minutes=tick_minutes, move_speed=move_speed)


def places_for_goal(world: WorldMap, goal: str) -> list[Place]:
    """All places affording *goal*, in CSV row order."""
    return [p for p in world.places if goal in p.affordances]


def travel_time(world: WorldMap, from_place: str, to_place: str) -> int:
    """Ticks to move between two places: ceil(manhattan / move_speed); 0 if same."""
    if from_place == to_place:
        return 0
    a = world.place(from_place)
    b = world.place(to_place)
    dist = abs(a.x - b.x) + abs(a.y - b.y)
    return math.ceil(dist / world.move_speed)


@dataclass
class Claim:
    place: str
    agent: str
    spots: int  # 1 + companions reserved at claim time


class OccupiedError(RuntimeError):
    pass


@dataclass
class OccupancyLedger:
    world: WorldMap
    claims: dict[str, Claim] = field(default_factory=dict)  # agent -> claim

    def claimed(self, place: str) -> int:
        return sum(c.spots for c in self.claims.values() if c.place == place)

    def claim_spot(self, place: str, agent: str, companions: list[str] | None = None) -> Claim:
        """Atomically claim 1 + len(companions) spots, or raise OccupiedError."""
        if agent in self.claims:
            raise ValueError(f"agent {agent!r} already holds a spot")
        companions = companions or []
        spots = 1 + len(companions)
        cap = self.world.place(place).capacity
        if self.claimed(place) + spots > cap:
            raise OccupiedError(f"{place}: {spots} spots requested, "
                                f"{cap - self.claimed(place)} free")
        claim = Claim(place=place, agent=agent, spots=spots)
        self.claims[agent] = claim
        return claim

    def release_spot(self, agent: str) -> None:
        """Release the agent's claim (and companion reservations); idempotent."""
        self.claims.pop(agent, None)

    def holder_place(self, agent: str) -> str | None:
        claim = self.claims.get(agent)
        return claim.place if claim else None

    def snapshot(self) -> dict:
        return {a: {"place": c.place, "spots": c.spots} for a, c in sorted(self.claims.items())}


def world_to_digest(world: WorldMap) -> list[dict]:
    """Compact JSON-able digest handed to planning prompts."""
    return [{"place": p.name, "building": p.building, "goals": sorted(p.affordances),
             "x": p.x, "y": p.y} for p in world.places]


def diff_worlds(old: WorldMap, new: WorldMap) -> dict:
    """Row-level diff used by staged environment updates."""
    old_map = {p.name: p for p in old.places}
    new_map = {p.name: p for p in new.places}
    added = sorted(set(new_map) - set(old_map))
    removed = sorted(set(old_map) - set(new_map))
    changed = sorted(n for n in set(old_map) & set(new_map) if old_map[n] != new_map[n])
    return {"added": added, "removed": removed, "changed": changed}
