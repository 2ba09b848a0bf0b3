"""Platform assembly: registry + simulator + services + search behind the bus.

`build_platform` wires everything from a scenario config file (or the shipped
default) and registers the producers on the documented endpoints:

    GET  /api/getMachine/{id}/getStatus
    GET  /api/getMachine/{id}/getHistory?from&to
    GET  /api/getMachine/{id}/diagnose
    POST /api/mwp/generate
    GET  /api/mwp/{id}/feasibility
    POST /api/scenario/execute
    GET  /api/notifications?since
    POST /api/notifications/{id}/ack
    POST /api/ask
    GET/POST /api/tutoring/{id}/{task}
"""

from __future__ import annotations

import importlib.resources as resources
import os
from dataclasses import dataclass, field

from . import errors
from .bus import ServiceBus
from .registry import CustomAttributeDef, MediaRef, Registry
from .search import InvertedIndex, KnowledgeDocument, QuestionAnswerer
from .services import (BusyWindow, PlanEntry, ProductionSchedule, TutoringStep,
                       TwinServices, check_feasibility, generate_mwp)
from .simulator import MachineSim, PlantSimulator, SensorSpec, WearComponent

# Standard preventive plans: per-occurrence minutes by category/periodicity,
# before and after the knowledge services were introduced.
STANDARD_PLANS = {
    "000X": {
        "baseline": [
            PlanEntry("mech-annual", "mechanical", 221, "annual"),
            PlanEntry("mech-trimestral", "mechanical", 1047, "trimestral"),
            PlanEntry("mech-monthly", "mechanical", 1076, "monthly"),
            PlanEntry("mech-weekly", "mechanical", 73, "weekly"),
            PlanEntry("elec-trimestral", "electrical", 473, "trimestral"),
            PlanEntry("pneu-trimestral", "pneumatic_hydraulic", 185, "trimestral"),
            PlanEntry("pneu-weekly", "pneumatic_hydraulic", 190, "weekly"),
        ],
        "twin_assisted": [
            PlanEntry("mech-annual", "mechanical", 184, "annual"),
            PlanEntry("mech-trimestral", "mechanical", 897, "trimestral"),
            PlanEntry("mech-monthly", "mechanical", 916, "monthly"),
            PlanEntry("mech-weekly", "mechanical", 59, "weekly"),
            PlanEntry("elec-trimestral", "electrical", 368, "trimestral"),
            PlanEntry("pneu-trimestral", "pneumatic_hydraulic", 163, "trimestral"),
            PlanEntry("pneu-weekly", "pneumatic_hydraulic", 167, "weekly"),
        ],
    },
    "000Y": {
        "baseline": [
            PlanEntry("mech-annual", "mechanical", 240, "annual"),
            PlanEntry("mech-trimestral", "mechanical", 1003, "trimestral"),
            PlanEntry("mech-monthly", "mechanical", 689, "monthly"),
            PlanEntry("mech-weekly", "mechanical", 100, "weekly"),
            PlanEntry("elec-annual", "electrical", 913, "annual"),
            PlanEntry("elec-monthly", "electrical", 105, "monthly"),
            PlanEntry("pneu-annual", "pneumatic_hydraulic", 30, "annual"),
            PlanEntry("pneu-monthly", "pneumatic_hydraulic", 90, "monthly"),
        ],
        "twin_assisted": [
            PlanEntry("mech-annual", "mechanical", 200, "annual"),
            PlanEntry("mech-trimestral", "mechanical", 823, "trimestral"),
            PlanEntry("mech-monthly", "mechanical", 580, "monthly"),
            PlanEntry("mech-weekly", "mechanical", 74, "weekly"),
            PlanEntry("elec-annual", "electrical", 770, "annual"),
            PlanEntry("elec-monthly", "electrical", 85, "monthly"),
            PlanEntry("pneu-annual", "pneumatic_hydraulic", 24, "annual"),
            PlanEntry("pneu-monthly", "pneumatic_hydraulic", 72, "monthly"),
        ],
    },
}


@dataclass
class Platform:
    registry: Registry
    simulator: PlantSimulator
    services: TwinServices
    index: InvertedIndex
    qa: QuestionAnswerer
    bus: ServiceBus
    generated_plans: dict = field(default_factory=dict)   # machine -> (mwp, schedule)
    schedules: dict = field(default_factory=dict)

    def tick(self, dt: float):
        """Advance plant time and push every emitted sample into the registry."""
        for stream_id, t, v in self.simulator.tick(dt):
            self.registry.ingest_sample(stream_id, t, v)


def data_path(name: str) -> str:
    return str(resources.files("twinplat").joinpath("data", name))


def build_platform(scenario_path: str | None = None, seed: int = 0) -> Platform:
    registry = Registry()
    simulator = PlantSimulator(seed=seed)
    services = TwinServices(registry, simulator)
    index = InvertedIndex()
    qa = QuestionAnswerer(index, services, default_item="000X")
    bus = ServiceBus()
    platform = Platform(registry=registry, simulator=simulator, services=services,
                        index=index, qa=qa, bus=bus)
    path = scenario_path or data_path("default_scenario.txt")
    _load_scenario(platform, path)
    _mount_producers(platform)
    return platform


def _load_scenario(p: Platform, path: str):
    if not os.path.exists(path):
        raise errors.ConfigError(f"scenario file not found: {path}")
    machines: dict[str, MachineSim] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                directive, rest = line.split(" ", 1)
                fields = [f.strip() for f in rest.split("|")]
                if directive == "machine":
                    mid, name, desc, category = fields
                    p.registry.create_item(name, desc, category, id=mid)
                    machines[mid] = MachineSim(item_id=mid)
                elif directive == "sensor":
                    mid, attr, stream, unit, period, band = fields
                    lo, hi = (float(x) for x in band.split(":"))
                    p.registry.define_custom_attribute(mid, CustomAttributeDef(
                        name=attr, kind="double", unit=unit, stream_binding=stream))
                    machines[mid].sensors.append(SensorSpec(
                        stream_id=stream, attr=attr, period=float(period), band=(lo, hi),
                        phase=0.25 * len(machines[mid].sensors)))
                elif directive == "component":
                    mid, name, category, rate = fields
                    machines[mid].components.append(WearComponent(
                        name=name, category=category, rate=float(rate)))
                elif directive == "alarmcat":
                    mid, category, count, before, after = fields
                    machines[mid].alarm_plan[category] = {
                        "count": int(count), "baseline": float(before),
                        "twin_assisted": float(after)}
                elif directive == "rule":
                    mid, attr, band, severity, audience = fields
                    lo, hi = (float(x) for x in band.split(":"))
                    p.services.register_rule(mid, attr, (lo, hi), severity, audience)
                elif directive == "media":
                    mid, kind, uri, caption = fields
                    p.registry.add_media(mid, MediaRef(kind=kind, uri=uri, caption=caption))
                elif directive == "doc":
                    doc_id, item_id, title, body = fields
                    p.index.index_document(KnowledgeDocument(
                        doc_id=doc_id, title=title, body=body, item_id=item_id or None))
                elif directive == "procedure":
                    mid, task, steps = fields[0], fields[1], fields[2:]
                    p.services.add_procedure(mid, task,
                                             [TutoringStep(instruction=s) for s in steps])
                elif directive == "schedule":
                    mid, windows = fields[0], fields[1:]
                    busy = []
                    for w in windows:
                        start, end = (float(x) for x in w.split(":"))
                        busy.append(BusyWindow(start=start, end=end))
                    p.schedules[mid] = ProductionSchedule(busy=busy)
                else:
                    raise ValueError(f"unknown directive {directive!r}")
            except errors.ConfigError:
                raise
            except (ValueError, KeyError, IndexError, errors.TwinError) as exc:
                raise errors.ConfigError(f"{path}:{lineno}: {exc}") from exc
    for m in machines.values():
        p.simulator.add_machine(m)


# ---------------------------------------------------------------------------
# Producers

def _snapshot_doc(snap):
    return {"timestamp": snap.timestamp, "values": snap.values, "origin": snap.origin}


def _status_doc(report):
    doc = {
        "item_id": report.item_id,
        "health": report.health,
        "snapshot": _snapshot_doc(report.snapshot),
        "fault_hypotheses": [list(h) for h in report.fault_hypotheses],
        "scheduled_ops": [{"op_id": e.op_id, "category": e.category,
                           "duration": e.duration, "window": list(e.window)}
                          for e in report.scheduled_ops],
        "recent_history": [_snapshot_doc(s) for s in report.recent_history],
    }
    if report.raw_samples is not None:
        doc["raw_samples"] = {k: [[t, v] for t, v in xs]
                              for k, xs in report.raw_samples.items()}
    return doc


def _mwp_doc(mwp, feasibility):
    return {
        "machine": mwp.machine,
        "generated_at": mwp.generated_at,
        "generation_time_min": mwp.generation_time,
        "total_minutes": mwp.total_minutes(),
        "entries": [{"op_id": e.op_id, "category": e.category, "duration": e.duration,
                     "periodicity": e.periodicity, "due": e.due, "window": list(e.window)}
                    for e in mwp.entries],
        "feasible": feasibility["feasible"],
        "conflicts": [{"op_id": occ.op_id, "window": list(occ.window),
                       "busy": [b.start, b.end, b.order_id]}
                      for occ, b in feasibility["conflicts"]],
    }


def _mount_producers(p: Platform):
    svc = p.services

    def get_status(env, params):
        item = p.registry.get(params["id"])  # raises UnknownItem
        report = svc.get_status(item.id, depth="manager")
        doc = _status_doc(report)
        doc.update({"name": item.name, "description": item.description,
                    "category": item.category, "last_update": item.last_update,
                    "media": [{"kind": m.kind, "uri": m.uri, "caption": m.caption}
                              for m in item.media_refs],
                    "custom_attrs": {a.name: {"kind": a.kind, "unit": a.unit,
                                              "stream": a.stream_binding}
                                     for a in item.custom_attrs.values()}})
        worn = None
        if item.id in p.simulator.machines:
            c = p.simulator.machines[item.id].most_worn()
            if c is not None:
                worn = {"component": c.name, "wear": c.wear, "category": c.category}
        doc["most_worn"] = worn
        return doc

    def get_history(env, params):
        t_from = float(env.query.get("from", "-inf"))
        t_to = float(env.query.get("to", "inf"))
        snaps = p.registry.history(params["id"], t_from, t_to)
        return {"item_id": params["id"], "snapshots": [_snapshot_doc(s) for s in snaps]}

    def diagnose(env, params):
        return _status_doc(svc.get_status(params["id"], depth="inline"))

    def mwp_generate(env, params):
        body = env.body or {}
        machine = body.get("machine")
        if machine not in STANDARD_PLANS:
            raise errors.UnknownItem(f"no standard plan for {machine!r}")
        mode = body.get("mode", "twin_assisted")
        horizon = float(body.get("horizon", 525600.0))
        schedule = _schedule_from_body(body.get("schedule")) \
            or p.schedules.get(machine) or ProductionSchedule()
        mwp = generate_mwp(machine, STANDARD_PLANS[machine][mode], schedule,
                           horizon=horizon, now=p.simulator.clock.now)
        p.generated_plans[machine] = (mwp, schedule)
        return _mwp_doc(mwp, check_feasibility(mwp, schedule))

    def mwp_feasibility(env, params):
        entry = p.generated_plans.get(params["id"])
        if entry is None:
            raise errors.UnknownResource(f"no generated plan for {params['id']}")
        mwp, schedule = entry
        return _mwp_doc(mwp, check_feasibility(mwp, schedule))

    def scenario_execute(env, params):
        body = env.body or {}
        kind = body.get("kind")
        if kind == "mwp":
            machine = body.get("machine")
            entry = p.generated_plans.get(machine)
            if entry is None:
                raise errors.UnknownResource(f"no generated plan for {machine}")
            mwp, schedule = entry
            return svc.execute_scenario({"kind": "mwp", "mwp": mwp, "schedule": schedule})
        return svc.execute_scenario(body)

    def notifications(env, params):
        since = float(env.query.get("since", "-inf"))
        unacked = env.query.get("unacked", "") in ("1", "true")
        return {"notifications": [
            {"id": n.id, "item_id": n.item_id, "severity": n.severity,
             "rule": n.rule, "raised_at": n.raised_at,
             "acknowledged": n.acknowledged, "audience": n.audience}
            for n in svc.list_notifications(since=since, unacked_only=unacked)]}

    def notification_ack(env, params):
        n = svc.acknowledge(params["id"])
        return {"id": n.id, "acknowledged": n.acknowledged}

    def ask(env, params):
        body = env.body or {}
        question = body.get("question", "") if isinstance(body, dict) else str(body)
        if not question:
            raise errors.BadRequest("missing question text")
        answer = p.qa.ask(question)
        return {"kind": answer.kind, "text": answer.text,
                "confidence": answer.confidence, "latency_s": answer.latency,
                "hits": [list(h) for h in answer.hits], "source": answer.source}

    def tutoring(env, params):
        item_id, task = params["id"], params["task"]
        if env.method == "GET":
            proc = svc.get_procedure(item_id, task)
            return {"item_id": item_id, "task": task,
                    "steps": [{"index": i, "instruction": s.instruction,
                               "expected_confirmation": s.expected_confirmation}
                              for i, s in enumerate(proc.steps)],
                    "cursor": proc.cursor}
        body = env.body or {}
        proc = svc.procedures.get((item_id, task))
        if proc is None:
            raise errors.UnknownTask(f"{item_id}/{task}")
        result = svc.advance_step(proc, int(body.get("step", -1)),
                                  body.get("confirmation", "ok"))
        if result == "done":
            return {"done": True, "cursor": proc.cursor}
        return {"done": False, "cursor": proc.cursor,
                "next": {"index": proc.cursor, "instruction": result.instruction}}

    bus = p.bus
    bus.register_producer("/api/getMachine/{id}/getStatus", get_status, "status-svc")
    bus.register_producer("/api/getMachine/{id}/getHistory", get_history, "history-svc")
    bus.register_producer("/api/getMachine/{id}/diagnose", diagnose, "diagnosis-svc")
    bus.register_producer("/api/mwp/generate", mwp_generate, "mwp-svc")
    bus.register_producer("/api/mwp/{id}/feasibility", mwp_feasibility, "mwp-svc")
    bus.register_producer("/api/scenario/execute", scenario_execute, "scenario-svc")
    bus.register_producer("/api/notifications", notifications, "notify-svc")
    bus.register_producer("/api/notifications/{id}/ack", notification_ack, "notify-svc")
    bus.register_producer("/api/ask", ask, "qa-svc")
    bus.register_producer("/api/tutoring/{id}/{task}", tutoring, "tutoring-svc")
    bus.register_producer("/api/items", lambda env, params: {
        "items": [{"id": i, "name": p.registry.get(i).name,
                   "category": p.registry.get(i).category}
                  for i in p.registry.item_ids()]}, "registry-svc")


def _schedule_from_body(doc):
    if not doc:
        return None
    busy = [BusyWindow(start=float(w["start"]), end=float(w["end"]),
                       order_id=str(w.get("order_id", "")),
                       load=float(w.get("load", 1.0)))
            for w in doc]
    return ProductionSchedule(busy=busy)
