"""Knowledge services over the registry and plant simulator.

Covers status/fault diagnosis (manager and in-line depth), band-rule driven
notifications with per-crossing hysteresis, maintenance work plan generation
and feasibility, prognostics, scenario execution and step-by-step tutoring.
"""

from __future__ import annotations

import itertools
import threading
import time
from dataclasses import dataclass, field

from . import errors
from .economics import PERIODICITY_PER_YEAR
from .registry import CustomAttributeDef, Registry
from .simulator import PlantSimulator

MINUTES_PER_YEAR = 525600.0
PERIOD_MINUTES = {p: MINUTES_PER_YEAR / k for p, k in PERIODICITY_PER_YEAR.items()}


# ---------------------------------------------------------------------------
# Maintenance work plans

@dataclass(frozen=True)
class PlanEntry:
    op_id: str
    category: str
    duration: float           # minutes per occurrence
    periodicity: str          # annual | trimestral | monthly | weekly

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("duration must be > 0")
        if self.periodicity not in PERIOD_MINUTES:
            raise ValueError(f"unknown periodicity {self.periodicity!r}")


@dataclass(frozen=True)
class ScheduledOccurrence:
    op_id: str
    category: str
    duration: float
    periodicity: str
    due: float
    window: tuple             # (start, end), start + duration = end


@dataclass
class MaintenanceWorkPlan:
    machine: str
    entries: list             # ScheduledOccurrence, windows pairwise disjoint
    generated_at: float
    generation_time: float    # minutes, measured

    def total_minutes(self) -> float:
        return sum(e.duration for e in self.entries)


@dataclass(frozen=True)
class BusyWindow:
    start: float
    end: float
    order_id: str = ""
    load: float = 1.0

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError("window end must be after start")
        if not 0.0 <= self.load <= 1.0:
            raise ValueError("load must lie in [0, 1]")


@dataclass
class ProductionSchedule:
    busy: list = field(default_factory=list)  # BusyWindow, ordered, non-overlapping

    def __post_init__(self):
        self.busy = sorted(self.busy, key=lambda w: w.start)
        for a, b in zip(self.busy, self.busy[1:]):
            if b.start < a.end:
                raise ValueError("busy windows overlap")

    def idle_windows(self, horizon: float) -> list:
        """Complement of the busy windows in [0, horizon] as (start, end)."""
        out, cursor = [], 0.0
        for w in self.busy:
            if w.start > cursor:
                out.append((cursor, min(w.start, horizon)))
            cursor = max(cursor, w.end)
            if cursor >= horizon:
                break
        if cursor < horizon:
            out.append((cursor, horizon))
        return [w for w in out if w[1] > w[0]]


def plan_occurrences(standard_plan, horizon: float) -> list:
    """All due occurrences of each entry inside [0, horizon], due-ordered."""
    occurrences = []
    for entry in standard_plan:
        period = PERIOD_MINUTES[entry.periodicity]
        if horizon < period:
            raise errors.InfeasibleHorizon(
                f"horizon {horizon} misses every {entry.periodicity} occurrence")
        k = 1
        while k * period <= horizon:
            occurrences.append((k * period, entry))
            k += 1
    occurrences.sort(key=lambda o: (o[0], o[1].op_id))
    return occurrences


def _greedy_place(occurrences, idle):
    """Earliest-due-date first fit. Returns placements or None on failure."""
    remaining = [(start, end) for start, end in idle]
    placed = []
    for due, entry in occurrences:
        for i, (start, end) in enumerate(remaining):
            if end - start >= entry.duration - 1e-9:
                placed.append(ScheduledOccurrence(
                    op_id=entry.op_id, category=entry.category,
                    duration=entry.duration, periodicity=entry.periodicity,
                    due=due, window=(start, start + entry.duration)))
                remaining[i] = (start + entry.duration, end)
                break
        else:
            return None
    return placed


def _backtrack_place(occurrences, idle, limit: int = 12):
    """Exact search for small instances; greedy alone is not complete."""
    if len(occurrences) > limit:
        return None
    caps = [end - start for start, end in idle]
    order = sorted(range(len(occurrences)),
                   key=lambda i: -occurrences[i][1].duration)
    assignment = [None] * len(occurrences)

    def rec(pos):
        if pos == len(order):
            return True
        idx = order[pos]
        dur = occurrences[idx][1].duration
        tried = set()
        for w in range(len(caps)):
            key = round(caps[w], 9)
            if key in tried or caps[w] < dur - 1e-9:
                continue
            tried.add(key)
            caps[w] -= dur
            assignment[idx] = w
            if rec(pos + 1):
                return True
            caps[w] += dur
            assignment[idx] = None
        return False

    if not rec(0):
        return None
    used = [0.0] * len(idle)
    placed = []
    for i, (due, entry) in enumerate(occurrences):
        w = assignment[i]
        start = idle[w][0] + used[w]
        used[w] += entry.duration
        placed.append(ScheduledOccurrence(
            op_id=entry.op_id, category=entry.category, duration=entry.duration,
            periodicity=entry.periodicity, due=due,
            window=(start, start + entry.duration)))
    return placed


def generate_mwp(machine: str, standard_plan, schedule: ProductionSchedule,
                 horizon: float = MINUTES_PER_YEAR,
                 now: float = 0.0) -> MaintenanceWorkPlan:
    """Place every due occurrence in an idle window; greedy, exact fallback."""
    t0 = time.perf_counter()
    occurrences = plan_occurrences(standard_plan, horizon)
    idle = schedule.idle_windows(horizon)
    placed = _greedy_place(occurrences, idle)
    if placed is None:
        placed = _backtrack_place(occurrences, idle)
    if placed is None:
        raise errors.InfeasibleHorizon(
            f"{len(occurrences)} occurrences do not fit the idle windows")
    return MaintenanceWorkPlan(
        machine=machine, entries=placed, generated_at=now,
        generation_time=(time.perf_counter() - t0) / 60.0)


def check_feasibility(mwp: MaintenanceWorkPlan, schedule: ProductionSchedule) -> dict:
    conflicts = []
    for occ in mwp.entries:
        s, e = occ.window
        for busy in schedule.busy:
            if s < busy.end and busy.start < e:
                conflicts.append((occ, busy))
    return {"feasible": not conflicts, "conflicts": conflicts}


# ---------------------------------------------------------------------------
# Notifications

@dataclass
class Notification:
    id: str
    item_id: str
    severity: str             # info | warning | alarm
    rule: str
    raised_at: float
    audience: str = "manager"
    acknowledged: bool = False


@dataclass
class BandRule:
    id: str
    item_id: str
    attr: str
    lo: float
    hi: float
    severity: str = "alarm"
    audience: str = "manager"
    out_of_band: bool = False  # hysteresis latch: one notification per crossing


# ---------------------------------------------------------------------------
# Tutoring

@dataclass(frozen=True)
class TutoringStep:
    instruction: str
    media_refs: tuple = ()
    expected_confirmation: str = "ok"


@dataclass
class TutoringProcedure:
    item_id: str
    task: str
    steps: list
    cursor: int = 0

    def __post_init__(self):
        if not self.steps:
            raise ValueError("procedure needs at least one step")

    @property
    def done(self) -> bool:
        return self.cursor >= len(self.steps)

    def current(self) -> TutoringStep:
        return self.steps[self.cursor]


# ---------------------------------------------------------------------------
# Status

@dataclass
class StatusReport:
    item_id: str
    snapshot: object
    health: str               # nominal | warning | fault
    scheduled_ops: list
    recent_history: list
    fault_hypotheses: list    # (component, evidence attribute, rule id)
    raw_samples: dict | None = None  # inline depth only


WEAR_FAULT_THRESHOLD = 0.8


class TwinServices:
    """The service producers: stateless over the registry except notifications."""

    def __init__(self, registry: Registry, simulator: PlantSimulator | None = None):
        self.registry = registry
        self.simulator = simulator
        self.rules: dict[str, BandRule] = {}
        self.notifications: dict[str, Notification] = {}
        self.procedures: dict[tuple, TutoringProcedure] = {}
        self.approved_plans: dict[str, MaintenanceWorkPlan] = {}
        self._seq = itertools.count(1)
        self._note_lock = threading.Lock()
        registry.on_ingest(self._on_ingest)

    # -- notification rules -------------------------------------------------

    def register_rule(self, item_id: str, attr: str, band, severity: str = "alarm",
                      audience: str = "manager") -> str:
        item = self.registry.get(item_id)
        attr_def = item.custom_attrs.get(attr)
        if attr_def is None or not attr_def.is_numeric:
            raise errors.UnknownAttribute(f"numeric attribute {attr!r} not on {item_id}")
        rule_id = f"rule-{next(self._seq)}"
        self.rules[rule_id] = BandRule(id=rule_id, item_id=item_id, attr=attr,
                                       lo=band[0], hi=band[1], severity=severity,
                                       audience=audience)
        return rule_id

    def _on_ingest(self, item_id, attr_name, t, value):
        with self._note_lock:
            for rule in self.rules.values():
                if rule.item_id != item_id or rule.attr != attr_name:
                    continue
                out = not (rule.lo <= value <= rule.hi)
                if out and not rule.out_of_band:
                    self.raise_notification(item_id, rule.severity, rule.id, t,
                                            audience=rule.audience)
                rule.out_of_band = out

    def raise_notification(self, item_id, severity, rule, t, audience="manager") -> Notification:
        note = Notification(id=f"note-{next(self._seq)}", item_id=item_id,
                            severity=severity, rule=rule, raised_at=t,
                            audience=audience)
        self.notifications[note.id] = note
        return note

    def list_notifications(self, since: float = float("-inf"),
                           unacked_only: bool = False) -> list:
        notes = [n for n in self.notifications.values() if n.raised_at >= since]
        if unacked_only:
            notes = [n for n in notes if not n.acknowledged]
        return sorted(notes, key=lambda n: (n.raised_at, n.id))

    def acknowledge(self, note_id: str) -> Notification:
        note = self.notifications.get(note_id)
        if note is None:
            raise errors.UnknownResource(note_id)
        note.acknowledged = True  # monotone: there is no un-acknowledge path
        return note

    # -- status ---------------------------------------------------------------

    def get_status(self, item_id: str, depth: str = "manager") -> StatusReport:
        item = self.registry.get(item_id)
        window = 50 if depth == "inline" else 5
        history = item.state_history[-window:]
        snapshot = history[-1] if history else self.registry.snapshot_at(item_id, float("inf"))
        hypotheses = []
        worst = "nominal"
        with self._note_lock:
            for rule in self.rules.values():
                if rule.item_id == item_id and rule.out_of_band:
                    hypotheses.append((rule.attr, rule.attr, rule.id))
                    if rule.severity == "alarm":
                        worst = "fault"
                    elif worst != "fault":
                        worst = "warning"
        if self.simulator and item_id in self.simulator.machines:
            machine = self.simulator.machines[item_id]
            for c in machine.components:
                if c.wear >= WEAR_FAULT_THRESHOLD:
                    hypotheses.append((c.name, "wear_state", "wear-threshold"))
                    worst = "fault"
        plan = self.approved_plans.get(item_id)
        scheduled = sorted(plan.entries, key=lambda e: e.window[0])[:10] if plan else []
        raw = None
        if depth == "inline":
            raw = {}
            for snap in history:
                for k, v in snap.values.items():
                    raw.setdefault(k, []).append((snap.timestamp, v))
        return StatusReport(item_id=item_id, snapshot=snapshot, health=worst,
                            scheduled_ops=scheduled, recent_history=history,
                            fault_hypotheses=hypotheses, raw_samples=raw)

    def most_worn(self, item_id: str):
        if not self.simulator or item_id not in self.simulator.machines:
            raise errors.UnknownItem(item_id)
        return self.simulator.machines[item_id].most_worn()

    # -- prognostics -----------------------------------------------------------

    def prognose_scenario(self, item_id: str, load: float, horizon: float,
                          steps: int = 20) -> dict:
        """Forward simulation from the twin's current wear state (pure)."""
        if not self.simulator or item_id not in self.simulator.machines:
            raise errors.UnknownItem(item_id)
        machine = self.simulator.machines[item_id]
        traj = []
        n = max(1, steps)
        for i in range(n + 1):
            t = horizon * i / n
            traj.append({
                "t": t,
                "wear": {c.name: min(1.0, c.wear + c.rate * load * t)
                         for c in machine.components},
            })
        expected_alarms = {}
        for category, row in machine.alarm_plan.items():
            yearly = row["count"]
            expected_alarms[category] = yearly * load * horizon / MINUTES_PER_YEAR
        throughput = load * horizon  # load-minutes of production
        return {"item_id": item_id, "horizon": horizon, "load": load,
                "wear_trajectory": traj, "predicted_alarms": expected_alarms,
                "predicted_throughput": throughput}

    def time_to_wear_threshold(self, item_id: str, component: str, load: float,
                               threshold: float = WEAR_FAULT_THRESHOLD) -> float:
        machine = self.simulator.machines[item_id]
        c = machine.component(component)
        if load <= 0 or c.rate <= 0:
            return float("inf")
        return max(0.0, (threshold - c.wear) / (c.rate * load))

    # -- scenario execution ------------------------------------------------------

    def execute_scenario(self, scenario: dict) -> dict:
        """Apply an approved scenario to the plant; records a snapshot."""
        kind = scenario.get("kind")
        now = self.simulator.clock.now if self.simulator else 0.0
        if kind == "mwp":
            mwp: MaintenanceWorkPlan = scenario["mwp"]
            schedule: ProductionSchedule = scenario["schedule"]
            result = check_feasibility(mwp, schedule)
            if not result["feasible"]:
                raise errors.InfeasibleScenario(
                    f"{len(result['conflicts'])} conflicts with the production schedule")
            self.approved_plans[mwp.machine] = mwp
            if self.simulator and mwp.machine in self.simulator.machines:
                self.simulator.machines[mwp.machine].reset_wear()
            self._record_scenario(mwp.machine, now, {"scenario": f"mwp:{len(mwp.entries)} ops"})
            return {"applied": "mwp", "machine": mwp.machine, "entries": len(mwp.entries)}
        if kind == "production_rate":
            machine_id = scenario["machine"]
            load = float(scenario["load"])
            if not self.simulator or machine_id not in self.simulator.machines:
                raise errors.UnknownItem(machine_id)
            self.simulator.machines[machine_id].load = load
            self._record_scenario(machine_id, now, {"scenario": f"load:{load}"})
            return {"applied": "production_rate", "machine": machine_id, "load": load}
        raise errors.InfeasibleScenario(f"unknown scenario kind {kind!r}")

    def _record_scenario(self, item_id, t, values):
        item = self.registry.get(item_id)
        if "scenario" not in item.custom_attrs:
            self.registry.define_custom_attribute(
                item_id, CustomAttributeDef(name="scenario", kind="text"))
        bump = t
        if item.state_history and item.state_history[-1].timestamp >= bump:
            bump = item.state_history[-1].timestamp + 1e-6
        self.registry.record_values(item_id, bump, values, origin="scenario-execution")

    # -- tutoring ------------------------------------------------------------------

    def add_procedure(self, item_id: str, task: str, steps):
        self.procedures[(item_id, task)] = TutoringProcedure(
            item_id=item_id, task=task, steps=list(steps))

    def get_procedure(self, item_id: str, task: str) -> TutoringProcedure:
        self.registry.get(item_id)
        proc = self.procedures.get((item_id, task))
        if proc is None:
            raise errors.UnknownTask(f"{item_id}/{task}")
        proc.cursor = 0
        return proc

    def advance_step(self, proc: TutoringProcedure, step_index: int,
                     confirmation: str = "ok"):
        """Confirm the current step; returns the next step or 'done'."""
        if proc.done:
            return "done"
        if step_index != proc.cursor:
            raise errors.OutOfOrderConfirmation(
                f"confirmed step {step_index}, expected {proc.cursor}")
        expected = proc.current().expected_confirmation
        if expected and confirmation != expected:
            raise errors.OutOfOrderConfirmation(
                f"expected confirmation {expected!r}")
        proc.cursor += 1
        if proc.done:
            now = self.simulator.clock.now if self.simulator else 0.0
            self._record_procedure_completion(proc.item_id, proc.task, now)
            return "done"
        return proc.current()

    def _record_procedure_completion(self, item_id, task, t):
        item = self.registry.get(item_id)
        if "last_completed_procedure" not in item.custom_attrs:
            self.registry.define_custom_attribute(
                item_id, CustomAttributeDef(name="last_completed_procedure", kind="text"))
        bump = t
        if item.state_history and item.state_history[-1].timestamp >= bump:
            bump = item.state_history[-1].timestamp + 1e-6
        self.registry.record_values(item_id, bump, {"last_completed_procedure": task},
                                    origin="administrator-edit")
