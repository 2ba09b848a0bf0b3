"""Twin services: work-plan scheduling, notifications, prognostics, tutoring."""

from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinplat import errors
from twinplat.platform import STANDARD_PLANS
from twinplat.registry import CustomAttributeDef, Registry
from twinplat.services import (MINUTES_PER_YEAR, BusyWindow, PlanEntry,
                               ProductionSchedule, TutoringStep, TwinServices,
                               _backtrack_place, _greedy_place,
                               check_feasibility, generate_mwp,
                               plan_occurrences)
from twinplat.simulator import MachineSim, PlantSimulator, WearComponent


def empty_schedule() -> ProductionSchedule:
    return ProductionSchedule()


class TestOccurrencePlanning:
    def test_occurrence_counts_per_periodicity(self):
        plan = [PlanEntry("a", "mechanical", 10, "annual"),
                PlanEntry("t", "mechanical", 10, "trimestral"),
                PlanEntry("m", "electrical", 10, "monthly"),
                PlanEntry("w", "pneumatic_hydraulic", 10, "weekly")]
        occ = plan_occurrences(plan, MINUTES_PER_YEAR)
        counts = {}
        for _, e in occ:
            counts[e.op_id] = counts.get(e.op_id, 0) + 1
        assert counts == {"a": 1, "t": 4, "m": 12, "w": 52}

    def test_occurrences_are_due_ordered(self):
        occ = plan_occurrences(STANDARD_PLANS["000X"]["baseline"], MINUTES_PER_YEAR)
        dues = [d for d, _ in occ]
        assert dues == sorted(dues)

    def test_short_horizon_is_infeasible(self):
        with pytest.raises(errors.InfeasibleHorizon):
            plan_occurrences([PlanEntry("a", "mechanical", 10, "annual")], 1000.0)


class TestMwpGeneration:
    @pytest.mark.parametrize("machine,mode,total", [
        ("000X", "baseline", 33629), ("000X", "twin_assisted", 28640),
        ("000Y", "baseline", 21003), ("000Y", "twin_assisted", 16978),
    ])
    def test_yearly_totals_match_economics(self, machine, mode, total):
        mwp = generate_mwp(machine, STANDARD_PLANS[machine][mode], empty_schedule())
        assert mwp.total_minutes() == total
        assert mwp.generation_time < 1.0 / 60  # well under a second

    def test_windows_are_pairwise_disjoint_and_idle(self):
        schedule = ProductionSchedule(busy=[BusyWindow(0.0, 100_000.0, "ord-1")])
        mwp = generate_mwp("000X", STANDARD_PLANS["000X"]["baseline"], schedule)
        spans = sorted(e.window for e in mwp.entries)
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            assert e1 <= s2 + 1e-9
        assert all(s >= 100_000.0 for s, _ in spans)
        assert check_feasibility(mwp, schedule)["feasible"]

    def test_infeasible_when_plant_is_saturated(self):
        # five days of idle time cannot hold a year of work
        busy = [BusyWindow(5 * 1440.0, float(MINUTES_PER_YEAR))]
        with pytest.raises(errors.InfeasibleHorizon):
            generate_mwp("000X", STANDARD_PLANS["000X"]["baseline"],
                         ProductionSchedule(busy=busy))

    def test_feasibility_flags_conflicts(self):
        mwp = generate_mwp("000X", STANDARD_PLANS["000X"]["baseline"], empty_schedule())
        clashing = ProductionSchedule(busy=[BusyWindow(0.0, 50_000.0, "ord-2")])
        result = check_feasibility(mwp, clashing)
        assert not result["feasible"] and result["conflicts"]

    def test_backtracking_recovers_greedy_failure(self):
        # first-fit puts the 4 into the 6-window and strands a 3
        entries = [(float(i), PlanEntry(f"e{i}", "mechanical", d, "annual"))
                   for i, d in enumerate([4.0, 3.0, 3.0])]
        idle = [(0.0, 6.0), (10.0, 14.0)]
        assert _greedy_place(entries, idle) is None
        placed = _backtrack_place(entries, idle)
        assert placed is not None
        assert sum(p.duration for p in placed) == 10.0


def brute_force_feasible(durations, capacities):
    """Ground truth: some assignment of items to windows fits capacity."""
    for assign in product(range(len(capacities)), repeat=len(durations)):
        used = [0.0] * len(capacities)
        for item, w in zip(durations, assign):
            used[w] += item
        if all(u <= c + 1e-9 for u, c in zip(used, capacities)):
            return True
    return False


class TestPlacementCompleteness:
    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(min_value=1, max_value=9), min_size=1, max_size=8),
           st.lists(st.integers(min_value=1, max_value=20), min_size=1, max_size=6))
    def test_matches_brute_force(self, durations, capacities):
        entries = [(float(i), PlanEntry(f"e{i}", "mechanical", float(d), "annual"))
                   for i, d in enumerate(durations)]
        cursor, idle = 0.0, []
        for c in capacities:
            idle.append((cursor, cursor + c))
            cursor += c + 5.0
        placed = _greedy_place(entries, idle)
        if placed is None:
            placed = _backtrack_place(entries, idle)
        assert (placed is not None) == brute_force_feasible(durations, capacities)
        if placed is not None:
            # placements are disjoint and inside idle windows
            spans = sorted(p.window for p in placed)
            for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
                assert e1 <= s2 + 1e-9
            for s, e in spans:
                assert any(ws - 1e-9 <= s and e <= we + 1e-9 for ws, we in idle)


def make_services():
    reg = Registry()
    sim = PlantSimulator(seed=0)
    comp = WearComponent("bearing", "mechanical", rate=1e-4)
    sim.add_machine(MachineSim(item_id="000X", components=[comp],
                               alarm_plan={"mechanical": {"count": 60,
                                                          "baseline": 95,
                                                          "twin_assisted": 71}}))
    reg.create_item("fin tube machine", id="000X")
    reg.define_custom_attribute("000X", CustomAttributeDef(
        name="temp", kind="double", stream_binding="T1"))
    return reg, sim, TwinServices(reg, sim), comp


class TestNotifications:
    def test_exactly_one_per_band_crossing(self):
        reg, sim, svc, _ = make_services()
        svc.register_rule("000X", "temp", (20.0, 80.0))
        t = 0.0
        for v in [50, 90, 95, 99, 70, 50, 85, 40]:  # two excursions
            t += 1.0
            reg.ingest_sample("T1", t, float(v))
        assert len(svc.list_notifications()) == 2

    @given(st.lists(st.booleans(), min_size=1, max_size=60))
    def test_crossing_count_property(self, pattern):
        reg, sim, svc, _ = make_services()
        svc.register_rule("000X", "temp", (0.0, 1.0))
        t, expected, prev_out = 0.0, 0, False
        for out in pattern:
            t += 1.0
            reg.ingest_sample("T1", t, 5.0 if out else 0.5)
            if out and not prev_out:
                expected += 1
            prev_out = out
        assert len(svc.list_notifications()) == expected

    def test_acknowledge_is_monotone(self):
        reg, _, svc, _ = make_services()
        svc.register_rule("000X", "temp", (0.0, 1.0))
        reg.ingest_sample("T1", 1.0, 9.0)
        note = svc.list_notifications()[0]
        assert not note.acknowledged
        svc.acknowledge(note.id)
        svc.acknowledge(note.id)  # idempotent
        assert svc.notifications[note.id].acknowledged
        assert svc.list_notifications(unacked_only=True) == []

    def test_unknown_notification(self):
        _, _, svc, _ = make_services()
        with pytest.raises(errors.UnknownResource):
            svc.acknowledge("note-404")

    def test_since_filter(self):
        reg, _, svc, _ = make_services()
        svc.register_rule("000X", "temp", (0.0, 1.0))
        reg.ingest_sample("T1", 1.0, 9.0)
        reg.ingest_sample("T1", 2.0, 0.5)
        reg.ingest_sample("T1", 3.0, 9.0)
        assert len(svc.list_notifications(since=2.5)) == 1


class TestStatusAndPrognosis:
    def test_status_depth_windows(self):
        reg, _, svc, _ = make_services()
        for t in range(1, 61):
            reg.ingest_sample("T1", float(t), 0.5)
        manager = svc.get_status("000X", depth="manager")
        inline = svc.get_status("000X", depth="inline")
        assert len(manager.recent_history) == 5
        assert len(inline.recent_history) == 50
        assert manager.raw_samples is None
        assert len(inline.raw_samples["temp"]) == 50

    def test_health_reflects_rule_state(self):
        reg, _, svc, _ = make_services()
        svc.register_rule("000X", "temp", (0.0, 1.0), severity="alarm")
        assert svc.get_status("000X").health == "nominal"
        reg.ingest_sample("T1", 1.0, 9.0)
        report = svc.get_status("000X")
        assert report.health == "fault"
        assert any(attr == "temp" for attr, _, _ in report.fault_hypotheses)

    def test_wear_threshold_flags_fault(self):
        _, sim, svc, comp = make_services()
        comp.wear = 0.85
        assert svc.get_status("000X").health == "fault"

    def test_most_worn(self):
        _, _, svc, comp = make_services()
        comp.wear = 0.3
        assert svc.most_worn("000X").name == "bearing"
        with pytest.raises(errors.UnknownItem):
            svc.most_worn("000Z")

    def test_prognosis_is_pure_and_linear(self):
        _, sim, svc, comp = make_services()
        comp.wear = 0.1
        out = svc.prognose_scenario("000X", load=2.0, horizon=1000.0)
        assert comp.wear == 0.1  # no mutation
        final = out["wear_trajectory"][-1]["wear"]["bearing"]
        assert final == pytest.approx(0.1 + 1e-4 * 2.0 * 1000.0)
        assert out["predicted_throughput"] == 2000.0
        assert out["predicted_alarms"]["mechanical"] == pytest.approx(
            60 * 2.0 * 1000.0 / MINUTES_PER_YEAR)

    def test_double_load_halves_time_to_threshold(self):
        _, _, svc, comp = make_services()
        comp.wear = 0.2
        t1 = svc.time_to_wear_threshold("000X", "bearing", load=1.0)
        t2 = svc.time_to_wear_threshold("000X", "bearing", load=2.0)
        assert t1 == pytest.approx(2 * t2, rel=1e-12)
        assert svc.time_to_wear_threshold("000X", "bearing", load=0.0) == float("inf")


class TestScenarios:
    def test_mwp_scenario_resets_wear_and_records(self):
        reg, sim, svc, comp = make_services()
        comp.wear = 0.6
        mwp = generate_mwp("000X", STANDARD_PLANS["000X"]["twin_assisted"],
                           empty_schedule())
        out = svc.execute_scenario({"kind": "mwp", "mwp": mwp,
                                    "schedule": empty_schedule()})
        assert out["applied"] == "mwp"
        assert comp.wear == 0.0
        assert svc.approved_plans["000X"] is mwp
        last = reg.get("000X").state_history[-1]
        assert last.origin == "scenario-execution"

    def test_infeasible_mwp_scenario_rejected(self):
        _, _, svc, comp = make_services()
        comp.wear = 0.6
        mwp = generate_mwp("000X", STANDARD_PLANS["000X"]["twin_assisted"],
                           empty_schedule())
        clashing = ProductionSchedule(busy=[BusyWindow(0.0, 50_000.0)])
        with pytest.raises(errors.InfeasibleScenario):
            svc.execute_scenario({"kind": "mwp", "mwp": mwp, "schedule": clashing})
        assert comp.wear == 0.6  # untouched on rejection

    def test_production_rate_scenario(self):
        _, sim, svc, _ = make_services()
        svc.execute_scenario({"kind": "production_rate", "machine": "000X",
                              "load": 0.25})
        assert sim.machines["000X"].load == 0.25

    def test_unknown_kind_rejected(self):
        _, _, svc, _ = make_services()
        with pytest.raises(errors.InfeasibleScenario):
            svc.execute_scenario({"kind": "teleport"})


class TestTutoring:
    def steps(self):
        return [TutoringStep("isolate power", expected_confirmation="ok"),
                TutoringStep("open guard"),
                TutoringStep("swap part", expected_confirmation="done-swap")]

    def test_ordered_walkthrough(self):
        reg, _, svc, _ = make_services()
        svc.add_procedure("000X", "swap", self.steps())
        proc = svc.get_procedure("000X", "swap")
        nxt = svc.advance_step(proc, 0, "ok")
        assert nxt.instruction == "open guard"
        svc.advance_step(proc, 1)
        assert svc.advance_step(proc, 2, "done-swap") == "done"
        assert reg.get("000X").latest_values()["last_completed_procedure"] == "swap"

    def test_out_of_order_confirmation_rejected(self):
        _, _, svc, _ = make_services()
        svc.add_procedure("000X", "swap", self.steps())
        proc = svc.get_procedure("000X", "swap")
        with pytest.raises(errors.OutOfOrderConfirmation):
            svc.advance_step(proc, 1)
        with pytest.raises(errors.OutOfOrderConfirmation):
            svc.advance_step(proc, 0, "wrong-word")

    def test_unknown_task(self):
        _, _, svc, _ = make_services()
        with pytest.raises(errors.UnknownTask):
            svc.get_procedure("000X", "levitate")
