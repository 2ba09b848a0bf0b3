"""Maintenance economics: annualization, euro costs and savings.

All money math runs on exact rationals (labor rate 25/60 EUR/min, not the
rounded 0.42) and is rounded only for display.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import errors

# occurrences per year by periodicity
PERIODICITY_PER_YEAR = {"annual": 1, "trimestral": 4, "monthly": 12, "weekly": 52}

LABOR_RATE = Fraction(25, 60)  # EUR per minute


@dataclass(frozen=True)
class MwpCostRow:
    category: str  # mechanical | electrical | pneumatic_hydraulic
    minutes: dict = field(default_factory=dict)  # periodicity -> minutes per occurrence

    def __post_init__(self):
        for p, m in self.minutes.items():
            if p not in PERIODICITY_PER_YEAR:
                raise ValueError(f"unknown periodicity {p!r}")
            if m < 0:
                raise ValueError("minutes must be >= 0")


@dataclass(frozen=True)
class CorrectiveRow:
    category: str
    alarm_count: int
    avg_fix_time: float  # minutes

    def __post_init__(self):
        if self.alarm_count < 0 or self.avg_fix_time < 0:
            raise ValueError("counts and times must be >= 0")


@dataclass(frozen=True)
class CostReport:
    preventive_minutes: Fraction
    corrective_minutes: Fraction
    labor_rate: Fraction = LABOR_RATE

    @property
    def preventive_cost(self) -> Fraction:
        return self.preventive_minutes * self.labor_rate

    @property
    def corrective_cost(self) -> Fraction:
        return self.corrective_minutes * self.labor_rate

    @property
    def total_minutes(self) -> Fraction:
        return self.preventive_minutes + self.corrective_minutes

    @property
    def total_cost(self) -> Fraction:
        return self.total_minutes * self.labor_rate


def annualize(rows) -> Fraction:
    """Minutes per year: sum of per-occurrence minutes times occurrences/year."""
    total = Fraction(0)
    for row in rows:
        for periodicity, minutes in row.minutes.items():
            total += Fraction(minutes) * PERIODICITY_PER_YEAR[periodicity]
    return total


def corrective_minutes(rows) -> Fraction:
    return sum((Fraction(r.alarm_count) * Fraction(r.avg_fix_time) for r in rows),
               Fraction(0))


def cost(minutes, labor_rate: Fraction = LABOR_RATE) -> Fraction:
    return Fraction(minutes) * labor_rate


def savings_pct(before, after) -> Fraction:
    """Percentage saving from `before` to `after` (positive = cheaper)."""
    before, after = Fraction(before), Fraction(after)
    if before == 0:
        raise errors.DivisionByZero("before must be > 0")
    return (before - after) / before * 100


def mwp_inefficiency_cost(mean_diffs_min, idle_rate_eur_h: float = 50.0,
                          orders_per_year: int = 50):
    """Cost of inefficient plan generation: (EUR/order, EUR/year).

    mean_diffs_min: per-machine mean generation-time difference, minutes.
    """
    if idle_rate_eur_h <= 0 or orders_per_year <= 0:
        raise ValueError("rates must be > 0")
    hours = sum(Fraction(d) for d in mean_diffs_min) / 60
    per_order = hours * Fraction(idle_rate_eur_h)
    return per_order, per_order * orders_per_year


def maintenance_report(preventive_rows, corrective_rows,
                       labor_rate: Fraction = LABOR_RATE) -> CostReport:
    return CostReport(
        preventive_minutes=annualize(preventive_rows),
        corrective_minutes=corrective_minutes(corrective_rows),
        labor_rate=labor_rate,
    )


def eur(x) -> float:
    """Round an exact euro amount to cents for display."""
    return round(float(x), 2)
