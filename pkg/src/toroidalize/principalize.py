"""The blowup driver: permissible sequences that empty the non-principal locus.

The driver walks the base charts in increasing index order and, inside the
current chart, follows a two-phase policy when the base point lies on that
chart's divisor: first it repeatedly blows up a center achieving the
maximal 1-point invariant until no free-coordinate centers remain, then it
does the same with the 2-point invariant.  Charts whose base point misses
the divisor need no policy; any center works and one blowup per
presentation principalizes it.

A step targets one center *signature* (chart, center class, the exponent
columns of the center): every active presentation in that chart carrying a
center with the same signature lies on the same codimension-2 subvariety,
so all of them are transformed together.  Descendants that come out
principal leave the worklist immediately but stay in the scenario as
leaves; the trace records every step with before/after invariant data so
the run can be re-verified independently.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .forms import (
    DIVISORIAL_FORMS,
    Form,
    FormError,
    MonomialPresentation,
    is_principal,
)
from .invariants import CenterRecord, LocusReport, enumerate_centers, locus_report
from .transform import Center, CenterKind, ChartPoint, blowup


class NoCenterError(RuntimeError):
    """step() was called on a scenario whose locus is already empty."""


class StepBudgetExceededError(RuntimeError):
    """The run did not empty the locus within its step budget."""

    def __init__(self, steps: int, scenario: "Scenario") -> None:
        super().__init__(f"locus still nonempty after {steps} steps")
        self.steps = steps
        self.scenario = scenario


class Phase(Enum):
    TRANSVERSE = "transverse"
    ONE_POINT = "one_point"
    TWO_POINT = "two_point"


@dataclass(frozen=True)
class Entry:
    id: int
    presentation: MonomialPresentation
    active: bool


@dataclass(frozen=True)
class Snapshot:
    """Chart-scoped invariant state around a step, for descent verification."""

    one_point_max: int
    one_point_achievers: int
    two_point_max: int
    two_point_achievers: int
    center_count: int


@dataclass(frozen=True)
class DescendantRecord:
    id: int
    parent_id: int
    point: ChartPoint
    presentation: MonomialPresentation
    principal: bool


@dataclass(frozen=True)
class TraceStep:
    index: int
    chart_index: int
    phase: Phase
    signature: tuple
    value: int
    parents: tuple[tuple[int, Center], ...]
    descendants: tuple[DescendantRecord, ...]
    before: Snapshot
    after: Snapshot


@dataclass(frozen=True)
class Trace:
    steps: tuple[TraceStep, ...] = ()

    def append(self, step: TraceStep) -> "Trace":
        return Trace(self.steps + (step,))


@dataclass(frozen=True)
class Scenario:
    """The full symbolic state: chart flags, identified presentations, history.

    ``charts[i-1]`` records whether the base point lies on chart i's piece
    of the target divisor.  Entries keep stable ids; ``active`` mirrors
    non-principality and only active entries feed the locus.
    """

    n: int
    charts: tuple[bool, ...]
    entries: tuple[Entry, ...]
    next_id: int
    history: Trace = Trace()

    def __post_init__(self) -> None:
        if self.n < 2:
            raise FormError(f"ambient dimension must be >= 2, got {self.n}")
        if not self.charts:
            raise FormError("scenario needs at least one chart")
        seen: set[int] = set()
        for entry in self.entries:
            if entry.id in seen:
                raise FormError(f"duplicate presentation id {entry.id}")
            seen.add(entry.id)
            if entry.id >= self.next_id:
                raise FormError("next_id must exceed every existing id")
            p = entry.presentation
            idx = p.context.chart_index
            if idx > len(self.charts):
                raise FormError(f"presentation {entry.id} references missing chart {idx}")
            if p.context.q_in_divisor != self.charts[idx - 1]:
                raise FormError(
                    f"presentation {entry.id} disagrees with chart {idx} about the base point"
                )
            _check_dimension(p, self.n, entry.id)
            if entry.active == is_principal(p):
                raise FormError(
                    f"presentation {entry.id} has active={entry.active} but principality says otherwise"
                )

    def active_entries(self) -> tuple[Entry, ...]:
        return tuple(e for e in self.entries if e.active)

    def active_pairs(self) -> tuple[tuple[int, MonomialPresentation], ...]:
        return tuple((e.id, e.presentation) for e in self.entries if e.active)

    def entry(self, pid: int) -> Entry:
        for e in self.entries:
            if e.id == pid:
                return e
        raise KeyError(pid)

    def locus(self) -> LocusReport:
        return locus_report(self.active_pairs())


def _check_dimension(p: MonomialPresentation, n: int, pid: int) -> None:
    # Shapes with a trailing coordinate need one slot beyond the divisor columns.
    extra = 1 if p.form in (Form.MONOMIAL_FREE, Form.MONOMIAL_UNIT, Form.POWER_UNIT) else 0
    need = p.k + extra if p.form in DIVISORIAL_FORMS else 2
    if need > n:
        raise FormError(f"presentation {pid} needs {need} coordinates but n = {n}")


def make_scenario(
    n: int,
    charts: tuple[bool, ...] | list[bool],
    presentations: list[MonomialPresentation],
) -> Scenario:
    entries = tuple(
        Entry(i, p, active=not is_principal(p)) for i, p in enumerate(presentations)
    )
    return Scenario(n=n, charts=tuple(charts), entries=entries, next_id=len(entries))


# -- center signatures ---------------------------------------------------------

def center_signature(p: MonomialPresentation, c: Center) -> tuple:
    """Chart-level identity of a center: presentations carrying equal
    signatures are treated as lying on one subvariety."""
    chart = p.context.chart_index
    if p.form is Form.TRANSVERSE:
        return (chart, "transverse", ())
    if c.kind is CenterKind.FREE:
        return (chart, "free", p.column(c.i))
    return (chart, "pair", (p.column(c.i), p.column(c.j)))


def _chart_snapshot(report: LocusReport, chart_index: int) -> Snapshot:
    records = [r for r in report.centers if r.chart_index == chart_index]
    free = [r.value for r in records if r.form is Form.MONOMIAL_FREE]
    pair = [r.value for r in records if r.center.kind is CenterKind.PAIR]
    one_max = max(free, default=0)
    two_max = max(pair, default=0)
    return Snapshot(
        one_point_max=one_max,
        one_point_achievers=sum(1 for v in free if v == one_max) if free else 0,
        two_point_max=two_max,
        two_point_achievers=sum(1 for v in pair if v == two_max) if pair else 0,
        center_count=len(records),
    )


def _select_target(
    scenario: Scenario, report: LocusReport
) -> tuple[Phase, CenterRecord]:
    chart = min(r.chart_index for r in report.centers)
    records = [r for r in report.centers if r.chart_index == chart]
    if not scenario.charts[chart - 1]:
        return Phase.TRANSVERSE, min(records, key=CenterRecord.sort_key)
    free = [r for r in records if r.form is Form.MONOMIAL_FREE]
    if free:
        best = max(r.value for r in free)
        candidates = [r for r in free if r.value == best]
        return Phase.ONE_POINT, min(candidates, key=CenterRecord.sort_key)
    best = max(r.value for r in records)
    candidates = [r for r in records if r.value == best]
    return Phase.TWO_POINT, min(candidates, key=CenterRecord.sort_key)


def step(scenario: Scenario) -> Scenario:
    """Blow up the phase policy's target center and replace every
    presentation through it by its descendants."""
    report = scenario.locus()
    if report.is_empty():
        raise NoCenterError("every presentation is already principal")
    phase, target = _select_target(scenario, report)
    chart = target.chart_index
    target_pres = scenario.entry(target.presentation_id).presentation
    signature = center_signature(target_pres, target.center)

    matched: list[tuple[Entry, Center]] = []
    for entry in scenario.active_entries():
        if entry.presentation.context.chart_index != chart:
            continue
        for c in sorted(enumerate_centers(entry.presentation), key=Center.sort_key):
            if center_signature(entry.presentation, c) == signature:
                matched.append((entry, c))
                break
    if not matched:
        raise NoCenterError("internal: target signature matched nothing")

    matched_ids = {entry.id for entry, _ in matched}
    next_id = scenario.next_id
    new_entries: list[Entry] = []
    descendants: list[DescendantRecord] = []
    for entry in scenario.entries:
        if entry.id not in matched_ids:
            new_entries.append(entry)
            continue
        center = next(c for e, c in matched if e.id == entry.id)
        result = blowup(entry.presentation, center)
        for desc in result.descendants:
            principal = is_principal(desc.presentation)
            record = DescendantRecord(
                id=next_id,
                parent_id=entry.id,
                point=desc.point,
                presentation=desc.presentation,
                principal=principal,
            )
            descendants.append(record)
            new_entries.append(Entry(next_id, desc.presentation, active=not principal))
            next_id += 1

    before = _chart_snapshot(report, chart)
    new_scenario = Scenario(
        n=scenario.n,
        charts=scenario.charts,
        entries=tuple(new_entries),
        next_id=next_id,
        history=scenario.history,
    )
    after = _chart_snapshot(new_scenario.locus(), chart)
    trace_step = TraceStep(
        index=len(scenario.history.steps),
        chart_index=chart,
        phase=phase,
        signature=signature,
        value=target.value,
        parents=tuple((entry.id, c) for entry, c in matched),
        descendants=tuple(descendants),
        before=before,
        after=after,
    )
    return replace(new_scenario, history=scenario.history.append(trace_step))


def default_budget(scenario: Scenario) -> int:
    """Generous multiple of the observed descent bounds, still finite for CI."""
    report = scenario.locus()
    return 16 * (report.two_point_max + report.one_point_max + 1) * (len(scenario.entries) + 1)


def run(scenario: Scenario, max_steps: int) -> tuple[Scenario, Trace]:
    """Iterate :func:`step` until the locus is empty.

    The policy sequence always terminates (each step strictly lowers the
    pair (phase maximum, number of centers achieving it) in the current
    chart), so a large enough budget always succeeds; when the budget runs
    out first this raises :class:`StepBudgetExceededError`.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    current = scenario
    steps = 0
    while not current.locus().is_empty():
        if steps >= max_steps:
            raise StepBudgetExceededError(steps, current)
        current = step(current)
        steps += 1
    return current, current.history
