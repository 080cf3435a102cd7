"""Wait-location status classification.

Drives the φ/ψ/ρ query cascade over every wait location of interest:
φ = EF EG w' (can the component linger in w' forever?), ψ = EF AG w'
(can it get trapped?), ρ = EF EG (w' ∧ EF ¬w') (can it linger while
escape stays possible?).  Locations waiting on an unlock are statically
safe; lock! origins can at worst starve; aperiodic activity locations
are unbounded-waiting sites by construction and are reported without
model checking.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .ctl import EF, EG, AG, Atom, Not, eval_mask, holds_initially
from .elaborate import StaticPartition, elaborate, static_partition
from .semantics import (
    DEFAULT_TRANSITION_CAP,
    TransitionSystem,
    build_ts,
    constants_gcd,
    scale_constants,
)
from .syntax import Kind, ResolvedSpec
from .tast import Network
from .transform import demux_channels, emulate_urgency, primed_name


class Status(enum.Enum):
    SAFE = "safe"
    STARVATION = "S"
    STARVATION_OR_UNBOUNDED = "S/U"
    DEADLOCK = "D"
    DEADLOCK_AND_STARVATION = "D+S"
    DEADLOCK_AND_STARVATION_OR_UNBOUNDED = "D+S/U"
    INTRINSIC_UNBOUNDED = "U"


_STATUS_TEXT = {
    Status.SAFE: "no indefinite waiting",
    Status.STARVATION: "starvation",
    Status.STARVATION_OR_UNBOUNDED: "starvation and/or unbounded waiting",
    Status.DEADLOCK: "local deadlock",
    Status.DEADLOCK_AND_STARVATION: "local deadlock and starvation",
    Status.DEADLOCK_AND_STARVATION_OR_UNBOUNDED: (
        "local deadlock, starvation and/or unbounded waiting"
    ),
    Status.INTRINSIC_UNBOUNDED: "unbounded waiting (aperiodic activity)",
}


@dataclass(frozen=True)
class LocationVerdict:
    component: str
    location: str
    primed: str
    static_set: str  # 'N' | 'onlyS' | 'W'
    phi: bool | None
    psi: bool | None
    rho: bool | None
    status: Status

    @property
    def status_text(self) -> str:
        return _STATUS_TEXT[self.status]

    def to_json(self) -> dict:
        return {
            "component": self.component,
            "location": self.location,
            "primed": self.primed,
            "set": self.static_set,
            "phi": self.phi,
            "psi": self.psi,
            "rho": self.rho,
            "status": self.status.value,
            "status_text": self.status_text,
        }


@dataclass
class ClassificationReport:
    spec_name: str
    scale: int
    verdicts: list[LocationVerdict]
    skipped: list[dict]
    aperiodic_sites: list[tuple[str, str]]
    n_states: int = 0
    n_transitions: int = 0

    def verdict(self, component: str, location: str) -> LocationVerdict:
        for v in self.verdicts:
            if v.component == component and v.location == location:
                return v
        raise KeyError((component, location))

    def to_json(self) -> dict:
        return {
            "spec": self.spec_name,
            "scale": self.scale,
            "states": self.n_states,
            "transitions": self.n_transitions,
            "verdicts": [v.to_json() for v in self.verdicts],
            "skipped": self.skipped,
            "aperiodic": [
                {"component": c, "location": l, "status": Status.INTRINSIC_UNBOUNDED.value}
                for c, l in self.aperiodic_sites
            ],
        }

    def human_table(self) -> str:
        def fmt(b: bool | None) -> str:
            return "" if b is None else ("true" if b else "false")

        rows = [("comp.", "w", "set", "phi", "psi", "rho", "status")]
        for v in self.verdicts:
            rows.append(
                (
                    v.component,
                    v.primed,
                    v.static_set,
                    fmt(v.phi),
                    fmt(v.psi),
                    fmt(v.rho),
                    v.status.value if v.status is not Status.SAFE else "",
                )
            )
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        lines.insert(1, "-" * len(lines[0]))
        for comp, loc in self.aperiodic_sites:
            lines.append(f"{comp}.{loc}: {_STATUS_TEXT[Status.INTRINSIC_UNBOUNDED]}")
        for entry in self.skipped:
            lines.append(
                f"skipped {entry['component']}.{entry['location']}: {entry['reason']}"
            )
        lines.append(f"states: {self.n_states}  transitions: {self.n_transitions}")
        return "\n".join(lines) + "\n"


@dataclass
class ClassifyOptions:
    scale: int | str | None = "auto"  # 'auto', explicit divisor, or None
    include_memories: bool = False
    full_formulas: bool = False
    transition_cap: int = DEFAULT_TRANSITION_CAP


@dataclass
class Pipeline:
    """All intermediate artifacts of a classification run."""

    spec: ResolvedSpec
    elaborated: Network
    demuxed: Network
    transformed: Network
    scaled: Network
    scale: int
    partition: StaticPartition
    ts: TransitionSystem | None


def run_pipeline(
    spec: ResolvedSpec, options: ClassifyOptions | None = None, build: bool = True
) -> Pipeline:
    options = options or ClassifyOptions()
    net = elaborate(spec)
    demuxed = demux_channels(net)
    partition = static_partition(demuxed)
    transformed = emulate_urgency(demuxed)
    if options.scale == "auto":
        divisor = constants_gcd(transformed)
    elif options.scale is None:
        divisor = 1
    else:
        divisor = int(options.scale)
    scaled = scale_constants(transformed, divisor) if divisor != 1 else transformed
    ts = build_ts(scaled, cap=options.transition_cap) if build else None
    return Pipeline(
        spec=spec,
        elaborated=net,
        demuxed=demuxed,
        transformed=transformed,
        scaled=scaled,
        scale=divisor,
        partition=partition,
        ts=ts,
    )


def classify_location(
    ts: TransitionSystem,
    component: str,
    location: str,
    static_set: str,
    has_aperiodic: bool,
    full_formulas: bool = False,
    _memo: dict | None = None,
) -> LocationVerdict:
    """Status of one wait location, per the φ/ψ/ρ cascade."""
    if static_set == "N":
        return LocationVerdict(component, location, primed_name(location), "N", None, None, None, Status.SAFE)
    memo = _memo if _memo is not None else {}
    primed = primed_name(location)
    atom = Atom(component, primed)

    def check(f) -> bool:
        return bool(eval_mask(ts, f, memo)[ts.initial])

    phi = check(EF(EG(atom)))
    psi = rho = None
    if phi and (static_set != "onlyS" or full_formulas):
        psi = check(EF(AG(atom)))
        if psi or full_formulas:
            rho = check(EF(EG(atom & EF(Not(atom)))))

    if not phi:
        status = Status.SAFE
    elif static_set == "onlyS":
        status = Status.STARVATION
    elif not psi:
        status = (
            Status.STARVATION_OR_UNBOUNDED if has_aperiodic else Status.STARVATION
        )
    elif not rho:
        status = Status.DEADLOCK
    else:
        status = (
            Status.DEADLOCK_AND_STARVATION_OR_UNBOUNDED
            if has_aperiodic
            else Status.DEADLOCK_AND_STARVATION
        )
    return LocationVerdict(
        component, location, primed, static_set, phi, psi, rho, status
    )


def classify_spec(
    spec: ResolvedSpec, options: ClassifyOptions | None = None
) -> ClassificationReport:
    options = options or ClassifyOptions()
    pipe = run_pipeline(spec, options)
    return classify_pipeline(pipe, options)


def classify_pipeline(
    pipe: Pipeline, options: ClassifyOptions | None = None
) -> ClassificationReport:
    options = options or ClassifyOptions()
    spec = pipe.spec
    has_aperiodic = spec.has_aperiodic()

    rendered = rendered_memories(spec)
    skipped: list[dict] = []
    verdicts: list[LocationVerdict] = []
    memo: dict = {}
    for a in pipe.demuxed.automata:
        skip = a.id in rendered and not options.include_memories
        for loc in a.wait_locations():
            static_set = pipe.partition.set_of(a.id, loc.id)
            if skip:
                skipped.append(
                    {
                        "component": a.id,
                        "location": loc.id,
                        "reason": "memory read by a rendering loop",
                    }
                )
                continue
            verdicts.append(
                classify_location(
                    pipe.ts,
                    a.id,
                    loc.id,
                    static_set,
                    has_aperiodic,
                    full_formulas=options.full_formulas,
                    _memo=memo,
                )
            )

    aperiodic_sites = [
        (c.id, elaborated_initial(pipe.elaborated, c.id))
        for c in spec.components
        if c.kind is Kind.APERIODIC
    ]
    return ClassificationReport(
        spec_name=spec.name,
        scale=pipe.scale,
        verdicts=verdicts,
        skipped=skipped,
        aperiodic_sites=aperiodic_sites,
        n_states=pipe.ts.n_states,
        n_transitions=pipe.ts.n_transitions,
    )


def rendered_memories(spec: ResolvedSpec) -> set[str]:
    """Memories read by a rendering loop: always eventually served, so
    their wait locations are skipped by default."""
    return {c.sources[0].id for c in spec.components if c.kind is Kind.RENDERING}


def analyzed_partition(spec: ResolvedSpec, partition: StaticPartition) -> StaticPartition:
    """The partition restricted to the locations classification checks."""
    rendered = rendered_memories(spec)

    def keep(entries):
        return tuple((a, l) for a, l in entries if a not in rendered)

    return StaticPartition(
        n=keep(partition.n), only_s=keep(partition.only_s), w=keep(partition.w)
    )


def elaborated_initial(net: Network, aut_id: str) -> str:
    return net.automaton(aut_id).initial
