"""PRISM-language serialization of a transformed network.

Emits an MDP using the digital-clocks encoding: every automaton becomes
a module with an integer location variable and bounded integer clocks,
and a global [tick] action advances all clocks by one, guarded in each
module by the survival of its current location's invariant.  Binary
channels become shared action labels between exactly their two endpoint
modules; escape edges read peer modules' location variables directly.

The emitted semantics mirrors the native transition system builder, so
verdicts obtained from an external checker are directly comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._version import __version__ as _version
from .elaborate import StaticPartition
from .semantics import clock_ceiling
from .tast import SEND, Network, NetworkError, TastAutomaton
from .transform import primed_name


@dataclass(frozen=True)
class EmittedModel:
    model: str
    properties: str
    # (component, location) -> integer code of the location variable
    name_map: dict[tuple[str, str], int]


def emit(net: Network, partition: StaticPartition, scale: int = 1) -> EmittedModel:
    name_map = location_codes(net)
    model = emit_model(net, scale, name_map)
    properties = emit_properties(net, partition, name_map)
    return EmittedModel(model=model, properties=properties, name_map=name_map)


def location_codes(net: Network) -> dict[tuple[str, str], int]:
    """Stable integer encoding of every location, per automaton."""
    codes: dict[tuple[str, str], int] = {}
    for a in net.automata:
        for k, lid in enumerate(a.location_ids()):
            codes[(a.id, lid)] = k
    return codes


def _loc_var(aid: str) -> str:
    return f"loc_{aid}"


def _x_var(aid: str) -> str:
    return f"x_{aid}"


def _u_var(aid: str) -> str:
    return f"u_{aid}"


def emit_model(
    net: Network, scale: int = 1, name_map: dict[tuple[str, str], int] | None = None
) -> str:
    """Serialize the network as PRISM module text.

    Deterministic: byte-identical output for equal inputs.
    """
    if not net.transformed:
        raise NetworkError("emit_model expects an urgency-rewritten network")
    codes = name_map if name_map is not None else location_codes(net)

    lines = [
        f"// generated by mirela {_version}",
        f"// scale: constants divided by {scale}",
        "// location encoding:",
    ]
    for a in net.automata:
        pairs = ", ".join(f"{codes[(a.id, lid)]}={lid}" for lid in a.location_ids())
        lines.append(f"//   {a.id}: {pairs}")
    lines.append("")
    lines.append("mdp")
    lines.append("")

    for a in net.automata:
        lines.extend(_emit_module(a, net, codes))
        lines.append("")
    return "\n".join(lines)


def _emit_module(a: TastAutomaton, net: Network, codes: dict) -> list[str]:
    lv, xv, uv = _loc_var(a.id), _x_var(a.id), _u_var(a.id)
    ceil = clock_ceiling(a)
    urgent_ids = {loc.id for loc in a.locations if loc.urgent}
    def code(lid: str) -> int:
        return codes[(a.id, lid)]

    out = [f"module {a.id}"]
    out.append(f"  {lv} : [0..{len(a.locations) - 1}] init {code(a.initial)};")
    out.append(f"  {xv} : [0..{ceil}] init 0;")
    out.append(f"  {uv} : [0..1] init 0;")
    out.append("")

    # Global time step: +1 on both clocks, allowed only while the current
    # location's invariant survives; urgent locations block it outright.
    guards = []
    for loc in a.locations:
        if loc.urgent:
            guards.append(f"{lv}!={code(loc.id)}")
        elif loc.inv is not None:
            guards.append(f"({lv}={code(loc.id)} => {xv}<={loc.inv - 1})")
    guard = " & ".join(guards) if guards else "true"
    out.append(
        f"  [tick] {guard} -> ({xv}'=min({xv}+1,{ceil})) & ({uv}'=min({uv}+1,1));"
    )
    out.append("")

    for e in a.edges:
        src, dst = code(e.src), code(e.dst)
        conds = [f"{lv}={src}"]
        if e.guard is not None:
            conds.append(f"{xv}>={e.guard}")
        if e.is_escape:
            for aid, lid in e.blocked_by:
                conds.append(f"{_loc_var(aid)}!={codes[(aid, lid)]}")
        label = f"[{e.channel.label}] " if e.channel is not None else "[] "
        updates = [f"({lv}'={dst})"]
        if e.reset_x:
            updates.append(f"({xv}'=0)")
        if e.reset_u:
            updates.append(f"({uv}'=0)")
        out.append(f"  {label}{' & '.join(conds)} -> {' & '.join(updates)};")
    out.append("endmodule")
    return out


def emit_properties(
    net: Network, partition: StaticPartition, name_map: dict | None = None
) -> str:
    """Three property lines per wait location of interest.

    For each w' with w in onlyS or W: can the component linger at w'
    forever (EF EG), get trapped there (EF AG), and linger while escape
    stays possible (EF EG with a nested reachability condition).
    """
    codes = name_map if name_map is not None else location_codes(net)
    lines = []
    for aid, lid in partition.only_s + partition.w:
        wp = primed_name(lid)
        key = (aid, wp)
        if key not in codes:
            raise NetworkError(f"no primed copy {aid}.{wp} in the network")
        atom = f"{_loc_var(aid)}={codes[key]}"
        lines.append(f'E [ F E [ G {atom} ] ] // phi {aid}.{wp}')
        lines.append(f'E [ F A [ G {atom} ] ] // psi {aid}.{wp}')
        lines.append(
            f'E [ F E [ G ({atom} & E [ F !({atom}) ]) ] ] // rho {aid}.{wp}'
        )
    return "\n".join(lines) + ("\n" if lines else "")
