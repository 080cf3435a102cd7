"""MIRELA compiler and indefinite-waiting analyzer.

Pipeline: parse -> resolve_targets -> elaborate -> demux_channels ->
emulate_urgency -> (scale_constants) -> build_ts -> classify.
"""

from ._version import __version__
from .classify import (
    ClassificationReport,
    ClassifyOptions,
    LocationVerdict,
    Status,
    classify_location,
    classify_spec,
    run_pipeline,
)
from .ctl import Atom, Formula, eval_mask, eval_states, holds_initially, parse_formula, witness
from .elaborate import check_zeno_free, elaborate, static_partition
from .parser import parse, parse_file
from .prism import EmittedModel, emit, emit_model, emit_properties
from .resolver import pretty_print, resolve_targets
from .semantics import (
    AnalysisLimitError,
    build_ts,
    build_ts_urgent,
    clock_ceiling,
    constants_gcd,
    scale_constants,
)
from .syntax import ResolvedSpec, SpecAst, SpecError
from .tast import Network, NetworkError
from .transform import demux_channels, emulate_urgency

__all__ = [
    "AnalysisLimitError",
    "Atom",
    "ClassificationReport",
    "ClassifyOptions",
    "EmittedModel",
    "Formula",
    "LocationVerdict",
    "Network",
    "NetworkError",
    "ResolvedSpec",
    "SpecAst",
    "SpecError",
    "Status",
    "build_ts",
    "build_ts_urgent",
    "check_zeno_free",
    "classify_location",
    "classify_spec",
    "clock_ceiling",
    "constants_gcd",
    "demux_channels",
    "elaborate",
    "emit",
    "emit_model",
    "emit_properties",
    "emulate_urgency",
    "eval_mask",
    "eval_states",
    "holds_initially",
    "parse",
    "parse_file",
    "parse_formula",
    "pretty_print",
    "resolve_targets",
    "run_pipeline",
    "scale_constants",
    "static_partition",
    "witness",
]
