"""Box-basket-ball system: evolutions, whurl maps, solitons and scattering."""

from .core import (
    FULL,
    INF,
    VACUUM,
    BoxBallConfiguration,
    Configuration,
    ParseError,
    SiteState,
    parse_capacity,
    parse_configuration,
    render_configuration,
)
from .evolution import CarrierState, carrier_step, evolve, evolve_boxball, evolve_combinatorial, orbit
from .scattering import (
    PhaseReport,
    build_experiment,
    check_sorting,
    measure_phase,
    predict,
    predict_two_body,
    run_and_verify,
    run_n_body,
)
from .solitons import (
    Decomposition,
    Fast,
    NotBasic,
    NotSeparated,
    Slow,
    chunk_decompose,
    classify_basic,
    count_solitons,
    decompose,
    soliton,
    unbasket,
)
from .tracer import TraceReport, trace_fast_slow
from .whurl import check_yang_baxter, tropical_2wire, tropical_3wire, whurl_2wire, whurl_3wire_mixed

__all__ = [
    "FULL",
    "INF",
    "VACUUM",
    "BoxBallConfiguration",
    "CarrierState",
    "Configuration",
    "Decomposition",
    "Fast",
    "NotBasic",
    "NotSeparated",
    "ParseError",
    "PhaseReport",
    "SiteState",
    "Slow",
    "TraceReport",
    "build_experiment",
    "carrier_step",
    "check_sorting",
    "check_yang_baxter",
    "chunk_decompose",
    "classify_basic",
    "count_solitons",
    "decompose",
    "evolve",
    "evolve_boxball",
    "evolve_combinatorial",
    "measure_phase",
    "orbit",
    "parse_capacity",
    "parse_configuration",
    "predict",
    "predict_two_body",
    "render_configuration",
    "run_and_verify",
    "run_n_body",
    "soliton",
    "trace_fast_slow",
    "tropical_2wire",
    "tropical_3wire",
    "unbasket",
    "whurl_2wire",
    "whurl_3wire_mixed",
]
