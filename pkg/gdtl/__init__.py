"""GDTL: a gradual dependently-typed language."""

from .enums import (
    Severity,
    Status,
    Property,
    Verdict,
)

from .errors import (
    GdtlError,
    ParseError,
    GdtlTypeError,
    FuelExhausted,
    StuckError,
)

from .config import GdtlConfig

from .core import (
    Context,
    Evidence,
    alpha_eq,
    pretty,
    shift,
    subst,
)

from .surface import (
    parse,
    parse_term,
    parse_program,
    resolve,
    load_program,
)

from .gradops import (
    consistent,
    precision,
    meet,
    dom,
    cod_sub,
    body_sub,
)

from .normalize import (
    hsub,
    norm_synth,
    norm_check,
    norm_type_synth_level,
)

from .typecheck import (
    synth,
    check,
    check_program,
    normalize_program,
    check_canonical,
    wf_context,
)

from .static import (
    ssynth,
    scheck,
    sstep,
    srun,
    embed_static,
    untyped_embed,
    untyped_eval,
)

from .evidence import (
    Value,
    RuntimeErr,
    OutOfFuel,
    elab_synth,
    elab_check,
    elaborate_program,
    compose_evidence,
    ev_type,
    ev_check,
    erase,
    step,
    run,
    trace,
)

from .harness import (
    gen_well_typed,
    lower_precision,
    precision_mod_eta,
    compare_with_static,
    check_guarantees,
    safety_audit,
    lattice_oracle,
    run_corpus,
)

__all__ = [
    # Enums
    "Severity",
    "Status",
    "Property",
    "Verdict",
    # Errors
    "GdtlError",
    "ParseError",
    "GdtlTypeError",
    "FuelExhausted",
    "StuckError",
    # Config
    "GdtlConfig",
    # Syntax
    "Context",
    "Evidence",
    "alpha_eq",
    "pretty",
    "shift",
    "subst",
    "parse",
    "parse_term",
    "parse_program",
    "resolve",
    "load_program",
    # Precision lattice
    "consistent",
    "precision",
    "meet",
    "dom",
    "cod_sub",
    "body_sub",
    # Normalization and typing
    "hsub",
    "norm_synth",
    "norm_check",
    "norm_type_synth_level",
    "synth",
    "check",
    "check_program",
    "normalize_program",
    "check_canonical",
    "wf_context",
    # Static fragment
    "ssynth",
    "scheck",
    "sstep",
    "srun",
    "embed_static",
    "untyped_embed",
    "untyped_eval",
    # Runtime
    "Value",
    "RuntimeErr",
    "OutOfFuel",
    "elab_synth",
    "elab_check",
    "elaborate_program",
    "compose_evidence",
    "ev_type",
    "ev_check",
    "erase",
    "step",
    "run",
    "trace",
    # Harness
    "gen_well_typed",
    "lower_precision",
    "precision_mod_eta",
    "compare_with_static",
    "check_guarantees",
    "safety_audit",
    "lattice_oracle",
    "run_corpus",
]
