"""qshallow: depth-reducing optimizer for quantum circuits.

Detects GHZ-preparation subroutines and CX/CZ entangling chains in OpenQASM
2.0 circuits and rewrites them into logarithmic- or constant-depth
equivalents, with statevector-based equivalence checking and a benchmark
harness for depth/gate/measurement scaling studies.
"""
__version__ = "0.1.0"

from .ir import (
    Circuit,
    Condition,
    DepthReport,
    Gate,
    Instruction,
    barrier,
    cx,
    cz,
    depth,
    h,
    measure,
    rx,
    ry,
    rz,
    splice,
    stats,
    validate,
    x,
    y,
    z,
)
from .qasm import ParseError, SourceSpan, emit, parse
from .sim import (
    Branch,
    branches,
    equivalent_on_zero,
    equivalent_unitary,
    unitary,
)
from .ghz import (
    GhzMode,
    GhzSite,
    apply_ghz_pass,
    build_ghz_log,
    build_ghz_parallel,
    detect_ghz,
)
from .chains import (
    ChainCandidate,
    ChainKind,
    ChainScanner,
    Disposition,
    classify_interleaved,
    commutes,
    decompose_cz,
    decompose_cz_to_cx,
    decompose_forward,
    decompose_reverse,
    find_chains,
)
from .pipeline import (
    ChainMode,
    CompileResult,
    GateDecision,
    PassConfig,
    VerificationError,
    compile_circuit,
    gate_and_apply,
    scoped_depth,
)
from .bench import (
    AnsatzSpec,
    gen_ansatz,
    gen_cx_chain,
    gen_cz_chain,
    gen_ghz_standard,
    gen_intertwined,
    gen_random,
)

__all__ = [
    "AnsatzSpec",
    "Branch",
    "ChainCandidate",
    "ChainKind",
    "ChainMode",
    "ChainScanner",
    "Circuit",
    "CompileResult",
    "Condition",
    "DepthReport",
    "Disposition",
    "Gate",
    "GateDecision",
    "GhzMode",
    "GhzSite",
    "Instruction",
    "ParseError",
    "PassConfig",
    "SourceSpan",
    "VerificationError",
    "apply_ghz_pass",
    "barrier",
    "branches",
    "build_ghz_log",
    "build_ghz_parallel",
    "classify_interleaved",
    "commutes",
    "compile_circuit",
    "cx",
    "cz",
    "decompose_cz",
    "decompose_cz_to_cx",
    "decompose_forward",
    "decompose_reverse",
    "depth",
    "detect_ghz",
    "emit",
    "equivalent_on_zero",
    "equivalent_unitary",
    "find_chains",
    "gate_and_apply",
    "gen_ansatz",
    "gen_cx_chain",
    "gen_cz_chain",
    "gen_ghz_standard",
    "gen_intertwined",
    "gen_random",
    "h",
    "measure",
    "parse",
    "rx",
    "ry",
    "rz",
    "scoped_depth",
    "splice",
    "stats",
    "unitary",
    "validate",
    "x",
    "y",
    "z",
]
