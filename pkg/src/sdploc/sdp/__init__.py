from .builder import EmptyProblem, SdpProblem, build_relaxation
from .solver import (SdpSolution, SolveOptions, SolveStatus, extract_positions,
                     solve_sdp)

__all__ = [
    "EmptyProblem", "SdpProblem", "build_relaxation",
    "SdpSolution", "SolveOptions", "SolveStatus",
    "extract_positions", "solve_sdp",
]
