"""Cooperative indoor localization via semidefinite relaxation.

Pipeline: random anchor/blind-node networks, radio-range edge sets,
empirically-modeled TOA ranging errors (AWGN + LOS/NLOS bias), a
semidefinite relaxation solved by an internal interior-point method, local
squared-residual refinement, and a Monte-Carlo harness reproducing the
standard scenario/anchors/density/NLOS experiment sweeps.
"""

from .channel import (BiasModel, ChannelKind, ChannelModel, NlosMode,
                      Propagation, RangeMeasurements, assign_nlos,
                      measure_ranges, true_distances)
from .metrics import (EmptyInput, LengthMismatch, mean_position_error,
                      per_node_errors, position_error)
from .network import (ConnectivityReport, EdgeSets, Network, build_edge_sets,
                      connectivity_report, generate_network, load_network,
                      save_network)
from .refine import RefineOptions, RefineResult, gradient, objective, refine
from .sdp import (EmptyProblem, SdpProblem, SdpSolution, SolveOptions,
                  SolveStatus, build_relaxation, extract_positions, solve_sdp)

__version__ = "0.1.0"
