"""Coalitional-game analysis of group multiuser detection in CDMA uplinks."""

__version__ = "0.1.0"

from .partition import (Coalition, CoalitionStructure, complement,  # noqa: E402
                        enumerate_structures, parse_structure, subsets)
from .channel import (ChannelGain, FadingParams, Position, draw_shadowing,  # noqa: E402
                      gain_linear, link_gain, path_loss_db, run_stream)
from .payoff import (PayoffVector, ReceivedPowers, SystemParams,  # noqa: E402
                     payoffs_for_structure, sinr_decorrelator,
                     sinr_matched_filter, total_payoff)
from .game import (DeviationWitness, StabilityReport, StructureEvaluation,  # noqa: E402
                   blocks, core, dominance_matrix, evaluate_all)
from .experiment import (Scenario, SweepResult, SweepSpec,  # noqa: E402
                         build_single_bs_scenario, build_two_bs_scenario,
                         emit_results, read_results, run_sweep)
