"""Robust contracts for delegated Pandora's box search."""
from .adversary import AdversaryGrid, GuaranteeReport, brute_force_guarantee, guarantee, safe_project_infimum
from .contracts import (IDENTITY_CONTRACT, Contract, diversion_proof, emit_plot_data, eval_contract,
                        expected_wage, satisfies_mdl, structure)
from .designer import (EfficiencyReport, MoralHazardDesign, MultiAgentPlan, OptimalityVerdict,
                       RiskAverseDesign, capped_earnout, classify_optimal, debt_plus_equity,
                       design_moral_hazard, design_risk_averse, diversion_best_response,
                       efficiency_report, plan_multi_agent, pure_debt)
from .domain import (IDENTITY, Distribution, Project, UtilityFn, discretize, expected_excess,
                     make_distribution, make_project, point_mass)
from .errors import *  # noqa: F401,F403
from .indices import IndexResult, index, induced_index
from .search import (PayoffReport, SimulationEstimate, evaluate_exact, evaluate_resampling,
                     planner_value, simulate)

__version__ = "0.1.0"
