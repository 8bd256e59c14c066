"""Config solvability checks: dependency graph, four checks, report."""

from .brute import closure_achievements, explore_orders
from .checks import (
    CheckResult,
    VerificationReport,
    Witness,
    check_accessibility,
    check_feasibility,
    check_resource_balance,
    check_supply,
    verify,
)
from .tree import TechNode, build_tech_tree, collect_nodes, evaluate, material_adjacency

__all__ = [
    "CheckResult",
    "TechNode",
    "VerificationReport",
    "Witness",
    "build_tech_tree",
    "check_accessibility",
    "check_feasibility",
    "check_resource_balance",
    "check_supply",
    "closure_achievements",
    "collect_nodes",
    "evaluate",
    "explore_orders",
    "material_adjacency",
    "verify",
]
