"""Binary metaheuristic feature selectors sharing one sigmoid-transfer core."""

from .bat import BinaryBat
from .core import (
    Algorithm,
    RunContext,
    SelectionResult,
    SelectorConfig,
    Swarm,
    binarize,
    levy_sigma,
    levy_step,
    run_selector,
    transfer_sigmoid,
)
from .cuckoo import CuckooSearch
from .genetic import GeneticAlgorithm
from .gravity import GravitationalSearch
from .particle import ParticleSwarm
from .whale import WhaleOptimization
from .wolf import GreyWolf

ALGORITHMS = {
    cls.name: cls
    for cls in (
        GravitationalSearch,
        BinaryBat,
        CuckooSearch,
        GeneticAlgorithm,
        GreyWolf,
        ParticleSwarm,
        WhaleOptimization,
    )
}

__all__ = [
    "ALGORITHMS",
    "Algorithm",
    "BinaryBat",
    "CuckooSearch",
    "GeneticAlgorithm",
    "GravitationalSearch",
    "GreyWolf",
    "ParticleSwarm",
    "RunContext",
    "SelectionResult",
    "SelectorConfig",
    "Swarm",
    "WhaleOptimization",
    "binarize",
    "levy_sigma",
    "levy_step",
    "run_selector",
    "transfer_sigmoid",
]
