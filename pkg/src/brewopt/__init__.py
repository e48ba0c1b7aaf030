"""brewopt: inverse recipe design for brewing.

Given target ABV/IBU/SRM and a bounded ingredient inventory, three
population-based optimisers (PSO, DFO, DE) search ingredient-quantity space
against a closed-form brewing-chemistry fitness model.
"""

from .chemistry import (
    BatchParams,
    BrewMetrics,
    DEFAULT_BATCH,
    RecipeFitness,
    SrmMode,
    TargetProfile,
    evaluate,
    fitness_error,
)
from .ingredients import Fermentable, Hop, Inventory, InventoryError, Yeast
from .optimizers import Algorithm, OptimizerConfig, SearchSpace, TrialRecord, run

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "BatchParams",
    "BrewMetrics",
    "DEFAULT_BATCH",
    "Fermentable",
    "Hop",
    "Inventory",
    "InventoryError",
    "OptimizerConfig",
    "RecipeFitness",
    "SearchSpace",
    "SrmMode",
    "TargetProfile",
    "TrialRecord",
    "Yeast",
    "evaluate",
    "fitness_error",
    "run",
    "__version__",
]
