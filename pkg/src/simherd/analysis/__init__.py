from .batch import BatchError, RunSpec, run_batch
from .ea import (
    EAConfig,
    Individual,
    WSP_GENE_LATTICES,
    WSP_GENE_NAMES,
    best_params_replay,
    ea_calibrate,
    wsp_evaluator,
)
from .saltelli import SobolProblem, saltelli_sample
from .sobol import sobol_analyze
from .stability import stability_score

__all__ = [
    "BatchError",
    "EAConfig",
    "Individual",
    "RunSpec",
    "SobolProblem",
    "WSP_GENE_LATTICES",
    "WSP_GENE_NAMES",
    "best_params_replay",
    "ea_calibrate",
    "run_batch",
    "saltelli_sample",
    "sobol_analyze",
    "stability_score",
    "wsp_evaluator",
]
