"""identforge: identifiability queries on ODE models via transcendence-basis elimination."""

from .algebra import DEFAULT_PRIME, FpScalar, MonomialOrder, MultiPoly, Ring, format_poly
from .basis import (BasisCandidate, CandidatePool, enumerate_candidates, find_independent,
                    is_valid_basis, transcendence_degree)
from .entropy import DegreeProfile, degree_profile, entropy, select_best
from .estimators import BasisEliminator, IdentifiabilityClassifier, SystemGenerator
from .groebner import GroebnerBasis, IdentReport, buchberger, classify, export_system, normal_form
from .linalg import FpMatrix, jacobian_at, pivot_columns
from .model import OdeModel, format_model, load_bundled, load_model, parse_model, validate
from .pipeline import RunConfig, run_pipeline
from .prolongation import PolySystem, SpecializationConfig, generate_Et, system_degree
from .substitution import SubstitutionRecord, sampling_bound, substitute_basis

__all__ = [
    "DEFAULT_PRIME", "FpScalar", "MonomialOrder", "MultiPoly", "Ring", "format_poly",
    "BasisCandidate", "CandidatePool", "enumerate_candidates", "find_independent", "is_valid_basis",
    "transcendence_degree", "DegreeProfile", "degree_profile", "entropy", "select_best",
    "BasisEliminator", "IdentifiabilityClassifier", "SystemGenerator",
    "GroebnerBasis", "IdentReport", "buchberger", "classify", "export_system", "normal_form",
    "FpMatrix", "jacobian_at", "pivot_columns",
    "OdeModel", "format_model", "load_bundled", "load_model", "parse_model", "validate",
    "RunConfig", "run_pipeline", "PolySystem", "SpecializationConfig", "generate_Et", "system_degree",
    "SubstitutionRecord", "sampling_bound", "substitute_basis",
]
__version__ = "0.1.0"
