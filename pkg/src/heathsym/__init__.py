"""Verification toolkit for a drift-diffusion HJB-type equation and its
heat-with-source image: symmetry catalog, picture-changing transforms,
closed-form solutions, and a cross-validating finite-difference solver."""

from . import expr
from .catalog import (
    CatalogEntry,
    EntryReport,
    InadmissibleParamsError,
    UnknownEntryError,
    get_spec,
    instantiate,
    list_entries,
    match_fhat,
    verify_commutators,
    verify_entry,
)
from .lie import (
    EvolutionPDE,
    Generator,
    SymmetryReport,
    check_symmetry,
    commutator,
    invariant_surface,
    prolong2,
    solution_invariance_residual,
)
from .model import (
    CoordinateMap,
    DegenerateSourceWarning,
    HeathModel,
    HeatSourceModel,
    apply_equivalence,
    heat_to_heath,
    heath_to_heat,
    is_linearizable,
    pde_residual,
    residual_ratio_factor,
)
from .solutions import (
    BarrierSolution,
    BarrierSpec,
    ClosedFormSolution,
    SampleDomainError,
    barrier_solution,
    example_A22,
    example_A359,
    exponential_barrier,
    terminal_phi_form,
    terminal_singular_time,
    terminal_solution,
)
from .solver import (
    BarrierExitsGridError,
    ConvergenceCase,
    FieldSnapshot,
    GridSpec,
    InstabilityError,
    PositivityWarning,
    SchemeConfig,
    SolverError,
    convergence_study,
    error_norms,
    solve,
    solve_barrier,
)

__version__ = "1.0.0"

__all__ = [
    "expr",
    "CatalogEntry", "EntryReport", "InadmissibleParamsError",
    "UnknownEntryError", "get_spec", "instantiate", "list_entries",
    "match_fhat", "verify_commutators", "verify_entry",
    "EvolutionPDE", "Generator", "SymmetryReport", "check_symmetry",
    "commutator", "invariant_surface", "prolong2",
    "solution_invariance_residual",
    "CoordinateMap", "DegenerateSourceWarning", "HeathModel",
    "HeatSourceModel", "apply_equivalence", "heat_to_heath",
    "heath_to_heat", "is_linearizable", "pde_residual",
    "residual_ratio_factor",
    "BarrierSolution", "BarrierSpec", "ClosedFormSolution",
    "SampleDomainError", "barrier_solution", "example_A22", "example_A359",
    "exponential_barrier", "terminal_phi_form", "terminal_singular_time",
    "terminal_solution",
    "BarrierExitsGridError", "ConvergenceCase", "FieldSnapshot", "GridSpec",
    "InstabilityError", "PositivityWarning", "SchemeConfig", "SolverError",
    "convergence_study", "error_norms", "solve", "solve_barrier",
]
