"""Gabor frame bounds on lattices in the time-frequency plane."""
from .frame_bounds import (
    FrameBoundsResult,
    JanssenSeries,
    PhaseModeError,
    ScanRow,
    TheoremReport,
    default_shape_grid,
    frame_bounds_gram,
    frame_bounds_janssen,
    gram_section,
    janssen_coefficients,
    janssen_separable,
    result_to_json,
    scan_lattices,
    scan_to_csv,
    verify_theorem_main,
)
from .lattice import (
    Lattice,
    LatticeError,
    PhaseSpacePoint,
    SymplecticCheck,
    adjoint_lattice,
    dual_lattice,
    enumerate_indices,
    enumerate_points,
    fundamental_domain_grid,
    hexagonal_lattice,
    is_symplectic_lattice,
    is_symplectic_matrix,
    same_point_set,
    shape_lattice,
    square_lattice,
    symplectic_form,
    symplectic_matrix,
)
from .phase_space import (
    GridError,
    PhaseSpaceFunctionSample,
    ambiguity,
    dilate,
    read_sample,
    stft,
    symplectic_fourier,
    tabulate,
    wigner,
    wigner_via_ambiguity,
    write_sample,
)
from .quadrature import QuadratureError
from .summation import (
    ConvergenceError,
    LatticeSumResult,
    exact_sum,
    gaussian_function,
    lattice_sum,
    phi_series,
    poisson_check,
    symplectic_poisson_check,
    vanishing_sum_check,
)
from .windows import (
    Window,
    WindowError,
    gaussian_window,
    hermite_function,
    hermite_window,
    parse_window_spec,
    read_window_csv,
    reflect,
    sampled_window,
)

__version__ = "0.1.0"
