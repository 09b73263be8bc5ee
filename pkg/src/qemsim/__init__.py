"""qemsim: Cooper-pair box coupled to a harmonic mode, spectroscopy and beam design."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError, DimensionCapError, EigensolverError, ExportError, FitError, InputError,
    LabelingError, NoCrossingError, NumericalError, PopulationError, QemsimError,
    ResonanceDivergenceError,
)
from .qubit import (  # noqa: E402
    ChargeBasis, CpbParams, HermitianMatrix, QubitSpectrum, build_cpb_hamiltonian,
    charge_qubit_splitting, josephson_energy, polarization_charge, qubit_spectrum,
    transition_energy_curve,
)
from .composite import (  # noqa: E402
    CompositeSpectrum, ConvergenceReport, CouplingParams, GapResult, OscillatorParams,
    avoided_crossing_gap, bare_resonance_fluxes, build_composite_hamiltonian, composite_spectrum,
    composite_eigenvalues, convergence_report, dispersive_chi, dispersive_chi_formula,
    dispersive_chi_numeric,
)
from .spectroscopy import (  # noqa: E402
    LinearResponse, ProbeConfig, SpectroscopyMap, linear_response_spectrum, single_tone_map,
    thermal_populations, two_tone_overlay,
)
from .mechanics import (  # noqa: E402
    BeamSpec, BiasCircuit, ModeResult, beam_mode, capacitance_gradient, coupling_lambda,
    design_report, lambda_lc, lambda_max, pullin_voltage, radiative_damping, thermal_occupation,
)
from .fitting import ResonanceFit, fit_resonance  # noqa: E402
from .config import RunConfig, load_config, parse_config, validate  # noqa: E402
from .sweep import ResultTable, run_sweep  # noqa: E402
from .export import export, parse_csv, parse_json  # noqa: E402
