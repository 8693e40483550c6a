"""Floquet-Bloch band structure of 1D piezoelectric bilayers with shunts."""

__version__ = "0.1.0"

from .materials import (
    ElasticLayer,
    PiezoLayer,
    ShuntedCell,
    DerivedConstants,
    InvalidMaterialError,
    MaterialFileError,
    calibrated_cell,
    default_cell,
    derive_constants,
    load_material_file,
    parse_material_file,
    serialize_material_file,
)
from .quasistatic import (
    DegenerateShuntError,
    EffectiveModel,
    Regime,
    classify_regime,
    effective_model,
    special_capacitances,
)
from .transfer_matrix import (
    ResonancePoleError,
    ShuntCoefficients,
    TransferMatrix,
    m_elastic,
    m_piezo_open,
    m_piezo_shunted,
    monodromy,
    shunt_coefficients,
)
from .band_structure import (
    Branch,
    BracketError,
    DispersionSample,
    FrequencyScan,
    InsufficientSamplesError,
    NumericalError,
    StopbandInterval,
    bloch_wavenumber,
    branch_flatness,
    default_omega_max,
    detect_flat_bands,
    find_flat_capacitance,
    group_velocity,
    half_trace,
    half_trace_curvature,
    origin_slope,
    scan_frequencies,
    stopbands,
    trace_branches,
)
from .oracle_bvp import OracleSingularError, oracle_layer_matrix, oracle_layer_matrix_fd

__all__ = [
    "__version__",
    # materials
    "ElasticLayer",
    "PiezoLayer",
    "ShuntedCell",
    "DerivedConstants",
    "InvalidMaterialError",
    "MaterialFileError",
    "calibrated_cell",
    "default_cell",
    "derive_constants",
    "load_material_file",
    "parse_material_file",
    "serialize_material_file",
    # quasistatic
    "DegenerateShuntError",
    "EffectiveModel",
    "Regime",
    "classify_regime",
    "effective_model",
    "special_capacitances",
    # transfer matrices
    "ResonancePoleError",
    "ShuntCoefficients",
    "TransferMatrix",
    "m_elastic",
    "m_piezo_open",
    "m_piezo_shunted",
    "monodromy",
    "shunt_coefficients",
    # band structure
    "Branch",
    "BracketError",
    "DispersionSample",
    "FrequencyScan",
    "InsufficientSamplesError",
    "NumericalError",
    "StopbandInterval",
    "bloch_wavenumber",
    "branch_flatness",
    "default_omega_max",
    "detect_flat_bands",
    "find_flat_capacitance",
    "group_velocity",
    "half_trace",
    "half_trace_curvature",
    "origin_slope",
    "scan_frequencies",
    "stopbands",
    "trace_branches",
    # oracle
    "OracleSingularError",
    "oracle_layer_matrix",
    "oracle_layer_matrix_fd",
]
