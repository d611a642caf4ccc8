"""Exact Walsh-Fourier tools for low-degree determinacy of Boolean functions."""

from .collision import (
    AnnealParams,
    CensusReport,
    CollisionWitness,
    collide_anneal,
    collide_census,
    collide_exact,
    verify_witness,
)
from .competitor import (
    CompetitorResult,
    CompetitorWitness,
    LPVerificationError,
    SignCertificate,
    max_competitor,
    sign_certificate,
    verify_competitor,
)
from .core import (
    BooleanFunction,
    LowFrequencyData,
    Spectrum,
    TruncationResult,
    low_frequency_data,
    parse_wbf,
    read_wbf,
    spectrum,
    truncate,
    wht,
)
from .determinacy import (
    BoundsReport,
    UniquenessCertificate,
    binomial_cumulative,
    certify_unique,
    hoeffding_tail,
    probability_bounds,
    rademacher_tail,
    thresholds,
)
from .experiments import SweepCell, SweepConfig, emit_csv, run_sweep, sample_function
from .svg import emit_svg

__all__ = [
    "AnnealParams", "BooleanFunction", "BoundsReport", "CensusReport", "CollisionWitness",
    "CompetitorResult", "CompetitorWitness", "LPVerificationError", "LowFrequencyData",
    "SignCertificate", "Spectrum", "SweepCell", "SweepConfig", "TruncationResult",
    "UniquenessCertificate", "binomial_cumulative", "certify_unique", "collide_anneal",
    "collide_census", "collide_exact", "emit_csv", "emit_svg", "hoeffding_tail",
    "low_frequency_data", "max_competitor", "parse_wbf", "probability_bounds",
    "rademacher_tail", "read_wbf", "run_sweep", "sample_function", "sign_certificate",
    "spectrum", "thresholds", "truncate", "verify_competitor", "verify_witness", "wht",
]
