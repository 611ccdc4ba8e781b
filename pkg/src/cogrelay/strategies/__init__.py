"""Per-strategy precoder design for the cognitive two-way relay."""

from .af import af_fractional_spec, design_af
from .common import (BasisU, DecodeIndicators, PrecoderDesign, RateRequirements,
                     basis_from_matrix, build_basis, mac_region_check, parse_canceled,
                     sic_decode_indicators)
from .dfsup import design_dfsup, dfsup_fractional_spec
from .dfxor import design_dfxor, dfxor_fractional_spec
from .rates import RateReport, evaluate_rates, relay_power, sinrs

STRATEGIES = ("AF", "DF-XOR", "DF-SUP")

__all__ = [
    "BasisU", "DecodeIndicators", "PrecoderDesign", "RateReport", "RateRequirements",
    "STRATEGIES", "af_fractional_spec", "basis_from_matrix", "build_basis", "design_af",
    "design_dfsup", "design_dfxor", "dfsup_fractional_spec", "dfxor_fractional_spec",
    "evaluate_rates", "mac_region_check", "parse_canceled", "relay_power",
    "sic_decode_indicators", "sinrs",
]
