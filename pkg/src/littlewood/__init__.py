"""Certified computations around Littlewood-type products: continued
fractions, pseudo-absolute values, running-minimum scans, discrepancy and
witness certificates."""

from .cf import ConvergentTable, DigitStream, as_stream, convergents, sample_FM
from .discrepancy import PointSet, discrepancy_exact, erdos_turan_bound, scaling_experiment
from .exact import PrecisionExhausted, QuadraticSurd, format_real, parse_real, surd
from .intervals import Interval
from .kernels import BACKEND
from .pseudo import ChainError, PseudoAbsSeq, pseudo_abs
from .scan import MinRecord, ProductSpec, dirichlet, hybrid, littlewood, mixed, product_value, scan_min
from .witness import (CertificateError, WitnessCertificate, verify_certificate, witnesses_eq6,
                      witnesses_eq9)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CertificateError", "ChainError", "ConvergentTable", "DigitStream", "Interval",
    "MinRecord", "PointSet", "PrecisionExhausted", "ProductSpec", "PseudoAbsSeq", "QuadraticSurd",
    "WitnessCertificate", "as_stream", "convergents", "dirichlet", "discrepancy_exact",
    "erdos_turan_bound", "format_real", "hybrid", "littlewood", "mixed", "parse_real",
    "product_value", "pseudo_abs", "sample_FM", "scaling_experiment", "scan_min", "surd",
    "verify_certificate", "witnesses_eq6", "witnesses_eq9",
]
