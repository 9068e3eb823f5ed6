"""Integrality-gap certificates for the association-scheme SDP relaxation of the TSP."""
from __future__ import annotations

from .errors import DomainError, ParityError, TspGapError
from .kcycle import kcycle_gap_certificate
from .tsp_sdp import CandidateSolution, SdpInstance, verify_feasibility
from .witness import gap_certificate

__version__ = "0.1.0"

__all__ = [
    "CandidateSolution",
    "DomainError",
    "ParityError",
    "SdpInstance",
    "TspGapError",
    "gap_certificate",
    "kcycle_gap_certificate",
    "verify_feasibility",
]
