"""Simultaneous diagonalization via congruence (SDC) of complex symmetric matrix families."""
from sdc_engine.pencil import LinearPencil, MaxRankWitness, evaluate, max_rank_point
from sdc_engine.sdc import SdcCertificate, Verdict, decide_sdc, verify_certificate
from sdc_engine.shared.config import ToleranceConfig

__all__ = [
    "LinearPencil",
    "MaxRankWitness",
    "SdcCertificate",
    "ToleranceConfig",
    "Verdict",
    "decide_sdc",
    "evaluate",
    "max_rank_point",
    "verify_certificate",
]
