"""Sign-free minor patterns of symmetric matrices over exact fields."""

from __future__ import annotations

from .exactfield import QQ, FieldSpec, Scalar
from .minorseq import CharSeq, Letter, ap_rank, apr_sequence, epr_sequence, qpr_sequence
from .symmatrix import IndexSet, SymMatrix, det, rank

__all__ = [
    "QQ", "FieldSpec", "Scalar", "CharSeq", "Letter", "ap_rank", "apr_sequence",
    "epr_sequence", "qpr_sequence", "IndexSet", "SymMatrix", "det", "rank",
]
__version__ = "0.1.0"
