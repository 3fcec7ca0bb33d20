"""Integer Morse homology: chain complexes from signed flow-line counts."""

from .chain_complex import (
    CriticalPointId,
    MorseComplex,
    SignedCount,
    build_complex,
    euler_characteristic,
    homology,
    poincare_polynomial,
)
from .int_linalg import HomologyGroup, IntMatrix, SmithDecomposition, homology_at, smith_normal_form

__all__ = [
    "CriticalPointId",
    "HomologyGroup",
    "IntMatrix",
    "MorseComplex",
    "SignedCount",
    "SmithDecomposition",
    "build_complex",
    "euler_characteristic",
    "homology",
    "homology_at",
    "poincare_polynomial",
    "smith_normal_form",
]
