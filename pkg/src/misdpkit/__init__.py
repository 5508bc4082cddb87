"""misdpkit: discrete PSD matrix theory and MISDP compilers.

Compiles binary/ternary quadratic optimization problems into mixed-integer
semidefinite programs and verifies every compiled formulation at desk scale
against brute-force combinatorial oracles.
"""

__version__ = "0.1.0"

from .linalg import SymMat, EigenResult, eigensym, is_psd, num_rank  # noqa: F401
