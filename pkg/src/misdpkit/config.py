"""Central tolerance policy.

Every floating-point test in the package goes through one of these knobs so
that a single override changes the whole artifact consistently.  Defaults can
be overridden per call, or globally through environment variables:

    MISDPKIT_PSD_SCALE    scale of the PSD eigenvalue tolerance
    MISDPKIT_RANK_SCALE   scale of the numerical-rank tolerance
    MISDPKIT_PURE_NUMPY   "1" disables the numba kernels (see _kernels)
"""

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # is_psd accepts lambda_min >= -psd_scale * max(1, ||A||_inf)
    psd_scale: float = 1e-8
    # num_rank counts |lambda| > rank_scale * max(1, max|lambda|)
    rank_scale: float = 1e-7
    # Jacobi converges when off-diagonal Frobenius norm < jacobi_off * ||A||_F
    jacobi_off: float = 1e-12
    jacobi_sweeps: int = 100
    # residual tolerance for linear rows over float data (integer data is exact)
    lin_feas: float = 1e-9
    # spectral-projection clustering tolerance for association schemes
    eig_group: float = 1e-7

    def psd_tol(self, inf_norm: float) -> float:
        return self.psd_scale * max(1.0, inf_norm)

    def rank_tol(self, max_abs_eig: float) -> float:
        return self.rank_scale * max(1.0, max_abs_eig)


def _from_env() -> Tolerances:
    kw = {}
    if "MISDPKIT_PSD_SCALE" in os.environ:
        kw["psd_scale"] = float(os.environ["MISDPKIT_PSD_SCALE"])
    if "MISDPKIT_RANK_SCALE" in os.environ:
        kw["rank_scale"] = float(os.environ["MISDPKIT_RANK_SCALE"])
    return Tolerances(**kw)


DEFAULT = _from_env()
