"""Pure-Python/NumPy fallback for the hot evaluation kernels.

Same interface as the compiled module stratlab._speedups; selected by
stratlab._kernels when the extension is unavailable or STRATLAB_PURE is set.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure"


def eval_system(coeffs, exps, starts, x, out):
    """Evaluate a packed sparse polynomial system at one point.

    coeffs : float64[nterms]      term coefficients
    exps   : int64[nterms, nvars] term exponents
    starts : int64[ncomp + 1]     CSR-style component boundaries
    x      : float64[nvars]       evaluation point
    out    : float64[ncomp]       filled with component values
    """
    if len(coeffs):
        monomials = np.prod(np.power(x[None, :], exps), axis=1)
        values = coeffs * monomials
    else:
        values = np.zeros(0)
    for i in range(len(starts) - 1):
        out[i] = values[starts[i] : starts[i + 1]].sum()
    return out


def eval_jacobian(coeffs, exps, starts, x, out):
    """Evaluate the system Jacobian at one point into out[ncomp, nvars]."""
    nvars = exps.shape[1] if exps.ndim == 2 else len(x)
    ncomp = len(starts) - 1
    for j in range(nvars):
        mask = exps[:, j] > 0
        if not mask.any():
            out[:, j] = 0.0
            continue
        dexps = exps[mask].copy()
        dcoeffs = coeffs[mask] * dexps[:, j]
        dexps[:, j] -= 1
        monomials = np.prod(np.power(x[None, :], dexps), axis=1)
        values = dcoeffs * monomials
        # map masked term indices back to components
        idx = np.nonzero(mask)[0]
        comp = np.searchsorted(starts, idx, side="right") - 1
        col = np.zeros(ncomp)
        np.add.at(col, comp, values)
        out[:, j] = col
    return out
