"""Backend selection and the packed-system wrapper used by flow integration.

The compiled Cython extension is preferred; the NumPy fallback is selected
when the extension is missing or when STRATLAB_PURE is set in the
environment.  Both backends implement the same two entry points and the test
suite checks them against each other.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pure

if os.environ.get("STRATLAB_PURE"):
    _impl = _pure
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND_NAME


def backend_name() -> str:
    return BACKEND


class PolySystem:
    """A polynomial map R^n -> R^m packed into flat arrays for fast evaluation."""

    def __init__(self, polys):
        if not polys:
            raise ValueError("empty system")
        self.nvars = polys[0].nvars
        self.ncomp = len(polys)
        coeffs = []
        exps = []
        starts = [0]
        for p in polys:
            if p.nvars != self.nvars:
                raise ValueError("nvars mismatch in system")
            for e, c in p.sorted_terms():
                coeffs.append(float(c))
                exps.append(e)
            starts.append(len(coeffs))
        self.coeffs = np.asarray(coeffs, dtype=np.float64)
        self.exps = (
            np.asarray(exps, dtype=np.int64).reshape(len(coeffs), self.nvars)
            if coeffs
            else np.zeros((0, self.nvars), dtype=np.int64)
        )
        self.starts = np.asarray(starts, dtype=np.int64)

    def eval(self, x) -> np.ndarray:
        out = np.empty(self.ncomp)
        _impl.eval_system(
            self.coeffs, self.exps, self.starts, np.asarray(x, dtype=np.float64), out
        )
        return out

    def jacobian_at(self, x) -> np.ndarray:
        out = np.empty((self.ncomp, self.nvars))
        _impl.eval_jacobian(
            self.coeffs, self.exps, self.starts, np.asarray(x, dtype=np.float64), out
        )
        return out


def eval_system_with(impl, system: PolySystem, x) -> np.ndarray:
    """Evaluate through an explicit backend module (used by tests/benchmarks)."""
    out = np.empty(system.ncomp)
    impl.eval_system(
        system.coeffs, system.exps, system.starts, np.asarray(x, dtype=np.float64), out
    )
    return out
