"""Exhaustive classical-witness search against a hidden-cloning-oracle instance."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..complexity import RohcInstance, rohc_verify
from ..errors import InvalidParameters
from ..qcore import PureState

MAX_BITS = 12

Decoder = Callable[[int, int, int], "PureState | None"]


def subset_state(bits: int, ell: int, dim: int) -> PureState | None:
    """Uniform superposition over the basis states whose bit is set; None for the empty set."""
    idx = [i for i in range(min(ell, dim - 1)) if bits >> i & 1]
    if not idx:
        return None
    v = np.zeros(dim)
    v[idx] = 1.0
    return PureState.normalized(v)


def classical_witness_sweep(inst: RohcInstance, ell: int, decode: Decoder | None = None) -> dict[str, float]:
    """Best acceptance over all 2^ell classical strings decoded into witness states."""
    if not 1 <= ell <= MAX_BITS:
        raise InvalidParameters(f"ell must lie in [1, {MAX_BITS}], got {ell}")
    decode = subset_state if decode is None else decode
    best, arg, tried = 0.0, -1, 0
    for bits in range(2**ell):
        psi = decode(bits, ell, inst.dim)
        if psi is None:
            continue
        tried += 1
        p = rohc_verify(inst, psi)
        if p > best:
            best, arg = p, bits
    return {"best_acceptance": best, "best_string": float(arg), "strings_tried": float(tried), "ell": float(ell)}
