"""Pure numpy versions of the compiled kernels (same signatures and semantics)."""
from __future__ import annotations

import numpy as np


def apply_matrix(psi, mat, targets, controls, nq):
    m = psi.shape[1]
    view = psi.reshape((2,) * nq + (m,))
    targets = [int(t) for t in targets]
    controls = [int(c) for c in controls]
    idx = [slice(None)] * (nq + 1)
    for c in controls:
        idx[c] = 1
    sub = view[tuple(idx)]
    remaining = [q for q in range(nq) if q not in controls]
    axes = [remaining.index(q) for q in targets]
    k = len(targets)
    g = np.asarray(mat).reshape((2,) * (2 * k))
    res = np.tensordot(g, sub, axes=(list(range(k, 2 * k)), axes))
    sub[...] = np.moveaxis(res, list(range(k)), axes)


def strings_fidelity(codes, targets, controls, angles, nq, target):
    from ..qsim.gates import KIND_CODES, TWO_QUBIT_KINDS, arity, gate_matrix

    n = 1 << nq
    out = np.empty(codes.shape[0])
    for s in range(codes.shape[0]):
        u = np.eye(n, dtype=complex)
        for g in range(codes.shape[1]):
            kind = KIND_CODES[codes[s, g]]
            t, c = int(targets[s, g]), int(controls[s, g])
            mat = gate_matrix(kind, (angles[s, g],) if arity(kind) else ())
            if kind in TWO_QUBIT_KINDS:
                if c < 0:
                    raise ValueError(
                        "gene string contains an invalid gate (unknown code or missing control)"
                    )
                apply_matrix(u, mat, [c, t], [], nq)
            else:
                apply_matrix(u, mat, [t], [c] if c >= 0 else [], nq)
        out[s] = abs(np.sum(target * u.conj())) / n
    return out
