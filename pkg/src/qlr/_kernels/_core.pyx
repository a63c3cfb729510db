# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled statevector and gene-string kernels.

Qubit ``q`` of an ``nq``-qubit register lives at bit ``nq - 1 - q`` of the
basis index. Gate codes follow ``qlr.qsim.gates.KIND_CODES``.
"""
import numpy as np

from libc.math cimport cos, sin, sqrt
from libc.stdlib cimport free, malloc

ctypedef double complex cplx

KIND_NAMES = ("H", "X", "Y", "Z", "S", "Sdag", "T", "Tdag", "V", "Vdag",
              "Rx", "Ry", "Rz", "P", "Rzz", "CNOT", "CZ", "CPhase", "SWAP")

cdef enum:
    K_H = 0
    K_X = 1
    K_Y = 2
    K_Z = 3
    K_S = 4
    K_SDAG = 5
    K_T = 6
    K_TDAG = 7
    K_V = 8
    K_VDAG = 9
    K_RX = 10
    K_RY = 11
    K_RZ = 12
    K_P = 13
    K_RZZ = 14
    K_CNOT = 15
    K_CZ = 16
    K_CPHASE = 17
    K_SWAP = 18


def apply_matrix(cplx[:, ::1] psi, const cplx[:, ::1] mat, const long[::1] targets,
                 const long[::1] controls, int nq):
    """Apply ``mat`` to ``targets`` of every column of ``psi`` where all controls are 1."""
    cdef Py_ssize_t n = psi.shape[0], m = psi.shape[1]
    cdef int k = targets.shape[0]
    cdef Py_ssize_t kk = (<Py_ssize_t>1) << k
    cdef Py_ssize_t tmask = 0, cmask = 0, i, a, r, col, bit
    cdef int j
    cdef Py_ssize_t* offs = <Py_ssize_t*>malloc(kk * sizeof(Py_ssize_t))
    cdef cplx* buf = <cplx*>malloc(kk * sizeof(cplx))
    cdef cplx acc
    if offs == NULL or buf == NULL:
        free(offs)
        free(buf)
        raise MemoryError()
    try:
        for j in range(k):
            tmask |= (<Py_ssize_t>1) << (nq - 1 - targets[j])
        for j in range(controls.shape[0]):
            cmask |= (<Py_ssize_t>1) << (nq - 1 - controls[j])
        for a in range(kk):
            offs[a] = 0
            for j in range(k):
                if (a >> (k - 1 - j)) & 1:
                    offs[a] |= (<Py_ssize_t>1) << (nq - 1 - targets[j])
        with nogil:
            for i in range(n):
                if (i & tmask) != 0 or (i & cmask) != cmask:
                    continue
                for col in range(m):
                    for a in range(kk):
                        buf[a] = psi[i + offs[a], col]
                    for r in range(kk):
                        acc = 0
                        for a in range(kk):
                            acc = acc + mat[r, a] * buf[a]
                        psi[i + offs[r], col] = acc
    finally:
        free(offs)
        free(buf)


cdef inline int _base_1q(long code, double th, cplx* g) noexcept nogil:
    cdef double c = cos(0.5 * th), s = sin(0.5 * th), r = 1.0 / sqrt(2.0)
    cdef cplx I = 1j
    if code == K_H:
        g[0] = r; g[1] = r; g[2] = r; g[3] = -r
    elif code == K_X:
        g[0] = 0; g[1] = 1; g[2] = 1; g[3] = 0
    elif code == K_Y:
        g[0] = 0; g[1] = -I; g[2] = I; g[3] = 0
    elif code == K_Z:
        g[0] = 1; g[1] = 0; g[2] = 0; g[3] = -1
    elif code == K_S:
        g[0] = 1; g[1] = 0; g[2] = 0; g[3] = I
    elif code == K_SDAG:
        g[0] = 1; g[1] = 0; g[2] = 0; g[3] = -I
    elif code == K_T:
        g[0] = 1; g[1] = 0; g[2] = 0; g[3] = r + I * r
    elif code == K_TDAG:
        g[0] = 1; g[1] = 0; g[2] = 0; g[3] = r - I * r
    elif code == K_V:
        g[0] = 0.5 + 0.5 * I; g[1] = 0.5 - 0.5 * I; g[2] = 0.5 - 0.5 * I; g[3] = 0.5 + 0.5 * I
    elif code == K_VDAG:
        g[0] = 0.5 - 0.5 * I; g[1] = 0.5 + 0.5 * I; g[2] = 0.5 + 0.5 * I; g[3] = 0.5 - 0.5 * I
    elif code == K_RX:
        g[0] = c; g[1] = -I * s; g[2] = -I * s; g[3] = c
    elif code == K_RY:
        g[0] = c; g[1] = -s; g[2] = s; g[3] = c
    elif code == K_RZ:
        g[0] = c - I * s; g[1] = 0; g[2] = 0; g[3] = c + I * s
    elif code == K_P or code == K_CPHASE:
        g[0] = 1; g[1] = 0; g[2] = 0; g[3] = cos(th) + I * sin(th)
    elif code == K_CNOT:
        g[0] = 0; g[1] = 1; g[2] = 1; g[3] = 0
    elif code == K_CZ:
        g[0] = 1; g[1] = 0; g[2] = 0; g[3] = -1
    else:
        return -1
    return 0


cdef void _rows_1q(cplx* u, Py_ssize_t n, Py_ssize_t tbit, Py_ssize_t cmask,
                   const cplx* g) noexcept nogil:
    cdef Py_ssize_t i, col
    cdef cplx a, b
    cdef cplx* ri
    cdef cplx* rj
    for i in range(n):
        if (i & tbit) != 0 or (i & cmask) != cmask:
            continue
        ri = u + i * n
        rj = u + (i | tbit) * n
        for col in range(n):
            a = ri[col]
            b = rj[col]
            ri[col] = g[0] * a + g[1] * b
            rj[col] = g[2] * a + g[3] * b


cdef int _apply_gene(cplx* u, Py_ssize_t n, int nq, long code, long t, long c,
                     double th) noexcept nogil:
    cdef cplx g[4]
    cdef cplx lo, hi, tmp
    cdef cplx I = 1j
    cdef Py_ssize_t tbit = (<Py_ssize_t>1) << (nq - 1 - t)
    cdef Py_ssize_t cbit = 0, i, col
    if c >= 0:
        cbit = (<Py_ssize_t>1) << (nq - 1 - c)
    if code <= K_P:
        _base_1q(code, th, g)
        _rows_1q(u, n, tbit, cbit, g)
        return 0
    if c < 0:
        return -1
    if code == K_CNOT or code == K_CZ or code == K_CPHASE:
        _base_1q(code, th, g)
        _rows_1q(u, n, tbit, cbit, g)
        return 0
    if code == K_RZZ:
        lo = cos(0.5 * th) - I * sin(0.5 * th)
        hi = cos(0.5 * th) + I * sin(0.5 * th)
        for i in range(n):
            tmp = lo if (((i & tbit) != 0) == ((i & cbit) != 0)) else hi
            for col in range(n):
                u[i * n + col] = u[i * n + col] * tmp
        return 0
    if code == K_SWAP:
        for i in range(n):
            if (i & cbit) != 0 and (i & tbit) == 0:
                for col in range(n):
                    tmp = u[i * n + col]
                    u[i * n + col] = u[(i ^ cbit ^ tbit) * n + col]
                    u[(i ^ cbit ^ tbit) * n + col] = tmp
        return 0
    return -1


def strings_fidelity(const long[:, ::1] codes, const long[:, ::1] targets,
                     const long[:, ::1] controls, const double[:, ::1] angles,
                     int nq, const cplx[:, ::1] target):
    """Trace fidelity ``|Tr(U_t U_a^dagger)| / N`` for a batch of gene strings.

    Row ``s`` of the inputs describes string ``s``; qubits are 0-based and a
    control of -1 means none. Two-qubit kinds act on ``(control, target)``.
    """
    cdef Py_ssize_t n_str = codes.shape[0], g_len = codes.shape[1]
    cdef Py_ssize_t n = (<Py_ssize_t>1) << nq
    cdef Py_ssize_t s, g, i, j
    cdef int bad = 0
    cdef cplx tr
    out = np.empty(n_str, dtype=np.float64)
    cdef double[::1] res = out
    cdef cplx* u = <cplx*>malloc(n * n * sizeof(cplx))
    if u == NULL:
        raise MemoryError()
    try:
        with nogil:
            for s in range(n_str):
                for i in range(n * n):
                    u[i] = 0
                for i in range(n):
                    u[i * n + i] = 1
                for g in range(g_len):
                    if _apply_gene(u, n, nq, codes[s, g], targets[s, g],
                                   controls[s, g], angles[s, g]) != 0:
                        bad = 1
                tr = 0
                for i in range(n):
                    for j in range(n):
                        tr = tr + target[i, j] * u[i * n + j].conjugate()
                res[s] = sqrt(tr.real * tr.real + tr.imag * tr.imag) / n
    finally:
        free(u)
    if bad:
        raise ValueError("gene string contains an invalid gate (unknown code or missing control)")
    return out
