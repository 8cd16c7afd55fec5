# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: cyclic Jacobi eigensolver and counter-based path samplers.

Stream consumption is identical to :mod:`feynlab._pykernels`.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt, cos, sin, fabs, INFINITY, M_PI
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

BACKEND = "compiled"

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double TWO_M53 = 1.1102230246251565e-16


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline uint64_t stream_key(uint64_t seed, uint64_t stream) noexcept nogil:
    return mix64(seed ^ mix64((stream + 1) * GAMMA))


cdef inline double unit(uint64_t key, uint64_t counter) noexcept nogil:
    return <double>((mix64(key + (counter + 1) * GAMMA) >> 11) + 1) * TWO_M53


cdef inline double _abs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef double _offnorm_c(double complex[:, ::1] A) noexcept nogil:
    cdef Py_ssize_t p, q, n = A.shape[0]
    cdef double off = 0.0
    for p in range(n):
        for q in range(p + 1, n):
            off += _abs2(A[p, q])
    return sqrt(2.0 * off)


cdef double _offnorm_r(double[:, ::1] A) noexcept nogil:
    cdef Py_ssize_t p, q, n = A.shape[0]
    cdef double off = 0.0
    for p in range(n):
        for q in range(p + 1, n):
            off += A[p, q] * A[p, q]
    return sqrt(2.0 * off)


cdef inline bint _angle(double app, double aqq, double r, double* t_out) noexcept nogil:
    # rotation that annihilates a real off-diagonal r; False when r is negligible
    cdef double tau
    if r == 0.0 or r <= 1e-18 * (fabs(app) + fabs(aqq)) or r < 1e-290:
        return False
    tau = (aqq - app) / (2.0 * r)
    if tau >= 0.0:
        t_out[0] = 1.0 / (tau + sqrt(1.0 + tau * tau))
    else:
        t_out[0] = -1.0 / (-tau + sqrt(1.0 + tau * tau))
    return True


cdef int _jacobi_c(double complex[:, ::1] A, double complex[:, ::1] Vt, double tol,
                   int max_sweeps) noexcept nogil:
    # Vt holds eigenvectors as rows; A is kept exactly Hermitian by mirroring rows
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t p, q, k
    cdef double app, aqq, r, t, c, s, scale = 0.0
    cdef double complex apq, ph, cph, x, y
    cdef int sweep, rotated
    for p in range(n):
        for q in range(n):
            scale += _abs2(A[p, q])
    scale = sqrt(scale)
    for sweep in range(max_sweeps):
        if _offnorm_c(A) <= tol * scale:
            return sweep
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = sqrt(_abs2(apq))
                app = A[p, p].real
                aqq = A[q, q].real
                if not _angle(app, aqq, r, &t):
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    continue
                rotated += 1
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                ph = apq.conjugate() / r
                ph = ph / sqrt(_abs2(ph))
                cph = ph.conjugate()
                # rows of G^H A with G = [[c, s], [-s ph, c ph]]
                for k in range(n):
                    x = A[p, k]
                    y = A[q, k]
                    A[p, k] = c * x - s * cph * y
                    A[q, k] = s * x + c * cph * y
                for k in range(n):
                    if k != p and k != q:
                        A[k, p] = A[p, k].conjugate()
                        A[k, q] = A[q, k].conjugate()
                A[p, p] = app - t * r
                A[q, q] = aqq + t * r
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    x = Vt[p, k]
                    y = Vt[q, k]
                    Vt[p, k] = c * x - s * ph * y
                    Vt[q, k] = s * x + c * ph * y
        if rotated == 0:
            return sweep + 1
    return max_sweeps


cdef int _jacobi_r(double[:, ::1] A, double[:, ::1] Vt, double tol,
                   int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t p, q, k
    cdef double app, aqq, apq, r, t, c, s, sg, x, y, scale = 0.0
    cdef int sweep, rotated
    for p in range(n):
        for q in range(n):
            scale += A[p, q] * A[p, q]
    scale = sqrt(scale)
    for sweep in range(max_sweeps):
        if _offnorm_r(A) <= tol * scale:
            return sweep
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = fabs(apq)
                app = A[p, p]
                aqq = A[q, q]
                if not _angle(app, aqq, r, &t):
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    continue
                rotated += 1
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                sg = 1.0 if apq > 0.0 else -1.0
                for k in range(n):
                    x = A[p, k]
                    y = A[q, k]
                    A[p, k] = c * x - s * sg * y
                    A[q, k] = s * x + c * sg * y
                for k in range(n):
                    if k != p and k != q:
                        A[k, p] = A[p, k]
                        A[k, q] = A[q, k]
                A[p, p] = app - t * r
                A[q, q] = aqq + t * r
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    x = Vt[p, k]
                    y = Vt[q, k]
                    Vt[p, k] = c * x - s * sg * y
                    Vt[q, k] = s * x + c * sg * y
        if rotated == 0:
            return sweep + 1
    return max_sweeps


def jacobi_eigh(a, double tol=-1.0, int max_sweeps=60):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Real symmetric input is diagonalised in real arithmetic.  Returns
    ``(eigenvalues, eigenvectors, sweeps)`` with eigenvalues unsorted and
    eigenvectors as columns.
    """
    a = np.asarray(a)
    cdef Py_ssize_t n = a.shape[0]
    cdef int sweeps
    cdef double complex[:, ::1] Ac, Vc
    cdef double[:, ::1] Ar, Vr
    if tol < 0.0:
        tol = 4.0 * max(n, 1) * 2.220446049250313e-16
    if not np.iscomplexobj(a) or not np.any(a.imag):
        Ar = np.array(a.real, dtype=np.float64, order="C", copy=True)
        Vr = np.eye(n, dtype=np.float64)
        with nogil:
            sweeps = _jacobi_r(Ar, Vr, tol, max_sweeps)
        A_out, V_out = np.asarray(Ar), np.asarray(Vr)
    else:
        Ac = np.array(a, dtype=np.complex128, order="C", copy=True)
        Vc = np.eye(n, dtype=np.complex128)
        with nogil:
            sweeps = _jacobi_c(Ac, Vc, tol, max_sweeps)
        A_out, V_out = np.asarray(Ac), np.asarray(Vc)
    return A_out.diagonal().real.copy(), V_out.T.copy(), sweeps


def normals(uint64_t seed, uint64_t stream0, Py_ssize_t n_streams, Py_ssize_t count):
    """Standard normals, shape ``(n_streams, count)``; stream ``stream0 + i`` fills row ``i``."""
    cdef Py_ssize_t pairs = (count + 1) // 2
    out_arr = np.empty((n_streams, 2 * pairs), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef uint64_t key
    cdef double u1, u2, r, th
    with nogil:
        for i in range(n_streams):
            key = stream_key(seed, stream0 + i)
            for j in range(pairs):
                u1 = unit(key, 2 * j)
                u2 = unit(key, 2 * j + 1)
                r = sqrt(-2.0 * log(u1))
                th = 2.0 * M_PI * u2
                out[i, 2 * j] = r * cos(th)
                out[i, 2 * j + 1] = r * sin(th)
    return out_arr[:, :count]


def markov_paths(cum_in, exit_in, int64_t x0, double t, uint64_t seed, uint64_t stream0,
                 Py_ssize_t n_paths, query_in):
    """Sample jump paths of a (sub-)Markov chain and report states at ``query_times``.

    ``cum[j]`` is the cumulative jump distribution out of state ``j`` over targets
    ``0..n-1`` followed by the cemetery ``n``.  Returns ``(states, jumps, zeta)``;
    a killed path reports state ``-1`` from its killing time on and ``zeta`` is
    ``inf`` for paths alive at the horizon.
    """
    cdef double[:, ::1] cum = np.ascontiguousarray(cum_in, dtype=np.float64)
    cdef double[::1] exit_rate = np.ascontiguousarray(exit_in, dtype=np.float64)
    cdef double[::1] qt = np.ascontiguousarray(query_in, dtype=np.float64)
    cdef Py_ssize_t n = cum.shape[0]
    cdef Py_ssize_t nq = qt.shape[0]
    states_arr = np.empty((n_paths, nq), dtype=np.int64)
    jumps_arr = np.zeros(n_paths, dtype=np.int64)
    zeta_arr = np.full(n_paths, np.inf)
    cdef int64_t[:, ::1] states = states_arr
    cdef int64_t[::1] jumps = jumps_arr
    cdef double[::1] zeta = zeta_arr
    cdef Py_ssize_t p, qi, target
    cdef uint64_t key, ctr
    cdef int64_t st
    cdef double time, rate, nxt, u2
    cdef bint killed
    with nogil:
        for p in range(n_paths):
            key = stream_key(seed, stream0 + p)
            st = x0
            time = 0.0
            ctr = 0
            qi = 0
            killed = False
            while True:
                rate = exit_rate[st]
                if rate > 0.0:
                    nxt = time + (-log(unit(key, 2 * ctr)) / rate)
                else:
                    nxt = INFINITY
                while qi < nq and qt[qi] < nxt:
                    states[p, qi] = st
                    qi += 1
                if nxt > t:
                    break
                u2 = unit(key, 2 * ctr + 1)
                target = 0
                while target < n and cum[st, target] < u2:
                    target += 1
                jumps[p] += 1
                if target == n:
                    zeta[p] = nxt
                    killed = True
                    break
                st = target
                time = nxt
                ctr += 1
            while qi < nq:
                states[p, qi] = -1 if killed else st
                qi += 1
    return states_arr, jumps_arr, zeta_arr


def telegraph(double a, double t, uint64_t seed, uint64_t stream0, Py_ssize_t n, sign_in):
    """Sample ``tau_t = int_0^t (-1)^{N_s} ds`` for a Poisson clock of intensity ``a``.

    Returns ``(tau, signs, counts)`` where ``signs[i, j] = (-1)^{N_{s_j}}``.
    """
    cdef double[::1] st = np.ascontiguousarray(sign_in, dtype=np.float64)
    cdef Py_ssize_t ns = st.shape[0]
    tau_arr = np.zeros(n)
    signs_arr = np.ones((n, ns), dtype=np.int8)
    counts_arr = np.zeros(n, dtype=np.int64)
    if a <= 0.0:
        tau_arr[:] = t
        return tau_arr, signs_arr, counts_arr
    cdef double[::1] tau = tau_arr
    cdef signed char[:, ::1] signs = signs_arr
    cdef int64_t[::1] counts = counts_arr
    cdef Py_ssize_t i, j
    cdef uint64_t key, ctr
    cdef double pos, sgn, nxt
    with nogil:
        for i in range(n):
            key = stream_key(seed, stream0 + i)
            pos = 0.0
            sgn = 1.0
            ctr = 0
            while True:
                nxt = pos + (-log(unit(key, ctr)) / a)
                if nxt >= t:
                    tau[i] += sgn * (t - pos)
                    break
                tau[i] += sgn * (nxt - pos)
                for j in range(ns):
                    if st[j] >= nxt:
                        signs[i, j] = -signs[i, j]
                sgn = -sgn
                pos = nxt
                counts[i] += 1
                ctr += 1
    return tau_arr, signs_arr, counts_arr
