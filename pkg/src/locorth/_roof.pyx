# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled convex-roof refinement kernel.

Rows of ``psi`` are unnormalized decomposition vectors ``sqrt(p_i)|psi_i>``
laid out as (dim A) x (dim B) row-major. Every move mixes two rows with a
2x2 unitary, which leaves ``sum_i |psi_i><psi_i|`` unchanged.
"""
from libc.math cimport sqrt, log2, cos, sin, fabs, atan2, M_PI
from libc.stdlib cimport malloc, free

cdef extern from "complex.h" nogil:
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)

cdef int N_PHASES = 4
cdef double ACCEPT_EPS = 1e-14


cdef inline double xlog2x(double x) noexcept nogil:
    return x * log2(x) if x > 0.0 else 0.0


cdef void jacobi_eigvals(double complex* a, int d, double* out) noexcept nogil:
    # Cyclic complex Jacobi; destroys ``a``.
    cdef int sweep, p, q, k
    cdef double off, scale, apq, alpha, tau, t, c, s
    cdef double complex ph, x, y
    for sweep in range(60):
        off = 0.0
        scale = 0.0
        for p in range(d):
            scale += fabs(creal(a[p * d + p]))
            for q in range(p + 1, d):
                off += creal(a[p * d + q]) ** 2 + cimag(a[p * d + q]) ** 2
        if off <= 1e-32 * (scale * scale + 1e-300):
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = sqrt(creal(a[p * d + q]) ** 2 + cimag(a[p * d + q]) ** 2)
                if apq < 1e-300:
                    continue
                # phase-rotate q so the pivot becomes real
                ph = a[p * d + q] / apq
                for k in range(d):
                    a[k * d + q] = a[k * d + q] * conj(ph)
                    a[q * d + k] = a[q * d + k] * ph
                tau = (creal(a[q * d + q]) - creal(a[p * d + p])) / (2.0 * apq)
                if tau >= 0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(d):
                    x = a[k * d + p]
                    y = a[k * d + q]
                    a[k * d + p] = c * x - s * y
                    a[k * d + q] = s * x + c * y
                for k in range(d):
                    x = a[p * d + k]
                    y = a[q * d + k]
                    a[p * d + k] = c * x - s * y
                    a[q * d + k] = s * x + c * y
    for p in range(d):
        out[p] = creal(a[p * d + p])


cdef double term(const double complex* v, int da, int db, double complex* red,
                 double* ev) noexcept nogil:
    """p*E(v/|v|) for an unnormalized vector v with p = |v|^2."""
    cdef int i, j, k, d
    cdef double complex acc
    cdef double p = 0.0, h = 0.0, tr, det, disc, a00, a11
    if da <= db:
        d = da
        for i in range(da):
            for j in range(i, da):
                acc = 0.0
                for k in range(db):
                    acc = acc + v[i * db + k] * conj(v[j * db + k])
                red[i * d + j] = acc
                red[j * d + i] = conj(acc)
    else:
        d = db
        for i in range(db):
            for j in range(i, db):
                acc = 0.0
                for k in range(da):
                    acc = acc + conj(v[k * db + i]) * v[k * db + j]
                red[i * d + j] = acc
                red[j * d + i] = conj(acc)
    for i in range(d):
        p += creal(red[i * d + i])
    if p <= 0.0:
        return 0.0
    if d == 1:
        return 0.0
    if d == 2:
        a00 = creal(red[0])
        a11 = creal(red[3])
        tr = 0.5 * (a00 + a11)
        disc = sqrt(0.25 * (a00 - a11) * (a00 - a11)
                    + creal(red[1]) * creal(red[1]) + cimag(red[1]) * cimag(red[1]))
        ev[0] = tr + disc
        ev[1] = tr - disc
    else:
        jacobi_eigvals(red, d, ev)
    for i in range(d):
        h -= xlog2x(ev[i])
    return h + xlog2x(p)


def vector_term(double complex[::1] v, int da, int db):
    cdef int d = da if da <= db else db
    cdef double complex* red = <double complex*> malloc(d * d * sizeof(double complex))
    cdef double* ev = <double*> malloc(d * sizeof(double))
    cdef double out
    try:
        out = term(&v[0], da, db, red, ev)
    finally:
        free(red)
        free(ev)
    return out


def ensemble_value(double complex[:, ::1] psi, int da, int db):
    cdef int i
    cdef double total = 0.0
    for i in range(psi.shape[0]):
        total += vector_term(psi[i], da, db)
    return total


def refine(double complex[:, ::1] psi, int da, int db, double step, double min_step,
           double tol, int max_sweeps):
    """Pairwise-rotation pattern search, in place.

    Returns ``(value, sweeps, converged)``.
    """
    cdef int K = psi.shape[0], N = psi.shape[1]
    cdef int d = da if da <= db else db
    cdef int i, j, k, ph, sg, sweeps = 0, best_ph, best_sg
    cdef bint converged = False
    cdef double gain, best, dlt, th, c, s, ti, tj, bti, btj, value
    cdef double complex e
    cdef double complex phases[4]
    cdef double* terms = <double*> malloc(K * sizeof(double))
    cdef double complex* a = <double complex*> malloc(N * sizeof(double complex))
    cdef double complex* b = <double complex*> malloc(N * sizeof(double complex))
    cdef double complex* red = <double complex*> malloc(d * d * sizeof(double complex))
    cdef double* ev = <double*> malloc(d * sizeof(double))
    for ph in range(N_PHASES):
        phases[ph] = cos(ph * M_PI / 4) + 1j * sin(ph * M_PI / 4)
    try:
        with nogil:
            for i in range(K):
                terms[i] = term(&psi[i, 0], da, db, red, ev)
            while sweeps < max_sweeps:
                sweeps += 1
                gain = 0.0
                for i in range(K - 1):
                    for j in range(i + 1, K):
                        best = ACCEPT_EPS
                        best_ph = -1
                        best_sg = 0
                        bti = 0.0
                        btj = 0.0
                        for ph in range(N_PHASES):
                            e = phases[ph]
                            for sg in range(2):
                                th = step if sg == 0 else -step
                                c = cos(th)
                                s = sin(th)
                                for k in range(N):
                                    a[k] = c * psi[i, k] + s * e * psi[j, k]
                                    b[k] = -s * conj(e) * psi[i, k] + c * psi[j, k]
                                ti = term(a, da, db, red, ev)
                                tj = term(b, da, db, red, ev)
                                dlt = (terms[i] + terms[j]) - (ti + tj)
                                if dlt > best:
                                    best = dlt
                                    best_ph = ph
                                    best_sg = sg
                                    bti = ti
                                    btj = tj
                        if best_ph >= 0:
                            e = phases[best_ph]
                            th = step if best_sg == 0 else -step
                            c = cos(th)
                            s = sin(th)
                            for k in range(N):
                                a[k] = c * psi[i, k] + s * e * psi[j, k]
                                b[k] = -s * conj(e) * psi[i, k] + c * psi[j, k]
                            for k in range(N):
                                psi[i, k] = a[k]
                                psi[j, k] = b[k]
                            terms[i] = bti
                            terms[j] = btj
                            gain += best
                if gain < tol:
                    if step <= min_step:
                        converged = True
                        break
                    step *= 0.5
            value = 0.0
            for i in range(K):
                value += terms[i]
    finally:
        free(terms)
        free(a)
        free(b)
        free(red)
        free(ev)
    return value, sweeps, bool(converged)
