# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_pykernels.py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs
from libc.stdlib cimport malloc, free

cnp.import_array()


def lhv_best_response(win):
    cdef const cnp.int8_t[:, :, :, ::1] w = np.ascontiguousarray(win, dtype=np.int8)
    cdef Py_ssize_t A = w.shape[0], B = w.shape[1], N = w.shape[2]
    cdef Py_ssize_t a, x, y, j
    cdef long long idx = 0, best_idx = 0
    cdef long best = -1, val, m, cur
    cdef long[:, ::1] t = np.zeros((N, A), dtype=np.int64)
    cdef long[::1] f = np.zeros(N, dtype=np.int64)
    cdef long[::1] direc = np.ones(N, dtype=np.int64)
    cdef long long[::1] place = np.empty(N, dtype=np.longlong)
    cdef long old, new

    place[N - 1] = 1
    for j in range(N - 2, -1, -1):
        place[j] = place[j + 1] * B
    for y in range(N):
        for x in range(N):
            for a in range(A):
                t[x, a] += w[a, 0, x, y]
    # reflected mixed-radix Gray code over Bob strategies f: one digit moves per step
    while True:
        val = 0
        for x in range(N):
            m = t[x, 0]
            for a in range(1, A):
                if t[x, a] > m:
                    m = t[x, a]
            val += m
        if val > best or (val == best and idx < best_idx):
            best = val
            best_idx = idx
        j = 0
        while j < N and not (0 <= f[j] + direc[j] < B):
            direc[j] = -direc[j]
            j += 1
        if j == N:
            break
        old = f[j]
        new = old + direc[j]
        f[j] = new
        idx += direc[j] * place[j]
        for x in range(N):
            for a in range(A):
                t[x, a] += w[a, new, x, j] - w[a, old, x, j]

    bob = np.empty(N, dtype=np.int64)
    for j in range(N):
        bob[j] = (best_idx // place[j]) % B
    alice = np.empty(N, dtype=np.int64)
    for x in range(N):
        m = -1
        for a in range(A):
            cur = 0
            for y in range(N):
                cur += w[a, bob[y], x, y]
            if cur > m:
                m = cur
                alice[x] = a
    return int(best), bob, alice


def jacobi_eigh(m, double tol=1e-15, int max_sweeps=60):
    cdef double complex[:, ::1] a = np.array(m, dtype=np.complex128, order="C")
    cdef Py_ssize_t d = a.shape[0]
    cdef double complex[:, ::1] v = np.eye(d, dtype=np.complex128)
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double r, app, aqq, tau, t, c, s, off, scale = 0.0, thresh
    cdef double complex apq, ph, cph, vpp, vpq, vqp, vqq, xp, xq

    for p in range(d):
        for q in range(d):
            scale += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
    scale = sqrt(scale)
    if d == 1 or scale == 0.0:
        return np.asarray(a).diagonal().real.copy(), np.asarray(v), 0
    thresh = (tol * scale) * (tol * scale)
    for sweep in range(1, max_sweeps + 1):
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                r = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if r == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if fabs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (fabs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                ph = apq / r
                cph = ph.conjugate()
                vpp = c
                vpq = s
                vqp = -s * cph
                vqq = c * cph
                for k in range(d):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = xp * vpp + xq * vqp
                    a[k, q] = xp * vpq + xq * vqq
                for k in range(d):
                    xp = a[p, k]
                    xq = a[q, k]
                    a[p, k] = xp * vpp.conjugate() + xq * vqp.conjugate()
                    a[q, k] = xp * vpq.conjugate() + xq * vqq.conjugate()
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(d):
                    xp = v[k, p]
                    xq = v[k, q]
                    v[k, p] = xp * vpp + xq * vqp
                    v[k, q] = xp * vpq + xq * vqq
        off = 0.0
        for p in range(d):
            for q in range(d):
                if p != q:
                    off += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
        if off <= thresh:
            w = np.asarray(a).diagonal().real.copy()
            order = np.argsort(w, kind="stable")
            return w[order].copy(), np.asarray(v)[:, order].copy(), sweep
    raise RuntimeError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


cdef int _chol(const double complex[:, ::1] x, double complex[:, ::1] l, Py_ssize_t d):
    """Lower Cholesky factor of Hermitian x into l; returns 0 if x is not positive definite."""
    cdef Py_ssize_t i, j, k
    cdef double complex s
    cdef double diag
    for i in range(d):
        for j in range(d):
            l[i, j] = 0.0
    for j in range(d):
        diag = x[j, j].real
        for k in range(j):
            diag -= l[j, k].real * l[j, k].real + l[j, k].imag * l[j, k].imag
        if not diag > 0.0:
            return 0
        l[j, j] = sqrt(diag)
        for i in range(j + 1, d):
            s = x[i, j]
            for k in range(j):
                s -= l[i, k] * l[j, k].conjugate()
            l[i, j] = s / l[j, j].real
    return 1


cdef double _min_eig(double complex[:, ::1] a, Py_ssize_t d, int max_sweeps):
    """Smallest eigenvalue of Hermitian a (destroyed) by cyclic Jacobi."""
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double r, app, aqq, tau, t, c, s, off, scale = 0.0, m
    cdef double complex apq, ph, cph, vqp, vqq, xp, xq
    for p in range(d):
        for q in range(d):
            scale += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(d):
            for q in range(d):
                if p != q:
                    off += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
        if off <= 1e-30 * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                r = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if r == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if fabs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (fabs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                ph = apq / r
                cph = ph.conjugate()
                vqp = -s * cph
                vqq = c * cph
                for k in range(d):
                    xp = a[k, p]
                    xq = a[k, q]
                    a[k, p] = xp * c + xq * vqp
                    a[k, q] = xp * s + xq * vqq
                for k in range(d):
                    xp = a[p, k]
                    xq = a[q, k]
                    a[p, k] = xp * c + xq * vqp.conjugate()
                    a[q, k] = xp * s + xq * vqq.conjugate()
                a[p, q] = 0.0
                a[q, p] = 0.0
    m = a[0, 0].real
    for p in range(1, d):
        if a[p, p].real < m:
            m = a[p, p].real
    return m


def step_to_boundary(X, dX):
    """Largest ``t`` with ``X + t dX >= 0`` for stacks (K, d, d); 0 where X is not PD."""
    cdef const double complex[:, :, ::1] x = np.ascontiguousarray(X, dtype=np.complex128)
    cdef const double complex[:, :, ::1] dx = np.ascontiguousarray(dX, dtype=np.complex128)
    cdef Py_ssize_t K = x.shape[0], d = x.shape[1]
    cdef Py_ssize_t k, i, j, m
    cdef double complex[:, ::1] l = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] w = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] g = np.zeros((d, d), dtype=np.complex128)
    cdef double complex s
    cdef double lam
    out = np.empty(K)
    cdef double[::1] o = out
    for k in range(K):
        if not _chol(x[k], l, d):
            o[k] = 0.0
            continue
        # g = L^-1 dX  (forward substitution column by column)
        for j in range(d):
            for i in range(d):
                s = dx[k, i, j]
                for m in range(i):
                    s -= l[i, m] * g[m, j]
                g[i, j] = s / l[i, i].real
        # w = g L^-H = (L^-1 g^H)^H
        for j in range(d):
            for i in range(d):
                s = g[j, i].conjugate()
                for m in range(i):
                    s -= l[i, m] * w[m, j]
                w[i, j] = s / l[i, i].real
        # w currently holds L^-1 g^H; its Hermitian part equals the target
        for i in range(d):
            for j in range(i, d):
                s = 0.5 * (w[i, j] + w[j, i].conjugate())
                w[i, j] = s
                w[j, i] = s.conjugate()
        lam = _min_eig(w, d, 60)
        o[k] = -1.0 / lam if lam < 0 else np.inf
    return out


cdef int _chol_solve(double complex[:, ::1] h, double complex[::1] b, Py_ssize_t n):
    """Solve h x = b in place (b <- x) for Hermitian PD h; h is overwritten by its factor."""
    cdef Py_ssize_t i, j, k
    cdef double diag
    cdef double complex s
    for j in range(n):
        diag = h[j, j].real
        for k in range(j):
            diag -= h[j, k].real * h[j, k].real + h[j, k].imag * h[j, k].imag
        if not diag > 0.0:
            return 0
        h[j, j] = sqrt(diag)
        for i in range(j + 1, n):
            s = h[i, j]
            for k in range(j):
                s -= h[i, k] * h[j, k].conjugate()
            h[i, j] = s / h[j, j].real
    for i in range(n):
        s = b[i]
        for k in range(i):
            s -= h[i, k] * b[k]
        b[i] = s / h[i, i].real
    for i in range(n - 1, -1, -1):
        s = b[i]
        for k in range(i + 1, n):
            s -= h[k, i].conjugate() * b[k]
        b[i] = s / h[i, i].real
    return 1


cdef int _herm_inv(double complex[:, ::1] x, double complex[:, ::1] out,
                   double complex[:, ::1] l, Py_ssize_t d):
    """Inverse of Hermitian PD x via Cholesky; returns 0 if x is not PD."""
    cdef Py_ssize_t i, j, k
    cdef double complex s
    if not _chol(x, l, d):
        return 0
    # out = L^-1 (lower triangular), then inverse = L^-H L^-1
    for j in range(d):
        for i in range(d):
            if i < j:
                out[i, j] = 0.0
            elif i == j:
                out[i, j] = 1.0 / l[i, i].real
            else:
                s = 0.0
                for k in range(j, i):
                    s -= l[i, k] * out[k, j]
                out[i, j] = s / l[i, i].real
    for i in range(d):
        for j in range(i, d):
            s = 0.0
            for k in range(j, d):
                s += out[k, i].conjugate() * out[k, j]
            x[i, j] = s
    for i in range(d):
        for j in range(i, d):
            out[i, j] = x[i, j]
            out[j, i] = x[i, j].conjugate()
        out[i, i] = out[i, i].real
    return 1


def povm_barrier(R, gap_tol, Y0, t0, double shrink=20.0, int max_newton=400):
    """Per-instance log-barrier path following for the POVM step.

    Same iteration as the numpy fallback in ``numkit.povm``; returns
    ``(Y, t, steps, status)`` with status 1 converged, 0 stuck or out of steps.
    """
    cdef const double complex[:, :, :, ::1] r = np.ascontiguousarray(R, dtype=np.complex128)
    cdef Py_ssize_t K = r.shape[0], A = r.shape[1], d = r.shape[2], n = d * d
    cdef double[::1] gt = np.array(np.broadcast_to(gap_tol, (K,)), dtype=np.float64, order="C")
    Yout = np.array(Y0, dtype=np.complex128, order="C")
    tout = np.array(t0, dtype=np.float64)
    cdef double complex[:, :, ::1] Y = Yout
    cdef double[::1] tt = tout
    steps_out = np.zeros(K, dtype=np.int64)
    status_out = np.zeros(K, dtype=np.int64)
    cdef long long[::1] steps_v = steps_out
    cdef long long[::1] status_v = status_out

    cdef double complex[:, :, ::1] Si = np.zeros((A, d, d), dtype=np.complex128)
    cdef double complex[:, :, ::1] S = np.zeros((A, d, d), dtype=np.complex128)
    cdef double complex[:, ::1] work = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] lw = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] H = np.zeros((n, n), dtype=np.complex128)
    cdef double complex[::1] rhs = np.zeros(n, dtype=np.complex128)
    cdef double complex[:, ::1] grad = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] dY = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] l2 = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] g2 = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] w2 = np.zeros((d, d), dtype=np.complex128)

    cdef Py_ssize_t k, a, i, j, l, m, p
    cdef int it, ok
    cdef double t, dec, tmax, ta, step, damped, trY, lam
    cdef double complex s

    for k in range(K):
        t = tt[k]
        it = 0
        while it < max_newton:
            it += 1
            ok = 1
            for a in range(A):
                for i in range(d):
                    for j in range(d):
                        S[a, i, j] = Y[k, i, j] - r[k, a, i, j]
                        work[i, j] = S[a, i, j]
                if not _herm_inv(work, Si[a], lw, d):
                    ok = 0
                    break
            if not ok:
                break
            for i in range(d):
                for j in range(d):
                    s = 1.0 if i == j else 0.0
                    for a in range(A):
                        s -= t * Si[a, i, j]
                    grad[i, j] = s
            # H[(i,l),(j,m)] = t sum_a Si[i,j] Si[m,l]; _chol_solve reads the lower triangle only
            for i in range(d):
                for l in range(d):
                    for j in range(i + 1):
                        for m in range(d):
                            if j * d + m > i * d + l:
                                break
                            s = 0.0
                            for a in range(A):
                                s += Si[a, i, j] * Si[a, m, l]
                            H[i * d + l, j * d + m] = t * s
            for i in range(d):
                for j in range(d):
                    rhs[i * d + j] = -grad[i, j]
            if not _chol_solve(H, rhs, n):
                break
            dec = 0.0
            for i in range(d):
                for j in range(d):
                    dY[i, j] = 0.5 * (rhs[i * d + j] + rhs[j * d + i].conjugate())
            for i in range(d):
                for j in range(d):
                    dec -= (grad[i, j] * dY[j, i]).real
            dec = dec / t
            if dec < 0.0:
                dec = 0.0
            # step to the boundary of Y - R_a >= 0 along dY.  sqrt(dec) is the
            # local norm of dY, so any step below 1/sqrt(dec) stays strictly
            # inside; 0.95 * tmax can only bind the damped step when dec > 19^2
            tmax = 1e300
            for a in range(A if dec > 361.0 else 0):
                if not _chol(S[a], l2, d):
                    tmax = 0.0
                    break
                for j in range(d):
                    for i in range(d):
                        s = dY[i, j]
                        for p in range(i):
                            s -= l2[i, p] * g2[p, j]
                        g2[i, j] = s / l2[i, i].real
                for j in range(d):
                    for i in range(d):
                        s = g2[j, i].conjugate()
                        for p in range(i):
                            s -= l2[i, p] * w2[p, j]
                        w2[i, j] = s / l2[i, i].real
                for i in range(d):
                    for j in range(i, d):
                        s = 0.5 * (w2[i, j] + w2[j, i].conjugate())
                        w2[i, j] = s
                        w2[j, i] = s.conjugate()
                lam = _min_eig(w2, d, 60)
                if lam < 0 and -1.0 / lam < tmax:
                    tmax = -1.0 / lam
            damped = 1.0 / (1.0 + sqrt(dec)) if dec > 0.25 else 1.0
            step = damped if damped < 0.95 * tmax else 0.95 * tmax
            trY = 0.0
            for i in range(d):
                for j in range(d):
                    Y[k, i, j] = Y[k, i, j] + step * dY[i, j]
                trY += Y[k, i, i].real
            if dec < 1e-2:
                if t * A * d <= gt[k] * (1.0 + fabs(trY)):
                    status_v[k] = 1
                    break
                t = t / shrink
            elif step < 1e-12:
                break
        tt[k] = t
        steps_v[k] = it
    return Yout, tout, steps_out, status_out
