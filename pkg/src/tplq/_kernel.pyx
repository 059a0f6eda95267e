# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair-sup kernel; same algorithm and results as ``_kernel_py``."""
from libc.math cimport exp, expm1, log, log1p, INFINITY
from libc.stdlib cimport free, malloc, qsort


cdef struct Entry:
    double num
    double den


cdef int _by_ratio_desc(const void* a, const void* b) noexcept nogil:
    cdef const Entry* x = <const Entry*>a
    cdef const Entry* y = <const Entry*>b
    cdef double lhs = x.num * y.den
    cdef double rhs = y.num * x.den
    if lhs > rhs:
        return -1
    if lhs < rhs:
        return 1
    return 0


cdef double _sweep(double alpha, Entry* e, int k, double* rest_n, double* rest_d) noexcept nogil:
    cdef double tn = 0.0, td = 0.0
    cdef int m
    cdef bint disjoint = True
    for m in range(k):
        tn += e[m].num
        td += e[m].den
        if e[m].num > 0.0 and e[m].den != 0.0:
            disjoint = False
    if td <= 0.0:
        return INFINITY
    if tn <= 0.0 or alpha <= 0.0:
        return 0.0
    if disjoint:
        return alpha
    qsort(e, k, sizeof(Entry), _by_ratio_desc)
    rest_n[k] = 0.0
    rest_d[k] = 0.0
    for m in range(k - 1, -1, -1):
        rest_n[m] = rest_n[m + 1] + e[m].num
        rest_d[m] = rest_d[m + 1] + e[m].den
    cdef double em1 = expm1(alpha)
    cdef double decay = exp(-alpha)
    cdef double best = 0.0, top_n = 0.0, top_d = 0.0
    cdef double a, ra, b, rb, v
    for m in range(k + 1):
        if m:
            top_n += e[m - 1].num
            top_d += e[m - 1].den
        a = top_n / tn
        ra = rest_n[m] / tn
        b = top_d / td
        rb = rest_d[m] / td
        if alpha <= 1.0:
            v = log1p(em1 * a) - log1p(em1 * b)
        else:
            v = log(a + decay * ra) - log(b + decay * rb)
        if v > best:
            best = v
    return best if best < alpha else alpha


def accumulate_dense(double alpha, d, dp):
    cdef list xs = [float(x) for x in d]
    cdef list ys = [float(y) for y in dp]
    cdef int n = len(xs), k = 0, m
    if n != len(ys):
        raise ValueError("d and dp must have the same length")
    cdef Entry* e = <Entry*>malloc(max(n, 1) * sizeof(Entry))
    cdef double* rn = <double*>malloc((n + 1) * sizeof(double))
    cdef double* rd = <double*>malloc((n + 1) * sizeof(double))
    cdef double out
    try:
        for m in range(n):
            if xs[m] > 0.0 or ys[m] > 0.0:
                e[k].num = xs[m]
                e[k].den = ys[m]
                k += 1
        if k == 0:
            return INFINITY
        out = _sweep(alpha, e, k, rn, rd)
    finally:
        free(e)
        free(rn)
        free(rd)
    return out


def pair_sup(const long long[::1] indptr, const long long[::1] indices, const double[::1] data, double alpha):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, j, p, q, pe, qe, width = 0
    cdef int k
    cdef double v, best = 0.0
    cdef Py_ssize_t bi = -1, bj = -1
    if alpha <= 0.0 or n < 2:
        return best, bi, bj
    for i in range(n):
        if indptr[i + 1] - indptr[i] > width:
            width = indptr[i + 1] - indptr[i]
    cdef Entry* e = <Entry*>malloc((2 * width + 1) * sizeof(Entry))
    cdef double* rn = <double*>malloc((2 * width + 2) * sizeof(double))
    cdef double* rd = <double*>malloc((2 * width + 2) * sizeof(double))
    try:
        with nogil:
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    p, pe = indptr[i], indptr[i + 1]
                    q, qe = indptr[j], indptr[j + 1]
                    k = 0
                    while p < pe or q < qe:
                        if q >= qe or (p < pe and indices[p] < indices[q]):
                            e[k].num = data[p]
                            e[k].den = 0.0
                            p += 1
                        elif p >= pe or indices[q] < indices[p]:
                            e[k].num = 0.0
                            e[k].den = data[q]
                            q += 1
                        else:
                            e[k].num = data[p]
                            e[k].den = data[q]
                            p += 1
                            q += 1
                        k += 1
                    v = _sweep(alpha, e, k, rn, rd)
                    if v > best:
                        best = v
                        bi = i
                        bj = j
                        if best >= alpha:
                            break
                if best >= alpha:
                    break
    finally:
        free(e)
        free(rn)
        free(rd)
    return best, bi, bj
