"""Pure-Python kernels; the compiled ``_kernel`` module mirrors this file."""
import math
from functools import cmp_to_key


def _by_ratio_desc(x, y):
    # x, y are (num, den); compare num/den without dividing, den == 0 ranks first
    lhs = x[0] * y[1]
    rhs = y[0] * x[1]
    return -1 if lhs > rhs else (1 if lhs < rhs else 0)


_KEY = cmp_to_key(_by_ratio_desc)


def sweep(alpha, entries):
    """Best log-ratio over the vertices q in {1, e^alpha}^k, given (num, den) pairs."""
    tn = sum(e[0] for e in entries)
    td = sum(e[1] for e in entries)
    if td <= 0.0:
        return math.inf
    if tn <= 0.0 or alpha <= 0.0:
        return 0.0
    if all(d == 0.0 for n, d in entries if n > 0.0):
        return alpha
    entries = sorted(entries, key=_KEY)
    k = len(entries)
    rest_n = [0.0] * (k + 1)
    rest_d = [0.0] * (k + 1)
    for m in range(k - 1, -1, -1):
        rest_n[m] = rest_n[m + 1] + entries[m][0]
        rest_d[m] = rest_d[m + 1] + entries[m][1]
    em1 = math.expm1(alpha)
    decay = math.exp(-alpha)
    best = 0.0
    top_n = top_d = 0.0
    for m in range(k + 1):
        if m:
            top_n += entries[m - 1][0]
            top_d += entries[m - 1][1]
        a, ra = top_n / tn, rest_n[m] / tn
        b, rb = top_d / td, rest_d[m] / td
        if alpha <= 1.0:
            v = math.log1p(em1 * a) - math.log1p(em1 * b)
        else:
            v = math.log(a + decay * ra) - math.log(b + decay * rb)
        if v > best:
            best = v
    return min(best, alpha)


def accumulate_dense(alpha, d, dp):
    entries = [(float(x), float(y)) for x, y in zip(d, dp) if x > 0.0 or y > 0.0]
    if not entries:
        return math.inf
    return sweep(float(alpha), entries)


def _merge(indices, data, a0, a1, b0, b1):
    out = []
    i, j = a0, b0
    while i < a1 or j < b1:
        if j >= b1 or (i < a1 and indices[i] < indices[j]):
            out.append((data[i], 0.0))
            i += 1
        elif i >= a1 or indices[j] < indices[i]:
            out.append((0.0, data[j]))
            j += 1
        else:
            out.append((data[i], data[j]))
            i += 1
            j += 1
    return out


def pair_sup(indptr, indices, data, alpha):
    """Max over ordered row pairs (i, j), i != j, of ``sweep``; stops once alpha is reached.

    Returns ``(value, i, j)`` for the first maximizing pair in row order,
    ``(0.0, -1, -1)`` when no pair leaks.
    """
    indptr = list(indptr)
    indices = list(indices)
    data = list(data)
    alpha = float(alpha)
    n = len(indptr) - 1
    best, bi, bj = 0.0, -1, -1
    if alpha <= 0.0:
        return best, bi, bj
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            v = sweep(alpha, _merge(indices, data, indptr[i], indptr[i + 1], indptr[j], indptr[j + 1]))
            if v > best:
                best, bi, bj = v, i, j
                if best >= alpha:
                    return best, bi, bj
    return best, bi, bj
