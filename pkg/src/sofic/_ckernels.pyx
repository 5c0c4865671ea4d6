# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Mirrors ``_pykernels`` exactly, including output order."""
from libc.stdlib cimport malloc, free

NAME = "cython"


cdef bint _next_permutation(int* x, int n) noexcept nogil:
    cdef int i = n - 2, j, t
    while i >= 0 and x[i] > x[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while x[j] < x[i]:
        j -= 1
    t = x[i]; x[i] = x[j]; x[j] = t
    i += 1
    j = n - 1
    while i < j:
        t = x[i]; x[i] = x[j]; x[j] = t
        i += 1
        j -= 1
    return True


def count_square_roots(y):
    cdef int n = len(y), i
    cdef long long count = 0
    cdef int* x = <int*> malloc(n * sizeof(int))
    cdef int* yy = <int*> malloc(n * sizeof(int))
    if x == NULL or yy == NULL:
        free(x); free(yy)
        raise MemoryError()
    try:
        for i in range(n):
            x[i] = i
            yy[i] = y[i]
        with nogil:
            while True:
                for i in range(n):
                    if x[x[i]] != yy[i]:
                        break
                else:
                    count += 1
                if not _next_permutation(x, n):
                    break
    finally:
        free(x)
        free(yy)
    return int(count)


def near_commuting(int n, int max_defects, bint square):
    out = []
    if max_defects < 0:
        return out
    cdef int i, v, defects
    cdef int* w = <int*> malloc(n * sizeof(int))
    cdef int* f = <int*> malloc(n * sizeof(int))
    if w == NULL or f == NULL:
        free(w); free(f)
        raise MemoryError()
    try:
        for i in range(n):
            w[i] = i
        while True:
            for i in range(n):
                f[i] = w[w[i]] if square else w[i]
            defects = 0
            for v in range(n):
                if (f[v] + 1) % n != f[(v + 1) % n]:
                    defects += 1
                    if defects > max_defects:
                        break
            if defects <= max_defects:
                out.append(tuple([w[i] for i in range(n)]))
            if not _next_permutation(w, n):
                break
    finally:
        free(w)
        free(f)
    return out


def min_boundary_ratio(a, c, int max_size):
    cdef int n = len(a)
    if max_size < 1:
        return None
    if n > 62:
        raise ValueError("bitmask enumeration supports n <= 62")
    cdef int i, v, u, t, sv, delta
    cdef long long boundary = 0, size = 0
    cdef long long best_b = -1, best_s = 1
    cdef unsigned long long k, total = (<unsigned long long> 1) << n, mask, best_mask = 0
    cdef int nb[4]
    cdef int* aa = <int*> malloc(4 * n * sizeof(int))
    cdef char* s = <char*> malloc(n * sizeof(char))
    if aa == NULL or s == NULL:
        free(aa); free(s)
        raise MemoryError()
    try:
        for i in range(n):
            s[i] = 0
            aa[4 * i] = a[i]
            aa[4 * i + 2] = c[i]
        for i in range(n):
            aa[4 * <int> a[i] + 1] = i
            aa[4 * <int> c[i] + 3] = i
        with nogil:
            k = 1
            while k < total:
                v = 0
                mask = k
                while (mask & 1) == 0:
                    mask >>= 1
                    v += 1
                sv = s[v]
                delta = 0
                for t in range(4):
                    u = aa[4 * v + t]
                    if u != v:
                        delta += 1 - 2 * (sv != s[u])
                boundary += delta
                s[v] = 1 - sv
                if sv == 0:
                    size += 1
                else:
                    size -= 1
                if size > 0 and size <= max_size:
                    mask = k ^ (k >> 1)
                    if best_b < 0:
                        best_b = boundary; best_s = size; best_mask = mask
                    elif boundary * best_s < best_b * size or (
                        boundary * best_s == best_b * size and mask < best_mask
                    ):
                        best_b = boundary; best_s = size; best_mask = mask
                k += 1
    finally:
        free(aa)
        free(s)
    return (int(best_b), int(best_s), int(best_mask))
