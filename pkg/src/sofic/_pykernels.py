"""Pure-Python kernels. Same signatures and output order as ``_ckernels``."""
from itertools import permutations

NAME = "python"


def count_square_roots(y):
    """Number of ``x`` in Sym(n) with ``x(x(i)) == y[i]`` for all ``i``."""
    y = tuple(y)
    n = len(y)
    count = 0
    for x in permutations(range(n)):
        for i in range(n):
            if x[x[i]] != y[i]:
                break
        else:
            count += 1
    return count


def near_commuting(n, max_defects, square):
    """All ``w`` (lexicographic order) whose commutation defect with the
    canonical n-cycle is at most ``max_defects``; with ``square`` the defect
    of ``w∘w`` is tested instead."""
    out = []
    if max_defects < 0:
        return out
    for w in permutations(range(n)):
        f = tuple(w[v] for v in w) if square else w
        defects = 0
        for v in range(n):
            if (f[v] + 1) % n != f[(v + 1) % n]:
                defects += 1
                if defects > max_defects:
                    break
        else:
            out.append(w)
    return out


def min_boundary_ratio(a, c, max_size):
    """Minimize ``(|S Δ a(S)| + |S Δ c(S)|) / |S|`` over ``0 < |S| <= max_size``.

    Returns ``(boundary, size, mask)`` of the minimizer with the smallest
    bitmask among ties, or ``None`` when ``max_size < 1``.
    """
    n = len(a)
    if max_size < 1:
        return None
    a = list(a)
    c = list(c)
    ainv = [0] * n
    cinv = [0] * n
    for i in range(n):
        ainv[a[i]] = i
        cinv[c[i]] = i
    s = [0] * n
    boundary = 0
    size = 0
    best = None
    for k in range(1, 1 << n):
        v = (k & -k).bit_length() - 1
        sv = s[v]
        delta = 0
        for u in (a[v], ainv[v], c[v], cinv[v]):
            if u != v:
                delta += 1 - 2 * (sv != s[u])
        boundary += delta
        s[v] = 1 - sv
        size += 1 if sv == 0 else -1
        if 0 < size <= max_size:
            mask = k ^ (k >> 1)
            if best is None:
                best = (boundary, size, mask)
            else:
                lhs = boundary * best[1]
                rhs = best[0] * size
                if lhs < rhs or (lhs == rhs and mask < best[2]):
                    best = (boundary, size, mask)
    return best
