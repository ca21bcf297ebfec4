"""Independent reference computations used to freeze expected values.

Nothing here imports the package under test.
"""
from fractions import Fraction
from itertools import permutations, product
import math


def brute_corner(shifts, lam, word):
    """Lower corner of f_{w1} o ... o f_{wk}([0,1]^d), words 1-based."""
    d = len(shifts[0])
    out = [Fraction(0)] * d
    for j, i in enumerate(word):
        for c in range(d):
            out[c] += shifts[i - 1][c] * lam**j
    return tuple(out)


def brute_level_count(shifts, lam, k):
    m = len(shifts)
    return len({brute_corner(shifts, lam, w) for w in product(range(1, m + 1), repeat=k)})


def ex2_rho():
    """Perron root via the 2x2 quotient [[2,2],[2,3]]: x^2 - 5x + 2."""
    return (5 + math.sqrt(17)) / 2


def ex2_dimension():
    return math.log(ex2_rho()) / math.log(6)


def rewrite_classes(words, rules):
    """Partition words into classes closed under substring rewrites ``lhs <-> rhs``."""
    words = set(words)
    parent = {w: w for w in words}

    def find(w):
        while parent[w] != w:
            w = parent[w]
        return w

    for w in words:
        for lhs, rhs in rules:
            for src, dst in ((lhs, rhs), (rhs, lhs)):
                n = len(src)
                for pos in range(len(w) - n + 1):
                    if w[pos:pos + n] == src:
                        v = w[:pos] + dst + w[pos + n:]
                        parent[find(v)] = find(w)
    classes = {}
    for w in words:
        classes.setdefault(find(w), set()).add(w)
    return list(classes.values())


def brute_isomorphic(ma, mb):
    """Label matrices (lists of lists of tuples) isomorphic under some permutation."""
    n = len(ma)
    if n != len(mb):
        return False
    return any(all(ma[u][v] == mb[p[u]][p[v]] for u in range(n) for v in range(n))
               for p in permutations(range(n)))
