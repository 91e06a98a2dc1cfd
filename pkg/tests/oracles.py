"""Independent reference computations used by the tests."""
from fractions import Fraction

import numpy as np


def example_exact():
    """Example tridiagonal system in exact rational arithmetic: (A, b, x0)."""
    n = 9
    A = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = Fraction(1)
    for i in range(n - 1):
        A[i][i + 1] = A[i + 1][i] = Fraction(-1, i + 2)
    x = [Fraction(1, 10 ** (k + 1)) for k in range(n)]
    x0 = [Fraction(1), Fraction(1, 10)] + [Fraction(1001, 10 ** (k + 6)) for k in range(n - 2)]
    b = [sum(A[i][j] * x[j] for j in range(n)) for i in range(n)]
    return A, b, x0


def exact_residual(A, b, x):
    n = len(b)
    return [b[i] - sum(A[i][j] * x[j] for j in range(n)) for i in range(n)]


def dense_neighbors(a: np.ndarray, domain) -> set:
    """Brute-force scan of the stored pattern."""
    inside = set(domain)
    n = a.shape[0]
    return {j for j in range(n) if j not in inside and any(a[j, i] != 0 for i in inside)}


def brute_expand(a: np.ndarray, r0, x0, tau, domain, e_max):
    """Row-by-row loop implementation of the neighbour admission rounds."""
    omega = set(domain)
    rounds = []
    for m in range(1, e_max + 1):
        nbrs = dense_neighbors(a, omega)
        if not nbrs:
            break
        admitted = set()
        for j in sorted(nbrs):
            val = abs(r0[j]) + sum(abs(a[j, i] * x0[i]) for i in sorted(omega))
            if val > tau:
                admitted.add(j)
        rounds.append((m, nbrs, admitted))
        if not admitted:
            break
        omega |= admitted
    return omega, rounds
