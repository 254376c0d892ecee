"""Dense reference computation of the characteristic function.

Builds T~, D~ and Delta as explicit matrices (no SVD sharing with the C++
code), expands theta into Taylor coefficients by brute-force power series of
(I - Z T~*)^{-1} Z, and prints the numbers frozen in test_charfn.cpp.
"""
import itertools
from fractions import Fraction
from math import factorial

import numpy as np


def indices(d, n):
    if d == 1:
        return [(n,)]
    return [(k,) + rest for k in range(n + 1) for rest in indices(d - 1, n - k)]


def multinomial(a):
    r = factorial(sum(a))
    for x in a:
        r //= factorial(x)
    return r


def dirichlet_b(N):
    a = [Fraction(1, n + 1) for n in range(N + 1)]
    b = [Fraction(0)] * (N + 1)
    for n in range(1, N + 1):
        b[n] = a[n] - sum(b[j] * a[n - j] for j in range(1, n))
    return [float(x) for x in b]


def da_b(N):
    return [0.0, 1.0] + [0.0] * (N - 1)


def psd_sqrt(h):
    lam, v = np.linalg.eigh((h + h.conj().T) / 2)
    return (v * np.sqrt(np.clip(lam, 0, None))) @ v.conj().T


def power(ops, a):
    n = ops[0].shape[0]
    p = np.eye(n, dtype=complex)
    for t, e in zip(ops, a):
        p = p @ np.linalg.matrix_power(t, e)
    return p


def setup(ops, b, N):
    d = len(ops)
    n = ops[0].shape[0]
    alphas = [a for m in range(1, N + 1) for a in indices(d, m) if b[m] > 0]
    blocks = [np.sqrt(b[sum(a)] * multinomial(a)) * power(ops, a) for a in alphas]
    tt = np.hstack(blocks)
    K = tt.shape[1]
    delta = psd_sqrt(np.eye(n) - tt @ tt.conj().T)
    dt = psd_sqrt(np.eye(K) - tt.conj().T @ tt)
    lam, v = np.linalg.eigh(dt @ dt)
    V = v[:, lam > 1e-10]
    lam, w = np.linalg.eigh(delta @ delta)
    W = w[:, lam > 1e-10]
    return alphas, tt, delta, dt, V, W


def theta(ops, b, N, z):
    alphas, tt, delta, dt, V, W = setup(ops, b, N)
    n = ops[0].shape[0]
    zz = np.hstack([np.sqrt(b[sum(a)] * multinomial(a)) * np.prod([zi ** e for zi, e in zip(z, a)]) * np.eye(n)
                    for a in alphas])
    th = -tt + delta @ np.linalg.solve(np.eye(n) - zz @ tt.conj().T, zz @ dt)
    return W.conj().T @ th @ V


def coefficient_traces(ops, b, N):
    """trace(A_g A_g*) for |g| <= N by collecting z^g in sum_k (Z T~*)^k Z."""
    alphas, tt, delta, dt, V, W = setup(ops, b, N)
    d = len(ops)
    n = ops[0].shape[0]
    K = tt.shape[1]
    # polynomials as dict multi-index -> matrix
    Zpoly = {}
    for i, a in enumerate(alphas):
        m = np.zeros((n, K), dtype=complex)
        m[:, i * n:(i + 1) * n] = np.sqrt(b[sum(a)] * multinomial(a)) * np.eye(n)
        Zpoly[a] = m
    Bpoly = {a: m @ tt.conj().T for a, m in Zpoly.items()}

    def mul(p, q):
        out = {}
        for a, x in p.items():
            for c, y in q.items():
                s = tuple(i + j for i, j in zip(a, c))
                if sum(s) <= N:
                    out[s] = out.get(s, 0) + x @ y
        return out

    total = dict(Zpoly)
    term = dict(Zpoly)
    for _ in range(N):
        term = mul(Bpoly, term)
        for a, x in term.items():
            total[a] = total.get(a, 0) + x
    zero = tuple([0] * d)
    A = {zero: W.conj().T @ (-tt) @ V}
    for a, c in total.items():
        A[a] = W.conj().T @ delta @ c @ dt @ V
    per_degree = [0.0] * (N + 1)
    for a, x in A.items():
        m = sum(a)
        per_degree[m] += np.linalg.norm(x) ** 2 / (multinomial(a) * (factorial(m + d - 1) // (factorial(m) * factorial(d - 1))))
    return A, per_degree


def jordan(n):
    return np.eye(n, k=-1, dtype=complex)


if __name__ == "__main__":
    np.set_printoptions(precision=17)
    J = jordan(3)
    ops = [0.5 * J, 0.3 * J @ J]
    b = dirichlet_b(6)
    A, per = coefficient_traces(ops, b, 6)
    print("case1 per-degree", repr(per))
    th = theta(ops, b, 6, [0.2 + 0.1j, -0.3])
    print("case1 trace theta theta*", repr(np.linalg.norm(th) ** 2))

    T = np.array([[0.4, 0.2], [0.0, -0.3]], dtype=complex)
    b = da_b(10)
    A, per = coefficient_traces([T], b, 10)
    print("case2 per-degree", repr(per))
    th = theta([T], b, 10, [0.5j])
    print("case2 trace theta theta*", repr(np.linalg.norm(th) ** 2))
    print("case2 singular values", repr(np.linalg.svd(th, compute_uv=False)))
