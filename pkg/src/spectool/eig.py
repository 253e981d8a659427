"""Dense complex eigenvalue machinery.

Eigenvalues of general complex matrices are computed by Householder
reduction to upper Hessenberg form followed by an implicit single-shift
QR iteration with Wilkinson shifts and deflation.  Hermitian eigenvalues,
singular values and Schatten norms are layered on top of the same kernel.
Closed-form characteristic-polynomial roots (n <= 4) serve as an
independent cross-check and never call the QR path.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

_ULP = float(np.finfo(np.float64).eps)


def _as_square_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def _is_tridiagonal(m: np.ndarray) -> bool:
    n = m.shape[0]
    if n <= 2:
        return True
    mask = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :]) > 1
    return not np.any(m[mask])


@dataclass
class EigenResult:
    """Eigenvalues plus optional right eigenvectors (columns of ``vectors``)."""

    values: np.ndarray
    vectors: Optional[np.ndarray]
    iterations: int
    converged: bool


@njit(cache=True)
def _balance(h):
    # Parlett-Reinsch style diagonal scaling by powers of two.
    n = h.shape[0]
    d = np.ones(n)
    done = False
    while not done:
        done = True
        for i in range(n):
            r = 0.0
            c = 0.0
            for j in range(n):
                if j != i:
                    c += abs(h[j, i])
                    r += abs(h[i, j])
            if c == 0.0 or r == 0.0:
                continue
            f = 1.0
            s = c + r
            while c < r / 2.0:
                c *= 2.0
                r /= 2.0
                f *= 2.0
            while c >= r * 2.0:
                c /= 2.0
                r *= 2.0
                f /= 2.0
            if c + r < 0.95 * s:
                done = False
                d[i] *= f
                for j in range(n):
                    h[i, j] /= f
                for j in range(n):
                    h[j, i] *= f
    return d


@njit(cache=True)
def _hessenberg(h, z, want_z):
    # In-place Householder reduction; accumulates the transform into z.
    n = h.shape[0]
    v = np.zeros(n, np.complex128)
    for k in range(n - 2):
        low = 0.0
        for i in range(k + 2, n):
            low += abs(h[i, k].real) + abs(h[i, k].imag)
        if low == 0.0:
            continue
        xnorm2 = 0.0
        for i in range(k + 1, n):
            xnorm2 += h[i, k].real ** 2 + h[i, k].imag ** 2
        xnorm = math.sqrt(xnorm2)
        a0 = h[k + 1, k]
        if abs(a0) > 0.0:
            alpha = -(a0 / abs(a0)) * xnorm
        else:
            alpha = complex(-xnorm, 0.0)
        v[k + 1] = a0 - alpha
        vnorm2 = abs(v[k + 1]) ** 2
        for i in range(k + 2, n):
            v[i] = h[i, k]
            vnorm2 += abs(v[i]) ** 2
        if vnorm2 == 0.0:
            continue
        beta = 2.0 / vnorm2
        for j in range(k, n):
            w = 0.0 + 0.0j
            for i in range(k + 1, n):
                w += np.conj(v[i]) * h[i, j]
            w *= beta
            for i in range(k + 1, n):
                h[i, j] -= v[i] * w
        for i in range(n):
            w = 0.0 + 0.0j
            for j in range(k + 1, n):
                w += h[i, j] * v[j]
            w *= beta
            for j in range(k + 1, n):
                h[i, j] -= w * np.conj(v[j])
        if want_z:
            for i in range(n):
                w = 0.0 + 0.0j
                for j in range(k + 1, n):
                    w += z[i, j] * v[j]
                w *= beta
                for j in range(k + 1, n):
                    z[i, j] -= w * np.conj(v[j])
        h[k + 1, k] = alpha
        for i in range(k + 2, n):
            h[i, k] = 0.0


@njit(cache=True)
def _qr_hessenberg(h, z, want_z, max_sweeps, ulp):
    # Implicit single-shift QR with Wilkinson shifts, an ad-hoc exceptional
    # shift every 10 stalled sweeps, and subdiagonal deflation at
    # |h[k+1,k]| <= ulp * (|h[k,k]| + |h[k+1,k+1]|).
    n = h.shape[0]
    hnorm = 0.0
    for i in range(n):
        s = 0.0
        jlo = i - 1 if i > 0 else 0
        for j in range(jlo, n):
            s += abs(h[i, j])
        if s > hnorm:
            hnorm = s
    if hnorm == 0.0:
        return 0, True
    total = 0
    hi = n - 1
    stall = 0
    prev_lo = -1
    prev_hi = -1
    while hi > 0:
        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if s == 0.0:
                s = hnorm
            if abs(h[lo, lo - 1]) <= ulp * s:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            stall = 0
            prev_lo = -1
            continue
        if lo != prev_lo or hi != prev_hi:
            stall = 0
            prev_lo = lo
            prev_hi = hi
        if total >= max_sweeps:
            return total, False
        total += 1
        stall += 1
        a = h[hi - 1, hi - 1]
        b = h[hi - 1, hi]
        c = h[hi, hi - 1]
        d = h[hi, hi]
        if stall % 10 == 0:
            mu = d + 0.75 * abs(c)
        else:
            tr = a + d
            det = a * d - b * c
            disc = np.sqrt(tr * tr - 4.0 * det)
            r1 = 0.5 * (tr + disc)
            r2 = 0.5 * (tr - disc)
            mu = r1 if abs(r1 - d) <= abs(r2 - d) else r2
        x = h[lo, lo] - mu
        y = h[lo + 1, lo]
        for k in range(lo, hi):
            ax = abs(x)
            ay = abs(y)
            if ay == 0.0:
                cc = 1.0
                ss = 0.0 + 0.0j
            elif ax == 0.0:
                cc = 0.0
                ss = 1.0 + 0.0j
            else:
                r = math.hypot(ax, ay)
                cc = ax / r
                ss = (x / ax) * np.conj(y) / r
            jlo = k - 1 if k > lo else lo
            for j in range(jlo, n):
                t1 = h[k, j]
                t2 = h[k + 1, j]
                h[k, j] = cc * t1 + ss * t2
                h[k + 1, j] = -np.conj(ss) * t1 + cc * t2
            imax = k + 2 if k + 2 < hi else hi
            for i in range(imax + 1):
                t1 = h[i, k]
                t2 = h[i, k + 1]
                h[i, k] = cc * t1 + np.conj(ss) * t2
                h[i, k + 1] = -ss * t1 + cc * t2
            if want_z:
                for i in range(n):
                    t1 = z[i, k]
                    t2 = z[i, k + 1]
                    z[i, k] = cc * t1 + np.conj(ss) * t2
                    z[i, k + 1] = -ss * t1 + cc * t2
            if k < hi - 1:
                x = h[k + 1, k]
                y = h[k + 2, k]
    return total, True


@njit(cache=True)
def _triangular_vectors(t, z, ulp):
    # Back-substitution on the triangular factor, mapped through the
    # accumulated Schur basis z.  Near-zero pivots are regularized at
    # ulp scale so repeated eigenvalues yield usable (possibly parallel)
    # vectors instead of NaNs.
    n = t.shape[0]
    tnorm = 0.0
    for i in range(n):
        for j in range(i, n):
            a = abs(t[i, j])
            if a > tnorm:
                tnorm = a
    if tnorm == 0.0:
        tnorm = 1.0
    small = ulp * tnorm
    vecs = np.zeros((n, n), np.complex128)
    y = np.zeros(n, np.complex128)
    for m in range(n):
        lam = t[m, m]
        for i in range(n):
            y[i] = 0.0
        y[m] = 1.0
        for i in range(m - 1, -1, -1):
            s = 0.0 + 0.0j
            for j in range(i + 1, m + 1):
                s += t[i, j] * y[j]
            den = t[i, i] - lam
            if abs(den) < small:
                den = complex(small, 0.0)
            y[i] = -s / den
            ay = abs(y[i])
            if ay > 1e120:
                for j in range(i, m + 1):
                    y[j] /= ay
        nrm = 0.0
        for r in range(n):
            acc = 0.0 + 0.0j
            for j in range(m + 1):
                acc += z[r, j] * y[j]
            vecs[r, m] = acc
            nrm += acc.real ** 2 + acc.imag ** 2
        nrm = math.sqrt(nrm)
        if nrm > 0.0:
            for r in range(n):
                vecs[r, m] /= nrm
    return vecs


def eig_general(a, tol: float = 1e-9, max_iter: int = 0,
                compute_vectors: bool = False, balance=None) -> EigenResult:
    """Eigenvalues (and optionally right eigenvectors) of a complex matrix.

    Parameters
    ----------
    a : array_like
        Square complex matrix with finite entries.
    tol : float
        Residual acceptance threshold: with vectors requested, the result
        is flagged converged only if ``||A v - lambda v|| <= tol * ||A||``
        for every returned pair.  The QR deflation itself always runs at
        ulp scale.
    max_iter : int
        Sweep budget for the QR iteration; 0 selects ``30 * n``.  On
        exhaustion the result is returned with ``converged=False`` rather
        than silently truncated.
    compute_vectors : bool
        Also accumulate the Schur basis and back-substitute eigenvectors.
    balance : bool or None
        Diagonal similarity scaling before reduction.  ``None`` applies it
        except for tridiagonal inputs, which are already well scaled.
    """
    m = _as_square_matrix(a)
    n = m.shape[0]
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if n == 1:
        vec = np.ones((1, 1), np.complex128) if compute_vectors else None
        return EigenResult(m.diagonal().copy(), vec, 0, True)
    sweeps = int(max_iter) if max_iter else 30 * n
    h = m.copy()
    if balance is None:
        balance = not _is_tridiagonal(m)
    d = _balance(h) if balance else np.ones(n)
    want_z = bool(compute_vectors)
    z = np.eye(n, dtype=np.complex128) if want_z else np.zeros((1, 1), np.complex128)
    _hessenberg(h, z, want_z)
    its, ok = _qr_hessenberg(h, z, want_z, sweeps, _ULP)
    values = h.diagonal().copy()
    if not ok:
        return EigenResult(values, None, its, False)
    vectors = None
    converged = True
    if compute_vectors:
        vecs = _triangular_vectors(np.triu(h), z, _ULP)
        if balance:
            vecs = vecs * d[:, None]
            norms = np.linalg.norm(vecs, axis=0)
            norms[norms == 0.0] = 1.0
            vecs = vecs / norms[None, :]
        anorm = max(float(np.linalg.norm(m)), np.finfo(float).tiny)
        residuals = np.linalg.norm(m @ vecs - vecs * values[None, :], axis=0)
        converged = bool(np.all(residuals <= tol * anorm))
        vectors = vecs
    return EigenResult(values, vectors, its, converged)


def eig_hermitian(a) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending.

    Rejects inputs that deviate from ``A == A*`` by more than
    ``1e-12 * max|A|``.
    """
    m = _as_square_matrix(a)
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > 1e-12 * max(scale, 1.0):
        raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e})")
    sym = 0.5 * (m + m.conj().T)
    res = eig_general(sym, balance=False)
    if not res.converged:
        raise RuntimeError("QR iteration failed to converge on Hermitian input")
    return np.sort(res.values.real)


def singular_values(a) -> np.ndarray:
    """Singular values, descending, via the Hermitian eigenvalues of A*A.

    Adequate at desk scale; tiny singular values lose relative accuracy,
    which Schatten sums tolerate since they are dominated by the large ones.
    """
    m = _as_square_matrix(a)
    w = eig_hermitian(m.conj().T @ m)
    return np.sqrt(np.maximum(w, 0.0))[::-1].copy()


def schatten_norm(a, p) -> float:
    """Schatten p-norm ``(sum sigma_k^p)^(1/p)``; the operator norm for p=inf."""
    pf = float(p)
    if math.isnan(pf) or pf < 1.0:
        raise ValueError("p must lie in [1, inf]")
    sig = singular_values(a)
    top = float(sig[0])
    if math.isinf(pf):
        return top
    if top == 0.0:
        return 0.0
    scaled = sig / top
    return top * float(np.sum(scaled ** pf)) ** (1.0 / pf)


def _roots_quadratic(b, c):
    # z^2 + b z + c, Vieta-stabilized
    disc = np.sqrt(complex(b * b - 4.0 * c))
    if (np.conj(b) * disc).real < 0.0:
        disc = -disc
    s = -0.5 * (b + disc)
    if s == 0:
        return [0.0j, complex(-b)]
    return [complex(s), complex(c / s)]


def _roots_cubic(a, b, c):
    # z^3 + a z^2 + b z + c via Cardano, shift x = z + a/3
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    shift = -a / 3.0
    if p == 0 and q == 0:
        return [complex(shift)] * 3
    sq = np.sqrt(complex((q / 2.0) ** 2 + (p / 3.0) ** 3))
    u3a = -q / 2.0 + sq
    u3b = -q / 2.0 - sq
    u3 = u3a if abs(u3a) >= abs(u3b) else u3b
    u = complex(u3) ** (1.0 / 3.0)
    v = -p / (3.0 * u)
    w = complex(-0.5, 0.5 * math.sqrt(3.0))
    roots = []
    for k in range(3):
        wk = w ** k
        roots.append(complex(u * wk + v / wk + shift))
    return roots


def _roots_quartic(a, b, c, d):
    # z^4 + a z^3 + b z^2 + c z + d, Ferrari resolvent factorization
    p = b - 3.0 * a * a / 8.0
    q = c - a * b / 2.0 + a ** 3 / 8.0
    r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a ** 4 / 256.0
    shift = -a / 4.0
    res = _roots_cubic(-p, -4.0 * r, 4.0 * p * r - q * q)
    z0 = max(res, key=lambda t: abs(t - p))
    scale = 1.0 + abs(p) + abs(q) + abs(r)
    if abs(z0 - p) < 1e-14 * scale:
        # effectively biquadratic
        roots = []
        for t in _roots_quadratic(p, r):
            s = np.sqrt(complex(t))
            roots.extend([complex(s + shift), complex(-s + shift)])
        return roots
    w = np.sqrt(complex(z0 - p))
    h1 = q / (2.0 * w)
    roots = _roots_quadratic(w, z0 / 2.0 - h1) + _roots_quadratic(-w, z0 / 2.0 + h1)
    return [complex(z + shift) for z in roots]


def char_poly_roots_oracle(a) -> np.ndarray:
    """Eigenvalues of an n<=4 matrix from closed-form root formulas.

    Coefficients come from Newton's identities on the power traces, roots
    from the quadratic/Cardano/Ferrari formulas.  Entirely independent of
    the QR path; intended as a test oracle.
    """
    m = _as_square_matrix(a)
    n = m.shape[0]
    if n > 4:
        raise ValueError("closed-form oracle only covers n <= 4")
    if n == 1:
        return m.diagonal().copy()
    t1 = complex(np.trace(m))
    m2 = m @ m
    t2 = complex(np.trace(m2))
    e1 = t1
    e2 = (e1 * t1 - t2) / 2.0
    if n == 2:
        roots = _roots_quadratic(-e1, e2)
    elif n == 3:
        t3 = complex(np.trace(m2 @ m))
        e3 = (e2 * t1 - e1 * t2 + t3) / 3.0
        roots = _roots_cubic(-e1, e2, -e3)
    else:
        m3 = m2 @ m
        t3 = complex(np.trace(m3))
        t4 = complex(np.trace(m3 @ m))
        e3 = (e2 * t1 - e1 * t2 + t3) / 3.0
        e4 = (e3 * t1 - e2 * t2 + e1 * t3 - t4) / 4.0
        roots = _roots_quartic(-e1, e2, -e3, e4)
    return np.array(roots, dtype=np.complex128)
