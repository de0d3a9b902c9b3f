"""Real-argument elliptic integrals and Jacobi elliptic functions.

Everything is built on the arithmetic-geometric mean.  One AGM sweep per
modulus k yields the complete integrals K(k) and E(k); the Jacobi
amplitude am(u, k) is then recovered by the descending Landen
transformation, and sn, cn, dn follow from the amplitude.  The
incomplete integral of the second kind is evaluated along the same
Landen chain and extended quasi-periodically to the whole real line.

Accuracy target: 1e-12 relative for k <= 0.999.  Closer to k = 1 the
AGM still converges but K grows like log(4/k'), and the argument
reduction below loses digits proportionally to |u|; both effects are
inherent to double precision and are not worked around here.

The modulus convention is k (not the parameter m = k^2).  All functions
accept scalar or ndarray arguments u; k must be a Python float.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

_MAX_AGM_ITER = 40
# c_n below this is indistinguishable from zero at double precision
_AGM_CUTOFF = 1e-17


def _validate_modulus(k: float) -> float:
    k = float(k)
    if not (0.0 <= k < 1.0) or math.isnan(k):
        raise ValueError(f"modulus k must satisfy 0 <= k < 1, got {k!r}")
    return k


@lru_cache(maxsize=4096)
def _agm_chain(k: float):
    """AGM scale/cofactor sequences for modulus k.

    Returns (a, c, K, E) where a and c are the tuples (a_0..a_N),
    (c_0..c_N) of the AGM recursion started from a_0 = 1,
    b_0 = sqrt(1-k^2), c_0 = k, and K, E are the complete integrals.
    """
    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    c = k
    aa = [a]
    cc = [c]
    # E/K = 1 - sum 2^(n-1) c_n^2, the n = 0 term uses c_0 = k
    csum = 0.5 * c * c
    n = 0
    while cc[-1] > _AGM_CUTOFF:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        c = aa[-1] - a  # == (a_n - b_n)/2 without cancellation surprises
        n += 1
        if n > _MAX_AGM_ITER:
            raise ArithmeticError(f"AGM failed to converge for k={k!r}")
        aa.append(a)
        cc.append(c)
        csum += math.ldexp(c * c, n - 1)
    K = math.pi / (2.0 * a)
    E = K * (1.0 - csum)
    return tuple(aa), tuple(cc), K, E


def complete_K(k: float) -> float:
    """Complete elliptic integral of the first kind K(k)."""
    k = _validate_modulus(k)
    return _agm_chain(k)[2]


def complete_E(k: float) -> float:
    """Complete elliptic integral of the second kind E(k)."""
    k = _validate_modulus(k)
    return _agm_chain(k)[3]


def _reduce(u, K):
    """Reduce u modulo the 4K period.  Returns (u_red, m) with
    u = u_red + 4K*m and |u_red| <= 2K."""
    period = 4.0 * K
    if np.ndim(u) == 0:
        m = math.floor(float(u) / period + 0.5)
        return float(u) - period * m, m
    u = np.asarray(u, dtype=float)
    m = np.floor(u / period + 0.5)
    return u - period * m, m


def _amplitude_reduced(u_red, k: float):
    """Jacobi amplitude for |u_red| <= 2K via the descending Landen
    recursion.  Also returns the intermediate amplitudes phi_1..phi_N
    (needed by the second-kind integral); phis[i] corresponds to chain
    level i, phis[0] being the amplitude itself."""
    aa, cc, K, E = _agm_chain(k)
    n = len(aa) - 1
    scalar = np.ndim(u_red) == 0
    phi = (math.ldexp(1.0, n) * aa[n]) * (u_red if scalar else np.asarray(u_red))
    phis = [None] * (n + 1)
    phis[n] = phi
    for i in range(n, 0, -1):
        ratio = cc[i] / aa[i]
        if scalar:
            t = ratio * math.sin(phi)
            t = 1.0 if t > 1.0 else (-1.0 if t < -1.0 else t)
            phi = 0.5 * (phi + math.asin(t))
        else:
            phi = 0.5 * (phi + np.arcsin(np.clip(ratio * np.sin(phi), -1.0, 1.0)))
        phis[i - 1] = phi
    return phis


def jacobi(u, k: float):
    """Jacobi amplitude and elliptic functions at (u, k).

    Returns (am, sn, cn, dn).  sn = sin(am), cn = cos(am),
    dn = sqrt(1 - k^2 sn^2) which is positive throughout for k < 1.
    The argument is reduced modulo 4K before the Landen recursion; the
    amplitude gains 2*pi per period, the other three are periodic.
    """
    k = _validate_modulus(k)
    _, _, K, _ = _agm_chain(k)
    u_red, m = _reduce(u, K)
    phi = _amplitude_reduced(u_red, k)[0]
    if np.ndim(u) == 0:
        am = phi + 2.0 * math.pi * m
        sn = math.sin(phi)
        cn = math.cos(phi)
        dn = math.sqrt(1.0 - (k * sn) * (k * sn))
        return am, sn, cn, dn
    am = phi + 2.0 * math.pi * m
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - (k * sn) ** 2)
    return am, sn, cn, dn


def epsilon(u, k: float):
    """Second-kind integral along the elastica argument: E(am(u,k), k).

    Extended continuously over all real u through the quasi-period
    relation epsilon(u + 4K, k) = epsilon(u, k) + 4E(k).  Evaluated on
    the reduced argument by the Landen chain sum

        E(am(u,k), k) = (E/K) u + sum_{n>=1} c_n sin(phi_n),

    with phi_n the intermediate Landen amplitudes.
    """
    k = _validate_modulus(k)
    aa, cc, K, E = _agm_chain(k)
    u_red, m = _reduce(u, K)
    phis = _amplitude_reduced(u_red, k)
    n = len(aa) - 1
    if np.ndim(u) == 0:
        acc = (E / K) * u_red
        for i in range(1, n + 1):
            acc += cc[i] * math.sin(phis[i])
        return acc + 4.0 * E * m
    acc = (E / K) * np.asarray(u_red, dtype=float)
    for i in range(1, n + 1):
        acc = acc + cc[i] * np.sin(phis[i])
    return acc + 4.0 * E * m
