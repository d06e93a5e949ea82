"""NumPy implementation of the scan prefilter, used when the compiled
extension is unavailable.  Same arithmetic, same error bound."""

import numpy as np

CHUNK = 1 << 16
_U = 2.0 ** -53
_TINY = 2.0 ** -56


def _nearest_dist(t):
    f = t - np.floor(t)
    return np.where(f <= 0.5, f, 1.0 - f)


def prefilter(q_from, q_to, alpha, shift_a, beta, shift_b, second, chain):
    chain = np.asarray(chain, dtype=np.int64)
    best = np.inf
    pieces = []
    for start in range(q_from, q_to + 1, CHUNK):
        q = np.arange(start, min(start + CHUNK - 1, q_to) + 1, dtype=np.int64)
        qd = q.astype(np.float64)
        f1 = _nearest_dist(qd * alpha - shift_a)
        e1 = 4.0 * _U * (qd * abs(alpha) + abs(shift_a) + 1.0) + _TINY * (qd + 1.0)
        if second:
            f2 = _nearest_dist(qd * beta - shift_b)
            e2 = 4.0 * _U * (qd * abs(beta) + abs(shift_b) + 1.0) + _TINY * (qd + 1.0)
        else:
            f2 = np.ones_like(qd)
            e2 = np.zeros_like(qd)
        m = q
        if chain.size:
            nk = np.ones_like(q)
            alive = np.ones(q.shape, dtype=bool)
            for c in chain:
                if c > q[-1]:
                    break
                alive &= (c <= q) & (q % c == 0)
                nk = np.where(alive, c, nk)
            m = q // nk
        md = m.astype(np.float64)
        P = md * f1 * f2
        err = 2.0 * (md * (e1 * (f2 + e2) + (f1 + e1) * e2) + 4.0 * _U * P)
        upper = P + err
        before = np.minimum.accumulate(np.concatenate(([best], upper[:-1])))
        pieces.append(q[P - err < before])
        best = min(best, float(upper.min()))
    if not pieces:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(pieces)
