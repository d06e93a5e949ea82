import os
import subprocess
import sys

import numpy as np
import pytest

from littlewood import kernels

CASES = [
    (1, 50000, 0.6180339887498949, 0.0, 0.0, 0.0, False, []),
    (1, 50000, 1.618033988749895, 0.0, 0.41421356237309503, 0.3, True, []),
    (17, 40000, 0.41421356237309503, 1 / 3, 0.0, 0.0, False, [2 ** k for k in range(1, 16)]),
    (1, 30000, 0.7320508075688772, 0.0, 0.0, 0.0, False, [1, 2, 6, 24, 120, 720, 5040, 40320]),
    (1, 10, 0.5, 0.0, 0.25, 0.0, True, []),
]


def test_backend_is_reported():
    assert kernels.BACKEND in kernels.backends()


@pytest.mark.parametrize("case", CASES)
def test_backends_agree(case):
    impls = kernels.backends()
    if len(impls) < 2:
        pytest.skip("compiled extension not built")
    q_from, q_to, a, sa, b, sb, second, chain = case
    chain = np.array(chain, dtype=np.int64)
    outs = {name: np.asarray(f(q_from, q_to, a, sa, b, sb, second, chain)) for name, f in impls.items()}
    ref = outs.pop("numpy")
    for out in outs.values():
        np.testing.assert_array_equal(out, ref)


@pytest.mark.parametrize("case", CASES)
def test_prefilter_keeps_true_records(case):
    q_from, q_to, a, sa, b, sb, second, chain = case
    kept = set(kernels.backends()["numpy"](q_from, q_to, a, sa, b, sb, second,
                                           np.array(chain, dtype=np.int64)).tolist())
    # float reference with long double is enough when the margin is not razor thin
    q = np.arange(q_from, q_to + 1, dtype=np.int64)
    qd = q.astype(np.longdouble)

    def dist(t):
        f = t - np.floor(t)
        return np.minimum(f, 1 - f)

    m = q.copy()
    for c in chain:
        if c > 1:
            m = np.where(q % c == 0, q // c, m)
    P = m * dist(qd * np.longdouble(a) - np.longdouble(sa))
    if second:
        P = P * dist(qd * np.longdouble(b) - np.longdouble(sb))
    best = None
    for qq, v in zip(q.tolist(), P.tolist()):
        if best is None or v < best * (1 - 1e-9):
            assert qq in kept
        if best is None or v < best:
            best = v


def test_pure_mode_env_forces_fallback():
    env = dict(os.environ, LITTLEWOOD_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from littlewood import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
