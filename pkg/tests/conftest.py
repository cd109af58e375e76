import mpmath as mp
import numpy as np
import pytest

from powermix import Composition


def rel_err(a, b):
    a, b = complex(a), complex(b)
    return abs(a - b) / max(abs(b), 1e-300)


def mp_power_mean(p, fractions, values, dps=60, as_float=True):
    """High-precision power mean, written straight from the definition."""
    with mp.workdps(dps):
        a = [mp.mpf(x) for x in fractions]
        total = mp.fsum(a)
        a = [x / total for x in a]
        pairs = [(ak, mp.mpf(v)) for ak, v in zip(a, values) if ak > 0]
        if p == 0:
            out = mp.exp(mp.fsum(ak * mp.log(v) for ak, v in pairs))
        elif p == mp.inf:
            out = max(v for _, v in pairs)
        elif p == -mp.inf:
            out = min(v for _, v in pairs)
        else:
            p = mp.mpf(p)
            out = mp.fsum(ak * v**p for ak, v in pairs) ** (1 / p)
        return float(out) if as_float else out


def random_instance(rng, n=None, lo=1e-3, hi=1e3):
    """Random composition with log-uniform values in [lo, hi]."""
    if n is None:
        n = int(rng.choice([2, 3, 5]))
    comp = Composition.normalized(rng.dirichlet(np.ones(n)))
    vals = np.exp(rng.uniform(np.log(lo), np.log(hi), n)).tolist()
    return comp, vals


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def synth_samples(rng, p_star, n_samples, noise=0.0):
    """Samples whose measurements follow the power law at ``p_star``, times uniform noise."""
    from powermix import Sample, power_mean

    out = []
    for _ in range(n_samples):
        n = int(rng.integers(2, 5))
        comp = rng.dirichlet(np.ones(n))
        vals = rng.uniform(0.1, 10.0, n)
        m = power_mean(p_star, comp, vals).value
        if noise:
            m *= rng.uniform(1 - noise, 1 + noise)
        out.append(Sample(comp, vals, m))
    return out
