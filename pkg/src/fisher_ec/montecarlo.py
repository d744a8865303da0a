"""Monte Carlo estimates of ergodic capacity.

ORA and OPRA are plain sample means of a per-draw rate.  CI and TCI are
deterministic functionals of the distribution, so the estimator averages the
(truncated) inverse moment and the survival indicator and maps them through
``ln(1 + 1/J) * P``, with the standard error from the delta method.

Samples are never stored: each shard streams fixed-size chunks into running
means and co-moments that are merged exactly.  Results are bit-identical for
a fixed ``(seed, shards, chunk)`` regardless of how many worker threads ran.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .capacity import Scheme, SchemeKind, solve_opra_cutoff
from .errors import DomainError
from .fading import draw

CHUNK = 1 << 18


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int
    seed: int
    shards: int = 1
    divergent: bool = False
    gamma0: float | None = None


class _Moments:
    """Running mean vector and co-moment matrix (pairwise-merge form)."""

    def __init__(self, k):
        self.n = 0
        self.mean = np.zeros(k)
        self.m2 = np.zeros((k, k))

    def push(self, block):
        # block has shape (k, count)
        cnt = block.shape[1]
        mu = block.mean(axis=1)
        dev = block - mu[:, None]
        self.merge(cnt, mu, dev @ dev.T)

    def merge(self, cnt, mu, m2):
        if cnt == 0:
            return
        tot = self.n + cnt
        delta = mu - self.mean
        self.mean = self.mean + delta * (cnt / tot)
        self.m2 = self.m2 + m2 + np.outer(delta, delta) * (self.n * cnt / tot)
        self.n = tot

    def cov(self):
        return self.m2 / (self.n - 1)


def _features(kind, gamma0):
    if kind is SchemeKind.ORA:
        return 1, lambda g: np.log1p(g)[None, :]
    if kind is SchemeKind.OPRA:
        lg0 = math.log(gamma0)
        return 1, lambda g: np.where(g >= gamma0, np.log(g) - lg0, 0.0)[None, :]
    if kind is SchemeKind.CI:
        return 1, lambda g: (1.0 / g)[None, :]

    def tci(g):
        keep = g >= gamma0
        return np.vstack([np.where(keep, 1.0 / g, 0.0), keep.astype(float)])
    return 2, tci


def _run_shard(p, k, feat, seq, count, chunk):
    rng = np.random.default_rng(seq)
    acc = _Moments(k)
    left = count
    while left > 0:
        size = min(chunk, left)
        acc.push(feat(draw(p, rng, size)))
        left -= size
    return acc


def _split(n, shards):
    base, extra = divmod(n, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]


def mc_ec(p, scheme, n, seed, shards=1, jobs=1, chunk=CHUNK):
    """Estimate the capacity of ``scheme`` from ``n`` draws.

    Each of ``shards`` sub-streams gets its own child of ``SeedSequence(seed)``;
    ``jobs`` only controls how many run at once.  OPRA uses the analytically
    solved cutoff.  CI with ``m <= 1`` has no finite inverse moment: the
    estimate comes back as 0 with ``divergent=True`` and nothing is sampled.
    """
    if not isinstance(scheme, Scheme):
        raise DomainError(f"mc_ec: expected a Scheme, got {scheme!r}", "mc_ec")
    if n < 2 or shards < 1 or n < 2 * shards:
        raise DomainError(f"mc_ec: need n >= 2 per shard (n={n}, shards={shards})", "mc_ec")
    if seed < 0 or seed >= 2**64:
        raise DomainError(f"mc_ec: seed={seed!r} is not a 64-bit unsigned integer", "mc_ec")
    kind = scheme.kind
    if kind is SchemeKind.CI and p.m <= 1.0:
        return McEstimate(0.0, 0.0, n, seed, shards, divergent=True)
    gamma0 = scheme.gamma0
    if kind is SchemeKind.OPRA:
        gamma0 = solve_opra_cutoff(p).gamma0

    k, feat = _features(kind, gamma0)
    seqs = np.random.SeedSequence(seed).spawn(shards)
    sizes = _split(n, shards)
    if jobs > 1 and shards > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda a: _run_shard(p, k, feat, a[0], a[1], chunk),
                                  zip(seqs, sizes)))
    else:
        parts = [_run_shard(p, k, feat, s, c, chunk) for s, c in zip(seqs, sizes)]

    total = _Moments(k)
    for part in parts:
        total.merge(part.n, part.mean, part.m2)
    cov = total.cov()

    if kind in (SchemeKind.ORA, SchemeKind.OPRA):
        mean = float(total.mean[0])
        se = math.sqrt(cov[0, 0] / n)
    elif kind is SchemeKind.CI:
        x = float(total.mean[0])
        mean = math.log1p(1.0 / x)
        se = math.sqrt(cov[0, 0] / n) / (x * (x + 1.0))
    else:
        a, b = (float(v) for v in total.mean)
        if a == 0.0:
            # every draw fell below the cutoff
            return McEstimate(0.0, 0.0, n, seed, shards, gamma0=gamma0)
        grad = np.array([-b / (a * (a + 1.0)), math.log1p(1.0 / a)])
        mean = math.log1p(1.0 / a) * b
        se = math.sqrt(max(float(grad @ cov @ grad), 0.0) / n)
    return McEstimate(mean, se, n, seed, shards, gamma0=gamma0)
