"""Reproducible random streams keyed by (master seed, purpose, trial).

Streams are numpy ``PCG64`` generators seeded from a ``SeedSequence`` whose
spawn key is ``(purpose code, trial)``. A trial's draws therefore do not
depend on how many other trials run or in which order.
"""

from __future__ import annotations

import numpy as np

# Fixed codes: changing them changes every simulated number.
PURPOSES = {
    "real": 1,
    "generator": 2,
    "synthetic": 3,
    "prune": 4,
    "test": 5,
    "split": 6,
    "misc": 7,
}


def stream(seed: int, purpose: str, trial: int = 0, *extra: int) -> np.random.Generator:
    """Independent generator for one purpose within one trial.

    ``extra`` integers further split the stream (e.g. a grid-point index).
    """
    try:
        code = PURPOSES[purpose]
    except KeyError:
        raise ValueError(f"unknown stream purpose {purpose!r}") from None
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(code, int(trial), *map(int, extra)))
    return np.random.Generator(np.random.PCG64(ss))


class TrialStreams:
    """All streams of one trial, created lazily."""

    def __init__(self, seed: int, trial: int):
        self.seed = int(seed)
        self.trial = int(trial)

    def __getattr__(self, purpose: str) -> np.random.Generator:
        if purpose.startswith("_") or purpose not in PURPOSES:
            raise AttributeError(purpose)
        gen = stream(self.seed, purpose, self.trial)
        setattr(self, purpose, gen)
        return gen
