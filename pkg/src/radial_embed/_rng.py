"""Seeded random streams.

Every random draw in the package comes from numpy's PCG64 generator.  Streams
are derived from a single integer seed plus a component name and optional
integer indices, so any sub-result can be reproduced on its own::

    SeedSequence([seed, crc32(component), *indices]) -> PCG64

String indices enter as their crc32.
"""

from __future__ import annotations

import zlib

import numpy as np


def _word(x: int | str) -> int:
    if isinstance(x, str):
        return zlib.crc32(x.encode("utf-8"))
    return int(x) & 0xFFFFFFFFFFFFFFFF


def derive_rng(seed: int, component: str = "", *indices: int | str) -> np.random.Generator:
    key = [_word(seed), _word(component)]
    key.extend(_word(i) for i in indices)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))
