"""Seeded random streams.

Every consumer asks for a stream by (seed, label); the label is hashed so that
adding a new consumer never shifts the numbers another one sees.
"""
import hashlib

import numpy as np


def label_key(label):
    h = hashlib.blake2b(str(label).encode(), digest_size=8).digest()
    return int.from_bytes(h, "little")


def stream(seed, *labels):
    """numpy Generator for `seed` and a tuple of labels."""
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [label_key(l) for l in labels]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))


def derive(seed, *labels):
    """A fresh 63-bit integer seed derived from `seed` and labels."""
    return int(stream(seed, "derive", *labels).integers(0, 2**63 - 1))
