# data_layer/RandomStreams.py

import numpy as np


class RandomStreams:
    """
    Data Layer - Seeded random substreams
    Every draw of a campaign comes from a stream keyed by
    (purpose, realization, ...) and derived from the master seed, so the
    outputs do not depend on scheduling order or worker count.
    """

    PURPOSES = {
        "topology": 0,
        "shadowing": 1,
        "trace": 2,
        "fading": 3,
    }

    def __init__(self, master_seed):
        if master_seed is None or int(master_seed) < 0:
            raise ValueError("Master seed must be a non-negative integer")
        self.master_seed = int(master_seed)

    def stream(self, purpose, *keys):
        """
        Get an independent generator for a purpose and integer keys

        Args:
            purpose: one of PURPOSES
            keys: non-negative integers (realization index, UE index, block ...)

        Returns:
            numpy Generator
        """
        if purpose not in self.PURPOSES:
            raise ValueError(f"Unknown stream purpose '{purpose}'")
        spawn_key = (self.PURPOSES[purpose],) + tuple(int(k) for k in keys)
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=spawn_key)
        return np.random.default_rng(seq)

    def __repr__(self):
        return f"RandomStreams(seed={self.master_seed})"
