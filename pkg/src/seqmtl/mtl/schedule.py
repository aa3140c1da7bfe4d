"""Main + auxiliary minibatch pairing schedule."""

import numpy as np

from ..errors import ContractError


class EpochSampler:
    """Uniform sampling without replacement; reshuffles when exhausted.
    A batch never straddles two epochs."""

    def __init__(self, n, rng):
        if n < 1:
            raise ContractError("cannot sample from an empty dataset")
        self.n = n
        self.rng = rng
        self.order = rng.permutation(n)
        self.pos = 0
        self.epoch = 0

    def take(self, k):
        if self.pos >= self.n:
            self.order = self.rng.permutation(self.n)
            self.pos = 0
            self.epoch += 1
        out = self.order[self.pos:self.pos + k]
        self.pos += len(out)
        return [int(i) for i in out]


class TaskScheduler:
    """Each step draws a main-task batch and pairs it with a batch from one
    auxiliary task chosen uniformly at random.

    ``sizes[m]`` is |D_m|; task 0 is the main task.
    """

    def __init__(self, sizes, batch_size, rng):
        if not sizes:
            raise ContractError("scheduler needs at least the main task")
        self.rng = rng
        self.batch_size = batch_size
        self.samplers = [EpochSampler(n, rng) for n in sizes]

    @property
    def num_aux(self):
        return len(self.samplers) - 1

    def steps_per_epoch(self):
        n = self.samplers[0].n
        return -(-n // self.batch_size)

    def next_step(self):
        """[(0, main indices)] plus ``(m, aux indices)`` when M >= 1."""
        step = [(0, self.samplers[0].take(self.batch_size))]
        if self.num_aux:
            m = 1 + int(self.rng.integers(self.num_aux))
            step.append((m, self.samplers[m].take(self.batch_size)))
        return step


def split_rng(seed, name):
    """Independent generator for a named sub-stream of ``seed``."""
    streams = {"init": 0, "schedule": 1, "dropout": 2, "disc": 3, "adapt": 4}
    return np.random.default_rng(np.random.SeedSequence([int(seed), streams[name]]))
