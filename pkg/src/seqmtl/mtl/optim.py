"""Adam with externally controlled (halving) learning rate."""

import numpy as np


class Adam:
    def __init__(self, lr=0.003, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = {}    # canonical name -> [m, v, t]

    def step(self, store, names):
        """Update the given canonical parameters in place from their grads.
        Parameters without an entry in ``names`` are untouched."""
        b1, b2, lr, eps = self.beta1, self.beta2, self.lr, self.eps
        for name in names:
            e = store.entries[name]
            st = self.state.get(name)
            if st is None:
                st = self.state[name] = [np.zeros_like(e.value), np.zeros_like(e.value), 0]
            m, v, _ = st
            st[2] += 1
            t = st[2]
            g = e.grad
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * (g * g)
            mhat = m / (1.0 - b1 ** t)
            vhat = v / (1.0 - b2 ** t)
            e.value -= lr * mhat / (np.sqrt(vhat) + eps)

    def halve(self):
        self.lr *= 0.5
        return self.lr

    def state_dict(self):
        return {"lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps,
                "steps": {n: st[2] for n, st in self.state.items()}}

    def moments(self):
        return {n: (st[0], st[1]) for n, st in self.state.items()}

    def load(self, meta, moments):
        self.lr = meta["lr"]
        self.beta1, self.beta2, self.eps = meta["beta1"], meta["beta2"], meta["eps"]
        self.state = {n: [moments[n][0].copy(), moments[n][1].copy(), int(t)]
                      for n, t in meta["steps"].items()}

    def copy(self):
        other = Adam(self.lr, self.beta1, self.beta2, self.eps)
        other.state = {n: [m.copy(), v.copy(), t] for n, (m, v, t) in self.state.items()}
        return other
