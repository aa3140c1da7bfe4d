"""Finite-difference verification of analytic gradients."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractError
from .graph import backward


@dataclass
class Mismatch:
    name: str
    index: tuple
    analytic: float
    numeric: float
    error: float


@dataclass
class GradCheckReport:
    checked: int = 0
    max_error: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def __str__(self):
        head = (f"gradient check: {self.checked} elements, "
                f"max rel err {self.max_error:.3e}, {len(self.failures)} failures")
        lines = [head]
        for f in self.failures[:20]:
            lines.append(f"  {f.name}{list(f.index)}: analytic={f.analytic:.8g} "
                         f"numeric={f.numeric:.8g} err={f.error:.3e}")
        return "\n".join(lines)


def gradient_check(build_loss, store, names=None, tolerance=1e-4, step=1e-5,
                   max_elements=None, rng=None):
    """Compare backprop gradients with central differences.

    ``build_loss`` is a zero-argument callable building a scalar loss node
    from ``store``; it must be deterministic. The relative error per element
    is ``|a - n| / max(1, |a|, |n|)``. ``max_elements`` optionally samples a
    random subset of elements per parameter.
    """
    if store.dtype != np.float64:
        raise ContractError("gradient_check requires a float64 parameter store")
    names = list(store.entries) if names is None else [store.resolve(n) for n in names]
    store.zero_grads()
    loss = build_loss()
    if loss.value.size != 1:
        raise ContractError("gradient_check: builder must return a scalar loss")
    backward(loss)
    analytic = {n: store.entries[n].grad.copy() for n in names}

    report = GradCheckReport()
    rng = rng or np.random.default_rng(0)
    for name in names:
        value = store.entries[name].value
        indices = list(np.ndindex(value.shape))
        if max_elements is not None and len(indices) > max_elements:
            pick = rng.choice(len(indices), size=max_elements, replace=False)
            indices = [indices[i] for i in sorted(pick)]
        for idx in indices:
            orig = value[idx]
            value[idx] = orig + step
            fp = float(build_loss().value.sum())
            value[idx] = orig - step
            fm = float(build_loss().value.sum())
            value[idx] = orig
            num = (fp - fm) / (2.0 * step)
            ana = float(analytic[name][idx])
            err = abs(ana - num) / max(1.0, abs(ana), abs(num))
            report.checked += 1
            report.max_error = max(report.max_error, err)
            if err > tolerance:
                report.failures.append(Mismatch(name, idx, ana, num, err))
    store.zero_grads()
    return report
