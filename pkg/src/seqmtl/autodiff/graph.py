"""Dynamic computation graph and reverse-mode differentiation.

Every operation creates a :class:`Node` holding its forward value, its parent
nodes, and a closure mapping the output gradient to one gradient per parent.
The graph is rebuilt from scratch for every minibatch (define-by-run).
"""

import contextlib
import itertools

import numpy as np

from ..errors import ContractError, NumericError

_counter = itertools.count()

_CHECK_NUMERICS = True


def check_numerics_enabled():
    return _CHECK_NUMERICS


def set_check_numerics(enabled):
    """Toggle NaN/Inf detection after every forward op. Returns the old value."""
    global _CHECK_NUMERICS
    old = _CHECK_NUMERICS
    _CHECK_NUMERICS = bool(enabled)
    return old


@contextlib.contextmanager
def check_numerics(enabled=True):
    old = set_check_numerics(enabled)
    try:
        yield
    finally:
        set_check_numerics(old)


class RowGrad:
    """Sparse gradient for an embedding lookup: rows ``ids`` receive ``values``."""

    __slots__ = ("ids", "values")

    def __init__(self, ids, values):
        self.ids = ids
        self.values = values

    def dense(self, shape, dtype):
        out = np.zeros(shape, dtype=dtype)
        np.add.at(out, self.ids.reshape(-1), self.values.reshape(-1, shape[-1]))
        return out


class Node:
    """A value in the computation graph.

    ``backward_fn`` receives the gradient of the loss w.r.t. this node and
    returns a sequence with one entry per parent (``None`` for no gradient).
    Parameter leaves carry ``param`` (a store entry) and push their gradient
    straight into the entry's accumulator.
    """

    __slots__ = ("value", "parents", "backward_fn", "kind", "requires_grad", "param", "order")

    def __init__(self, value, parents=(), backward_fn=None, kind="const",
                 requires_grad=False, param=None):
        self.value = value
        self.parents = parents
        self.backward_fn = backward_fn
        self.kind = kind
        self.requires_grad = requires_grad
        self.param = param
        self.order = next(_counter)

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Node(kind={self.kind!r}, shape={self.value.shape})"

    def detach(self):
        """Same value, no gradient flow (stop-gradient)."""
        return Node(self.value, kind="detach")

    # Arithmetic sugar; implementations live in ops.
    def __add__(self, other):
        from . import ops
        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from . import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from . import ops
        return ops.mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        from . import ops
        return ops.scale(self, -1.0)

    def __matmul__(self, other):
        from . import ops
        return ops.matmul(self, other)


def constant(value, dtype=None):
    """Wrap an array (or scalar) as a graph leaf that never receives gradient."""
    if isinstance(value, Node):
        return value
    arr = np.asarray(value)
    if dtype is not None:
        arr = arr.astype(dtype, copy=False)
    elif arr.dtype.kind != "f":
        arr = arr.astype(np.float64)
    return Node(arr)


def make_node(kind, value, parents, backward_fn):
    """Create an op node, checking numerics and pruning the backward closure
    when no parent needs a gradient."""
    if _CHECK_NUMERICS and not np.all(np.isfinite(value)):
        raise NumericError(f"{kind}: non-finite value in forward output")
    requires = any(p.requires_grad for p in parents)
    if not requires:
        return Node(value, kind=kind)
    return Node(value, parents, backward_fn, kind, requires_grad=True)


def _topological(root):
    seen = set()
    nodes = []
    stack = [root]
    while stack:
        node = stack.pop()
        key = id(node)
        if key in seen:
            continue
        seen.add(key)
        nodes.append(node)
        for p in node.parents:
            if p.requires_grad and id(p) not in seen:
                stack.append(p)
    # creation order is a valid forward order, so descending order is a
    # valid reverse order
    nodes.sort(key=lambda n: n.order, reverse=True)
    return nodes


def _accumulate_param(entry, g):
    if isinstance(g, RowGrad):
        np.add.at(entry.grad, g.ids.reshape(-1),
                  g.values.reshape(-1, entry.grad.shape[-1]))
    else:
        entry.grad += g


def backward(loss):
    """Accumulate d(loss)/d(param) into every reachable parameter entry.

    Repeated calls accumulate; call ``ParameterStore.zero_grads`` in between
    to start afresh.
    """
    if not isinstance(loss, Node):
        raise ContractError("backward expects a graph Node")
    if loss.value.size != 1:
        raise ContractError(
            f"backward needs a scalar loss, got shape {tuple(loss.value.shape)}")
    if not loss.requires_grad:
        return
    grads = {id(loss): np.ones_like(loss.value)}
    for node in _topological(loss):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node.param is not None:
            _accumulate_param(node.param, g)
            continue
        if node.backward_fn is None:
            continue
        parent_grads = node.backward_fn(g)
        for parent, pg in zip(node.parents, parent_grads):
            if pg is None or not parent.requires_grad:
                continue
            if parent.param is not None:
                _accumulate_param(parent.param, pg)
                continue
            if isinstance(pg, RowGrad):
                pg = pg.dense(parent.value.shape, parent.value.dtype)
            key = id(parent)
            prev = grads.get(key)
            grads[key] = pg if prev is None else prev + pg
