"""Differentiable tensor operations.

All functions accept :class:`Node` objects (plain arrays/scalars are wrapped
as constants) and return a new :class:`Node`. Shapes follow numpy
conventions; "last axis" ops normalize over ``axis=-1``.
"""

import numpy as np

from ..errors import ShapeError
from .graph import Node, RowGrad, constant, make_node


def _wrap(x, like=None):
    if isinstance(x, Node):
        return x
    dtype = like.value.dtype if like is not None else None
    return constant(x, dtype=dtype)


def _unbroadcast(g, shape):
    """Sum ``g`` down to ``shape`` (reverse of numpy broadcasting)."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def _broadcast_check(kind, a, b):
    if a.shape == b.shape:
        return a.shape
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(
            f"{kind}: cannot broadcast shapes {tuple(a.shape)} and {tuple(b.shape)}") from None


def add(a, b):
    a = _wrap(a, b if isinstance(b, Node) else None)
    b = _wrap(b, a)
    _broadcast_check("add", a.value, b.value)
    sa, sb = a.value.shape, b.value.shape

    def backward(g):
        return _unbroadcast(g, sa), _unbroadcast(g, sb)

    return make_node("add", a.value + b.value, (a, b), backward)


def sub(a, b):
    a = _wrap(a, b if isinstance(b, Node) else None)
    b = _wrap(b, a)
    _broadcast_check("sub", a.value, b.value)
    sa, sb = a.value.shape, b.value.shape

    def backward(g):
        return _unbroadcast(g, sa), -_unbroadcast(g, sb)

    return make_node("sub", a.value - b.value, (a, b), backward)


def mul(a, b):
    """Elementwise product with broadcasting."""
    a = _wrap(a, b if isinstance(b, Node) else None)
    b = _wrap(b, a)
    _broadcast_check("elementwise-mul", a.value, b.value)
    av, bv = a.value, b.value

    def backward(g):
        ga = _unbroadcast(g * bv, av.shape) if a.requires_grad else None
        gb = _unbroadcast(g * av, bv.shape) if b.requires_grad else None
        return ga, gb

    return make_node("elementwise-mul", av * bv, (a, b), backward)


def scale(x, c):
    c = float(c)

    def backward(g):
        return (g * c,)

    return make_node("scale", x.value * c, (x,), backward)


def matmul(a, b, transpose_b=False):
    """``a @ b`` (or ``a @ b.T``). ``b`` must be 1-D or 2-D; ``a`` may carry
    leading batch axes."""
    a = _wrap(a)
    b = _wrap(b, a)
    av, bv = a.value, b.value
    if bv.ndim not in (1, 2) or av.ndim < 1:
        raise ShapeError(
            f"matmul: unsupported ranks {tuple(av.shape)} @ {tuple(bv.shape)}")
    rhs = bv.T if transpose_b else bv
    if av.shape[-1] != rhs.shape[0]:
        shown = f"{tuple(bv.shape)}{'^T' if transpose_b else ''}"
        raise ShapeError(f"matmul: shapes {tuple(av.shape)} and {shown} do not align")
    value = av @ rhs

    if rhs.ndim == 2:
        def backward(g):
            ga = g @ rhs.T if a.requires_grad else None
            gb = None
            if b.requires_grad:
                a2 = av.reshape(-1, av.shape[-1])
                g2 = g.reshape(-1, g.shape[-1])
                gr = a2.T @ g2
                gb = gr.T if transpose_b else gr
            return ga, gb
    else:
        def backward(g):
            if av.ndim == 1:
                return g * rhs, g * av
            ga = g[..., None] * rhs if a.requires_grad else None
            gb = np.tensordot(g, av, axes=g.ndim) if b.requires_grad else None
            return ga, gb

    return make_node("matmul", np.asarray(value), (a, b), backward)


def tanh(x):
    y = np.tanh(x.value)

    def backward(g):
        return (g * (1.0 - y * y),)

    return make_node("tanh", y, (x,), backward)


def sigmoid(x):
    # tanh form is overflow-free for large |x|
    y = 0.5 * (1.0 + np.tanh(0.5 * x.value))

    def backward(g):
        return (g * y * (1.0 - y),)

    return make_node("sigmoid", y, (x,), backward)


def softmax(x, axis=-1):
    v = x.value
    e = np.exp(v - v.max(axis=axis, keepdims=True))
    y = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        return (y * (g - (g * y).sum(axis=axis, keepdims=True)),)

    return make_node("softmax", y, (x,), backward)


def log(x):
    v = x.value
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.log(v)

    def backward(g):
        return (g / v,)

    return make_node("log", y, (x,), backward)


def concat(xs, axis=-1):
    xs = [_wrap(x) for x in xs]
    if not xs:
        raise ShapeError("concat: empty input list")
    if len(xs) == 1:
        return xs[0]
    try:
        value = np.concatenate([x.value for x in xs], axis=axis)
    except ValueError:
        shapes = ", ".join(str(tuple(x.value.shape)) for x in xs)
        raise ShapeError(f"concat: incompatible shapes {shapes} on axis {axis}") from None
    sizes = [x.value.shape[axis] for x in xs]
    cuts = np.cumsum(sizes)[:-1]

    def backward(g):
        return np.split(g, cuts, axis=axis)

    return make_node("concat", value, tuple(xs), backward)


def stack(xs, axis=0):
    xs = [_wrap(x) for x in xs]
    try:
        value = np.stack([x.value for x in xs], axis=axis)
    except ValueError:
        shapes = ", ".join(str(tuple(x.value.shape)) for x in xs)
        raise ShapeError(f"stack: incompatible shapes {shapes}") from None

    def backward(g):
        return [np.take(g, i, axis=axis) for i in range(len(xs))]

    return make_node("stack", value, tuple(xs), backward)


def slice_(x, key):
    """Basic (non-fancy) indexing, e.g. ``slice_(x, (slice(None), slice(0, 4)))``."""
    try:
        value = x.value[key]
    except IndexError as exc:
        raise ShapeError(f"slice: {exc} for shape {tuple(x.value.shape)}") from None
    shape, dtype = x.value.shape, x.value.dtype

    def backward(g):
        out = np.zeros(shape, dtype=dtype)
        out[key] = g
        return (out,)

    return make_node("slice", value, (x,), backward)


def reshape(x, shape):
    old = x.value.shape
    try:
        value = x.value.reshape(shape)
    except ValueError:
        raise ShapeError(f"reshape: cannot reshape {tuple(old)} to {tuple(shape)}") from None

    def backward(g):
        return (g.reshape(old),)

    return make_node("reshape", value, (x,), backward)


def lookup(table, ids):
    """Embedding lookup: rows of ``table`` [V, E] selected by integer ``ids``."""
    ids = np.asarray(ids)
    if not np.issubdtype(ids.dtype, np.integer):
        raise ShapeError(f"embedding-lookup: ids must be integers, got {ids.dtype}")
    V = table.value.shape[0]
    if ids.size and (ids.min() < 0 or ids.max() >= V):
        raise ShapeError(f"embedding-lookup: id out of range for table {tuple(table.value.shape)}")
    value = table.value[ids]

    def backward(g):
        return (RowGrad(ids, g),)

    return make_node("embedding-lookup", value, (table,), backward)


def dropout(x, rate, rng=None, train=True):
    """Inverted dropout: zero each unit with probability ``rate`` and scale the
    survivors by 1/(1-rate), so inference is the identity."""
    if not train or rate <= 0.0:
        return x
    if rate >= 1.0:
        raise ShapeError("dropout: rate must be < 1")
    mask = (rng.random(x.value.shape) >= rate).astype(x.value.dtype) / (1.0 - rate)

    def backward(g):
        return (g * mask,)

    return make_node("dropout", x.value * mask, (x,), backward)


def sum_(x, axis=None):
    shape = x.value.shape
    value = np.asarray(x.value.sum(axis=axis))

    def backward(g):
        if axis is None:
            return (np.broadcast_to(g, shape).copy(),)
        return (np.broadcast_to(np.expand_dims(g, axis), shape).copy(),)

    return make_node("sum", value, (x,), backward)


def mean(x):
    shape, n = x.value.shape, x.value.size
    value = np.asarray(x.value.mean())

    def backward(g):
        return (np.full(shape, g / n, dtype=x.value.dtype),)

    return make_node("mean", value, (x,), backward)


def pickneglogsoftmax(logits, ids):
    """``-log softmax(logits)[ids]`` along the last axis, computed stably.

    ``logits`` is [..., V]; ``ids`` is an integer array of shape [...].
    """
    v = logits.value
    ids = np.asarray(ids)
    if ids.shape != v.shape[:-1]:
        raise ShapeError(
            f"pickneg-log-prob: ids shape {tuple(ids.shape)} does not match logits {tuple(v.shape)}")
    if ids.size and (ids.min() < 0 or ids.max() >= v.shape[-1]):
        raise ShapeError("pickneg-log-prob: gold id out of range")
    m = v.max(axis=-1, keepdims=True)
    e = np.exp(v - m)
    z = e.sum(axis=-1, keepdims=True)
    lse = (np.log(z) + m)[..., 0]
    gold = np.take_along_axis(v, ids[..., None], axis=-1)[..., 0]
    value = lse - gold

    def backward(g):
        p = e / z
        np.put_along_axis(p, ids[..., None],
                          np.take_along_axis(p, ids[..., None], axis=-1) - 1.0, axis=-1)
        return (p * g[..., None],)

    return make_node("pickneg-log-prob", value, (logits,), backward)


_TINY = 1e-300


def entropy(p):
    """Shannon entropy (nats) of distributions along the last axis."""
    v = p.value
    logv = np.log(np.maximum(v, _TINY))
    value = -(v * logv).sum(axis=-1)

    def backward(g):
        return (-(logv + 1.0) * g[..., None],)

    return make_node("entropy", value, (p,), backward)


_KINDS = {
    "matmul": matmul,
    "add": add,
    "sub": sub,
    "elementwise-mul": mul,
    "scale": scale,
    "tanh": tanh,
    "sigmoid": sigmoid,
    "softmax": softmax,
    "log": log,
    "concat": lambda *xs, **kw: concat(list(xs), **kw),
    "stack": lambda *xs, **kw: stack(list(xs), **kw),
    "slice": slice_,
    "reshape": reshape,
    "embedding-lookup": lookup,
    "dropout": dropout,
    "sum": sum_,
    "mean": mean,
    "pickneg-log-prob": pickneglogsoftmax,
    "entropy": entropy,
}

OP_KINDS = tuple(_KINDS)


def forward_op(kind, inputs, **attrs):
    """Dispatch by op name, e.g. ``forward_op("tanh", [x])``."""
    try:
        fn = _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown op kind {kind!r}") from None
    return fn(*inputs, **attrs)
