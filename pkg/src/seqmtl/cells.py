"""GRU/LSTM cells, bidirectional layers, and deep stacked encoder/decoder.

Tensors are batched: inputs are [B, input_dim], states [B, hidden_dim].
Weight matrices are stored [out, in] and applied as ``x @ W.T``.
An optional per-position mask ([B] of 0/1) freezes the state of finished
(padded) sequences, so padding never leaks into real positions.
"""

from dataclasses import dataclass, field

import numpy as np

from .autodiff import ops
from .errors import ConfigError, ContractError


def _masked(new, old, mask):
    if mask is None:
        return new
    # old + m * (new - old): exact copy of old where m == 0
    return ops.add(old, ops.mul(mask, ops.sub(new, old)))


class GRUCell:
    """Gated recurrent unit (Cho et al., 2014).

    Gate stacking in ``W``/``b`` is [update z; reset r; candidate]::

        z  = sigmoid(W_z x + U_z h + b_z)
        r  = sigmoid(W_r x + U_r h + b_r)
        h~ = tanh(W_h x + U_h (r * h) + b_h)
        h' = z * h + (1 - z) * h~

    Note the original formulation: ``z`` keeps the *previous* state.
    """

    kind = "gru"

    def __init__(self, prefix, input_dim, hidden_dim):
        if input_dim <= 0 or hidden_dim <= 0:
            raise ConfigError("cell dimensions must be positive")
        self.prefix = prefix
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim

    def shapes(self):
        H, I = self.hidden_dim, self.input_dim
        p = self.prefix
        return {f"{p}/W": (3 * H, I), f"{p}/U_zr": (2 * H, H),
                f"{p}/U_h": (H, H), f"{p}/b": (3 * H,)}

    @property
    def names(self):
        return list(self.shapes())

    def register(self, store, rng):
        for name, shape in self.shapes().items():
            store.add(name, shape, rng=rng, init="zeros" if len(shape) == 1 else "glorot")

    def initial_state(self, scope, batch):
        return scope.const(np.zeros((batch, self.hidden_dim)))

    def output(self, state):
        return state

    def step(self, scope, x, h, mask=None):
        p, H = self.prefix, self.hidden_dim
        gx = ops.add(ops.matmul(x, scope.param(f"{p}/W"), transpose_b=True),
                     scope.param(f"{p}/b"))
        gh = ops.matmul(h, scope.param(f"{p}/U_zr"), transpose_b=True)
        z = ops.sigmoid(ops.add(ops.slice_(gx, (Ellipsis, slice(0, H))),
                                ops.slice_(gh, (Ellipsis, slice(0, H)))))
        r = ops.sigmoid(ops.add(ops.slice_(gx, (Ellipsis, slice(H, 2 * H))),
                                ops.slice_(gh, (Ellipsis, slice(H, 2 * H)))))
        cand = ops.tanh(ops.add(ops.slice_(gx, (Ellipsis, slice(2 * H, 3 * H))),
                                ops.matmul(ops.mul(r, h), scope.param(f"{p}/U_h"),
                                           transpose_b=True)))
        # z*h + (1-z)*cand == cand + z*(h - cand)
        new = ops.add(cand, ops.mul(z, ops.sub(h, cand)))
        return _masked(new, h, mask)


class LSTMCell:
    """Long short-term memory cell; gate stacking [input; forget; output; cell].

    State is the pair ``(h, c)``.
    """

    kind = "lstm"

    def __init__(self, prefix, input_dim, hidden_dim):
        if input_dim <= 0 or hidden_dim <= 0:
            raise ConfigError("cell dimensions must be positive")
        self.prefix = prefix
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim

    def shapes(self):
        H, I = self.hidden_dim, self.input_dim
        p = self.prefix
        return {f"{p}/W": (4 * H, I), f"{p}/U": (4 * H, H), f"{p}/b": (4 * H,)}

    @property
    def names(self):
        return list(self.shapes())

    def register(self, store, rng):
        for name, shape in self.shapes().items():
            store.add(name, shape, rng=rng, init="zeros" if len(shape) == 1 else "glorot")

    def initial_state(self, scope, batch):
        z = np.zeros((batch, self.hidden_dim))
        return scope.const(z), scope.const(z)

    def output(self, state):
        return state[0]

    def step(self, scope, x, state, mask=None):
        p, H = self.prefix, self.hidden_dim
        h, c = state
        g = ops.add(ops.add(ops.matmul(x, scope.param(f"{p}/W"), transpose_b=True),
                            ops.matmul(h, scope.param(f"{p}/U"), transpose_b=True)),
                    scope.param(f"{p}/b"))
        i = ops.sigmoid(ops.slice_(g, (Ellipsis, slice(0, H))))
        f = ops.sigmoid(ops.slice_(g, (Ellipsis, slice(H, 2 * H))))
        o = ops.sigmoid(ops.slice_(g, (Ellipsis, slice(2 * H, 3 * H))))
        u = ops.tanh(ops.slice_(g, (Ellipsis, slice(3 * H, 4 * H))))
        c_new = ops.add(ops.mul(f, c), ops.mul(i, u))
        h_new = ops.mul(o, ops.tanh(c_new))
        return _masked(h_new, h, mask), _masked(c_new, c, mask)


CELL_TYPES = {"gru": GRUCell, "lstm": LSTMCell}


def make_cell(kind, prefix, input_dim, hidden_dim):
    try:
        return CELL_TYPES[kind](prefix, input_dim, hidden_dim)
    except KeyError:
        raise ConfigError(f"unknown cell kind {kind!r}") from None


def _mask_column(scope, mask, t):
    """[B, 1] mask constant for position t, or None when nothing is padded."""
    if mask is None:
        return None
    col = mask[:, t]
    if col.all():
        return None
    return scope.const(col[:, None])


def run_unidirectional(scope, cell, inputs, mask=None, reverse=False):
    """Run ``cell`` over ``inputs`` from a zero state; returns output per position."""
    if not inputs:
        raise ContractError("recurrent layer needs a nonempty input sequence")
    T = len(inputs)
    state = cell.initial_state(scope, inputs[0].value.shape[0])
    outs = [None] * T
    order = range(T - 1, -1, -1) if reverse else range(T)
    for t in order:
        state = cell.step(scope, inputs[t], state, _mask_column(scope, mask, t))
        outs[t] = cell.output(state)
    return outs


def run_bidirectional_layer(scope, cell_fwd, cell_bwd, inputs, mask=None):
    """Left-to-right and right-to-left passes, each from a zero state."""
    fwd = run_unidirectional(scope, cell_fwd, inputs, mask)
    bwd = run_unidirectional(scope, cell_bwd, inputs, mask, reverse=True)
    return fwd, bwd


@dataclass
class StackedEncoderStates:
    forward: list = field(default_factory=list)    # [layer][pos] -> [B, H]
    backward: list = field(default_factory=list)   # [layer][pos] -> [B, H]
    layers: list = field(default_factory=list)     # [layer][pos] -> [B, 2H]
    concat: list = field(default_factory=list)     # [pos] -> [B, 2H*L]

    @property
    def num_layers(self):
        return len(self.layers)


class StackedEncoder:
    """L bidirectional layers; layer l reads the [fwd; bwd] states of layer l-1."""

    def __init__(self, layers):
        if not layers:
            raise ConfigError("encoder needs at least one layer")
        for depth, (f, b) in enumerate(layers, start=1):
            if f.hidden_dim != b.hidden_dim or f.input_dim != b.input_dim:
                raise ConfigError(f"encoder layer {depth}: fwd/bwd cells disagree")
            if depth > 1 and f.input_dim != 2 * layers[depth - 2][0].hidden_dim:
                raise ConfigError(
                    f"encoder layer {depth}: input dim {f.input_dim} != "
                    f"2 * hidden of layer {depth - 1}")
        self.layers = list(layers)

    @property
    def output_dim(self):
        return sum(2 * f.hidden_dim for f, _ in self.layers)

    def run(self, scope, embedded, mask=None):
        return run_stacked_encoder(scope, self.layers, embedded, mask)


def run_stacked_encoder(scope, layers, embedded, mask=None):
    """Deep bidirectional encoder.

    Dropout (per ``scope``) is applied to every layer's output sequence
    before it feeds the next layer and the all-layer concatenation.
    """
    out = StackedEncoderStates()
    inputs = embedded
    for cell_f, cell_b in layers:
        fwd, bwd = run_bidirectional_layer(scope, cell_f, cell_b, inputs, mask)
        h = [scope.dropout(ops.concat([f, b])) for f, b in zip(fwd, bwd)]
        out.forward.append(fwd)
        out.backward.append(bwd)
        out.layers.append(h)
        inputs = h
    T = len(embedded)
    out.concat = [ops.concat([layer[i] for layer in out.layers]) for i in range(T)]
    return out


@dataclass
class StackedDecoderStates:
    layers: list            # per layer: cell state (h or (h, c))
    outputs: list           # per layer: [B, H] output (dropout applied)
    concat: object          # [B, H*L'] node

    @property
    def num_layers(self):
        return len(self.layers)


class StackedDecoder:
    """L' unidirectional layers. Layer 1 consumes the combined
    target-embedding/context projection; layer l >= 2 consumes layer l-1."""

    def __init__(self, layers):
        if not layers:
            raise ConfigError("decoder needs at least one layer")
        for depth in range(1, len(layers)):
            if layers[depth].input_dim != layers[depth - 1].hidden_dim:
                raise ConfigError(
                    f"decoder layer {depth + 1}: input dim {layers[depth].input_dim} != "
                    f"hidden of layer {depth}")
        self.layers = list(layers)

    @property
    def output_dim(self):
        return sum(c.hidden_dim for c in self.layers)

    def initial_states(self, scope, batch):
        states = [c.initial_state(scope, batch) for c in self.layers]
        outputs = [c.output(s) for c, s in zip(self.layers, states)]
        return StackedDecoderStates(states, outputs, ops.concat(outputs))


def step_stacked_decoder(scope, layers, prev, first_input, mask=None):
    """Advance every decoder layer by one step.

    ``first_input`` is the layer-1 input (W_sj E_T[y_{j-1}] + W_sc c_j).
    """
    if prev.num_layers != len(layers):
        raise ContractError(
            f"decoder state has {prev.num_layers} layers, decoder has {len(layers)}")
    states, outputs = [], []
    x = first_input
    for cell, state in zip(layers, prev.layers):
        new = cell.step(scope, x, state, mask)
        states.append(new)
        x = scope.dropout(cell.output(new))
        outputs.append(x)
    return StackedDecoderStates(states, outputs, ops.concat(outputs))
