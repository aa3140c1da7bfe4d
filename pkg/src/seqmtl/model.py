"""Attentional encoder-decoder over deep stacked recurrent layers.

Output generation::

    P(y_j | y_<j, x) = softmax(W_y r_j + b_r)
    r_j = tanh(s_j + W_rc c_j + W_rj E_T[y_{j-1}])

with the additive attention ``a_ji = v . tanh(W_ae h_i + W_at s_{j-1})``,
``alpha_j = softmax(a_j)`` and ``c_j = sum_i alpha_ji h_i``. ``h_i`` is the
concatenation of all encoder layers and ``s_j`` of all decoder layers.
W_rc and W_rj project into dim(s_j) so the sum in ``r_j`` is well defined.
"""

from dataclasses import dataclass

import numpy as np

from .autodiff import Scope, ops
from .cells import (StackedDecoder, StackedEncoder, make_cell,
                    step_stacked_decoder)
from .errors import ConfigError, ContractError

BOS, EOS, UNK = 0, 1, 2
SPECIALS = ("<s>", "</s>", "<unk>")
_NEG = 1e30


@dataclass(frozen=True)
class ModelDims:
    src_vocab: int
    tgt_vocab: int
    embedding: int = 400
    hidden: int = 400
    attention: int = 200
    enc_layers: int = 3
    dec_layers: int = 3
    cell: str = "gru"

    def __post_init__(self):
        for name in ("src_vocab", "tgt_vocab", "embedding", "hidden", "attention",
                     "enc_layers", "dec_layers"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"model dimension {name} must be positive")
        if self.src_vocab <= UNK or self.tgt_vocab <= UNK:
            raise ConfigError("vocabularies must include the three reserved tokens")

    @property
    def enc_dim(self):
        return 2 * self.hidden * self.enc_layers

    @property
    def dec_dim(self):
        return self.hidden * self.dec_layers


@dataclass
class Batch:
    """Padded minibatch. ``tgt_in`` is ``<s> y_1 .. y_{n-1}``, ``tgt_out`` is
    ``y_1 .. y_n`` (ending in ``</s>``)."""

    src: np.ndarray
    src_mask: np.ndarray
    tgt_in: np.ndarray
    tgt_out: np.ndarray
    tgt_mask: np.ndarray

    @property
    def size(self):
        return self.src.shape[0]

    @property
    def num_target_tokens(self):
        return int(self.tgt_mask.sum())


def make_batch(pairs, dtype=np.float64):
    """Pad (source ids, target ids) pairs; targets must already end in ``</s>``."""
    if not pairs:
        raise ContractError("empty batch")
    B = len(pairs)
    Ts = max(len(s) for s, _ in pairs)
    Tt = max(len(t) for _, t in pairs)
    src = np.full((B, Ts), EOS, dtype=np.int64)
    src_mask = np.zeros((B, Ts), dtype=dtype)
    tgt_in = np.full((B, Tt), EOS, dtype=np.int64)
    tgt_out = np.full((B, Tt), EOS, dtype=np.int64)
    tgt_mask = np.zeros((B, Tt), dtype=dtype)
    for b, (s, t) in enumerate(pairs):
        if len(s) == 0 or len(t) == 0:
            raise ContractError("source and target sequences must be nonempty")
        src[b, :len(s)] = s
        src_mask[b, :len(s)] = 1.0
        tgt_out[b, :len(t)] = t
        tgt_in[b, 0] = BOS
        tgt_in[b, 1:len(t)] = t[:-1]
        tgt_mask[b, :len(t)] = 1.0
    return Batch(src, src_mask, tgt_in, tgt_out, tgt_mask)


@dataclass
class EncoderOutput:
    states: object          # StackedEncoderStates
    memory: object          # [B, T, enc_dim]
    keys: object            # [B, T, attention]
    mask: np.ndarray        # [B, T]
    score_bias: object      # [B, T] additive mask or None


@dataclass
class AttentionResult:
    weights: object         # [B, T]
    context: object         # [B, enc_dim]


@dataclass
class ForwardResult:
    log_likelihood: object  # [B] per-sentence log P(y|x)
    encoder: EncoderOutput
    decoder_states: list    # per target position: StackedDecoderStates


class Seq2SeqModel:
    """One task's model. Parameters live in a shared store under
    ``{prefix}/...`` names, which may be aliases of shared entries."""

    def __init__(self, dims, prefix="model"):
        self.dims = dims
        self.prefix = prefix
        d = dims
        enc = []
        for layer in range(1, d.enc_layers + 1):
            in_dim = d.embedding if layer == 1 else 2 * d.hidden
            enc.append((make_cell(d.cell, f"{prefix}/enc/layer{layer}/fwd", in_dim, d.hidden),
                        make_cell(d.cell, f"{prefix}/enc/layer{layer}/bwd", in_dim, d.hidden)))
        self.encoder = StackedEncoder(enc)
        self.decoder = StackedDecoder([
            make_cell(d.cell, f"{prefix}/dec/layer{layer}", d.hidden, d.hidden)
            for layer in range(1, d.dec_layers + 1)])

    def name(self, path):
        return f"{self.prefix}/{path}"

    def parameter_shapes(self):
        """Map of full parameter name -> shape (matrices [out, in])."""
        d = self.dims
        E, H, A = d.embedding, d.hidden, d.attention
        Denc, Ddec = d.enc_dim, d.dec_dim
        shapes = {
            self.name("emb/src/E_S"): (d.src_vocab, E),
            self.name("emb/tgt/E_T"): (d.tgt_vocab, E),
        }
        for f, b in self.encoder.layers:
            shapes.update(f.shapes())
            shapes.update(b.shapes())
        for c in self.decoder.layers:
            shapes.update(c.shapes())
        shapes.update({
            self.name("dec/input/W_sj"): (H, E),
            self.name("dec/input/W_sc"): (H, Denc),
            self.name("att/W_ae"): (A, Denc),
            self.name("att/W_at"): (A, Ddec),
            self.name("att/v"): (A,),
            self.name("out/W_y"): (d.tgt_vocab, Ddec),
            self.name("out/b_r"): (d.tgt_vocab,),
            self.name("out/W_rc"): (Ddec, Denc),
            self.name("out/W_rj"): (Ddec, E),
        })
        return shapes

    @property
    def names(self):
        return list(self.parameter_shapes())

    def register(self, store, rng):
        """Create private (untied) parameters for a standalone model."""
        for name, shape in self.parameter_shapes().items():
            store.add(name, shape, rng=rng, init=_init_for(name, shape))

    # forward pieces

    def encode(self, scope, src, src_mask=None):
        src = np.asarray(src)
        if src.ndim != 2 or src.shape[1] == 0:
            raise ContractError("encode expects a nonempty [B, T] id array")
        if src.min() < 0 or src.max() >= self.dims.src_vocab:
            raise ContractError("source token id out of range")
        E_S = scope.param(self.name("emb/src/E_S"))
        embedded = [ops.lookup(E_S, src[:, t]) for t in range(src.shape[1])]
        mask = None if src_mask is None or src_mask.all() else src_mask
        states = self.encoder.run(scope, embedded, mask)
        memory = ops.stack(states.concat, axis=1)
        keys = ops.matmul(memory, scope.param(self.name("att/W_ae")), transpose_b=True)
        bias = None
        if mask is not None:
            bias = scope.const((mask - 1.0) * _NEG)
        full_mask = np.ones(src.shape) if src_mask is None else src_mask
        return EncoderOutput(states, memory, keys, full_mask, bias)

    def attend(self, scope, enc, s_prev):
        """Additive attention of decoder state ``s_prev`` [B, dec_dim] over the
        encoder memory."""
        B, T, A = enc.keys.value.shape
        q = ops.matmul(s_prev, scope.param(self.name("att/W_at")), transpose_b=True)
        e = ops.tanh(ops.add(enc.keys, ops.reshape(q, (B, 1, A))))
        scores = ops.matmul(e, scope.param(self.name("att/v")))
        if enc.score_bias is not None:
            scores = ops.add(scores, enc.score_bias)
        alpha = ops.softmax(scores)
        context = ops.sum_(ops.mul(ops.reshape(alpha, (B, T, 1)), enc.memory), axis=1)
        return AttentionResult(alpha, context)

    def initial_state(self, scope, batch_size):
        return self.decoder.initial_states(scope, batch_size)

    def step_logits(self, scope, enc, state, prev_ids):
        prev_ids = np.asarray(prev_ids)
        if prev_ids.size and (prev_ids.min() < 0 or prev_ids.max() >= self.dims.tgt_vocab):
            raise ContractError("previous target token id out of range")
        emb = ops.lookup(scope.param(self.name("emb/tgt/E_T")), prev_ids)
        att = self.attend(scope, enc, state.concat)
        c = att.context
        x1 = ops.add(ops.matmul(emb, scope.param(self.name("dec/input/W_sj")), transpose_b=True),
                     ops.matmul(c, scope.param(self.name("dec/input/W_sc")), transpose_b=True))
        new = step_stacked_decoder(scope, self.decoder.layers, state, x1)
        r = ops.tanh(ops.add(
            ops.add(new.concat,
                    ops.matmul(c, scope.param(self.name("out/W_rc")), transpose_b=True)),
            ops.matmul(emb, scope.param(self.name("out/W_rj")), transpose_b=True)))
        logits = ops.add(ops.matmul(r, scope.param(self.name("out/W_y")), transpose_b=True),
                         scope.param(self.name("out/b_r")))
        return logits, new, att

    def decode_step(self, scope, enc, state, prev_ids):
        """One decoding step: (distribution over the target vocabulary, new state)."""
        logits, new, _ = self.step_logits(scope, enc, state, prev_ids)
        return ops.softmax(logits), new

    def forward(self, scope, batch):
        """Teacher-forced per-sentence log-likelihood of a padded batch."""
        enc = self.encode(scope, batch.src, batch.src_mask)
        state = self.initial_state(scope, batch.size)
        nll_steps, dec_states = [], []
        for j in range(batch.tgt_in.shape[1]):
            logits, state, _ = self.step_logits(scope, enc, state, batch.tgt_in[:, j])
            gold = batch.tgt_out[:, j]
            if gold.max() >= self.dims.tgt_vocab or gold.min() < 0:
                raise ContractError("target token id out of range")
            nll_steps.append(ops.pickneglogsoftmax(logits, gold))
            dec_states.append(state)
        nll = ops.stack(nll_steps, axis=1)
        if not batch.tgt_mask.all():
            nll = ops.mul(nll, scope.const(batch.tgt_mask))
        ll = ops.scale(ops.sum_(nll, axis=1), -1.0)
        return ForwardResult(ll, enc, dec_states)

    def log_likelihood(self, scope, batch):
        return self.forward(scope, batch).log_likelihood


def _init_for(name, shape):
    return "zeros" if len(shape) == 1 and not name.endswith("/v") else "glorot"


def inference_scope(store):
    """Scope with every parameter frozen: no backward closures are built."""
    return Scope(store, train=False, frozen=lambda _: True)


def sentence_log_likelihood(model, store, source, target, scope=None):
    """Scalar node: sum_j log P(y_j | y_<j, x) under teacher forcing.

    ``target`` must end with ``</s>``.
    """
    if len(source) == 0 or len(target) == 0:
        raise ContractError("source and target must be nonempty")
    if target[-1] != EOS:
        raise ContractError("target must end with the end-of-sequence marker")
    scope = scope or Scope(store)
    batch = make_batch([(list(source), list(target))], dtype=store.dtype)
    return ops.sum_(model.log_likelihood(scope, batch))


def greedy_decode_batch(model, store, sources, max_len):
    """Greedy decoding for a list of sources. Each output ends at (and
    includes) ``</s>`` or stops after ``max_len`` tokens. Ties in the argmax
    go to the lowest token id."""
    if max_len < 1:
        raise ContractError("max_len must be >= 1")
    if not sources:
        return []
    scope = inference_scope(store)
    B = len(sources)
    Ts = max(len(s) for s in sources)
    src = np.full((B, Ts), EOS, dtype=np.int64)
    mask = np.zeros((B, Ts), dtype=store.dtype)
    for b, s in enumerate(sources):
        if len(s) == 0:
            raise ContractError("cannot decode an empty source")
        src[b, :len(s)] = s
        mask[b, :len(s)] = 1.0
    enc = model.encode(scope, src, mask)
    state = model.initial_state(scope, B)
    prev = np.full(B, BOS, dtype=np.int64)
    outputs = [[] for _ in range(B)]
    done = np.zeros(B, dtype=bool)
    for _ in range(max_len):
        logits, state, _ = model.step_logits(scope, enc, state, prev)
        prev = np.argmax(logits.value, axis=-1).astype(np.int64)
        for b in range(B):
            if not done[b]:
                outputs[b].append(int(prev[b]))
                if prev[b] == EOS:
                    done[b] = True
        if done.all():
            break
    return outputs


def greedy_decode(model, store, source, max_len):
    return greedy_decode_batch(model, store, [list(source)], max_len)[0]


def strip_eos(tokens):
    return tokens[:-1] if tokens and tokens[-1] == EOS else list(tokens)
