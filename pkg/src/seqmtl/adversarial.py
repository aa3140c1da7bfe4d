"""Task discriminator over shared-layer states and the two adversarial terms.

The discriminator reads the tied encoder layers' states (per source
position) and the tied decoder layers' states (per target position, teacher
forced) with one LSTM each, concatenates the two final hidden states into
``h_d`` and predicts ``softmax(W_d h_d + b_d)`` over the M+1 tasks.

* discriminator term: ``sum log P(m | h_d)``, trained w.r.t. the
  discriminator only; the shared states enter as constants.
* confusion term: ``sum H[P(. | h_d)]``, trained w.r.t. the shared
  model only; discriminator parameters enter as constants.
"""

from dataclasses import dataclass

import numpy as np

from .autodiff import Scope, backward, ops
from .cells import LSTMCell, run_unidirectional
from .errors import ConfigError, ContractError, NumericError
from .model import inference_scope

PREFIX = "disc"


def is_disc_param(name):
    return name.startswith(PREFIX + "/")


@dataclass
class SharedRep:
    enc: list               # per source position: [B, enc_dim] (ascending layers)
    enc_mask: np.ndarray    # [B, Ts]
    dec: list               # per target position: [B, dec_dim]
    dec_mask: np.ndarray    # [B, Tt]

    @property
    def batch_size(self):
        seq = self.enc or self.dec
        return seq[0].value.shape[0]

    def detach(self):
        return SharedRep([n.detach() for n in self.enc], self.enc_mask,
                         [n.detach() for n in self.dec], self.dec_mask)


def extract_shared(result, batch, enc_layers, dec_layers):
    """Concatenate, per time step, the states of the listed (1-based) layers."""
    enc = []
    if enc_layers:
        layers = result.encoder.states.layers
        enc = [ops.concat([layers[l - 1][i] for l in enc_layers])
               for i in range(len(layers[0]))]
    dec = []
    if dec_layers:
        dec = [ops.concat([st.outputs[l - 1] for l in dec_layers])
               for st in result.decoder_states]
    return SharedRep(enc, batch.src_mask, dec, batch.tgt_mask)


class TaskDiscriminator:
    def __init__(self, num_tasks, enc_dim, dec_dim, hidden=200):
        if num_tasks < 2:
            raise ConfigError("a task discriminator needs at least two tasks")
        if not enc_dim and not dec_dim:
            raise ConfigError("discriminator needs shared layers on at least one side")
        self.num_tasks = num_tasks
        self.hidden = hidden
        self.enc_lstm = LSTMCell(f"{PREFIX}/enc_lstm", enc_dim, hidden) if enc_dim else None
        self.dec_lstm = LSTMCell(f"{PREFIX}/dec_lstm", dec_dim, hidden) if dec_dim else None
        self.summary_dim = hidden * ((self.enc_lstm is not None) + (self.dec_lstm is not None))

    @classmethod
    def for_plan(cls, plan, dims, hidden=200):
        enc_dim = 2 * dims.hidden * len(plan.common_enc_layers())
        dec_dim = dims.hidden * len(plan.common_dec_layers())
        return cls(plan.num_tasks, enc_dim, dec_dim, hidden)

    def shapes(self):
        out = {}
        for cell in (self.enc_lstm, self.dec_lstm):
            if cell is not None:
                out.update(cell.shapes())
        out[f"{PREFIX}/W_d"] = (self.num_tasks, self.summary_dim)
        out[f"{PREFIX}/b_d"] = (self.num_tasks,)
        return out

    @property
    def names(self):
        return list(self.shapes())

    def register(self, store, rng):
        for name, shape in self.shapes().items():
            store.add(name, shape, rng=rng, init="zeros" if len(shape) == 1 else "glorot")

    def summarize(self, scope, rep):
        parts = []
        for cell, seq, mask in ((self.enc_lstm, rep.enc, rep.enc_mask),
                                (self.dec_lstm, rep.dec, rep.dec_mask)):
            if cell is None:
                continue
            if not seq:
                raise ContractError("shared representation is empty on one side")
            m = None if mask.all() else mask
            # masked steps freeze the state, so the last output is each
            # sequence's state at its true end
            parts.append(run_unidirectional(scope, cell, seq, m)[-1])
        return ops.concat(parts)

    def logits(self, scope, rep):
        h_d = self.summarize(scope, rep)
        return ops.add(ops.matmul(h_d, scope.param(f"{PREFIX}/W_d"), transpose_b=True),
                       scope.param(f"{PREFIX}/b_d"))

    def discriminate(self, scope, rep):
        """[B, M+1] task distribution."""
        return ops.softmax(self.logits(scope, rep))


def adv1_objective(scope, disc, labeled_reps):
    """sum over items of log P(task | h_d); ``labeled_reps`` is [(rep, task id)].
    Representations are detached, so only discriminator parameters get gradient."""
    terms = []
    for rep, task in labeled_reps:
        if not 0 <= task < disc.num_tasks:
            raise ContractError(f"task id {task} outside 0..{disc.num_tasks - 1}")
        logits = disc.logits(scope, rep.detach())
        labels = np.full(rep.batch_size, task, dtype=np.int64)
        terms.append(ops.sum_(ops.pickneglogsoftmax(logits, labels)))
    total = terms[0]
    for t in terms[1:]:
        total = ops.add(total, t)
    return ops.scale(total, -1.0)


def adv2_objective(scope, disc, reps):
    """sum over items of the entropy of the predicted task distribution.
    Call with a scope that freezes ``disc/`` parameters."""
    terms = [ops.sum_(ops.entropy(disc.discriminate(scope, rep))) for rep in reps]
    total = terms[0]
    for t in terms[1:]:
        total = ops.add(total, t)
    return total


def adversarial_train_step(engine, lam, batches=None):
    """One alternation on one scheduled step.

    (a) update the seq2seq parameters to maximize L_mtl + lam * L_adv2;
    (b) update the discriminator ``engine.config.adv_ratio`` times to
        maximize L_adv1 on the same step's (pre-update) shared states.
    Returns ``(mtl objective, adv2, adv1)`` values.
    """
    if lam < 0:
        raise ContractError("lambda must be >= 0")
    disc = engine.discriminator
    if disc is None:
        raise ConfigError("engine has no discriminator")
    if batches is None:
        batches = engine.draw_batches()
    enc_layers = engine.plan.common_enc_layers()
    dec_layers = engine.plan.common_dec_layers()

    # (a) shared model; discriminator frozen
    scope = engine.train_scope(frozen=is_disc_param)
    objective, results = engine.mtl_objective(scope, batches, return_results=True)
    reps = [(extract_shared(results[m], batches[m], enc_layers, dec_layers), m)
            for m in sorted(results)]
    adv2 = adv2_objective(scope, disc, [r for r, _ in reps])
    total = ops.add(objective, ops.scale(adv2, lam))
    loss = ops.scale(total, -1.0)
    if not np.isfinite(loss.value).all():
        raise NumericError(f"non-finite loss in adversarial phase (a) at step {engine.step_count}")
    engine.store.zero_grads()
    backward(loss)
    engine.optimizer.step(engine.store, scope.trainable_names())
    engine.step_count += 1

    # (b) discriminator; shared states are constants
    adv1_value = None
    for _ in range(max(1, engine.config.adv_ratio)):
        dscope = Scope(engine.store, train=False,
                       frozen=lambda n: not is_disc_param(n))
        adv1 = adv1_objective(dscope, disc, reps)
        if not np.isfinite(adv1.value).all():
            raise NumericError(
                f"non-finite loss in adversarial phase (b) at step {engine.step_count}")
        engine.store.zero_grads(dscope.trainable_names())
        backward(ops.scale(adv1, -1.0))
        engine.disc_optimizer.step(engine.store, dscope.trainable_names())
        adv1_value = float(adv1.value)
    return float(objective.value), float(adv2.value), adv1_value


def discriminator_accuracy(engine, split="dev", batch_size=64):
    """Fraction of items whose task the discriminator predicts correctly,
    using the current (dropout-free) shared states."""
    from .model import make_batch
    disc = engine.discriminator
    scope = inference_scope(engine.store)
    enc_layers = engine.plan.common_enc_layers()
    dec_layers = engine.plan.common_dec_layers()
    correct = total = 0
    for m, task in enumerate(engine.tasks):
        pairs = getattr(task, split)
        for i in range(0, len(pairs), batch_size):
            batch = make_batch(pairs[i:i + batch_size], dtype=engine.store.dtype)
            res = engine.models[m].forward(scope, batch)
            rep = extract_shared(res, batch, enc_layers, dec_layers)
            pred = np.argmax(disc.logits(scope, rep).value, axis=-1)
            correct += int((pred == m).sum())
            total += batch.size
    return correct / total if total else 0.0
