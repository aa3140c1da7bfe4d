"""Multi-task training: weighted objective, scheduling, dev-driven halving,
best-model selection, and main-task adaptation."""

import hashlib
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from ..autodiff import ParameterStore, Scope, backward, ops, set_check_numerics
from ..errors import ConfigError, ContractError, NumericError
from ..evaluation import corpus_perplexity
from ..model import ModelDims, greedy_decode_batch, make_batch
from .optim import Adam
from .plan import SharingPlan, build_mtl_models
from .schedule import TaskScheduler, split_rng

log = logging.getLogger(__name__)


@dataclass
class TaskSpec:
    """One transduction task; id 0 is the main task."""

    id: int
    name: str
    train: list
    src_vocab_size: int
    tgt_vocab_size: int
    dev: list = field(default_factory=list)
    test: list = field(default_factory=list)
    gamma: float = 1.0

    def __post_init__(self):
        if len(self.train) < 1:
            raise ConfigError(f"task {self.name!r} has an empty training set")
        if self.gamma < 0:
            raise ConfigError(f"task {self.name!r}: gamma must be >= 0")


def check_tasks(tasks):
    ids = [t.id for t in tasks]
    if ids != list(range(len(tasks))):
        raise ConfigError(f"task ids must be 0..{len(tasks) - 1} in order, got {ids}")


@dataclass
class TrainConfig:
    embedding: int = 400
    hidden: int = 400
    attention: int = 200
    enc_layers: int = 3
    dec_layers: int = 3
    cell: str = "gru"
    lr: float = 0.003
    batch_size: int = 32
    dropout: float = 0.5
    epochs: int = 50
    adapt_epochs: int = 20
    adversarial: bool = False
    adv_lambda: float = 0.5
    adv_ratio: int = 1
    disc_hidden: int = 200
    seed: int = 0
    dtype: str = "float64"
    check_numerics: bool = False

    def __post_init__(self):
        if self.batch_size < 1 or self.epochs < 0 or self.adapt_epochs < 0:
            raise ConfigError("batch_size must be >= 1 and epoch counts >= 0")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must lie in [0, 1)")
        if self.lr <= 0:
            raise ConfigError("learning rate must be positive")
        if self.adv_lambda < 0:
            raise ConfigError("adversarial lambda must be >= 0")
        if self.dtype not in ("float64", "float32"):
            raise ConfigError("dtype must be float64 or float32")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown training options: {sorted(unknown)}")
        return cls(**d)

    def hash(self, plan=None):
        payload = {"config": self.to_dict(), "plan": plan.to_dict() if plan else None}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()

    def dims_for(self, task):
        return ModelDims(task.src_vocab_size, task.tgt_vocab_size, self.embedding,
                         self.hidden, self.attention, self.enc_layers, self.dec_layers, self.cell)


def mtl_objective(scope, batches, tasks, models, return_results=False):
    """sum_m gamma_m / |D_m| * sum_{(x,y) in batch_m} log P(y|x)."""
    if 0 not in batches:
        raise ContractError("the main task (id 0) must be present in every objective")
    total = None
    results = {}
    for m in sorted(batches):
        res = models[m].forward(scope, batches[m])
        results[m] = res
        term = ops.scale(ops.sum_(res.log_likelihood), tasks[m].gamma / len(tasks[m].train))
        total = term if total is None else ops.add(total, term)
    return (total, results) if return_results else total


class MTLEngine:
    """Owns the parameter store, per-task models, optimizer, and schedule."""

    def __init__(self, tasks, plan, config, store=None):
        check_tasks(tasks)
        if plan.num_tasks != len(tasks):
            raise ConfigError(f"plan declares {plan.num_tasks} tasks, got {len(tasks)}")
        if plan.enc_layers != config.enc_layers or plan.dec_layers != config.dec_layers:
            raise ConfigError("plan layer counts disagree with the model config")
        self.tasks = list(tasks)
        self.plan = plan
        self.config = config
        self.dims = [config.dims_for(t) for t in tasks]
        fresh = store is None
        if fresh:
            store = ParameterStore(dtype=np.dtype(config.dtype))
            init_rng = split_rng(config.seed, "init")
            self.models = build_mtl_models(self.dims, plan, store, init_rng)
        else:
            scratch = ParameterStore(dtype=store.dtype)
            self.models = build_mtl_models(self.dims, plan, scratch, np.random.default_rng(0))
            _check_layout(scratch, store)
        self.store = store
        self.optimizer = Adam(config.lr)
        self.scheduler = TaskScheduler([len(t.train) for t in tasks], config.batch_size,
                                       split_rng(config.seed, "schedule"))
        self.dropout_rng = split_rng(config.seed, "dropout")
        self.discriminator = None
        self.disc_optimizer = None
        if config.adversarial:
            from ..adversarial import TaskDiscriminator
            self.discriminator = TaskDiscriminator.for_plan(plan, self.dims[0], config.disc_hidden)
            if fresh:
                self.discriminator.register(store, split_rng(config.seed, "disc"))
            self.disc_optimizer = Adam(config.lr)
        self.step_count = 0
        self.epoch = 0
        self.best_dev = math.inf
        self.history = []

    # single updates

    def train_scope(self, frozen=None):
        return Scope(self.store, train=True, rng=self.dropout_rng,
                     dropout=self.config.dropout, frozen=frozen)

    def draw_batches(self):
        out = {}
        for m, idx in self.scheduler.next_step():
            pairs = [self.tasks[m].train[i] for i in idx]
            out[m] = make_batch(pairs, dtype=self.store.dtype)
        return out

    def mtl_objective(self, scope, batches, return_results=False):
        return mtl_objective(scope, batches, self.tasks, self.models, return_results)

    def mtl_step(self, batches=None):
        """One plain SGD update on L_mtl. Returns the objective value."""
        if batches is None:
            batches = self.draw_batches()
        scope = self.train_scope()
        try:
            objective = self.mtl_objective(scope, batches)
        except NumericError as exc:
            raise NumericError(f"step {self.step_count} (tasks {sorted(batches)}): {exc}") from exc
        if not np.isfinite(objective.value).all():
            raise NumericError(
                f"non-finite loss at step {self.step_count} (tasks {sorted(batches)})")
        self.store.zero_grads()
        backward(ops.scale(objective, -1.0))
        self.optimizer.step(self.store, scope.trainable_names())
        self.step_count += 1
        return float(objective.value)

    def step(self):
        if self.discriminator is not None:
            from ..adversarial import adversarial_train_step
            return adversarial_train_step(self, self.config.adv_lambda)[0]
        return self.mtl_step()

    # evaluation

    def dev_perplexity(self, task=0, split="dev"):
        pairs = getattr(self.tasks[task], split)
        if not pairs:
            pairs = self.tasks[task].train
        return corpus_perplexity(self.models[task], self.store, pairs)

    def translate(self, sources, task=0, max_len=None, batch_size=64):
        out = []
        for i in range(0, len(sources), batch_size):
            chunk = [list(s) for s in sources[i:i + batch_size]]
            limit = max_len or (2 * max(len(s) for s in chunk) + 10)
            out.extend(greedy_decode_batch(self.models[task], self.store, chunk, limit))
        return out

    # epochs

    def run_epoch(self):
        steps = self.scheduler.steps_per_epoch()
        total = 0.0
        for _ in range(steps):
            total += self.step()
        self.epoch += 1
        return total / steps

    def end_of_epoch(self, train_objective, started):
        """Dev perplexity, halving, best tracking. Returns True on a new best."""
        dev = self.dev_perplexity(0)
        improved = dev < self.best_dev
        if dev > self.best_dev:
            self.optimizer.halve()
            if self.disc_optimizer is not None:
                self.disc_optimizer.halve()
        if improved:
            self.best_dev = dev
        self.history.append({"epoch": self.epoch, "train_objective": train_objective,
                             "dev_ppl": dev, "lr": self.optimizer.lr})
        log.info("epoch %d dev_ppl %.4f lr %.6g %.1fs%s", self.epoch, dev, self.optimizer.lr,
                 time.time() - started, " (best)" if improved else "")
        return improved

    def fit(self, epochs=None, sink=None, on_epoch=None):
        """Train for ``epochs`` epochs; returns the best-dev checkpoint."""
        from .checkpoint import Checkpoint
        epochs = self.config.epochs if epochs is None else epochs
        old = set_check_numerics(self.config.check_numerics)
        best = Checkpoint.from_engine(self)
        try:
            for _ in range(epochs):
                started = time.time()
                obj = self.run_epoch()
                improved = self.end_of_epoch(obj, started)
                if improved:
                    best = Checkpoint.from_engine(self)
                if sink is not None:
                    sink(Checkpoint.from_engine(self), improved)
                if on_epoch is not None:
                    on_epoch(self)
        finally:
            set_check_numerics(old)
        best.history = list(self.history)
        return best

    def main_parameter_names(self):
        return sorted({self.store.resolve(n) for n in self.models[0].names})


def _check_layout(expected, actual):
    exp = {n: e.value.shape for n, e in expected.entries.items()}
    got = {n: e.value.shape for n, e in actual.entries.items() if not n.startswith("disc/")}
    if exp != got or expected.aliases != actual.aliases:
        missing = sorted(set(exp) ^ set(got))[:5]
        raise ConfigError(f"checkpoint does not match the model/plan layout (e.g. {missing})")


def train(tasks, plan, config, sink=None, on_epoch=None):
    """Build an engine from scratch and train; returns the best-dev checkpoint."""
    engine = MTLEngine(tasks, plan, config)
    return engine.fit(sink=sink, on_epoch=on_epoch)


def adapt(checkpoint, main_task, epochs=20, sink=None):
    """Continue training on the main task only, keeping the best-dev model.

    Only parameters reachable from the main task's model (its private and
    shared layers) are updated; other tasks' private parameters and the
    discriminator are left bit-identical.
    """
    if epochs < 0:
        raise ContractError("epochs must be >= 0")
    from .checkpoint import Checkpoint
    if epochs == 0:
        return checkpoint.copy()
    if main_task.id != 0:
        raise ContractError("the adapted task must carry id 0")
    engine = checkpoint.to_engine(checkpoint.stand_in_tasks(main_task))
    cfg = engine.config
    main = engine.tasks[0]
    engine.scheduler = TaskScheduler([len(main.train)], cfg.batch_size,
                                     split_rng(cfg.seed, "adapt"))
    allowed = set(engine.main_parameter_names())
    best = checkpoint.copy()
    engine.best_dev = engine.dev_perplexity(0)
    best.best_dev = engine.best_dev
    engine.discriminator = None  # adaptation is plain likelihood training
    old = set_check_numerics(cfg.check_numerics)
    try:
        for _ in range(epochs):
            started = time.time()
            steps = engine.scheduler.steps_per_epoch()
            total = 0.0
            for _ in range(steps):
                idx = engine.scheduler.next_step()[0][1]
                batch = make_batch([main.train[i] for i in idx], dtype=engine.store.dtype)
                scope = engine.train_scope(frozen=lambda n: n not in allowed)
                objective = mtl_objective(scope, {0: batch}, engine.tasks, engine.models)
                if not np.isfinite(objective.value).all():
                    raise NumericError(f"non-finite loss during adaptation at step {engine.step_count}")
                engine.store.zero_grads()
                backward(ops.scale(objective, -1.0))
                engine.optimizer.step(engine.store, scope.trainable_names())
                engine.step_count += 1
                total += float(objective.value)
            engine.epoch += 1
            improved = engine.end_of_epoch(total / steps, started)
            if improved:
                best = Checkpoint.from_engine(engine, base=checkpoint)
            if sink is not None:
                sink(Checkpoint.from_engine(engine, base=checkpoint), improved)
    finally:
        set_check_numerics(old)
    best.history = checkpoint.history + engine.history
    return best


def with_overrides(config, **kw):
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
