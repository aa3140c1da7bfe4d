"""Checkpoint container: parameters, sharing plan, optimizer state, progress.

Layout (little-endian)::

    b"SMTLCKPT"  u32 version
    u32 n  + n bytes UTF-8 JSON metadata
    u64 n  + n bytes parameter container (model and ``disc/`` parameters)
    u64 n  + n bytes parameter container of optimizer moments
              (``m/<name>``, ``v/<name>``, ``dm/<name>``, ``dv/<name>``)
"""

import copy
import io
import json
import math
import struct

import numpy as np

from ..autodiff import ParameterStore
from ..errors import ConfigError, DataError
from ..model import EOS
from .optim import Adam
from .plan import SharingPlan

MAGIC = b"SMTLCKPT"
VERSION = 1


class Checkpoint:
    def __init__(self, store, plan, config, tasks, epoch=0, best_dev=math.inf,
                 history=None, step_count=0, optimizer=None, disc_optimizer=None):
        self.store = store
        self.plan = plan
        self.config = config
        self.tasks = tasks          # [{"name", "src_vocab_size", "tgt_vocab_size", "gamma", "train_size"}]
        self.epoch = epoch
        self.best_dev = best_dev
        self.history = list(history or [])
        self.step_count = step_count
        self.optimizer = optimizer or Adam(config.lr)
        self.disc_optimizer = disc_optimizer

    @property
    def lr(self):
        return self.optimizer.lr

    @property
    def config_hash(self):
        return self.config.hash(self.plan)

    @classmethod
    def from_engine(cls, engine, base=None):
        """Deep copy of the engine's current state. ``base`` supplies task
        metadata when the engine runs with stand-in auxiliary tasks."""
        if base is not None:
            tasks = copy.deepcopy(base.tasks)
        else:
            tasks = [{"name": t.name, "src_vocab_size": t.src_vocab_size,
                      "tgt_vocab_size": t.tgt_vocab_size, "gamma": t.gamma,
                      "train_size": len(t.train)} for t in engine.tasks]
        return cls(ParameterStore.from_bytes(engine.store.to_bytes()), engine.plan,
                   engine.config, tasks, engine.epoch, engine.best_dev, engine.history,
                   engine.step_count, engine.optimizer.copy(),
                   engine.disc_optimizer.copy() if engine.disc_optimizer else None)

    def copy(self):
        return Checkpoint.from_bytes(self.to_bytes())

    def to_engine(self, tasks):
        """Rebuild a training engine over a copy of these parameters."""
        from .engine import MTLEngine
        if len(tasks) != len(self.tasks):
            raise ConfigError(f"checkpoint has {len(self.tasks)} tasks, got {len(tasks)}")
        for t, meta in zip(tasks, self.tasks):
            if (t.src_vocab_size, t.tgt_vocab_size) != (meta["src_vocab_size"], meta["tgt_vocab_size"]):
                raise ConfigError(f"task {t.name!r}: vocabulary sizes differ from the checkpoint")
        store = ParameterStore.from_bytes(self.store.to_bytes())
        engine = MTLEngine(tasks, self.plan, self.config, store=store)
        engine.optimizer = self.optimizer.copy()
        if self.disc_optimizer is not None and engine.disc_optimizer is not None:
            engine.disc_optimizer = self.disc_optimizer.copy()
        engine.epoch = self.epoch
        engine.best_dev = self.best_dev
        engine.step_count = self.step_count
        return engine

    def stand_in_tasks(self, main_task):
        """``main_task`` plus data-free placeholders for the auxiliary tasks,
        sized like the originals so objective weights are unchanged."""
        from .engine import TaskSpec
        out = [main_task]
        for m, meta in enumerate(self.tasks[1:], start=1):
            out.append(TaskSpec(m, meta["name"], [((), (EOS,))] * meta["train_size"],
                                meta["src_vocab_size"], meta["tgt_vocab_size"],
                                gamma=meta["gamma"]))
        return out

    # serialization

    def metadata(self):
        opt = self.optimizer.state_dict()
        dopt = self.disc_optimizer.state_dict() if self.disc_optimizer else None
        return {"plan": self.plan.to_dict(), "config": self.config.to_dict(),
                "config_hash": self.config_hash, "tasks": self.tasks, "epoch": self.epoch,
                "best_dev": self.best_dev, "lr": self.optimizer.lr,
                "step_count": self.step_count, "history": self.history,
                "optimizer": opt, "disc_optimizer": dopt}

    def to_bytes(self):
        meta = json.dumps(self.metadata(), sort_keys=True).encode("utf-8")
        params = self.store.to_bytes()
        moments = ParameterStore(dtype=self.store.dtype)
        for tag, opt in (("", self.optimizer), ("d", self.disc_optimizer)):
            if opt is None:
                continue
            for name, (m, v) in sorted(opt.moments().items()):
                moments.add(f"{tag}m/{name}", value=m)
                moments.add(f"{tag}v/{name}", value=v)
        mbytes = moments.to_bytes()
        buf = io.BytesIO()
        buf.write(MAGIC)
        buf.write(struct.pack("<II", VERSION, len(meta)))
        buf.write(meta)
        buf.write(struct.pack("<Q", len(params)))
        buf.write(params)
        buf.write(struct.pack("<Q", len(mbytes)))
        buf.write(mbytes)
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data):
        from .engine import TrainConfig
        fh = io.BytesIO(data)
        if fh.read(len(MAGIC)) != MAGIC:
            raise DataError("not a checkpoint (bad magic)")
        version, n = struct.unpack("<II", _read(fh, 8))
        if version != VERSION:
            raise DataError(f"unsupported checkpoint version {version}")
        try:
            meta = json.loads(_read(fh, n).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise DataError(f"corrupt checkpoint metadata: {exc}") from exc
        (n,) = struct.unpack("<Q", _read(fh, 8))
        store = ParameterStore.from_bytes(_read(fh, n))
        (n,) = struct.unpack("<Q", _read(fh, 8))
        moments = ParameterStore.from_bytes(_read(fh, n))
        plan = SharingPlan.from_dict(meta["plan"])
        config = TrainConfig.from_dict(meta["config"])
        if config.hash(plan) != meta["config_hash"]:
            raise DataError("checkpoint config hash does not match its config")
        optimizer = _load_opt(meta["optimizer"], moments, "")
        dopt = _load_opt(meta["disc_optimizer"], moments, "d") if meta["disc_optimizer"] else None
        return cls(store, plan, config, meta["tasks"], meta["epoch"], meta["best_dev"],
                   meta["history"], meta["step_count"], optimizer, dopt)

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path):
        try:
            with open(path, "rb") as fh:
                return cls.from_bytes(fh.read())
        except FileNotFoundError as exc:
            raise DataError(f"checkpoint not found: {path}") from exc

    def translation_store(self):
        """Parameters without the discriminator."""
        out = ParameterStore(dtype=self.store.dtype)
        for name, e in self.store.entries.items():
            if not name.startswith("disc/"):
                out.add(name, value=e.value.copy())
        out.aliases.update(self.store.aliases)
        return out


def _load_opt(meta, moments, tag):
    opt = Adam()
    mom = {name: (moments.value(f"{tag}m/{name}"), moments.value(f"{tag}v/{name}"))
           for name in meta["steps"]}
    opt.load(meta, mom)
    return opt


def _read(fh, n):
    data = fh.read(n)
    if len(data) != n:
        raise DataError("truncated checkpoint")
    return data


def checkpoints_equal(a, b):
    return a.to_bytes() == b.to_bytes()


def load_models(checkpoint):
    """Per-task models bound to a discriminator-free copy of the parameters."""
    from .engine import TaskSpec
    from .plan import build_mtl_models
    cfg = checkpoint.config
    dims = [cfg.dims_for(TaskSpec(m, t["name"], [None], t["src_vocab_size"], t["tgt_vocab_size"]))
            for m, t in enumerate(checkpoint.tasks)]
    scratch = ParameterStore(dtype=checkpoint.store.dtype)
    models = build_mtl_models(dims, checkpoint.plan, scratch, np.random.default_rng(0))
    store = checkpoint.translation_store()
    from .engine import _check_layout
    _check_layout(scratch, store)
    return models, store
