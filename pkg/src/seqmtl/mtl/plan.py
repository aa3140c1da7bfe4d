"""Sharing plans: which layers and components are tied across tasks.

For auxiliary task m, encoder layers ``enc_start[m] .. L`` (1-based) are
tied to the main task's, likewise decoder layers ``dec_start[m] .. L'``.
A start of ``L + 1`` means nothing is shared on that side. Tied parameters
live under ``shared/<path>``; every task's ``task{m}/<path>`` is an alias.
"""

import re
from dataclasses import dataclass, field

from ..errors import ConfigError
from ..model import ModelDims, Seq2SeqModel, _init_for

_ENC = re.compile(r"^enc/layer(\d+)/")
_DEC = re.compile(r"^dec/layer(\d+)/")


@dataclass
class SharingPlan:
    num_tasks: int
    enc_layers: int
    dec_layers: int
    enc_start: dict = field(default_factory=dict)   # aux task id -> first shared layer
    dec_start: dict = field(default_factory=dict)
    share_src_embedding: bool = True
    share_tgt_embedding: bool = True
    share_attention: bool = False
    share_output: bool = None

    def __post_init__(self):
        if self.num_tasks < 1:
            raise ConfigError("a plan needs at least the main task")
        if self.share_output is None:
            # a joint target softmax goes with a joint target embedding
            self.share_output = self.share_tgt_embedding
        self.enc_start = {int(k): int(v) for k, v in self.enc_start.items()}
        self.dec_start = {int(k): int(v) for k, v in self.dec_start.items()}
        for m in range(1, self.num_tasks):
            self.enc_start.setdefault(m, self.enc_layers + 1)
            self.dec_start.setdefault(m, self.dec_layers + 1)
        for side, starts, depth in (("encoder", self.enc_start, self.enc_layers),
                                    ("decoder", self.dec_start, self.dec_layers)):
            for m, s in starts.items():
                if not 1 <= m < self.num_tasks:
                    raise ConfigError(f"{side} sharing declared for unknown task {m}")
                if not 1 <= s <= depth + 1:
                    raise ConfigError(f"task {m}: {side} shared range start {s} outside 1..{depth + 1}")

    @classmethod
    def top(cls, num_tasks, enc_layers=3, dec_layers=3, shared_enc=2, shared_dec=1, **flags):
        """Share the top ``shared_enc``/``shared_dec`` layers for every auxiliary task."""
        if not 0 <= shared_enc <= enc_layers or not 0 <= shared_dec <= dec_layers:
            raise ConfigError("shared layer counts must lie within the layer stack")
        starts_e = {m: enc_layers - shared_enc + 1 for m in range(1, num_tasks)}
        starts_d = {m: dec_layers - shared_dec + 1 for m in range(1, num_tasks)}
        return cls(num_tasks, enc_layers, dec_layers, starts_e, starts_d, **flags)

    @classmethod
    def full(cls, num_tasks, enc_layers=3, dec_layers=3):
        """Everything tied: all tasks use one model."""
        return cls.top(num_tasks, enc_layers, dec_layers, enc_layers, dec_layers,
                       share_src_embedding=True, share_tgt_embedding=True,
                       share_attention=True, share_output=True)

    @classmethod
    def none(cls, num_tasks, enc_layers=3, dec_layers=3):
        return cls.top(num_tasks, enc_layers, dec_layers, 0, 0,
                       share_src_embedding=False, share_tgt_embedding=False,
                       share_attention=False, share_output=False)

    @classmethod
    def from_layer_sets(cls, num_tasks, enc_layers, dec_layers, enc_shared, dec_shared, **flags):
        """Build from explicit per-task layer sets, e.g. ``{1: {2, 3}}``.
        Sets must be suffixes (top layers) of the stack."""
        starts = []
        for side, sets, depth in (("encoder", enc_shared, enc_layers),
                                  ("decoder", dec_shared, dec_layers)):
            out = {}
            for m, layers in sets.items():
                layers = sorted(set(layers))
                if not layers:
                    out[m] = depth + 1
                    continue
                if layers != list(range(layers[0], depth + 1)):
                    raise ConfigError(
                        f"task {m}: shared {side} layers {layers} are not the top of the stack")
                out[m] = layers[0]
            starts.append(out)
        return cls(num_tasks, enc_layers, dec_layers, starts[0], starts[1], **flags)

    # queries

    def _layer_shared(self, starts, m, layer):
        if m == 0:
            return any(layer >= s for s in starts.values())
        return layer >= starts[m]

    def enc_layer_shared(self, m, layer):
        return self._layer_shared(self.enc_start, m, layer)

    def dec_layer_shared(self, m, layer):
        return self._layer_shared(self.dec_start, m, layer)

    def is_shared(self, m, path):
        """Whether parameter ``path`` (e.g. ``enc/layer3/fwd/W``) of task m is tied."""
        if self.num_tasks == 1:
            return False
        if path.startswith("emb/src/"):
            return self.share_src_embedding
        if path.startswith("emb/tgt/"):
            return self.share_tgt_embedding
        if path.startswith("att/"):
            return self.share_attention
        if path.startswith("out/"):
            return self.share_output
        if path.startswith("dec/input/"):
            return self.dec_layer_shared(m, 1)
        hit = _ENC.match(path)
        if hit:
            return self.enc_layer_shared(m, int(hit.group(1)))
        hit = _DEC.match(path)
        if hit:
            return self.dec_layer_shared(m, int(hit.group(1)))
        raise ConfigError(f"no sharing rule for parameter path {path!r}")

    def common_enc_layers(self):
        """Encoder layers tied across *all* tasks (ascending)."""
        if self.num_tasks == 1:
            return []
        first = max(self.enc_start.values())
        return list(range(first, self.enc_layers + 1))

    def common_dec_layers(self):
        if self.num_tasks == 1:
            return []
        first = max(self.dec_start.values())
        return list(range(first, self.dec_layers + 1))

    def to_dict(self):
        return {
            "num_tasks": self.num_tasks,
            "enc_layers": self.enc_layers,
            "dec_layers": self.dec_layers,
            "enc_start": {str(k): v for k, v in sorted(self.enc_start.items())},
            "dec_start": {str(k): v for k, v in sorted(self.dec_start.items())},
            "share_src_embedding": self.share_src_embedding,
            "share_tgt_embedding": self.share_tgt_embedding,
            "share_attention": self.share_attention,
            "share_output": self.share_output,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def build_mtl_models(dims_per_task, plan, store, rng):
    """Create one :class:`Seq2SeqModel` per task over ``store``.

    ``dims_per_task[m]`` is task m's :class:`ModelDims` (vocabulary sizes may
    differ unless the corresponding embedding is shared). Shared parameters
    are registered once under ``shared/`` and aliased per task.
    """
    if len(dims_per_task) != plan.num_tasks:
        raise ConfigError(f"plan covers {plan.num_tasks} tasks, got {len(dims_per_task)} models")
    for m, d in enumerate(dims_per_task):
        if d.enc_layers != plan.enc_layers or d.dec_layers != plan.dec_layers:
            raise ConfigError(f"task {m}: layer counts disagree with the sharing plan")
    models = []
    for m, dims in enumerate(dims_per_task):
        model = Seq2SeqModel(dims, prefix=f"task{m}")
        offset = len(model.prefix) + 1
        for name, shape in model.parameter_shapes().items():
            path = name[offset:]
            if plan.is_shared(m, path):
                canon = f"shared/{path}"
                if canon in store.entries:
                    have = store.entries[canon].value.shape
                    if have != tuple(shape):
                        raise ConfigError(
                            f"cannot tie {name} {tuple(shape)} to {canon} {have}; "
                            "shared components need equal dimensions (joint vocabulary)")
                else:
                    store.add(canon, shape, rng=rng, init=_init_for(path, shape))
                store.alias(name, canon)
            else:
                store.add(name, shape, rng=rng, init=_init_for(path, shape))
        models.append(model)
    return models


def canonical_names(model, store):
    return sorted({store.resolve(n) for n in model.names})


__all__ = ["ModelDims", "SharingPlan", "build_mtl_models", "canonical_names"]
