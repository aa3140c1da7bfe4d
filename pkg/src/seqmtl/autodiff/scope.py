"""Per-graph binding of parameters, dropout randomness, and train/eval mode."""

from . import ops


class Scope:
    """One dynamic graph's view of a :class:`ParameterStore`.

    Each canonical parameter is bound to a single leaf node per scope, so
    tied aliases share that leaf. ``frozen`` is a predicate on canonical
    names; frozen parameters enter the graph as constants (stop-gradient).
    """

    def __init__(self, store, train=False, rng=None, dropout=0.0, frozen=None):
        self.store = store
        self.train = train
        self.rng = rng
        self.dropout_rate = dropout
        self.frozen = frozen
        self._bound = {}

    def param(self, name):
        canon = self.store.resolve(name)
        node = self._bound.get(canon)
        if node is None:
            trainable = self.frozen is None or not self.frozen(canon)
            node = self.store.param(canon, trainable=trainable)
            self._bound[canon] = node
        return node

    def dropout(self, x):
        if not self.train or self.dropout_rate <= 0.0:
            return x
        return ops.dropout(x, self.dropout_rate, self.rng, train=True)

    def const(self, value):
        from .graph import constant
        return constant(value, dtype=self.store.dtype)

    def trainable_names(self):
        """Canonical names bound as trainable leaves in this graph."""
        return [n for n, node in self._bound.items() if node.requires_grad]
