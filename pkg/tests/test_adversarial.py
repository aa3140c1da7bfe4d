import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqmtl.adversarial import (SharedRep, TaskDiscriminator, adv1_objective, adv2_objective,
                                adversarial_train_step, discriminator_accuracy, is_disc_param)
from seqmtl.autodiff import ParameterStore, Scope, backward, constant, gradient_check, ops
from seqmtl.errors import ConfigError, ContractError
from seqmtl.mtl import MTLEngine, SharingPlan, TrainConfig
from seqmtl.synthetic import toy_task


def _rep_from_params(scope, prefix, ts, td, B, de, dd, enc_mask=None, dec_mask=None):
    enc = [scope.param(f"{prefix}/e{i}") for i in range(ts)]
    dec = [scope.param(f"{prefix}/d{j}") for j in range(td)]
    em = np.ones((B, ts)) if enc_mask is None else enc_mask
    dm = np.ones((B, td)) if dec_mask is None else dec_mask
    return SharedRep(enc, em, dec, dm)


def _setup(seed, num_tasks=3, de=4, dd=3, ts=3, td=2, B=2):
    rng = np.random.default_rng(seed)
    disc = TaskDiscriminator(num_tasks, de, dd, hidden=3)
    s = ParameterStore()
    disc.register(s, rng)
    for m in range(num_tasks):
        for i in range(ts):
            s.add(f"rep{m}/e{i}", value=rng.normal(size=(B, de)))
        for j in range(td):
            s.add(f"rep{m}/d{j}", value=rng.normal(size=(B, dd)))
    return disc, s


def test_prediction_is_a_distribution():
    disc, s = _setup(0)
    rep = _rep_from_params(Scope(s), "rep0", 3, 2, 2, 4, 3)
    p = disc.discriminate(Scope(s), rep).value
    assert p.shape == (2, 3)
    np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-9)
    assert disc.summary_dim == 6


@pytest.mark.parametrize("seed", range(10))
def test_discriminator_term_gradients(seed):
    disc, s = _setup(seed)
    mask = np.array([[1, 1, 1], [1, 1, 0]], dtype=float)

    def build():
        sc = Scope(s)
        reps = [(_rep_from_params(sc, f"rep{m}", 3, 2, 2, 4, 3, enc_mask=mask), m)
                for m in range(3)]
        return ops.scale(adv1_objective(sc, disc, reps), -1.0)
    rep = gradient_check(build, s, names=disc.names)
    assert rep.passed, str(rep)


@pytest.mark.parametrize("seed", range(10))
def test_confusion_term_gradients(seed):
    disc, s = _setup(seed)
    rep_names = [n for n in s.entries if n.startswith("rep")]

    def build():
        sc = Scope(s, frozen=is_disc_param)
        return adv2_objective(sc, disc, [_rep_from_params(sc, f"rep{m}", 3, 2, 2, 4, 3)
                                         for m in range(3)])
    rep = gradient_check(build, s, names=rep_names)
    assert rep.passed, str(rep)


def test_confusion_term_leaves_discriminator_gradient_zero():
    disc, s = _setup(1)
    sc = Scope(s, frozen=is_disc_param)
    s.zero_grads()
    backward(adv2_objective(sc, disc, [_rep_from_params(sc, "rep0", 3, 2, 2, 4, 3)]))
    for n in disc.names:
        assert not s.grad(n).any(), n
    assert any(s.grad(f"rep0/e{i}").any() for i in range(3))


def test_discriminator_term_detaches_representations():
    disc, s = _setup(2)
    sc = Scope(s)
    s.zero_grads()
    backward(adv1_objective(sc, disc, [(_rep_from_params(sc, "rep1", 3, 2, 2, 4, 3), 1)]))
    assert not s.grad("rep1/e0").any()
    assert s.grad("disc/W_d").any()


@given(st.integers(0, 10_000), st.integers(2, 5))
def test_entropy_bounds(seed, m):
    rng = np.random.default_rng(seed)
    disc = TaskDiscriminator(m, 4, 0, hidden=3)
    s = ParameterStore()
    disc.register(s, rng)
    s.value("disc/W_d")[...] *= rng.uniform(0, 20)
    rep = SharedRep([constant(rng.normal(size=(3, 4))) for _ in range(2)], np.ones((3, 2)), [],
                    np.ones((3, 0)))
    h = adv2_objective(Scope(s), disc, [rep]).value
    assert -1e-12 <= h <= 3 * math.log(m) + 1e-9


def test_contracts():
    with pytest.raises(ConfigError):
        TaskDiscriminator(1, 4, 4)
    with pytest.raises(ConfigError):
        TaskDiscriminator(2, 0, 0)
    disc, s = _setup(0)
    with pytest.raises(ContractError):
        adv1_objective(Scope(s), disc, [(_rep_from_params(Scope(s), "rep0", 3, 2, 2, 4, 3), 7)])


# engine-level

def _tasks():
    return [toy_task(0, "reverse", 0, n_train=24, n_dev=8, vocab=6, max_len=5),
            toy_task(1, "copy", 0, n_train=24, n_dev=8, vocab=6, max_len=5)]


def _config(**kw):
    base = dict(embedding=6, hidden=6, attention=6, enc_layers=2, dec_layers=2, dropout=0.2,
                batch_size=6, epochs=1, seed=3, disc_hidden=5, adversarial=True)
    base.update(kw)
    return TrainConfig(**base)


PLAN = SharingPlan.top(2, 2, 2, shared_enc=1, shared_dec=1)


def test_gradient_isolation_checksums(monkeypatch):
    eng = MTLEngine(_tasks(), PLAN, _config())
    disc_names = [n for n in eng.store.entries if is_disc_param(n)]
    model_names = [n for n in eng.store.entries if not is_disc_param(n)]
    d0, m0 = eng.store.checksum(disc_names), eng.store.checksum(model_names)
    # phase (a) alone must not move the discriminator
    monkeypatch.setattr(eng.disc_optimizer, "step", lambda store, names: None)
    adversarial_train_step(eng, 0.5)
    assert eng.store.checksum(disc_names) == d0
    assert eng.store.checksum(model_names) != m0
    monkeypatch.undo()
    # phase (b) alone must not move the model
    m1 = eng.store.checksum(model_names)
    monkeypatch.setattr(eng.optimizer, "step", lambda store, names: None)
    adversarial_train_step(eng, 0.5)
    assert eng.store.checksum(model_names) == m1
    assert eng.store.checksum(disc_names) != d0


def test_lambda_zero_matches_plain_training():
    adv = MTLEngine(_tasks(), PLAN, _config(adv_lambda=0.0))
    plain = MTLEngine(_tasks(), PLAN, _config(adversarial=False))
    names = [n for n in plain.store.entries]
    for _ in range(12):
        a = adv.step()
        b = plain.step()
        assert a == b
    assert adv.store.checksum(names) == plain.store.checksum(names)


def test_accuracy_is_a_fraction():
    eng = MTLEngine(_tasks(), PLAN, _config())
    acc = discriminator_accuracy(eng)
    assert 0.0 <= acc <= 1.0
    with pytest.raises(ContractError):
        adversarial_train_step(eng, -1.0)


def test_encoder_only_plan_builds_single_lstm():
    plan = SharingPlan.top(2, 2, 2, shared_enc=1, shared_dec=0)
    eng = MTLEngine(_tasks(), plan, _config())
    assert eng.discriminator.dec_lstm is None
    adversarial_train_step(eng, 0.5)
