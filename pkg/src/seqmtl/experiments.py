"""Scaled-down behavioral experiments on the synthetic tasks.

Shared by the acceptance suite and ``benchmarks/pilot_adversarial.py``.
"""

import time

from .autodiff import check_numerics
from .evaluation import token_accuracy
from .mtl import MTLEngine, SharingPlan, TrainConfig
from .synthetic import toy_task

# model size used by every synthetic experiment
SMALL = dict(embedding=64, hidden=64, attention=64, enc_layers=2, dec_layers=2, dropout=0.0)


def small_config(seed, **kw):
    return TrainConfig(**{**SMALL, "seed": seed, **kw})


def accuracy(engine, pairs, task=0):
    """Greedy-decoding token accuracy against the targets (``</s>`` included)."""
    preds = engine.translate([s for s, _ in pairs], task)
    return token_accuracy(preds, [t for _, t in pairs])


def copy_convergence(seed=0, max_epochs=30, dev_target=0.95, train_target=0.99, **kw):
    """Single-task copy: train until both accuracy targets hold or
    ``max_epochs`` pass. Returns a dict with the epoch reached."""
    task = toy_task(0, "copy", seed)
    eng = MTLEngine([task], SharingPlan.none(1, 2, 2), small_config(seed, **kw))
    t0 = time.time()
    dev = train = 0.0
    with check_numerics(False):
        for epoch in range(1, max_epochs + 1):
            eng.run_epoch()
            dev = accuracy(eng, task.dev)
            if dev >= dev_target:
                train = accuracy(eng, task.train)
                if train >= train_target:
                    break
    return {"epoch": epoch, "dev": dev, "train": train, "seconds": time.time() - t0}


def reversal_pair(seed, epochs=15, **kw):
    """Dev accuracy on reversal after ``epochs`` epochs, alone and with copy
    as an auxiliary task (top-1 encoder and decoder layers shared)."""
    main = toy_task(0, "reverse", seed)
    aux = toy_task(1, "copy", seed)
    single = MTLEngine([main], SharingPlan.none(1, 2, 2), small_config(seed, **kw))
    mtl = MTLEngine([main, aux], SharingPlan.top(2, 2, 2, shared_enc=1, shared_dec=1),
                    small_config(seed, **kw))
    with check_numerics(False):
        for eng in (single, mtl):
            for _ in range(epochs):
                eng.run_epoch()
    return {"single": accuracy(single, main.dev), "mtl": accuracy(mtl, main.dev)}


def adversarial_probe(lam, seed=0, steps=2000, shared_enc=1, shared_dec=0, disc_hidden=64,
                      log=None, **kw):
    """Train reversal (main) with copy (aux) under the alternating loop and
    return the discriminator's dev accuracy after ``steps`` updates."""
    from .adversarial import discriminator_accuracy
    tasks = [toy_task(0, "reverse", seed), toy_task(1, "copy", seed)]
    plan = SharingPlan.top(2, 2, 2, shared_enc=shared_enc, shared_dec=shared_dec)
    cfg = small_config(seed, adversarial=True, adv_lambda=lam, disc_hidden=disc_hidden, **kw)
    eng = MTLEngine(tasks, plan, cfg)
    with check_numerics(False):
        for s in range(1, steps + 1):
            eng.step()
            if log is not None and s % 200 == 0:
                log(s, discriminator_accuracy(eng), eng.dev_perplexity(0))
    return discriminator_accuracy(eng)
