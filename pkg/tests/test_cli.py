import csv
import random

import pytest
import yaml

from seqmtl.cli import main
from seqmtl.mtl import Checkpoint

WORDS = "the a big small red cat dog mat sat ran on".split()


def _corpus(d, n, seed):
    rng = random.Random(seed)
    en, xx, tree = [], [], []
    for _ in range(n):
        ws = [rng.choice(WORDS) for _ in range(rng.randint(3, 6))]
        en.append(" ".join(ws))
        xx.append(" ".join(w.upper() + "x" for w in ws))
        tree.append("(S (NP %s) (VP %s))" % (" ".join(f"(W {w})" for w in ws[:2]),
                                              " ".join(f"(W {w})" for w in ws[2:])))
    return en, xx, tree


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    for split, n, seed in (("train", 60, 1), ("dev", 10, 2), ("test", 10, 3)):
        en, xx, tree = _corpus(d, n, seed)
        for ext, lines in (("en", en), ("xx", xx), ("tree", tree)):
            (d / f"{split}.{ext}").write_text("\n".join(lines) + "\n")
    cfg = {
        "seed": 3, "output": "run",
        "prepare": {"bpe_merges": 20},
        "tasks": [
            {"name": "en-xx", "train": ["train.en", "train.xx"], "dev": ["dev.en", "dev.xx"],
             "test": ["test.en", "test.xx"]},
            {"name": "parse", "format": "tree", "train": ["train.en", "train.tree"],
             "dev": ["dev.en", "dev.tree"]},
        ],
        "plan": {"shared_enc": 1, "shared_dec": 1},
        "train": {"embedding": 8, "hidden": 8, "attention": 8, "enc_layers": 2,
                  "dec_layers": 2, "epochs": 1, "dropout": 0.1, "batch_size": 16,
                  "adapt_epochs": 1},
    }
    (d / "cfg.yaml").write_text(yaml.safe_dump(cfg))
    assert main(["prepare", "--config", str(d / "cfg.yaml")]) == 0
    assert main(["train", "--config", str(d / "cfg.yaml")]) == 0
    return d


def test_prepare_outputs_and_determinism(workdir, tmp_path):
    prep = workdir / "run" / "prepared"
    for name in ("manifest.json", "stats.txt", "src.vocab", "tgt.vocab", "src.bpe",
                 "en-xx.train.ids", "parse.dev.ids"):
        assert (prep / name).exists(), name
    assert main(["prepare", "--config", str(workdir / "cfg.yaml"), "--output",
                 str(tmp_path / "again")]) == 0
    # prepared data lives under the config's output regardless of --output
    first = {p.name: p.read_bytes() for p in prep.iterdir()}
    assert main(["prepare", "--config", str(workdir / "cfg.yaml")]) == 0
    assert first == {p.name: p.read_bytes() for p in prep.iterdir()}


def test_train_writes_run_directory(workdir):
    run = workdir / "run"
    for name in ("config.yaml", "train.log", "best.ckpt"):
        assert (run / name).exists(), name
    ck = Checkpoint.load(run / "best.ckpt")
    saved = yaml.safe_load((run / "config.yaml").read_text())
    assert saved["config_hash"] == ck.config_hash


def test_translate_is_deterministic(workdir, tmp_path):
    args = ["translate", "--config", str(workdir / "cfg.yaml"),
            "--checkpoint", str(workdir / "run" / "best.ckpt"),
            "--input", str(workdir / "test.en")]
    assert main(args + ["--output", str(tmp_path / "a")]) == 0
    assert main(args + ["--output", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "translations.txt").read_text()
    assert a == (tmp_path / "b" / "translations.txt").read_text()
    assert len(a.splitlines()) == 10


def test_evaluate_and_adapt(workdir, tmp_path):
    out = tmp_path / "ev"
    assert main(["evaluate", "--config", str(workdir / "cfg.yaml"), "--checkpoint",
                 str(workdir / "run" / "best.ckpt"), "--split", "dev",
                 "--output", str(out)]) == 0
    report = (out / "eval.en-xx.dev.txt").read_text()
    assert "BLEU" in report and "perplexity" in report
    assert main(["adapt", "--config", str(workdir / "cfg.yaml"), "--checkpoint",
                 str(workdir / "run" / "best.ckpt"), "--output", str(tmp_path / "ad")]) == 0
    assert (tmp_path / "ad" / "adapted.ckpt").exists()


def test_analyze_gold_against_itself(workdir, tmp_path):
    ref = workdir / "test.xx"
    assert main(["analyze", "--system-a", str(ref), "--system-b", str(ref),
                 "--reference", str(ref), "--output", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "ngram_gain.csv")))
    assert len(rows) == 4


def test_sweep_row_count(workdir, tmp_path):
    assert main(["sweep", "--config", str(workdir / "cfg.yaml"), "--axis", "dec",
                 "--values", "0,1", "--split", "dev", "--output", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "sweep.csv")))
    assert [r["shared_dec"] for r in rows] == ["0", "1"]


def test_exit_codes(workdir, tmp_path, capsys):
    assert main(["train", "--config", str(tmp_path / "missing.yaml")]) == 1
    bad = tmp_path / "bad.yaml"
    bad.write_text("tasks: []\n")
    assert main(["train", "--config", str(bad)]) == 1
    assert main(["translate", "--config", str(workdir / "cfg.yaml"), "--checkpoint",
                 str(tmp_path / "none.ckpt"), "--input", str(workdir / "test.en")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["train", "--bogus"])
    assert exc.value.code == 1


def test_single_task_prepare(tmp_path):
    en, xx, _ = _corpus(tmp_path, 20, 4)
    (tmp_path / "a.en").write_text("\n".join(en) + "\n")
    (tmp_path / "a.xx").write_text("\n".join(xx) + "\n")
    (tmp_path / "c.yaml").write_text(yaml.safe_dump({
        "output": "o", "prepare": {"bpe_merges": 5},
        "tasks": [{"name": "only", "train": ["a.en", "a.xx"]}]}))
    assert main(["prepare", "--config", str(tmp_path / "c.yaml")]) == 0
    assert (tmp_path / "o" / "prepared" / "only.train.ids").exists()
