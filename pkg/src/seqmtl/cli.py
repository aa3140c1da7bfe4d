"""``seqmtl`` command line: prepare, train, adapt, translate, evaluate,
analyze, sweep.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric failure.
"""

import argparse
import dataclasses
import json
import logging
import os
import sys
import time
from collections import Counter

import yaml

from . import __version__
from .dataprep import BpeModel, Vocabulary, learn_bpe, linearize_amr, linearize_tree
from .dataprep import parse_brackets, parse_penman, undo_bpe
from .dataprep.corpus import filter_corpus, read_conll, read_lines, read_parallel, write_lines
from .errors import ConfigError, DataError, NumericError, SeqMTLError
from .evaluation import corpus_bleu, corpus_perplexity, format_report, ngram_gain, write_csv
from .model import EOS, greedy_decode_batch
from .mtl import Checkpoint, SharingPlan, TaskSpec, TrainConfig, adapt, load_models
from .mtl.engine import MTLEngine

log = logging.getLogger("seqmtl")

SPLITS = ("train", "dev", "test")
FORMATS = ("parallel", "conll", "tree", "amr")
PLAN_KEYS = ("kind", "shared_enc", "shared_dec", "share_src_embedding",
             "share_tgt_embedding", "share_attention", "share_output")


# configuration

@dataclasses.dataclass
class RunConfig:
    tasks: list
    train: TrainConfig
    plan: dict
    output: str
    prepared: str
    bpe_merges: int = 8000
    max_len_pre_bpe: int = 50
    max_len_post_bpe: int = 80
    base_dir: str = "."

    def sharing_plan(self, num_tasks=None):
        return make_plan(self.plan, num_tasks or len(self.tasks), self.train)

    def to_dict(self):
        return {"tasks": self.tasks, "train": self.train.to_dict(), "plan": self.plan,
                "output": self.output, "prepared": self.prepared,
                "prepare": {"bpe_merges": self.bpe_merges,
                            "max_len_pre_bpe": self.max_len_pre_bpe,
                            "max_len_post_bpe": self.max_len_post_bpe}}


def make_plan(spec, num_tasks, cfg):
    spec = dict(spec or {})
    unknown = set(spec) - set(PLAN_KEYS)
    if unknown:
        raise ConfigError(f"unknown plan options: {sorted(unknown)}")
    kind = spec.pop("kind", "top")
    L, Ld = cfg.enc_layers, cfg.dec_layers
    if kind == "full":
        return SharingPlan.full(num_tasks, L, Ld)
    if kind == "none":
        return SharingPlan.none(num_tasks, L, Ld)
    if kind != "top":
        raise ConfigError(f"plan kind must be top, full or none, got {kind!r}")
    # defaults: top-2 encoder layers and top-1 decoder layer
    shared_enc = spec.pop("shared_enc", min(2, L))
    shared_dec = spec.pop("shared_dec", min(1, Ld))
    return SharingPlan.top(num_tasks, L, Ld, shared_enc, shared_dec, **spec)


def _resolve(base, path):
    return path if os.path.isabs(path) else os.path.normpath(os.path.join(base, path))


def load_config(path, overrides=None):
    """Read a YAML run config and apply command-line overrides."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    known = {"tasks", "train", "plan", "output", "prepared", "prepare", "seed"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}: unknown sections {sorted(unknown)}")
    base = os.path.dirname(os.path.abspath(path))
    overrides = overrides or {}
    train = dict(raw.get("train") or {})
    if "seed" in raw:
        train["seed"] = raw["seed"]
    train.update(overrides.get("train", {}))
    cfg = TrainConfig.from_dict(train)
    plan = dict(raw.get("plan") or {})
    plan.update(overrides.get("plan", {}))
    config_output = _resolve(base, raw.get("output") or "run")
    output = overrides.get("output") or config_output
    # prepared data stays put when --output redirects a command's artifacts
    prepared = raw.get("prepared")
    prepared = _resolve(base, prepared) if prepared else os.path.join(config_output, "prepared")
    prep = dict(raw.get("prepare") or {})
    bad = set(prep) - {"bpe_merges", "max_len_pre_bpe", "max_len_post_bpe"}
    if bad:
        raise ConfigError(f"unknown prepare options: {sorted(bad)}")
    tasks = [_task_decl(t, i, base) for i, t in enumerate(raw.get("tasks") or [])]
    if not tasks:
        raise ConfigError("config declares no tasks")
    run = RunConfig(tasks, cfg, plan, output, prepared, base_dir=base, **prep)
    run.sharing_plan()   # validate early
    return run


def _task_decl(t, i, base):
    if not isinstance(t, dict) or "name" not in t:
        raise ConfigError(f"task #{i} needs a name")
    fmt = t.get("format", "parallel")
    if fmt not in FORMATS:
        raise ConfigError(f"task {t['name']!r}: format must be one of {FORMATS}")
    out = {"name": str(t["name"]), "format": fmt, "gamma": float(t.get("gamma", 1.0)),
           "bpe_target": bool(t.get("bpe_target", i == 0 and fmt == "parallel"))}
    for split in SPLITS:
        paths = t.get(split)
        if paths is None:
            if split == "train":
                raise ConfigError(f"task {t['name']!r} has no train split")
            continue
        paths = [paths] if isinstance(paths, str) else list(paths)
        want = 1 if fmt == "conll" else 2
        if len(paths) != want:
            raise ConfigError(f"task {t['name']!r} {split}: expected {want} path(s)")
        out[split] = [_resolve(base, p) for p in paths]
    return out


def _check_files(run):
    for t in run.tasks:
        for split in SPLITS:
            for p in t.get(split, []):
                if not os.path.isfile(p):
                    raise DataError(f"missing file: {p}")


# corpus reading

def read_task_split(decl, split):
    paths = decl.get(split)
    if not paths:
        return []
    fmt = decl["format"]
    if fmt == "parallel":
        return read_parallel(*paths)
    if fmt == "conll":
        return [([w for w, _ in s], [tag for _, tag in s]) for s in read_conll(paths[0])]
    src = [line.split() for line in read_lines(paths[0])]
    if fmt == "tree":
        tgt = [linearize_tree(parse_brackets(line)) for line in read_lines(paths[1]) if line.strip()]
    else:
        blocks = _blocks(read_lines(paths[1]))
        tgt = [linearize_amr(parse_penman(b)) for b in blocks]
    if len(src) != len(tgt):
        raise DataError(f"{paths[0]} has {len(src)} sentences but {paths[1]} has {len(tgt)} structures")
    return list(zip(src, tgt))


def _blocks(lines):
    out, cur = [], []
    for line in lines:
        if line.strip().startswith("#"):
            continue
        if not line.strip():
            if cur:
                out.append(" ".join(cur))
                cur = []
        else:
            cur.append(line.strip())
    if cur:
        out.append(" ".join(cur))
    return out


# prepare

def cmd_prepare(run, args):
    _check_files(run)
    out = run.prepared
    os.makedirs(out, exist_ok=True)
    raw = {t["name"]: {s: read_task_split(t, s) for s in SPLITS} for t in run.tasks}

    src_counts, tgt_counts = Counter(), Counter()
    for t in run.tasks:
        for s, y in raw[t["name"]]["train"]:
            src_counts.update(s)
            if t["bpe_target"]:
                tgt_counts.update(y)
    src_bpe = learn_bpe(src_counts, run.bpe_merges) if src_counts else BpeModel([])
    tgt_bpe = learn_bpe(tgt_counts, run.bpe_merges) if tgt_counts else BpeModel([])
    src_bpe.save(os.path.join(out, "src.bpe"))
    tgt_bpe.save(os.path.join(out, "tgt.bpe"))

    segmented, stats = {}, []
    for t in run.tasks:
        name = t["name"]
        segmented[name] = {}
        row = {"task": name}
        for split in SPLITS:
            pairs = raw[name][split]
            seg = [(src_bpe.segment_tokens(s), tgt_bpe.segment_tokens(y) if t["bpe_target"] else list(y))
                   for s, y in pairs]
            if split == "train" and pairs:
                pairs, seg = filter_corpus(pairs, run.max_len_pre_bpe, run.max_len_post_bpe, seg)
            segmented[name][split] = seg
            row[split] = len(seg)
        stats.append(row)

    # joint vocabularies so tied embeddings and softmax line up across tasks
    src_vocab = Vocabulary.build(s for n in segmented for s, _ in segmented[n]["train"])
    tgt_vocab = Vocabulary.build(y for n in segmented for _, y in segmented[n]["train"])
    src_vocab.save(os.path.join(out, "src.vocab"))
    tgt_vocab.save(os.path.join(out, "tgt.vocab"))

    for name, splits in segmented.items():
        for split, seg in splits.items():
            stem = os.path.join(out, f"{name}.{split}")
            write_lines(stem + ".src", (" ".join(s) for s, _ in seg))
            write_lines(stem + ".tgt", (" ".join(y) for _, y in seg))
            write_lines(stem + ".ids", (
                " ".join(map(str, src_vocab.encode(s))) + "\t"
                + " ".join(map(str, tgt_vocab.encode(y) + [EOS])) for s, y in seg))

    manifest = {"tasks": [{"name": t["name"], "gamma": t["gamma"]} for t in run.tasks],
                "src_vocab_size": len(src_vocab), "tgt_vocab_size": len(tgt_vocab),
                "bpe_merges": run.bpe_merges, "max_len_pre_bpe": run.max_len_pre_bpe,
                "max_len_post_bpe": run.max_len_post_bpe}
    with open(os.path.join(out, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    table = _stats_table(stats)
    with open(os.path.join(out, "stats.txt"), "w", encoding="utf-8") as fh:
        fh.write(table)
    print(table, end="")
    return 0


def _stats_table(rows):
    width = max(len("task"), *(len(r["task"]) for r in rows))
    lines = [f"{'task':<{width}}  {'train':>9}  {'dev':>7}  {'test':>7}"]
    for r in rows:
        lines.append(f"{r['task']:<{width}}  {r['train']:>9}  {r['dev']:>7}  {r['test']:>7}")
    return "\n".join(lines) + "\n"


# loading prepared data

class Prepared:
    def __init__(self, path):
        mpath = os.path.join(path, "manifest.json")
        if not os.path.isfile(mpath):
            raise DataError(f"missing file: {mpath} (run `seqmtl prepare` first)")
        with open(mpath, encoding="utf-8") as fh:
            self.manifest = json.load(fh)
        self.path = path
        self.src_bpe = BpeModel.load(os.path.join(path, "src.bpe"))
        self.tgt_bpe = BpeModel.load(os.path.join(path, "tgt.bpe"))
        self.src_vocab = Vocabulary.load(os.path.join(path, "src.vocab"))
        self.tgt_vocab = Vocabulary.load(os.path.join(path, "tgt.vocab"))

    @property
    def task_names(self):
        return [t["name"] for t in self.manifest["tasks"]]

    def ids(self, name, split):
        path = os.path.join(self.path, f"{name}.{split}.ids")
        if not os.path.isfile(path):
            return []
        out = []
        for lineno, line in enumerate(read_lines(path), 1):
            try:
                s, t = line.split("\t")
                out.append(([int(x) for x in s.split()], [int(x) for x in t.split()]))
            except ValueError:
                raise DataError(f"{path}:{lineno}: malformed id line") from None
        return out

    def references(self, name, split):
        return [undo_bpe(line.split()) for line in read_lines(os.path.join(self.path, f"{name}.{split}.tgt"))]

    def task_specs(self, main=None):
        metas = self.manifest["tasks"]
        names = self.task_names
        if main is not None:
            if main not in names:
                raise ConfigError(f"unknown task {main!r}; prepared tasks are {names}")
            names = [main] + [n for n in names if n != main]
        gammas = {t["name"]: t["gamma"] for t in metas}
        return [TaskSpec(i, n, self.ids(n, "train"), len(self.src_vocab), len(self.tgt_vocab),
                         dev=self.ids(n, "dev"), test=self.ids(n, "test"), gamma=gammas[n])
                for i, n in enumerate(names)]

    def encode_sources(self, lines):
        return [self.src_vocab.encode(self.src_bpe.segment_tokens(line.split())) for line in lines]

    def decode(self, ids):
        if ids and ids[-1] == EOS:
            ids = ids[:-1]
        return undo_bpe(self.tgt_vocab.decode(ids))


# train / adapt

def _write_config_copy(run, out, plan):
    os.makedirs(out, exist_ok=True)
    doc = run.to_dict()
    doc["config_hash"] = run.train.hash(plan)
    with open(os.path.join(out, "config.yaml"), "w", encoding="utf-8") as fh:
        yaml.safe_dump(doc, fh, sort_keys=True)


def _epoch_logger(out, name):
    path = os.path.join(out, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch\tdev_ppl\tlr\ttrain_objective\n")

    def sink(ckpt, improved):
        h = ckpt.history[-1]
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(f"{h['epoch']}\t{h['dev_ppl']:.6f}\t{h['lr']:.6g}\t{h['train_objective']:.6f}\n")
        log.info("epoch %d dev_ppl %.4f%s", h["epoch"], h["dev_ppl"], " *" if improved else "")
    return sink


def train_run(run, out, plan=None):
    data = Prepared(run.prepared)
    tasks = data.task_specs()
    plan = plan or run.sharing_plan(len(tasks))
    _write_config_copy(run, out, plan)
    engine = MTLEngine(tasks, plan, run.train)
    best = engine.fit(sink=_epoch_logger(out, "train.log"))
    best.save(os.path.join(out, "best.ckpt"))
    return best, data


def cmd_train(run, args):
    out = args.output or run.output
    best, _ = train_run(run, out)
    print(f"best dev perplexity {best.best_dev:.4f} at epoch {best.epoch}; "
          f"checkpoint {os.path.join(out, 'best.ckpt')}")
    return 0


def _need_checkpoint(args):
    if not args.checkpoint:
        raise ConfigError("--checkpoint is required")
    return Checkpoint.load(args.checkpoint)


def cmd_adapt(run, args):
    ckpt = _need_checkpoint(args)
    data = Prepared(run.prepared)
    main = data.task_specs()[0]
    if [t["name"] for t in ckpt.tasks] != data.task_names:
        raise ConfigError("checkpoint tasks do not match the prepared data")
    epochs = args.o_adapt_epochs if args.o_adapt_epochs is not None else ckpt.config.adapt_epochs
    out = args.output or run.output
    os.makedirs(out, exist_ok=True)
    best = adapt(ckpt, main, epochs=epochs, sink=_epoch_logger(out, "adapt.log"))
    best.save(os.path.join(out, "adapted.ckpt"))
    print(f"adapted for {epochs} epochs; best dev perplexity {best.best_dev:.4f}; "
          f"checkpoint {os.path.join(out, 'adapted.ckpt')}")
    return 0


# translate / evaluate

def _task_index(ckpt, task):
    names = [t["name"] for t in ckpt.tasks]
    if task is None:
        return 0
    if task in names:
        return names.index(task)
    raise ConfigError(f"unknown task {task!r}; checkpoint tasks are {names}")


def translate_ids(ckpt, sources, task=0, batch_size=64):
    models, store = load_models(ckpt)
    out = []
    for i in range(0, len(sources), batch_size):
        chunk = sources[i:i + batch_size]
        limit = 2 * max((len(s) for s in chunk), default=0) + 10
        out.extend(greedy_decode_batch(models[task], store, chunk, limit))
    return out


def cmd_translate(run, args):
    ckpt = _need_checkpoint(args)
    if not args.input:
        raise ConfigError("--input is required")
    data = Prepared(run.prepared)
    lines = read_lines(args.input)
    hyps = translate_ids(ckpt, data.encode_sources(lines), _task_index(ckpt, args.task))
    out = args.output or run.output
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "translations.txt")
    write_lines(path, (" ".join(data.decode(h)) for h in hyps))
    print(path)
    return 0


def evaluate(ckpt, data, task_name, split):
    m = [t["name"] for t in ckpt.tasks].index(task_name)
    pairs = data.ids(task_name, split)
    if not pairs:
        raise DataError(f"task {task_name!r} has no prepared {split} split")
    hyps = [data.decode(h) for h in translate_ids(ckpt, [s for s, _ in pairs], m)]
    refs = data.references(task_name, split)
    report = corpus_bleu(hyps, refs)
    models, store = load_models(ckpt)
    ppl = corpus_perplexity(models[m], store, pairs)
    return report, ppl, hyps


def cmd_evaluate(run, args):
    ckpt = _need_checkpoint(args)
    data = Prepared(run.prepared)
    name = args.task or ckpt.tasks[0]["name"]
    _task_index(ckpt, name)
    report, ppl, hyps = evaluate(ckpt, data, name, args.split)
    out = args.output or run.output
    os.makedirs(out, exist_ok=True)
    values = dict(report.as_dict(), perplexity=ppl, task=name, split=args.split)
    text = format_report(str(report), values)
    with open(os.path.join(out, f"eval.{name}.{args.split}.txt"), "w", encoding="utf-8") as fh:
        fh.write(text)
    write_lines(os.path.join(out, f"hyp.{name}.{args.split}.txt"), (" ".join(h) for h in hyps))
    print(text, end="")
    return 0


# analyze

def cmd_analyze(run, args):
    for flag in ("system_a", "system_b", "reference"):
        if not getattr(args, flag):
            raise ConfigError(f"--{flag.replace('_', '-')} is required")
    a = [line.split() for line in read_lines(args.system_a)]
    b = [line.split() for line in read_lines(args.system_b)]
    ref = [line.split() for line in read_lines(args.reference)]
    tags = [line.split() for line in read_lines(args.tags)] if args.tags else None
    report = ngram_gain(a, b, ref, max_n=args.max_n, gold_tags=tags)
    out = args.output or (run.output if run else ".")
    os.makedirs(out, exist_ok=True)
    rows = list(report.rows())
    write_csv(os.path.join(out, "ngram_gain.csv"), rows)
    for r in rows:
        print(f"{r['n']}-gram  A={r['matches_a']}  B={r['matches_b']}  gain%={r['gain_percent']}")
    return 0


# sweep

def cmd_sweep(run, args):
    if not args.values:
        raise ConfigError("--values is required, e.g. --values 0,1,2,3")
    try:
        values = [int(v) for v in args.values.split(",")]
    except ValueError:
        raise ConfigError(f"--values must be comma separated integers, got {args.values!r}") from None
    depth = run.train.enc_layers if args.axis == "enc" else run.train.dec_layers
    if any(not 0 <= v <= depth for v in values):
        raise ConfigError(f"sweep values must lie in 0..{depth}")
    out = args.output or run.output
    os.makedirs(out, exist_ok=True)
    rows = []
    base_plan = dict(run.plan)
    if base_plan.get("kind", "top") != "top":
        raise ConfigError("sweeps vary a top-layer plan; set plan.kind to top")
    for v in values:
        spec = dict(base_plan, **{f"shared_{args.axis}": v})
        run_v = dataclasses.replace(run, plan=spec)
        plan = run_v.sharing_plan()
        sub = os.path.join(out, f"{args.axis}{v}")
        started = time.time()
        best, data = train_run(run_v, sub, plan)
        name = best.tasks[0]["name"]
        split = args.split if data.ids(name, args.split) else "dev"
        report, ppl, _ = evaluate(best, data, name, split)
        rows.append({"axis": args.axis, "shared_layers": v,
                     "shared_enc": len(plan.common_enc_layers()),
                     "shared_dec": len(plan.common_dec_layers()),
                     "split": split, "bleu": f"{report.bleu:.4f}", "perplexity": f"{ppl:.6f}",
                     "best_epoch": best.epoch, "started": f"{started:.3f}",
                     "finished": f"{time.time():.3f}"})
        log.info("sweep %s=%d bleu %.2f", args.axis, v, report.bleu)
    path = os.path.join(out, "sweep.csv")
    write_csv(path, rows)
    print(path)
    return 0


# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_overrides(p):
    g = p.add_argument_group("overrides")
    for f in dataclasses.fields(TrainConfig):
        if f.name == "seed":
            continue    # --seed is a common flag
        flag = "--" + f.name.replace("_", "-")
        if f.type is bool or f.type == "bool":
            g.add_argument(flag, dest=f"o_{f.name}", action=argparse.BooleanOptionalAction, default=None)
        else:
            typ = {"int": int, "float": float, "str": str}.get(f.type if isinstance(f.type, str) else f.type.__name__, str)
            g.add_argument(flag, dest=f"o_{f.name}", type=typ, default=None, metavar=f.name.upper())
    g.add_argument("--plan-kind", dest="p_kind", choices=("top", "full", "none"))
    g.add_argument("--shared-enc", dest="p_shared_enc", type=int)
    g.add_argument("--shared-dec", dest="p_shared_dec", type=int)
    for flag in ("share-src-embedding", "share-tgt-embedding", "share-attention", "share-output"):
        g.add_argument(f"--{flag}", dest="p_" + flag.replace("-", "_"),
                       action=argparse.BooleanOptionalAction, default=None)


def build_parser():
    p = _Parser(prog="seqmtl", description="Multi-task attentional seq2seq training.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help_text, needs_config=True):
        c = sub.add_parser(name, help=help_text)
        c.add_argument("--config", required=needs_config, help="YAML run config")
        c.add_argument("--checkpoint", help="checkpoint file")
        c.add_argument("--seed", type=int, help="overrides the config seed")
        c.add_argument("--output", help="output directory")
        c.add_argument("-v", "--verbose", action="store_true")
        _add_overrides(c)
        return c

    command("prepare", "BPE, vocabularies, filtering and encoded corpora")
    command("train", "multi-task training with best-dev checkpointing")
    command("adapt", "fine-tune a checkpoint on the main task (--adapt-epochs, default 20)")
    c = command("translate", "greedy-decode an input file")
    c.add_argument("--input")
    c.add_argument("--task", help="task name (default: main task)")
    c = command("evaluate", "BLEU and perplexity on a prepared split")
    c.add_argument("--split", default="test", choices=SPLITS)
    c.add_argument("--task")
    c = command("analyze", "n-gram overlap gain of system A over system B", needs_config=False)
    c.add_argument("--system-a")
    c.add_argument("--system-b")
    c.add_argument("--reference")
    c.add_argument("--tags", help="gold tags aligned with the reference (noun filter)")
    c.add_argument("--max-n", type=int, default=4)
    c = command("sweep", "vary the number of shared layers")
    c.add_argument("--axis", choices=("enc", "dec"), default="enc")
    c.add_argument("--values", help="comma separated shared layer counts")
    c.add_argument("--split", default="test", choices=SPLITS)
    return p


def _overrides(args):
    train = {k[2:]: v for k, v in vars(args).items() if k.startswith("o_") and v is not None}
    if args.seed is not None:
        train["seed"] = args.seed
    plan = {k[2:]: v for k, v in vars(args).items() if k.startswith("p_") and v is not None}
    return {"train": train, "plan": plan, "output": args.output}


COMMANDS = {"prepare": cmd_prepare, "train": cmd_train, "adapt": cmd_adapt,
            "translate": cmd_translate, "evaluate": cmd_evaluate, "analyze": cmd_analyze,
            "sweep": cmd_sweep}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run = load_config(args.config, _overrides(args)) if args.config else None
        return COMMANDS[args.command](run, args) or 0
    except ConfigError as exc:
        print(f"seqmtl {args.command}: config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"seqmtl {args.command}: data error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, FloatingPointError) as exc:
        print(f"seqmtl {args.command}: numeric failure: {exc}", file=sys.stderr)
        return 3
    except SeqMTLError as exc:
        print(f"seqmtl {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
