"""Pilot for the adversarial acceptance check.

Runs the synthetic reversal+copy setup at lambda=0 and lambda=0.5, prints
the discriminator's dev accuracy every 200 steps, and records the setup and
observations in tests/fixtures/adversarial_pilot.json. The acceptance
thresholds are stored next to the observations; they are not tuned to them.

    python benchmarks/pilot_adversarial.py [--steps 2000] [--seed 0]
"""

import argparse
import json
import pathlib

from seqmtl.experiments import adversarial_probe

FIXTURE = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "adversarial_pilot.json"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--shared-enc", type=int, default=1)
    ap.add_argument("--shared-dec", type=int, default=0)
    ap.add_argument("--disc-hidden", type=int, default=64)
    args = ap.parse_args()
    setup = {"steps": args.steps, "seed": args.seed, "shared_enc": args.shared_enc,
             "shared_dec": args.shared_dec, "disc_hidden": args.disc_hidden}
    observed = {}
    for lam in (0.0, 0.5):
        trace = []

        def log(step, acc, ppl):
            trace.append([step, round(acc, 4), round(ppl, 4)])
            print(f"lambda={lam} step={step} disc_acc={acc:.3f} dev_ppl={ppl:.3f}", flush=True)
        acc = adversarial_probe(lam, seed=args.seed, steps=args.steps,
                                shared_enc=args.shared_enc, shared_dec=args.shared_dec,
                                disc_hidden=args.disc_hidden, log=log)
        observed[str(lam)] = {"final_accuracy": acc, "trace": trace}
    out = {"setup": setup, "thresholds": {"lambda0_min": 0.90, "lambda05_max": 0.65},
           "observed": observed}
    FIXTURE.parent.mkdir(exist_ok=True)
    FIXTURE.write_text(json.dumps(out, indent=2) + "\n")
    print("wrote", FIXTURE)


if __name__ == "__main__":
    main()
