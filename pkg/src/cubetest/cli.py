"""Command-line front end.

Subcommands: ``sample`` (write an instance file), ``eval`` (query values
and signatures), ``attack`` (run a tester against an instance),
``distance`` (exact distances and farness estimates), ``experiment``
(run a named experiment from a JSON config), ``verify`` (re-run a stored
experiment and compare).

Exit codes: 0 ok, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import BitString, RngStream
from .distance import (
    estimate_witness_density,
    exact_dist_mono,
    exact_dist_unate,
    exhaustive_witness_density,
    unate_dist_lower_bound,
)
from .families import (
    FlippedDnfInstance,
    QuadrantInstance,
    MonoInstance,
    OneLevelInstance,
    UnateInstance,
    instance_from_json,
)
from .experiments import (
    ExperimentConfig,
    run_experiment,
    rows_to_csv,
    verify_results,
    write_results,
)
from .sigoracle import (
    OutOfBandError,
    mono_full_signature,
    onelevel_signature,
    unate_signature,
    value_from_mono_signature,
    value_from_unate_signature,
)
from .testers import TesterConfig, flipped_dnf_attack, edge_tester, two_level_attack

_SAMPLERS = {
    "mono": lambda a: MonoInstance.sample(a.n, a.world, a.seed, storage=a.storage),
    "flipdnf": lambda a: FlippedDnfInstance.sample(a.n, a.world, a.seed),
    "onelevel": lambda a: OneLevelInstance.sample(a.n, a.world, a.seed),
    "unate": lambda a: UnateInstance.sample(a.n, a.world, a.seed),
    "quadrant": lambda a: QuadrantInstance.sample(a.n, a.seed),
}


def _dump_json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _load_instance(path: str):
    return instance_from_json(json.loads(Path(path).read_text()))


def _instance_dimension(inst) -> int:
    return getattr(inst, "dimension", inst.n)


def _cmd_sample(args, parser) -> int:
    inst = _SAMPLERS[args.family](args)
    text = _dump_json(inst.to_json())
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _signature_record(inst, x: BitString) -> dict:
    if isinstance(inst, MonoInstance):
        wc = inst.weight_class(x)
        sig = mono_full_signature(inst, x)
        rec = sig.to_json()
        rec["value_from_signature"] = value_from_mono_signature(wc, sig)
        return rec
    if isinstance(inst, OneLevelInstance):
        sig = onelevel_signature(inst, x)
        rec = sig.to_json()
        rec["value_from_signature"] = value_from_unate_signature("middle", sig)
        return rec
    if isinstance(inst, UnateInstance):
        sig = unate_signature(inst, x)
        rec = sig.to_json()
        rec["value_from_signature"] = value_from_unate_signature("middle", sig)
        return rec
    raise OutOfBandError(f"{type(inst).__name__} has no signature oracle")


def _cmd_eval(args, parser) -> int:
    inst = _load_instance(args.instance)
    dim = _instance_dimension(inst)
    points = [BitString.from_hex(dim, h) for h in args.x or []]
    if args.random:
        rng = RngStream(args.rng_seed, "cli-eval")
        points.extend(BitString.random(dim, rng) for _ in range(args.random))
    if not points:
        parser.error("nothing to evaluate: pass --x or --random")
    transcript = None
    if args.transcript_out:
        from .transcripts import (
            MonoTranscript,
            OneLevelSignatureOracle,
            SingleLevelTranscript,
            UnateSignatureOracle,
        )

        if isinstance(inst, MonoInstance):
            transcript = MonoTranscript(inst.n)
        elif isinstance(inst, OneLevelInstance):
            transcript = SingleLevelTranscript(inst.n)
        elif isinstance(inst, UnateInstance):
            transcript = UnateSignatureOracle(inst).transcript
        else:
            parser.error(f"{type(inst).__name__} has no signature transcript")
    for x in points:
        rec = {"x": x.to_hex(), "value": inst.value(x)}
        if args.signature or transcript is not None:
            rec["signature"] = _signature_record(inst, x)
        if transcript is not None:
            if isinstance(inst, MonoInstance):
                transcript.extend(x, mono_full_signature(inst, x))
            elif isinstance(inst, OneLevelInstance):
                transcript.extend(x, onelevel_signature(inst, x))
            else:
                transcript.extend(
                    x,
                    unate_signature(inst, x),
                    reveal=lambda i: int(inst._dict_vars[i]),
                )
        sys.stdout.write(json.dumps(rec, sort_keys=True) + "\n")
    if transcript is not None:
        Path(args.transcript_out).write_text(transcript.dump_jsonl())
    return 0


_CLI_ATTACKS = {"edge": edge_tester, "flipdnf": flipped_dnf_attack, "two-level": two_level_attack}


def _cmd_attack(args, parser) -> int:
    inst = _load_instance(args.instance)
    cfg = TesterConfig(q=args.budget, seed=args.seed)
    verdict = _CLI_ATTACKS[args.attack](inst.value, _instance_dimension(inst), cfg)
    text = _dump_json(verdict.to_json())
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_distance(args, parser) -> int:
    inst = _load_instance(args.instance)
    out: dict = {"mode": args.mode}
    if args.mode == "exact-mono":
        d = exact_dist_mono(inst.truth_table(), cap=args.cap)
        out["distance"] = str(d)
        out["distance_float"] = float(d)
    elif args.mode == "exact-unate":
        d = exact_dist_unate(inst.truth_table(), cap=args.cap)
        out["distance"] = str(d)
        out["distance_float"] = float(d)
    elif args.mode == "lower-bound":
        d = unate_dist_lower_bound(inst.truth_table())
        out["lower_bound"] = str(d)
        out["lower_bound_float"] = float(d)
    elif args.mode == "witness-exhaustive":
        out["witness_density"] = exhaustive_witness_density(inst)
    elif args.mode == "witness-estimate":
        est = estimate_witness_density(inst, args.samples, RngStream(args.seed, "cli-witness"))
        out.update(
            estimate=est.estimate, ci_halfwidth=est.ci_halfwidth, samples=est.samples
        )
    sys.stdout.write(_dump_json(out))
    return 0


def _cmd_experiment(args, parser) -> int:
    cfg = ExperimentConfig.from_json(json.loads(Path(args.config).read_text()))
    for field in ("threads", "out", "samples", "budget", "alpha", "format"):
        value = getattr(args, field)
        if value is not None:
            setattr(cfg, field, value)
    rows = run_experiment(cfg)
    if cfg.out:
        target = write_results(cfg, rows, cfg.out)
        sys.stdout.write(f"wrote {len(rows)} rows to {target}\n")
    elif cfg.format == "json":
        payload = [
            {
                "experiment": r.experiment, "seed": r.seed, "n": r.n,
                "world": r.world, "metric": r.metric, "value": r.value,
                "ci": r.ci, "queries": r.queries,
            }
            for r in rows
        ]
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(rows_to_csv(rows))
    return 0


def _cmd_verify(args, parser) -> int:
    ok, message = verify_results(args.results, threads=args.threads)
    sys.stdout.write(message + "\n")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubetest",
        description="Property-testing laboratory for monotonicity and unateness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample an instance and write it as JSON")
    p.add_argument("--family", required=True, choices=sorted(_SAMPLERS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--world", choices=["yes", "no"], default="yes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--storage", choices=["lazy", "explicit"], default="lazy")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_sample)

    p = sub.add_parser("eval", help="evaluate queries against an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--x", action="append", help="query as hex (repeatable)")
    p.add_argument("--random", type=int, default=0, help="add m random queries")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--signature", action="store_true")
    p.add_argument(
        "--transcript-out",
        help="also build the signature transcript and dump it as JSON lines",
    )
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("attack", help="run a tester against an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--attack", required=True, choices=sorted(_CLI_ATTACKS))
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_attack)

    p = sub.add_parser("distance", help="distances and farness estimates")
    p.add_argument("--instance", required=True)
    p.add_argument(
        "--mode",
        required=True,
        choices=[
            "exact-mono", "exact-unate", "lower-bound",
            "witness-exhaustive", "witness-estimate",
        ],
    )
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=14)
    p.set_defaults(fn=_cmd_distance)

    p = sub.add_parser("experiment", help="run a named experiment from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--threads", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--format", choices=["csv", "json"])
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("verify", help="re-run a stored experiment and compare")
    p.add_argument("--results", required=True, help="directory with rows.csv + meta.json")
    p.add_argument("--threads", type=int)
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args, parser)
    except (ValueError, OutOfBandError, FileNotFoundError, KeyError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
