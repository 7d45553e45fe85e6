"""Named experiments with deterministic CSV persistence.

Every acceptance-style check is runnable as a named experiment from a
JSON config; results land in ``<out>/<experiment>/<config-hash>/`` as
``rows.csv`` plus ``meta.json``.  Reruns with an identical config produce
identical metric columns (wall-time is the only volatile field), which is
what the ``verify`` command enforces.

Parallelism is by seed only (a worker owns whole seeds, never parts of a
run), so per-run determinism is independent of the thread count.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

from .core import BitString, RngStream
from .distance import (
    count_violating_edges,
    estimate_witness_density,
    exact_dist_mono,
    exact_dist_unate,
    exhaustive_witness_density,
    unate_dist_lower_bound,
    witness_edge_family,
)
from .families import (
    FlippedDnfInstance,
    QuadrantInstance,
    MonoInstance,
    OneLevelInstance,
    UnateInstance,
)
from .likelihood import (
    mono_leaf_likelihood,
    mono_leaf_likelihood_bruteforce,
    unate_likelihood_bruteforce,
    unate_transcript_likelihood,
)
from .sigoracle import (
    OutOfBandError,
    mono_full_signature,
    onelevel_signature,
    unate_signature,
    value_from_mono_signature,
    value_from_unate_signature,
)
from .testers import (
    TesterConfig,
    flipped_dnf_attack,
    check_orientation,
    edge_tester,
    find_good_orientation,
    two_level_attack,
    OrientationNotFoundError,
)
from .transcripts import (
    ClassifierConfig,
    MonoTranscript,
    UnateSignatureOracle,
    classify_mono_edge,
    consistency_status,
    induced_mono_tuple,
)

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "run_experiment",
    "write_results",
    "verify_results",
    "EXPERIMENTS",
]

SCHEMA_VERSION = 1
_HASH_EXCLUDED = ("out", "threads")  # do not affect the computed rows


@dataclass
class ExperimentConfig:
    """Declarative description of one experiment run."""

    experiment: str
    family: Optional[str] = None
    n: list[int] = field(default_factory=list)
    worlds: list[str] = field(default_factory=lambda: ["yes"])
    seeds: list[int] = field(default_factory=lambda: list(range(10)))
    samples: int = 0
    budget: int = 1000
    alpha: float = 4.0
    tester: Optional[str] = None
    stage_overrides: dict = field(default_factory=dict)
    queries_per_transcript: int = 30
    threads: int = 1
    out: Optional[str] = None
    format: str = "csv"

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        seeds = obj.get("seeds", list(range(10)))
        if isinstance(seeds, dict):
            seeds = list(range(seeds["start"], seeds["start"] + seeds["count"]))
        known = {k for k in cls.__dataclass_fields__}
        unknown = set(obj) - known - {"seeds"}
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        kwargs = {k: v for k, v in obj.items() if k in known and k != "seeds"}
        return cls(seeds=[int(s) for s in seeds], **kwargs)

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "family": self.family,
            "n": list(self.n),
            "worlds": list(self.worlds),
            "seeds": list(self.seeds),
            "samples": self.samples,
            "budget": self.budget,
            "alpha": self.alpha,
            "tester": self.tester,
            "stage_overrides": dict(self.stage_overrides),
            "queries_per_transcript": self.queries_per_transcript,
            "threads": self.threads,
            "out": self.out,
            "format": self.format,
        }

    def config_hash(self) -> str:
        obj = {k: v for k, v in self.to_json().items() if k not in _HASH_EXCLUDED}
        blob = json.dumps(obj, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class ResultRow:
    experiment: str
    seed: int
    n: int
    world: str
    metric: str
    value: float
    ci: float = 0.0
    queries: int = 0
    wall_time_s: float = 0.0

    def key(self) -> tuple:
        return (self.n, self.world, self.seed, self.metric)


def _sample_instance(family: str, n: int, world: str, seed: int):
    fams = {
        "mono": MonoInstance.sample,
        "flipdnf": FlippedDnfInstance.sample,
        "onelevel": OneLevelInstance.sample,
        "unate": UnateInstance.sample,
    }
    if family == "quadrant":
        return QuadrantInstance.sample(n, seed)
    if family == "mono" and not math.isqrt(n) ** 2 == n:
        return MonoInstance.sample(n, world, seed, term_len=round(math.sqrt(n)))
    return fams[family](n, world, seed)


def _pmap(threads: int, fn: Callable, tasks: list) -> list:
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * threads))))


# ---------------------------------------------------------------------------
# Experiment bodies (one task = one seed)
# ---------------------------------------------------------------------------


def _monotone_check_task(args) -> list[ResultRow]:
    cfg_json, n, world, seed = args
    cfg = ExperimentConfig.from_json(cfg_json)
    t0 = time.perf_counter()
    inst = _sample_instance(cfg.family or "mono", n, world, seed)
    table = inst.truth_table()
    viol = count_violating_edges(table, n)
    dt = time.perf_counter() - t0
    return [ResultRow(cfg.experiment, seed, n, world, "violating_edges", viol, 0, 0, dt)]


def _unate_check_task(args) -> list[ResultRow]:
    cfg_json, n, world, seed = args
    cfg = ExperimentConfig.from_json(cfg_json)
    t0 = time.perf_counter()
    inst = UnateInstance.sample(n, world, seed)
    table = inst.base_truth_table()
    viol = count_violating_edges(table, n)
    dt = time.perf_counter() - t0
    return [
        ResultRow(cfg.experiment, seed, n, world, "deoriented_violating_edges", viol, 0, 0, dt)
    ]


def _signature_soundness_task(args) -> list[ResultRow]:
    cfg_json, n, world, seed = args
    cfg = ExperimentConfig.from_json(cfg_json)
    t0 = time.perf_counter()
    family = cfg.family or "mono"
    inst = _sample_instance(family, n, world, seed)
    rng = RngStream(seed, f"soundness-{family}")
    mismatches = 0
    checked = 0
    while checked < cfg.samples:
        x = BitString.random(n, rng)
        if family == "mono":
            if inst.weight_class(x) != "middle":
                continue
            got = value_from_mono_signature("middle", mono_full_signature(inst, x))
        elif family == "onelevel":
            if inst.weight_class(x) != "middle":
                continue
            got = value_from_unate_signature("middle", onelevel_signature(inst, x))
        else:
            if inst.band_class_base(x.xor(inst.orientation)) != "middle":
                continue
            got = value_from_unate_signature("middle", unate_signature(inst, x))
        checked += 1
        if got != inst.value(x):
            mismatches += 1
    dt = time.perf_counter() - t0
    return [
        ResultRow(cfg.experiment, seed, n, world, "mismatches", mismatches, 0, checked, dt)
    ]


def _random_middle_point(inst, rng) -> BitString:
    while True:
        x = BitString.random(inst.n, rng)
        if inst.weight_class(x) == "middle":
            return x


def _tuple_axioms_task(args) -> list[ResultRow]:
    cfg_json, n, world, seed = args
    cfg = ExperimentConfig.from_json(cfg_json)
    t0 = time.perf_counter()
    inst = MonoInstance.sample(n, world, seed)
    rng = RngStream(seed, "axioms")
    t = MonoTranscript(n)
    for _ in range(cfg.queries_per_transcript):
        x = _random_middle_point(inst, rng)
        t.extend(x, mono_full_signature(inst, x))
    violations = len(t.check_axioms()) + len(t.cross_check_instance(inst))
    dt = time.perf_counter() - t0
    return [
        ResultRow(
            cfg.experiment, seed, n, world, "axiom_violations", violations,
            0, len(t.queries), dt,
        )
    ]


def _toy_mono_instance(n: int, world: str, seed: int, n_terms: int = 4) -> MonoInstance:
    g = RngStream(seed, "toy-mono")
    m = math.isqrt(n)
    terms = [[g.randint0(n) for _ in range(m)] for _ in range(n_terms)]
    clauses = [
        [[g.randint0(n) for _ in range(m)] for _ in range(n_terms)]
        for _ in range(n_terms)
    ]
    dicts = [[g.randint0(n) for _ in range(n_terms)] for _ in range(n_terms)]
    return MonoInstance.from_parts(n, world, terms, clauses, dicts)


def _likelihood_equivalence_task(args) -> list[ResultRow]:
    cfg_json, n, world, seed = args
    cfg = ExperimentConfig.from_json(cfg_json)
    t0 = time.perf_counter()
    rng = RngStream(seed, "likelihood")
    worst = 0.0

    inst = _toy_mono_instance(n, world, seed)
    t = MonoTranscript(n)
    for _ in range(cfg.queries_per_transcript):
        x = _random_middle_point(inst, rng)
        t.extend(x, mono_full_signature(inst, x))
    if all(consistency_status(t, i, j) != "inconsistent" for (i, j) in t.rho):
        closed = mono_leaf_likelihood(inst, t)
        brute = mono_leaf_likelihood_bruteforce(inst, t)
        for a, b in ((closed.p_yes, brute.p_yes), (closed.p_no, brute.p_no)):
            if a != 0 or b != 0:
                worst = max(worst, abs(a - b) / max(abs(a), abs(b)))

    u = UnateInstance.sample(n, world, seed)
    oracle = UnateSignatureOracle(u)
    added, tries = 0, 0
    rng2 = RngStream(seed, "likelihood-unate")
    while added < cfg.queries_per_transcript and tries < 100 * cfg.queries_per_transcript:
        tries += 1
        x = BitString.random(n, rng2)
        try:
            oracle.query(x)
            added += 1
        except OutOfBandError:
            continue
    closed = unate_transcript_likelihood(u, oracle.transcript, mode="exhaustive")
    brute = unate_likelihood_bruteforce(u, oracle.transcript)
    for a, b in ((closed.p_yes, brute.p_yes), (closed.p_no, brute.p_no)):
        if a != 0 or b != 0:
            worst = max(worst, abs(a - b) / max(abs(a), abs(b)))
    dt = time.perf_counter() - t0
    return [ResultRow(cfg.experiment, seed, n, world, "max_rel_err", worst, 0, 0, dt)]


def _witness_density_task(args) -> list[ResultRow]:
    cfg_json, n, world, seed = args
    cfg = ExperimentConfig.from_json(cfg_json)
    t0 = time.perf_counter()
    inst = MonoInstance.sample(n, "no", seed)
    exact = exhaustive_witness_density(inst)
    est = estimate_witness_density(inst, cfg.samples, RngStream(seed, "witness-mc"))
    dt = time.perf_counter() - t0
    return [
        ResultRow(cfg.experiment, seed, n, "no", "exhaustive_pr", exact, 0, 0, dt),
        ResultRow(
            cfg.experiment, seed, n, "no", "mc_pr", est.estimate,
            est.ci_halfwidth, cfg.samples, dt,
        ),
    ]


def _farness_consistency_task(args) -> list[ResultRow]:
    cfg_json, n, world, seed = args
    cfg = ExperimentConfig.from_json(cfg_json)
    t0 = time.perf_counter()
    inst = _sample_instance("mono", n, "no", seed)
    fam = witness_edge_family(inst)
    used = set()
    for x, y in fam:
        assert x.bits not in used and y.bits not in used, "family edges overlap"
        used.add(x.bits)
        used.add(y.bits)
    density = len(fam) / (1 << n)
    dist = float(exact_dist_mono(inst.truth_table(), n, cap=max(n, 14)))
    dt = time.perf_counter() - t0
    return [
        ResultRow(cfg.experiment, seed, n, "no", "family_density", density, 0, 0, dt),
        ResultRow(cfg.experiment, seed, n, "no", "exact_dist", dist, 0, 0, dt),
        ResultRow(
            cfg.experiment, seed, n, "no", "lower_bound_ok",
            float(density <= dist), 0, 0, dt,
        ),
    ]


def _quadrant_farness_task(args) -> list[ResultRow]:
    cfg_json, n, world, seed = args
    cfg = ExperimentConfig.from_json(cfg_json)
    t0 = time.perf_counter()
    inst = QuadrantInstance(n, seed)  # seed doubles as the special index
    table = inst.truth_table()
    lb = float(unate_dist_lower_bound(table))
    dist = float(exact_dist_unate(table, cap=n + 2))
    dt = time.perf_counter() - t0
    return [
        ResultRow(cfg.experiment, seed, n, "no", "lower_bound", lb, 0, 0, dt),
        ResultRow(cfg.experiment, seed, n, "no", "exact_dist_unate", dist, 0, 0, dt),
    ]


_ATTACKS = {
    "edge": edge_tester,
    "flipdnf": flipped_dnf_attack,
    "two-level": two_level_attack,
}
_ATTACK_FAMILY = {"edge": "mono", "flipdnf": "flipdnf", "two-level": "mono"}


def _attack_rates_task(args) -> list[ResultRow]:
    cfg_json, n, world, seed = args
    cfg = ExperimentConfig.from_json(cfg_json)
    t0 = time.perf_counter()
    tester = cfg.tester or "edge"
    family = cfg.family or _ATTACK_FAMILY[tester]
    inst = _sample_instance(family, n, world, seed)
    tcfg = TesterConfig(
        q=cfg.budget, seed=seed, stage_overrides=dict(cfg.stage_overrides)
    )
    verdict = _ATTACKS[tester](inst.value, n, tcfg)
    witness_ok = 1.0
    if verdict.decision == "reject":
        w = verdict.witness
        witness_ok = float(
            w.lower.precedes(w.upper)
            and inst.value(w.lower) == 1
            and inst.value(w.upper) == 0
        )
    dt = time.perf_counter() - t0
    return [
        ResultRow(
            cfg.experiment, seed, n, world, "reject",
            float(verdict.decision == "reject"), 0, verdict.queries_used, dt,
        ),
        ResultRow(
            cfg.experiment, seed, n, world, "witness_ok", witness_ok,
            0, verdict.queries_used, dt,
        ),
    ]


def _orientation_task(args) -> list[ResultRow]:
    cfg_json, n, world, seed = args
    cfg = ExperimentConfig.from_json(cfg_json)
    t0 = time.perf_counter()
    rng = RngStream(seed, "orientation")
    log2n = math.log2(n)
    size = max(1, math.floor(n / (log2n * log2n)))
    if cfg.samples:
        size = cfg.samples
    points = [BitString.random(n, rng) for _ in range(size)]
    try:
        r, tries = find_good_orientation(points, rng, max_tries=cfg.budget)
        ok = float(check_orientation(points, r, n))
    except OrientationNotFoundError as e:
        tries, ok = e.tries, 0.0
    dt = time.perf_counter() - t0
    return [
        ResultRow(cfg.experiment, seed, n, world, "tries", tries, 0, 0, dt),
        ResultRow(cfg.experiment, seed, n, world, "found_and_valid", ok, 0, 0, dt),
    ]


def _classifier_sanity_task(args) -> list[ResultRow]:
    cfg_json, n, world, seed = args
    cfg = ExperimentConfig.from_json(cfg_json)
    t0 = time.perf_counter()
    inst = MonoInstance.sample(n, "yes", seed)
    rng = RngStream(seed, "classifier")
    ccfg = ClassifierConfig(n, alpha=cfg.alpha)
    t = MonoTranscript(n)
    false_e3 = 0
    for _ in range(cfg.queries_per_transcript):
        x = _random_middle_point(inst, rng)
        sig = mono_full_signature(inst, x)
        edge = classify_mono_edge(t, x, sig, ccfg)
        if edge.kind == "E3":
            # ground truth: did a zero-consistent cell actually flip?
            i, j = edge.i, edge.j
            actual = (
                consistency_status(t, i, j) == "zero_consistent"
                and (sig.a if j == sig.clause.first else sig.b) == 1
            )
            if not actual:
                false_e3 += 1
        if edge.kind is not None and t.bad_edge is None:
            t.bad_edge = edge
        t.extend(x, sig)
    ref = induced_mono_tuple(t.queries)
    drift = 0 if (ref.rho == t.rho and ref.I == t.I) else 1
    dt = time.perf_counter() - t0
    return [
        ResultRow(cfg.experiment, seed, n, world, "false_e3", false_e3, 0, len(t.queries), dt),
        ResultRow(cfg.experiment, seed, n, world, "tuple_drift", drift, 0, 0, dt),
    ]


EXPERIMENTS: dict[str, Callable] = {
    "monotone-check": _monotone_check_task,
    "unate-check": _unate_check_task,
    "signature-soundness": _signature_soundness_task,
    "tuple-axioms": _tuple_axioms_task,
    "likelihood-equivalence": _likelihood_equivalence_task,
    "farness-estimate": _witness_density_task,
    "farness-consistency": _farness_consistency_task,
    "quadrant-farness": _quadrant_farness_task,
    "attack-rates": _attack_rates_task,
    "orientation-search": _orientation_task,
    "classifier-sanity": _classifier_sanity_task,
}


class _GuardedTask:
    """Per-seed failure isolation: an exception becomes an error row and
    the rest of the grid keeps running (picklable for process pools)."""

    def __init__(self, fn: Callable):
        self.fn = fn

    def __call__(self, args) -> list[ResultRow]:
        cfg_json, n, world, seed = args
        try:
            return self.fn(args)
        except Exception as e:  # noqa: BLE001 - recorded, not swallowed silently
            return [
                ResultRow(
                    cfg_json["experiment"], seed, n, world,
                    f"error:{type(e).__name__}", 1.0,
                )
            ]


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run the named experiment over its (n, world, seed) grid.

    Per-seed failures are recorded as ``error:*`` metric rows; the run
    continues.
    """
    if cfg.experiment not in EXPERIMENTS:
        raise ValueError(
            f"unknown experiment {cfg.experiment!r}; "
            f"known: {sorted(EXPERIMENTS)}"
        )
    task_fn = _GuardedTask(EXPERIMENTS[cfg.experiment])
    cfg_json = cfg.to_json()
    tasks = [
        (cfg_json, n, world, seed)
        for n in cfg.n
        for world in cfg.worlds
        for seed in cfg.seeds
    ]
    results: list[ResultRow] = []
    for rows in _pmap(cfg.threads, task_fn, tasks):
        results.extend(rows)
    results.sort(key=ResultRow.key)
    return results


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

_CSV_FIELDS = [
    "experiment", "seed", "n", "world", "metric", "value", "ci",
    "queries", "wall_time_s",
]


def rows_to_csv(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_FIELDS)
    for r in rows:
        w.writerow(
            [
                r.experiment, r.seed, r.n, r.world, r.metric,
                repr(float(r.value)), repr(float(r.ci)), r.queries,
                f"{r.wall_time_s:.6f}",
            ]
        )
    return buf.getvalue()


def write_results(cfg: ExperimentConfig, rows: list[ResultRow], out_dir: str | Path) -> Path:
    """Write ``rows.csv`` + ``meta.json`` under <out>/<experiment>/<hash>/."""
    target = Path(out_dir) / cfg.experiment / cfg.config_hash()
    target.mkdir(parents=True, exist_ok=True)
    (target / "rows.csv").write_text(rows_to_csv(rows))
    meta = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.to_json(),
        "config_hash": cfg.config_hash(),
        "row_count": len(rows),
    }
    (target / "meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return target


def _stable_columns(csv_text: str) -> list[tuple]:
    rows = list(csv.reader(io.StringIO(csv_text)))
    header = rows[0]
    drop = header.index("wall_time_s")
    return [tuple(v for k, v in enumerate(r) if k != drop) for r in rows[1:]]


def verify_results(results_dir: str | Path, threads: Optional[int] = None) -> tuple[bool, str]:
    """Re-run the config stored next to a results file and compare rows.

    Returns (ok, message); metric columns must match exactly, wall time is
    ignored.
    """
    target = Path(results_dir)
    meta = json.loads((target / "meta.json").read_text())
    cfg = ExperimentConfig.from_json(meta["config"])
    if threads is not None:
        cfg.threads = threads
    if meta.get("config_hash") != cfg.config_hash():
        return False, "config hash mismatch between meta.json and recomputed hash"
    fresh = rows_to_csv(run_experiment(cfg))
    old = (target / "rows.csv").read_text()
    if _stable_columns(fresh) != _stable_columns(old):
        return False, "metric columns differ from the stored rows"
    return True, f"verified {meta['row_count']} rows for {cfg.experiment}"
