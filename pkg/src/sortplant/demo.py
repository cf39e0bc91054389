"""Demonstration campaign: GA-optimized episodes, filtered and exported.

Each uniquely seeded environment gets one GA run; trajectories that beat the
rule-based baseline by the improvement margin are replayed into transition
files, everything else is recorded as a rejection.  The manifest makes the
dataset self-describing and tamper-evident.
"""

from __future__ import annotations

import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from .config import ConfigError, EnvConfig, config_from_mapping, config_to_dict
from .env import OBS_SIZE, ContractViolation, InputTape
from .baselines import make_policy, run_policy
from .planners import GaParams, ga_optimize, ga_seed_for_env, rollout
from .trajio import Transition, read_transitions, sha256_file, write_transitions

MANIFEST_NAME = "manifest.json"
MANIFEST_FORMAT = 1

# Benchmark evaluation owns seeds below this bound; demonstration campaigns
# must stay at or above it so the two seed sets can never overlap.
BENCH_SEED_LIMIT = 1000

DEFAULT_MIN_IMPROVEMENT = 0.15


def passes_filter(ga_reward: float, rb_reward: float, min_improvement: float = DEFAULT_MIN_IMPROVEMENT) -> bool:
    """Sign-safe margin rule: the GA reward must clear the baseline by
    min_improvement of the baseline's magnitude (x1.15 for positive
    baselines)."""
    return ga_reward >= rb_reward + min_improvement * abs(rb_reward)


@dataclass
class DemoTrajectory:
    env_seed: int
    actions: tuple[int, ...]
    transitions: list[Transition]
    cumulative_reward: float
    baseline_reward: float


@dataclass
class Rejection:
    env_seed: int
    ga_reward: float
    baseline_reward: float


@dataclass
class DatasetManifest:
    config: EnvConfig
    ga_params: GaParams
    min_improvement: float
    seeds: tuple[int, ...]
    accepted: list[dict]
    rejected: list[dict]

    def to_dict(self) -> dict:
        return {
            "format_version": MANIFEST_FORMAT,
            "config": config_to_dict(self.config),
            "ga_params": {
                "population": self.ga_params.population,
                "generations": self.ga_params.generations,
                "crossover_rate": self.ga_params.crossover_rate,
                "mutation_rate": self.ga_params.mutation_rate,
                "tournament_size": self.ga_params.tournament_size,
                "ga_seed": self.ga_params.ga_seed,
            },
            "min_improvement": self.min_improvement,
            "seeds": list(self.seeds),
            "accepted_count": len(self.accepted),
            "rejected_count": len(self.rejected),
            "trajectories": self.accepted,
            "rejections": self.rejected,
        }


def generate_demo(
    config: EnvConfig,
    env_seed: int,
    ga_params: GaParams,
    min_improvement: float = DEFAULT_MIN_IMPROVEMENT,
    workers: int = 1,
) -> Union[DemoTrajectory, Rejection]:
    """Optimize one environment seed and apply the acceptance filter.

    The GA best sequence is replayed through a fresh rollout to materialize
    the exported transitions; determinism guarantees the replay reproduces
    the optimizer's reward exactly.
    """
    n = config.episode_len
    tape = InputTape(config, env_seed)
    baseline = run_policy(config, env_seed, make_policy("rule"), n, tape=tape)
    per_env = dataclasses.replace(ga_params, ga_seed=ga_seed_for_env(ga_params.ga_seed, env_seed))
    ga = ga_optimize(config, env_seed, n, per_env, workers=workers)
    if not passes_filter(ga.best_reward, baseline.cumulative_reward, min_improvement):
        return Rejection(env_seed, ga.best_reward, baseline.cumulative_reward)
    total, transitions = rollout(config, env_seed, ga.best_sequence, tape)
    if total != ga.best_reward:
        raise RuntimeError(
            f"replay of seed {env_seed} returned {total!r}, optimizer saw {ga.best_reward!r}; determinism broken"
        )
    return DemoTrajectory(env_seed, ga.best_sequence, transitions, total, baseline.cumulative_reward)


def _campaign_worker(args: tuple[EnvConfig, int, GaParams, float]) -> Union[DemoTrajectory, Rejection]:
    config, env_seed, ga_params, min_improvement = args
    return generate_demo(config, env_seed, ga_params, min_improvement)


def run_campaign(
    config: EnvConfig,
    seeds: Sequence[int],
    ga_params: GaParams,
    min_improvement: float = DEFAULT_MIN_IMPROVEMENT,
    out_dir: Union[str, Path] = "demos",
    workers: int = 1,
) -> DatasetManifest:
    """Generate, filter, and export demonstrations for every seed.

    Per-seed work is independent and may run on a worker pool; files and the
    manifest are written in ascending seed order, so reruns are byte-identical.
    """
    seeds = tuple(sorted(set(int(s) for s in seeds)))
    if len(seeds) == 0:
        raise ContractViolation("campaign needs at least one seed")
    bad = [s for s in seeds if s < BENCH_SEED_LIMIT]
    if bad:
        raise ContractViolation(
            f"seed(s) {bad[:5]} overlap the benchmark pool [0, {BENCH_SEED_LIMIT}); campaign seeds must be >= {BENCH_SEED_LIMIT}"
        )

    jobs = [(config, s, ga_params, min_improvement) for s in seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_campaign_worker, jobs))
    else:
        outcomes = [_campaign_worker(job) for job in jobs]

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    accepted: list[dict] = []
    rejected: list[dict] = []
    for outcome in outcomes:
        if isinstance(outcome, DemoTrajectory):
            name = f"traj_{outcome.env_seed}.jsonl"
            write_transitions(out / name, outcome.transitions)
            accepted.append(
                {
                    "seed": outcome.env_seed,
                    "file": name,
                    "ga_reward": outcome.cumulative_reward,
                    "baseline_reward": outcome.baseline_reward,
                    "actions": "".join(str(b) for b in outcome.actions),
                    "sha256": sha256_file(out / name),
                }
            )
        else:
            rejected.append(
                {
                    "seed": outcome.env_seed,
                    "ga_reward": outcome.ga_reward,
                    "baseline_reward": outcome.baseline_reward,
                }
            )
    manifest = DatasetManifest(config, ga_params, min_improvement, seeds, accepted, rejected)
    (out / MANIFEST_NAME).write_text(json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8")
    return manifest


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass
class Violation:
    file: str
    rule: str
    detail: str


@dataclass
class ValidationReport:
    ok: bool
    violations: list[Violation] = field(default_factory=list)

    def format(self) -> str:
        if self.ok:
            return "dataset OK"
        lines = [f"dataset FAILED: {len(self.violations)} violation(s)"]
        lines += [f"  {v.file}: [{v.rule}] {v.detail}" for v in self.violations]
        return "\n".join(lines)


def validate_dataset(directory: Union[str, Path]) -> ValidationReport:
    """Re-check schema, digests, counts, the filter rule, and replay equality.

    Replay re-simulates every accepted trajectory from (config, seed, action
    string) recorded in the manifest and compares rewards bit-exactly.
    """
    directory = Path(directory)
    violations: list[Violation] = []
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.is_file():
        return ValidationReport(False, [Violation(MANIFEST_NAME, "manifest-missing", "no manifest in directory")])
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        return ValidationReport(False, [Violation(MANIFEST_NAME, "manifest-unparseable", str(exc))])
    if manifest.get("format_version") != MANIFEST_FORMAT:
        return ValidationReport(
            False,
            [Violation(MANIFEST_NAME, "manifest-version", f"unsupported format_version {manifest.get('format_version')!r}")],
        )
    try:
        config = config_from_mapping(manifest["config"])
    except (KeyError, ConfigError) as exc:
        return ValidationReport(False, [Violation(MANIFEST_NAME, "manifest-config", str(exc))])
    min_improvement = manifest.get("min_improvement", DEFAULT_MIN_IMPROVEMENT)

    entries = manifest.get("trajectories", [])
    if manifest.get("accepted_count") != len(entries):
        violations.append(Violation(MANIFEST_NAME, "manifest-index", "accepted_count does not match index length"))

    indexed_files = {entry.get("file") for entry in entries}
    for stray in sorted(p.name for p in directory.glob("traj_*.jsonl") if p.name not in indexed_files):
        violations.append(Violation(stray, "manifest-index", "data file present but not indexed"))

    for entry in entries:
        name = entry.get("file", "<missing file name>")
        path = directory / name
        if not path.is_file():
            violations.append(Violation(name, "manifest-index", "indexed file missing from disk"))
            continue
        digest = sha256_file(path)
        if digest != entry.get("sha256"):
            violations.append(Violation(name, "digest", f"sha256 mismatch: manifest {entry.get('sha256')}, file {digest}"))
            continue
        try:
            transitions = read_transitions(path, OBS_SIZE)
        except Exception as exc:
            violations.append(Violation(name, "schema", str(exc)))
            continue
        if len(transitions) != config.episode_len:
            violations.append(
                Violation(name, "transition-count", f"expected {config.episode_len} transitions, found {len(transitions)}")
            )
            continue
        if any(tr.truncated for tr in transitions[:-1]) or not transitions[-1].truncated:
            violations.append(Violation(name, "schema", "truncated flag must be set on exactly the final transition"))
        ga_reward = entry.get("ga_reward")
        rb_reward = entry.get("baseline_reward")
        if not isinstance(ga_reward, (int, float)) or not isinstance(rb_reward, (int, float)):
            violations.append(Violation(name, "manifest-index", "missing ga_reward/baseline_reward"))
            continue
        if not passes_filter(ga_reward, rb_reward, min_improvement):
            violations.append(Violation(name, "filter", f"ga {ga_reward} vs baseline {rb_reward} fails the margin rule"))
        actions_str = entry.get("actions", "")
        if not set(actions_str) <= {"0", "1"} or len(actions_str) != config.episode_len:
            violations.append(Violation(name, "manifest-index", "actions string malformed"))
            continue
        if any(tr.action != int(actions_str[i]) for i, tr in enumerate(transitions)):
            violations.append(Violation(name, "replay", "stored actions disagree with manifest action string"))
            continue
        replay_total, replay_transitions = rollout(config, int(entry["seed"]), [int(b) for b in actions_str])
        stored_total = sum(tr.reward for tr in transitions)
        if replay_total != ga_reward or stored_total != ga_reward:
            violations.append(
                Violation(
                    name,
                    "replay",
                    f"cumulative reward mismatch: manifest {ga_reward!r}, stored {stored_total!r}, replay {replay_total!r}",
                )
            )
            continue
        for i, (stored, fresh) in enumerate(zip(transitions, replay_transitions)):
            if stored.reward != fresh.reward:
                violations.append(Violation(name, "replay", f"transition {i} reward mismatch"))
                break
    return ValidationReport(not violations, violations)
