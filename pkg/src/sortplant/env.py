"""Sorting-plant dynamics: material flow, containers, presses, reward, observation.

A full episode is a deterministic function of (config, seed, action sequence).
Every stochastic input comes from a counter-based draw keyed by the step index
(see :mod:`sortplant.rng`), so the realized inputs never depend on which
actions were taken; planners exploit this by re-rolling the same seed under
many candidate sequences.

Per step, in order: a new batch is generated and enqueued on the belt tail;
the head batch (generated ``belt_delay`` steps earlier) is sorted under the
chosen mode; deposits land in containers; containers at the pressing
threshold are baled by idle presses; the reward is read off the post-deposit
container purities.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import EnvConfig
from .rng import Stream, noise_draw

N_MATERIALS = 4
CONTAINER_E = 4
N_CONTAINERS = 5
OBS_SIZE = 33

# mode 0 boosts A and C, mode 1 boosts B and D
BOOSTED_BY_MODE = ((0, 2), (1, 3))

_TWO_PI = 2.0 * math.pi


class ContractViolation(ValueError):
    """A documented precondition was violated by the caller."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass
class MaterialBatch:
    """One step's worth of mixed input material.  Treat as immutable: batches
    may be shared between rollouts that replay the same seed."""

    quantities: list[float]
    created_at: int
    total: float


@dataclass
class Container:
    """Holds sorted material, tracked per true material so purity is exact.

    ``contents[j]`` is the amount of true material j inside; the designated
    material of container m is m itself (container E has none).
    """

    contents: list[float] = field(default_factory=lambda: [0.0] * N_MATERIALS)
    pending: bool = False

    @property
    def total(self) -> float:
        c = self.contents
        return c[0] + c[1] + c[2] + c[3]


@dataclass
class Press:
    busy_until: int = 0

    def idle_at(self, t: int) -> bool:
        return self.busy_until <= t


@dataclass(frozen=True)
class Bale:
    material: int
    size: float
    purity: float
    pressed_at: int


@dataclass
class SortOutcome:
    """deposits[c][j] = units of true material j placed in container c."""

    deposits: list[list[float]]
    accuracies: list[float]


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    terminated: bool
    truncated: bool
    info: dict


class InputTape:
    """Memoized input and jitter draws for one (config, seed) pair.

    Draws are pure functions of (seed, t); the tape caches them so that many
    rollouts against the same seed skip recomputing identical values.  Cache
    or no cache, the numbers are bit-identical.
    """

    __slots__ = ("config", "seed", "_batches", "_jitters")

    def __init__(self, config: EnvConfig, seed: int) -> None:
        self.config = config
        self.seed = seed
        self._batches: dict[int, MaterialBatch] = {}
        self._jitters: dict[int, tuple[float, float, float, float]] = {}

    def batch(self, t: int) -> MaterialBatch:
        b = self._batches.get(t)
        if b is None:
            b = generate_input(self.config, self.seed, t)
            self._batches[t] = b
        return b

    def jitters(self, t: int) -> tuple[float, float, float, float]:
        j = self._jitters.get(t)
        if j is None:
            half = self.config.accuracy_jitter
            seed = self.seed
            j = (
                (2.0 * noise_draw(seed, Stream.JITTER, t, 0) - 1.0) * half,
                (2.0 * noise_draw(seed, Stream.JITTER, t, 1) - 1.0) * half,
                (2.0 * noise_draw(seed, Stream.JITTER, t, 2) - 1.0) * half,
                (2.0 * noise_draw(seed, Stream.JITTER, t, 3) - 1.0) * half,
            )
            self._jitters[t] = j
        return j


@dataclass
class EnvState:
    """The single mutable simulation object for one episode."""

    config: EnvConfig
    seed: int
    t: int
    belt: deque[MaterialBatch]
    containers: list[Container]
    presses: list[Press]
    bales: list[Bale]
    press_queue: deque[tuple[int, int]]  # (crossed_at, container index), FIFO
    last_action: Optional[int]
    last_realized_accuracies: list[float]
    generated_total: float
    deposited_total: float
    baled_total: float
    tape: InputTape

    def mass_balance(self) -> tuple[float, float]:
        """(total generated, total accounted for on belt + containers + bales)."""
        accounted = sum(b.total for b in self.belt)
        accounted += sum(c.total for c in self.containers)
        accounted += sum(b.size for b in self.bales)
        return self.generated_total, accounted


# ---------------------------------------------------------------------------
# plant operations
# ---------------------------------------------------------------------------


def generate_input(config: EnvConfig, seed: int, t: int) -> MaterialBatch:
    """Stochastic seasonal input model; pure function of (config, seed, t).

    Batch size is uniform in [batch_min, batch_max).  The material mix comes
    from uniform draws modulated by phase-shifted sinusoids (one quarter turn
    apart per material) so the composition drifts over the season.
    """
    u0 = noise_draw(seed, Stream.INPUT_SIZE, t, 0)
    total = config.batch_min + u0 * (config.batch_max - config.batch_min)
    phase = _TWO_PI * t / config.seasonal_period
    amp = config.seasonal_amplitude
    weights = []
    for m in range(N_MATERIALS):
        u = noise_draw(seed, Stream.INPUT_MIX, t, m)
        w = u * (1.0 + amp * math.sin(phase + m * (math.pi / 2.0)))
        weights.append(w if w > 0.01 else 0.01)
    wsum = weights[0] + weights[1] + weights[2] + weights[3]
    quantities = [total * w / wsum for w in weights]
    return MaterialBatch(quantities, t, quantities[0] + quantities[1] + quantities[2] + quantities[3])


def effective_accuracy(mode: int, material: int, load_fraction: float, config: EnvConfig, jitter: float) -> float:
    """Realized capture rate of one station for one batch.

    The mode-selected pair sorts at 1 - boost_noise, the rest at the
    baseline; load degrades accuracy quadratically; jitter shifts the result
    before clamping to [0, 1].
    """
    if not 0.0 <= load_fraction <= 1.0:
        raise ContractViolation(f"load fraction must lie in [0, 1], got {load_fraction!r}")
    if material in BOOSTED_BY_MODE[mode]:
        base = 1.0 - config.boost_noise
    else:
        base = config.baseline_accuracy
    a = base * (1.0 - config.degradation_coeff * load_fraction * load_fraction) + jitter
    if a < 0.0:
        return 0.0
    if a > 1.0:
        return 1.0
    return a


def sort_batch(
    batch: MaterialBatch,
    mode: int,
    seed: int,
    t: int,
    config: EnvConfig,
    jitters: Optional[tuple[float, float, float, float]] = None,
) -> SortOutcome:
    """Run one batch through the four stations in order A, B, C, D.

    Station m captures a_m of its own residual material.  Its misfires drag
    foreign material in alongside: a false-capture volume of
    (1 - a_m) * contamination_coeff * r[m] is drawn from the other residuals
    in proportion to their current amounts (capped by what is actually
    there).  Whatever survives all four stations lands in container E.
    Quantities are continuous flows, so mass is conserved exactly.

    Tying the false-capture volume to the station's own throughput keeps a
    deposit's purity pinned to the station's realized accuracy; boosting a
    heavily represented material therefore lifts that container's purity the
    most, which is what gives the majority-pair heuristic its edge over
    random play.

    ``jitters`` injects the per-station accuracy jitter; when omitted it is
    drawn from the jitter stream at (seed, t).
    """
    if jitters is None:
        half = config.accuracy_jitter
        jitters = tuple((2.0 * noise_draw(seed, Stream.JITTER, t, m) - 1.0) * half for m in range(N_MATERIALS))

    load = batch.total / config.batch_max
    if load > 1.0:
        load = 1.0
    kappa = config.contamination_coeff
    residual = list(batch.quantities)
    deposits = [[0.0] * N_MATERIALS for _ in range(N_CONTAINERS)]
    accuracies = []
    for m in range(N_MATERIALS):
        a = effective_accuracy(mode, m, load, config, jitters[m])
        accuracies.append(a)
        row = deposits[m]
        processed = residual[m]
        own = a * processed
        row[m] = own
        residual[m] -= own
        false_volume = (1.0 - a) * kappa * processed
        if false_volume > 0.0:
            pool = 0.0
            for j in range(N_MATERIALS):
                if j != m:
                    pool += residual[j]
            if pool > 0.0:
                frac = false_volume / pool
                if frac > 1.0:
                    frac = 1.0
                for j in range(N_MATERIALS):
                    if j == m:
                        continue
                    grabbed = frac * residual[j]
                    row[j] = grabbed
                    residual[j] -= grabbed
    deposits[CONTAINER_E] = residual
    return SortOutcome(deposits, accuracies)


def update_containers_and_presses(state: EnvState, deposits: list[list[float]]) -> list[Bale]:
    """Deposit sorted flows, queue threshold crossings, run idle presses.

    Containers A-D are capped at container_capacity; whatever does not fit
    diverts to container E (split proportionally across the deposit's true
    materials).  Containers crossing pressing_threshold queue FIFO by
    crossing step, ties broken by container index; an assignment empties the
    container into a bale and occupies the press for press_duration steps.
    """
    config = state.config
    t = state.t
    containers = state.containers
    e_contents = containers[CONTAINER_E].contents

    for c in range(N_MATERIALS):
        dep = deposits[c]
        dep_total = dep[0] + dep[1] + dep[2] + dep[3]
        if dep_total <= 0.0:
            continue
        cont = containers[c].contents
        headroom = config.container_capacity - (cont[0] + cont[1] + cont[2] + cont[3])
        if headroom >= dep_total:
            for j in range(N_MATERIALS):
                cont[j] += dep[j]
        elif headroom <= 0.0:
            for j in range(N_MATERIALS):
                e_contents[j] += dep[j]
        else:
            keep = headroom / dep_total
            for j in range(N_MATERIALS):
                cont[j] += dep[j] * keep
                e_contents[j] += dep[j] * (1.0 - keep)
    dep_e = deposits[CONTAINER_E]
    for j in range(N_MATERIALS):
        e_contents[j] += dep_e[j]

    for c in range(N_CONTAINERS):
        cont = containers[c]
        if not cont.pending and cont.total >= config.pressing_threshold:
            cont.pending = True
            state.press_queue.append((t, c))

    new_bales: list[Bale] = []
    if state.press_queue:
        idle = [p for p in state.presses if p.busy_until <= t]
        while state.press_queue and idle:
            _, c = state.press_queue.popleft()
            press = idle.pop(0)
            cont = containers[c]
            size = cont.total
            purity = cont.contents[c] / size if c != CONTAINER_E else 0.0
            bale = Bale(c, size, purity, t)
            new_bales.append(bale)
            state.bales.append(bale)
            state.baled_total += size
            cont.contents = [0.0] * N_MATERIALS
            cont.pending = False
            press.busy_until = t + config.press_duration
    return new_bales


def compute_reward(containers: list[Container], config: EnvConfig) -> float:
    """Sum of purity deviations over the nonempty designated containers.

    A deviation of d above the material's threshold earns d; a deviation
    below it costs penalty_factor * d.  Empty containers and container E
    contribute nothing.
    """
    thresholds = config.purity_thresholds
    penalty = config.penalty_factor
    reward = 0.0
    for m in range(N_MATERIALS):
        contents = containers[m].contents
        total = contents[0] + contents[1] + contents[2] + contents[3]
        if total <= 0.0:
            continue
        dev = contents[m] / total - thresholds[m]
        reward += dev if dev >= 0.0 else penalty * dev
    return reward


# Documented per-index observation ranges (inclusive).  Container E's fill
# level is unbounded above: it is the overflow sink while both presses are
# busy.  The table is part of the public contract and is verified by tests.
def observation_ranges(config: EnvConfig) -> list[tuple[float, float]]:
    cap_ratio = config.container_capacity / config.pressing_threshold
    ranges = []
    ranges += [(0.0, 1.0)] * 4  # 0-3   newest batch quantities / batch_max
    ranges += [(0.0, 1.0)]  # 4     newest batch total / batch_max
    ranges += [(0.0, 1.0)] * 4  # 5-8   head batch quantities / batch_max
    ranges += [(0.0, 1.0)]  # 9     head batch load fraction
    ranges += [(0.0, 1.0)] * 4  # 10-13 realized accuracies of last sort
    ranges += [(0.0, cap_ratio)] * 4  # 14-17 container fill A-D / pressing_threshold
    ranges += [(0.0, math.inf)]  # 18    container fill E / pressing_threshold
    ranges += [(0.0, 1.0)] * 4  # 19-22 purities A-D (empty reads as threshold)
    ranges += [(-1.0, 1.0)] * 4  # 23-26 purity deviations A-D
    ranges += [(0.0, 1.0)] * 2  # 27-28 press busy time remaining / press_duration
    ranges += [(0.0, 1.0)]  # 29    previous action
    ranges += [(0.0, 1.0)]  # 30    t / episode_len
    ranges += [(-1.0, 1.0)] * 2  # 31-32 sin/cos of seasonal phase
    return ranges


def build_observation(state: EnvState) -> np.ndarray:
    """Fixed 33-component continuous encoding of the current state."""
    config = state.config
    bmax = config.batch_max
    obs = [0.0] * OBS_SIZE

    if state.belt:
        tail = state.belt[-1]
        head = state.belt[0]
        tq = tail.quantities
        hq = head.quantities
        obs[0] = tq[0] / bmax
        obs[1] = tq[1] / bmax
        obs[2] = tq[2] / bmax
        obs[3] = tq[3] / bmax
        obs[4] = tail.total / bmax
        obs[5] = hq[0] / bmax
        obs[6] = hq[1] / bmax
        obs[7] = hq[2] / bmax
        obs[8] = hq[3] / bmax
        load = head.total / bmax
        obs[9] = load if load <= 1.0 else 1.0

    acc = state.last_realized_accuracies
    obs[10] = acc[0]
    obs[11] = acc[1]
    obs[12] = acc[2]
    obs[13] = acc[3]

    thresholds = config.purity_thresholds
    for m in range(N_CONTAINERS):
        obs[14 + m] = state.containers[m].total / config.pressing_threshold
    for m in range(N_MATERIALS):
        contents = state.containers[m].contents
        total = contents[0] + contents[1] + contents[2] + contents[3]
        purity = contents[m] / total if total > 0.0 else thresholds[m]
        obs[19 + m] = purity
        obs[23 + m] = purity - thresholds[m]

    duration = config.press_duration
    if duration > 0:
        for i, press in enumerate(state.presses):
            remaining = press.busy_until - state.t
            obs[27 + i] = remaining / duration if remaining > 0 else 0.0

    obs[29] = float(state.last_action) if state.last_action is not None else 0.0
    obs[30] = state.t / config.episode_len
    phase = _TWO_PI * state.t / config.seasonal_period
    obs[31] = math.sin(phase)
    obs[32] = math.cos(phase)
    return np.asarray(obs, dtype=np.float64)


def reset(config: EnvConfig, seed: int, tape: Optional[InputTape] = None) -> tuple[EnvState, np.ndarray]:
    """Fresh episode state, deterministic in (config, seed).

    The belt is pre-filled with the batches for t = -belt_delay .. -1 so the
    sorter has work from step 0 onward.
    """
    if tape is None:
        tape = InputTape(config, seed)
    belt = deque(tape.batch(t) for t in range(-config.belt_delay, 0))
    state = EnvState(
        config=config,
        seed=seed,
        t=0,
        belt=belt,
        containers=[Container() for _ in range(N_CONTAINERS)],
        presses=[Press() for _ in range(config.n_presses)],
        bales=[],
        press_queue=deque(),
        last_action=None,
        last_realized_accuracies=[config.baseline_accuracy] * N_MATERIALS,
        generated_total=sum(b.total for b in belt),
        deposited_total=0.0,
        baled_total=0.0,
        tape=tape,
    )
    return state, build_observation(state)


def advance(state: EnvState, action: int) -> tuple[float, list[Bale]]:
    """Run one transition without building the observation vector.

    This is the fitness-evaluation hot path; :func:`step` is exactly this
    plus :func:`build_observation`.
    """
    config = state.config
    if state.t >= config.episode_len:
        raise ContractViolation("episode already truncated; reset before stepping again")
    if action != 0 and action != 1:
        raise ContractViolation(f"action must be 0 or 1, got {action!r}")

    t = state.t
    tape = state.tape
    new_batch = tape.batch(t)
    state.belt.append(new_batch)
    state.generated_total += new_batch.total

    head = state.belt.popleft()
    outcome = sort_batch(head, action, state.seed, t, config, tape.jitters(t))
    state.deposited_total += head.total
    new_bales = update_containers_and_presses(state, outcome.deposits)
    reward = compute_reward(state.containers, config)

    state.last_action = action
    state.last_realized_accuracies = outcome.accuracies
    state.t = t + 1
    return reward, new_bales


def step(state: EnvState, action: int) -> StepResult:
    """Advance one step under the given sorting mode.

    Truncation (never termination) flags the time limit; stepping a
    truncated episode raises :class:`ContractViolation`.
    """
    reward, new_bales = advance(state, action)
    truncated = state.t == state.config.episode_len
    observation = build_observation(state)
    info = {
        "new_bales": new_bales,
        "accuracies": list(state.last_realized_accuracies),
        "pending_presses": [c for _, c in state.press_queue],
    }
    return StepResult(observation, reward, False, truncated, info)
