"""Random-action throughput benchmark over the vectorized engine.

Worlds are partitioned into fixed-size chunks; each chunk is simulated
independently with its own action stream, so the final states are
bit-identical no matter how chunks are spread across workers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from multiprocessing import get_context
from typing import Dict, List, Optional, Tuple

import numpy as np

from .engine import VecSoccerEnv
from .model import SimConfig

_ACTION_SEED_BASE = 987_000


@dataclass
class BenchResult:
    n_worlds: int
    n_steps: int
    workers: int
    wall_seconds: float
    steps_per_second: float
    fingerprints: List[bytes]  # one digest of final state arrays per chunk


def _chunk_seeds(n_worlds: int, chunk_size: int, base_seed: int) -> List[Tuple[int, List[int]]]:
    chunks = []
    for idx, start in enumerate(range(0, n_worlds, chunk_size)):
        seeds = [base_seed + w for w in range(start, min(start + chunk_size, n_worlds))]
        chunks.append((idx, seeds))
    return chunks


def _simulate_chunk(args) -> bytes:
    config, scenario, chunk_index, seeds, n_steps = args
    env = VecSoccerEnv(config, len(seeds), scenario=scenario, auto_reset=True)
    env.reset(seeds=seeds)
    action_rng = np.random.default_rng(_ACTION_SEED_BASE + chunk_index)
    shape = (env.n_worlds, env.num_agents, 5)
    for _ in range(n_steps):
        env.step(action_rng.uniform(-1.0, 1.0, shape))
    blob = b"".join(
        np.ascontiguousarray(a).tobytes()
        for a in (env.pos, env.heading, env.kick_timer, env.ball_pos, env.ball_vel)
    )
    import hashlib

    return hashlib.sha256(blob).digest()


def run_bench(
    config: SimConfig,
    n_steps: int,
    n_worlds: int,
    workers: int = 1,
    chunk_size: Optional[int] = None,
    scenario: str = "random_train",
    base_seed: int = 0,
) -> BenchResult:
    """Steps ``n_worlds`` random-action worlds for ``n_steps`` each.

    ``steps_per_second`` counts world-steps (worlds x iterations) per
    wall-clock second, observation construction included.
    """
    if n_steps <= 0 or n_worlds <= 0:
        raise ValueError("n_steps and n_worlds must be positive")
    if chunk_size is None:
        chunk_size = max(1, n_worlds // 8)
    chunks = _chunk_seeds(n_worlds, chunk_size, base_seed)
    jobs = [(config, scenario, idx, seeds, n_steps) for idx, seeds in chunks]
    start = time.perf_counter()
    if workers <= 1:
        fingerprints = [_simulate_chunk(job) for job in jobs]
    else:
        with get_context("fork").Pool(workers) as pool:
            fingerprints = pool.map(_simulate_chunk, jobs)
    wall = time.perf_counter() - start
    total = n_steps * n_worlds
    return BenchResult(
        n_worlds=n_worlds,
        n_steps=n_steps,
        workers=workers,
        wall_seconds=wall,
        steps_per_second=total / wall,
        fingerprints=fingerprints,
    )
