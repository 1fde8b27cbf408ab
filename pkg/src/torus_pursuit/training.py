"""Curriculum-driven decentralized training loop.

One epoch is one episode. Per epoch the velocity ratio comes from the active
session's schedule and the behavior phase decides whether actions come from
the scripted chase (warm-up) or each agent's own noisy policy. Transitions
always land in the per-agent replay buffers, and every agent performs one
critic update, one actor update, and one target soft-update per environment
step once its buffer holds a full batch. Everything is driven by streams
derived from the master seed, so a (config, seed) pair fixes every output
byte.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from .checkpoint import load_checkpoint, save_checkpoint
from .config import ExperimentConfig
from .curriculum import (
    BehaviorPhase,
    behavior_for_epoch,
    scripted_action,
    velocity_at_epoch,
)
from .ddpg import AgentLearner, Transition, heading_to_vector
from .environment import observation_dim, observe_full, observe_partial, reset, step
from .errors import ConfigError

CURVE_SCHEMA = "pursuit-training-curve-v1"
CURVE_HEADER = "global_epoch,session,epoch,ratio,phase,return,captured,steps"


@dataclass
class TrainingStreams:
    env: np.random.Generator
    explore: list[np.random.Generator]
    sample: list[np.random.Generator]
    init: np.random.Generator

    def states(self) -> dict[str, Any]:
        return {
            "env": self.env.bit_generator.state,
            "explore": [g.bit_generator.state for g in self.explore],
            "sample": [g.bit_generator.state for g in self.sample],
        }

    def restore(self, states: dict[str, Any]) -> None:
        self.env.bit_generator.state = states["env"]
        for g, s in zip(self.explore, states["explore"]):
            g.bit_generator.state = s
        for g, s in zip(self.sample, states["sample"]):
            g.bit_generator.state = s


def make_streams(master_seed: int, n: int) -> TrainingStreams:
    children = np.random.SeedSequence(master_seed).spawn(2 * n + 2)
    return TrainingStreams(
        env=np.random.default_rng(children[0]),
        explore=[np.random.default_rng(c) for c in children[1 : n + 1]],
        sample=[np.random.default_rng(c) for c in children[n + 1 : 2 * n + 1]],
        init=np.random.default_rng(children[2 * n + 1]),
    )


def make_learners(config: ExperimentConfig, init_rng: np.random.Generator) -> list[AgentLearner]:
    partial = config.run.strategy == "cd_ddpg_partial"
    obs_dim = observation_dim(config.env.n, partial)
    d = config.ddpg
    return [
        AgentLearner(
            obs_dim=obs_dim,
            rng=init_rng,
            actor_hidden=d.actor_hidden,
            critic_hidden=d.critic_hidden,
            gamma=d.gamma,
            tau=d.tau,
            lr_actor=d.lr_actor,
            lr_critic=d.lr_critic,
            clip_norm=d.clip_norm,
            buffer_capacity=d.buffer_capacity,
            theta_ou=d.theta_ou,
            sigma_ou=d.sigma_ou,
        )
        for _ in range(config.env.n)
    ]


def _observe(state, i: int, partial: bool) -> np.ndarray:
    return observe_partial(state, i) if partial else observe_full(state, i)


def run_episode(
    config: ExperimentConfig,
    learners: list[AgentLearner],
    streams: TrainingStreams,
    ratio: float,
    phase: BehaviorPhase,
) -> tuple[float, bool, int]:
    """One training episode; returns (per-pursuer return, captured, steps)."""
    env_cfg = replace(config.env, velocity_ratio=ratio)
    partial = config.run.strategy == "cd_ddpg_partial"
    batch_size = config.ddpg.batch_size
    state = reset(env_cfg, streams.env)
    for learner in learners:
        learner.noise.reset()
    ep_return = 0.0
    captured = False
    steps = 0
    while True:
        obs = [_observe(state, i, partial) for i in range(env_cfg.n)]
        if phase is BehaviorPhase.SCRIPTED:
            headings = [
                scripted_action(state.pursuers[i], state.evader.position)
                for i in range(env_cfg.n)
            ]
        else:
            headings = [
                learners[i].act_explore(obs[i], streams.explore[i])
                for i in range(env_cfg.n)
            ]
        state, outcome = step(state, headings, env_cfg, streams.env)
        for i, learner in enumerate(learners):
            learner.buffer.push(
                Transition(
                    obs=obs[i],
                    action_vector=heading_to_vector(headings[i]),
                    reward=outcome.rewards[i],
                    next_obs=_observe(state, i, partial),
                    terminal=outcome.captured,
                )
            )
            if len(learner.buffer) >= batch_size:
                learner.critic_update(learner.buffer.sample(batch_size, streams.sample[i]))
                learner.actor_update(learner.buffer.sample(batch_size, streams.sample[i]))
                learner.soft_update_targets()
        ep_return += outcome.rewards[0]
        steps += 1
        if outcome.done:
            captured = outcome.captured
            break
    return ep_return, captured, steps


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def run_training(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    resume: str | Path | None = None,
) -> Path:
    """Execute the session plan; returns the output directory.

    Writes training_curve.csv, periodic checkpoint_epoch{N}.json snapshots,
    and a final checkpoint.json.
    """
    if config.run.strategy not in ("cd_ddpg", "cd_ddpg_partial"):
        raise ConfigError(
            f"run.strategy: cannot train analytic strategy {config.run.strategy!r}"
        )
    out = Path(out_dir if out_dir is not None else config.run.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    plan = config.curriculum
    streams = make_streams(config.run.seed, config.env.n)

    if resume is not None:
        learners, session_idx, epoch_idx, global_epoch, rng_states = load_checkpoint(
            resume, config
        )
        streams.restore(rng_states)
    else:
        learners = make_learners(config, streams.init)
        session_idx, epoch_idx, global_epoch = 0, 0, 0

    curve_path = out / "training_curve.csv"
    with open(curve_path, "w", newline="") as curve:
        curve.write(f"# schema={CURVE_SCHEMA}\n")
        curve.write(CURVE_HEADER + "\n")
        while session_idx < len(plan.sessions):
            session = plan.sessions[session_idx]
            while epoch_idx < session.epochs:
                ratio = velocity_at_epoch(session.schedule, epoch_idx)
                phase = behavior_for_epoch(plan, session_idx, epoch_idx)
                ep_return, captured, steps = run_episode(
                    config, learners, streams, ratio, phase
                )
                curve.write(
                    f"{global_epoch},{session_idx},{epoch_idx},{_fmt(ratio)},"
                    f"{phase.value},{_fmt(ep_return)},{1 if captured else 0},{steps}\n"
                )
                epoch_idx += 1
                global_epoch += 1
                if global_epoch % config.run.checkpoint_every == 0:
                    nxt_session, nxt_epoch = session_idx, epoch_idx
                    if nxt_epoch >= session.epochs:
                        nxt_session, nxt_epoch = session_idx + 1, 0
                    save_checkpoint(
                        out / f"checkpoint_epoch{global_epoch}.json",
                        config,
                        learners,
                        nxt_session,
                        nxt_epoch,
                        global_epoch,
                        streams.states(),
                    )
            session_idx += 1
            epoch_idx = 0
    save_checkpoint(
        out / "checkpoint.json",
        config,
        learners,
        session_idx,
        0,
        global_epoch,
        streams.states(),
    )
    return out
