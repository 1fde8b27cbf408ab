"""Checkpoint serialization: JSON with full round-trip precision.

A checkpoint captures everything training needs to resume bit-for-bit: the
config digest, every agent's online/target networks and optimizer moments,
each agent's replay buffer contents, the curriculum position, and the states
of all random streams. Floats serialize as base-10 decimals via Python's
shortest-round-trip repr, and layer matrices are stored row-major.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .config import ExperimentConfig
from .ddpg import AgentLearner, ReplayBuffer
from .errors import DigestMismatchError, SchemaVersionError
from .nn import AdamState, MlpParams

CHECKPOINT_SCHEMA_VERSION = 1


def _array_doc(a: np.ndarray) -> dict:
    return {"shape": list(a.shape), "data": a.ravel(order="C").tolist()}


def _array_load(doc: dict) -> np.ndarray:
    return np.array(doc["data"], dtype=np.float64).reshape(doc["shape"])


def _params_doc(p: MlpParams) -> dict:
    return {
        "weights": [_array_doc(w) for w in p.weights],
        "biases": [_array_doc(b) for b in p.biases],
        "hidden_activation": p.hidden_activation,
        "output_activation": p.output_activation,
    }


def _params_load(doc: dict) -> MlpParams:
    return MlpParams(
        [_array_load(w) for w in doc["weights"]],
        [_array_load(b) for b in doc["biases"]],
        doc["hidden_activation"],
        doc["output_activation"],
    )


def _adam_doc(s: AdamState) -> dict:
    return {
        "m_weights": [_array_doc(a) for a in s.m_weights],
        "m_biases": [_array_doc(a) for a in s.m_biases],
        "v_weights": [_array_doc(a) for a in s.v_weights],
        "v_biases": [_array_doc(a) for a in s.v_biases],
        "step": s.step,
    }


def _adam_load(doc: dict) -> AdamState:
    return AdamState(
        m_weights=[_array_load(a) for a in doc["m_weights"]],
        m_biases=[_array_load(a) for a in doc["m_biases"]],
        v_weights=[_array_load(a) for a in doc["v_weights"]],
        v_biases=[_array_load(a) for a in doc["v_biases"]],
        step=doc["step"],
    )


def _buffer_doc(b: ReplayBuffer) -> dict:
    return {
        "capacity": b.capacity,
        "obs_dim": b.obs_dim,
        "next": b._next,
        "size": b._size,
        "obs": _array_doc(b._obs[: b._size]),
        "actions": _array_doc(b._actions[: b._size]),
        "rewards": _array_doc(b._rewards[: b._size]),
        "next_obs": _array_doc(b._next_obs[: b._size]),
        "terminals": _array_doc(b._terminals[: b._size]),
    }


def _buffer_load(doc: dict) -> ReplayBuffer:
    buf = ReplayBuffer(doc["capacity"], doc["obs_dim"])
    size = doc["size"]
    buf._obs[:size] = _array_load(doc["obs"])
    buf._actions[:size] = _array_load(doc["actions"])
    buf._rewards[:size] = _array_load(doc["rewards"])
    buf._next_obs[:size] = _array_load(doc["next_obs"])
    buf._terminals[:size] = _array_load(doc["terminals"])
    buf._next = doc["next"]
    buf._size = size
    return buf


def _learner_doc(learner: AgentLearner) -> dict:
    return {
        "obs_dim": learner.obs_dim,
        "gamma": learner.gamma,
        "tau": learner.tau,
        "lr_actor": learner.lr_actor,
        "lr_critic": learner.lr_critic,
        "clip_norm": learner.clip_norm,
        "theta_ou": learner.noise.theta,
        "sigma_ou": learner.noise.sigma,
        "actor": _params_doc(learner.actor),
        "critic": _params_doc(learner.critic),
        "actor_target": _params_doc(learner.actor_target),
        "critic_target": _params_doc(learner.critic_target),
        "adam_actor": _adam_doc(learner.adam_actor),
        "adam_critic": _adam_doc(learner.adam_critic),
        "noise_state": learner.noise.state.tolist(),
        "buffer": _buffer_doc(learner.buffer),
    }


def _learner_load(doc: dict) -> AgentLearner:
    learner = AgentLearner.__new__(AgentLearner)
    learner.obs_dim = doc["obs_dim"]
    learner.gamma = doc["gamma"]
    learner.tau = doc["tau"]
    learner.lr_actor = doc["lr_actor"]
    learner.lr_critic = doc["lr_critic"]
    learner.clip_norm = doc["clip_norm"]
    learner.actor = _params_load(doc["actor"])
    learner.critic = _params_load(doc["critic"])
    learner.actor_target = _params_load(doc["actor_target"])
    learner.critic_target = _params_load(doc["critic_target"])
    learner.adam_actor = _adam_load(doc["adam_actor"])
    learner.adam_critic = _adam_load(doc["adam_critic"])
    from .ddpg import OuNoise

    learner.noise = OuNoise(doc["theta_ou"], doc["sigma_ou"])
    learner.noise.state = np.array(doc["noise_state"], dtype=np.float64)
    learner.buffer = _buffer_load(doc["buffer"])
    return learner


def save_checkpoint(
    path: str | Path,
    config: ExperimentConfig,
    learners: list[AgentLearner],
    session: int,
    epoch: int,
    global_epoch: int,
    rng_states: dict[str, Any],
) -> None:
    doc = {
        "schema_version": CHECKPOINT_SCHEMA_VERSION,
        "config_digest": config.digest(),
        "session": session,
        "epoch": epoch,
        "global_epoch": global_epoch,
        "agents": [_learner_doc(lr) for lr in learners],
        "rng_states": rng_states,
    }
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_suffix(target.suffix + ".tmp")
    tmp.write_text(json.dumps(doc))
    tmp.replace(target)


def load_checkpoint(
    path: str | Path, config: ExperimentConfig
) -> tuple[list[AgentLearner], int, int, int, dict[str, Any]]:
    """Returns (learners, session, epoch, global_epoch, rng_states)."""
    doc = json.loads(Path(path).read_text())
    version = doc.get("schema_version")
    if version != CHECKPOINT_SCHEMA_VERSION:
        raise SchemaVersionError(f"unknown checkpoint schema version {version!r}")
    if doc["config_digest"] != config.digest():
        raise DigestMismatchError(
            "checkpoint was produced by a different config "
            f"(digest {doc['config_digest'][:12]}... != {config.digest()[:12]}...)"
        )
    learners = [_learner_load(d) for d in doc["agents"]]
    return learners, doc["session"], doc["epoch"], doc["global_epoch"], doc["rng_states"]
