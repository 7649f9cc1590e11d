"""Round-based federated training with FedAvg or APPLE-style personalization.

Clients always upload a *delta* (new core model minus the model they started
from) through the configured privacy mechanism; the server adds the decoded
mean delta to its state. Because the mean is linear this reproduces plain
FedAvg while keeping transported values small, which is what DP clipping
and fixed-point encoding need.

In APPLE mode every client keeps its own core model ``c_i`` plus a weight
vector ``p_i`` over all clients, and its personalized model is
``w_i = sum_j p_ij c_j``. Core models of other clients come from the server:
under ``none`` and ``dp`` the server can read each update and relays every
core model (noised under DP); under ``he``, ``sa`` and ``smpc`` it only
learns the mean, so every foreign slot is filled with the global mean model.

Per-client randomness is keyed by (seed, client_id, round), and cross-client
results are folded in client-id order, so serial and threaded execution give
identical traces.
"""

from __future__ import annotations

import gc
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .aggregation import fed_avg, stack_vectors
from .config import ExperimentConfig
from .crypto import Stream, seeded_rng
from .data import Dataset, dirichlet_partition, generate_synthetic, load_csv_dataset, train_test_split
from .errors import ConfigError, MechanismError, PPFLError
from .metrics import summarize
from .model import ModelSpec, init_params, loss_and_gradient, make_optimizer, optimizer_step, predict
from .privacy.envelope import PrivacyEnvelope
from .privacy.mechanism import make_mechanism

log = logging.getLogger(__name__)

__all__ = [
    "ClientState",
    "Federation",
    "RoundRecord",
    "ServerState",
    "apple_personalize",
    "apple_weight_gradient",
    "fed_avg",
    "local_train",
    "run_experiment",
]


@dataclass
class ClientState:
    client_id: int
    spec: ModelSpec
    train: Dataset
    test: Dataset
    core_model: np.ndarray
    optimizer: object
    personal_weights: np.ndarray
    rng_seed: int = 0
    empty: bool = False

    @property
    def num_clients(self):
        return int(self.personal_weights.size)


@dataclass
class ServerState:
    global_model: np.ndarray
    mechanism: object
    roster: list
    round_index: int = 0
    relays: list | None = None


@dataclass
class RoundRecord:
    round_index: int
    evaluated: bool
    global_acc: float | None
    global_prec: float | None
    global_rec: float | None
    global_f1: float | None
    mean_personal_acc: float | None
    mean_loss: float | None
    server_ms: float
    bytes_up: int
    bytes_down: int


def _batches(n, batch_size, rng):
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def local_train(client, start_model, epochs, batch_size, round_index=0):
    """Train from ``start_model`` on the client's shard.

    Returns ``(model, mean_loss)``; ``mean_loss`` is None when no step ran
    (zero epochs or an empty shard). The client's optimizer state advances.
    """
    model = np.array(start_model, dtype=np.float64, copy=True)
    data = client.train
    if len(data) == 0:
        if not client.empty:
            log.warning("client %d has an empty shard; it returns the start model", client.client_id)
        client.empty = True
        return model, None
    rng = seeded_rng(client.rng_seed, (Stream.TRAIN, client.client_id, round_index))
    losses = []
    for _ in range(epochs):
        for idx in _batches(len(data), batch_size, rng):
            loss, grad = loss_and_gradient(client.spec, model, data.features[idx], data.labels[idx])
            model = optimizer_step(client.optimizer, model, grad)
            losses.append(loss)
    return model, (float(np.mean(losses)) if losses else None)


def apple_personalize(client, core_models):
    """``w_i = sum_j p_ij c_j`` over the ``N`` core models."""
    if len(core_models) != client.num_clients:
        raise ConfigError(f"expected {client.num_clients} core models, got {len(core_models)}")
    return client.personal_weights @ stack_vectors(core_models)


def apple_objective(client, core_models, features, labels, lam):
    """Local loss of the personalized model plus the pull toward self-weight."""
    w = apple_personalize(client, core_models)
    loss, _ = loss_and_gradient(client.spec, w, features, labels)
    target = np.zeros(client.num_clients)
    target[client.client_id] = 1.0
    return loss + lam * float(np.sum((client.personal_weights - target) ** 2))


def apple_weight_gradient(client, core_models, features, labels, lam=0.1):
    """Gradient of :func:`apple_objective` with respect to ``p_i``.

    ``d/dp_ij = <grad_w L(w_i), c_j> + 2 lam (p_ij - [i == j])``.
    """
    stacked = stack_vectors(core_models)
    if stacked.shape[0] != client.num_clients:
        raise ConfigError(f"expected {client.num_clients} core models, got {stacked.shape[0]}")
    w = client.personal_weights @ stacked
    _, grad_w = loss_and_gradient(client.spec, w, features, labels)
    target = np.zeros(client.num_clients)
    target[client.client_id] = 1.0
    return stacked @ grad_w + 2.0 * lam * (client.personal_weights - target)


def _load_dataset(cfg):
    if cfg.dataset == "synthetic":
        return generate_synthetic(
            cfg.synthetic_examples,
            cfg.synthetic_dim,
            cfg.synthetic_classes,
            cfg.seed,
            separation=cfg.synthetic_separation,
        )
    return load_csv_dataset(cfg.dataset[len("csv:") :])


class Federation:
    """Server plus clients for one experiment; call :meth:`run_round` repeatedly."""

    def __init__(self, cfg: ExperimentConfig):
        problems = cfg.problems()
        if problems:
            raise ConfigError("; ".join(problems), problems)
        self.cfg = cfg
        data = _load_dataset(cfg)
        self.spec = ModelSpec(
            kind=cfg.model,
            input_dim=data.input_dim,
            num_classes=data.num_classes,
            hidden_dim=cfg.hidden_dim,
        )
        n = cfg.num_clients
        shards = dirichlet_partition(data, n, cfg.alpha, cfg.seed)
        start = init_params(self.spec, seeded_rng(cfg.seed, Stream.INIT))
        self.clients = []
        for cid, shard in enumerate(shards):
            train, test = train_test_split(
                shard, cfg.test_fraction, seeded_rng(cfg.seed, (Stream.SPLIT, cid))
            )
            self.clients.append(
                ClientState(
                    client_id=cid,
                    spec=self.spec,
                    train=train,
                    test=test,
                    core_model=start.copy(),
                    optimizer=make_optimizer(cfg.optimizer, cfg.lr, self.spec.num_params),
                    personal_weights=np.full(n, 1.0 / n),
                    rng_seed=cfg.seed,
                )
            )
        self.test = Dataset(
            np.concatenate([c.test.features for c in self.clients]),
            np.concatenate([c.test.labels for c in self.clients]),
            data.num_classes,
        )
        roster = list(range(n))
        mechanism = make_mechanism(cfg.privacy, roster, cfg.seed)
        relays = [start.copy() for _ in roster] if cfg.aggregation == "apple" else None
        self.server = ServerState(start.copy(), mechanism, roster, 0, relays)
        sizes = np.array([len(c.train) for c in self.clients], dtype=np.float64)
        if cfg.weighted_avg and sizes.sum() > 0:
            self.upload_factors = n * sizes / sizes.sum()
        else:
            self.upload_factors = np.ones(n)

    # ---- client phase -------------------------------------------------

    def core_views(self, client):
        """What client ``i`` sees as the N core models this round."""
        server = self.server
        if server.mechanism.individual_visible:
            views = list(server.relays)
        else:
            views = [server.global_model] * len(self.clients)
        views[client.client_id] = client.core_model
        return views

    def _client_step(self, client, round_index):
        cfg = self.cfg
        if cfg.aggregation == "fedavg":
            start = self.server.global_model
        else:
            start = client.core_model
        model, loss = local_train(client, start, cfg.local_epochs, cfg.batch_size, round_index)

        if cfg.aggregation == "apple" and len(client.train):
            client.core_model = model
            views = self.core_views(client)
            rng = seeded_rng(client.rng_seed, (Stream.TRAIN, client.client_id, round_index, 1))
            data = client.train
            for idx in _batches(len(data), cfg.batch_size, rng):
                grad = apple_weight_gradient(
                    client, views, data.features[idx], data.labels[idx], cfg.lam
                )
                client.personal_weights = client.personal_weights - cfg.eta_p * grad
        elif cfg.aggregation == "fedavg":
            client.core_model = model

        delta = (model - start) * self.upload_factors[client.client_id]
        try:
            envelope = self.server.mechanism.protect(client.client_id, delta, round_index)
        except PPFLError as exc:
            raise MechanismError("protect", exc, client.client_id) from exc
        return envelope.to_bytes(), loss

    # ---- server phase -------------------------------------------------

    def _server_step(self, wires, round_index):
        server = self.server
        try:
            mean_delta = server.mechanism.aggregate(wires, round_index)
        except PPFLError as exc:
            raise MechanismError("aggregate", exc) from exc
        server.global_model = server.global_model + mean_delta
        if server.relays is not None and server.mechanism.individual_visible:
            for cid, wire in enumerate(wires):
                delta = server.mechanism.reveal(wire) / self.upload_factors[cid]
                server.relays[cid] = server.relays[cid] + delta
        if not np.all(np.isfinite(server.global_model)):
            raise MechanismError("aggregate", "global model became non-finite")

    def _download_bytes(self):
        one = PrivacyEnvelope("plain", self.server.global_model).byte_size
        n = len(self.clients)
        if self.cfg.aggregation == "apple" and self.server.mechanism.individual_visible:
            return n * (n - 1) * one
        return n * one

    def run_round(self, evaluate=True):
        round_index = self.server.round_index
        bytes_down = self._download_bytes()

        if self.cfg.workers > 1:
            with ThreadPoolExecutor(self.cfg.workers) as pool:
                results = list(pool.map(lambda c: self._client_step(c, round_index), self.clients))
        else:
            results = [self._client_step(c, round_index) for c in self.clients]
        wires = [w for w, _ in results]
        losses = [l for _, l in results if l is not None]

        # collector pauses would otherwise dominate sub-millisecond timings
        gc_was_enabled = gc.isenabled()
        gc.disable()
        try:
            t0 = time.perf_counter()
            self._server_step(wires, round_index)
            server_ms = (time.perf_counter() - t0) * 1e3
        finally:
            if gc_was_enabled:
                gc.enable()
        self.server.round_index += 1

        scores = self.evaluate() if evaluate else {}
        return RoundRecord(
            round_index=round_index,
            evaluated=evaluate,
            global_acc=scores.get("accuracy"),
            global_prec=scores.get("precision"),
            global_rec=scores.get("recall"),
            global_f1=scores.get("f1"),
            mean_personal_acc=scores.get("personal_accuracy"),
            mean_loss=float(np.mean(losses)) if losses else None,
            server_ms=server_ms,
            bytes_up=sum(len(w) for w in wires),
            bytes_down=bytes_down,
        )

    # ---- evaluation ---------------------------------------------------

    def personalized_model(self, client):
        if self.cfg.aggregation == "apple":
            return apple_personalize(client, self.core_views(client))
        return self.server.global_model

    def evaluate(self):
        """Global metrics on the pooled test split plus mean personalized accuracy."""
        preds = predict(self.spec, self.server.global_model, self.test.features)
        scores = summarize(preds, self.test.labels, self.spec.num_classes)
        accs = []
        for client in self.clients:
            if len(client.test) == 0:
                continue
            p = predict(self.spec, self.personalized_model(client), client.test.features)
            accs.append(float(np.mean(p == client.test.labels)))
        scores["personal_accuracy"] = float(np.mean(accs)) if accs else 0.0
        return scores

    def run(self):
        records = []
        rounds = self.cfg.rounds
        for r in range(rounds):
            evaluate = (r + 1) % self.cfg.eval_interval == 0 or r == rounds - 1
            records.append(self.run_round(evaluate=evaluate))
        return records


def run_experiment(cfg):
    """Run ``cfg.rounds`` rounds and return one :class:`RoundRecord` per round."""
    return Federation(cfg).run()
