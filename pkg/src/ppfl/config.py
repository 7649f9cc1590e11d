"""Experiment configuration shared by the federation loop and the harness."""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import MODEL_KINDS, OPTIMIZER_KINDS
from .privacy.config import PrivacyConfig

AGGREGATION_MODES = ("fedavg", "apple")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one run.

    Desk-scale defaults: 16 clients, 50 rounds, one local epoch, batch 32.
    ``dataset`` is ``"synthetic"`` or ``"csv:<path>"``; the ``synthetic_*``
    fields only matter for the former.
    """

    num_clients: int = 16
    rounds: int = 50
    local_epochs: int = 1
    batch_size: int = 32
    model: str = "logistic"
    hidden_dim: int = 32
    optimizer: str = "adam"
    lr: float = 0.001
    dataset: str = "synthetic"
    synthetic_examples: int = 4000
    synthetic_dim: int = 20
    synthetic_classes: int = 10
    synthetic_separation: float = 1.0
    alpha: float = 0.5
    aggregation: str = "fedavg"
    eta_p: float = 0.01
    lam: float = 0.1
    weighted_avg: bool = False
    test_fraction: float = 0.2
    privacy: PrivacyConfig = field(default_factory=PrivacyConfig)
    seed: int = 0
    eval_interval: int = 1
    workers: int = 1
    out: str = "results"

    def problems(self):
        out = []
        for name in ("num_clients", "batch_size", "eval_interval", "workers"):
            if getattr(self, name) < 1:
                out.append(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("rounds", "local_epochs"):
            if getattr(self, name) < 0:
                out.append(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.model not in MODEL_KINDS:
            out.append(f"model must be one of {MODEL_KINDS}, got {self.model!r}")
        if self.model == "mlp" and self.hidden_dim < 1:
            out.append(f"hidden_dim must be >= 1, got {self.hidden_dim}")
        if self.optimizer not in OPTIMIZER_KINDS:
            out.append(f"optimizer must be one of {OPTIMIZER_KINDS}, got {self.optimizer!r}")
        if not self.lr > 0:
            out.append(f"lr must be > 0, got {self.lr}")
        if self.dataset != "synthetic" and not (
            self.dataset.startswith("csv:") and len(self.dataset) > 4
        ):
            out.append(f"dataset must be 'synthetic' or 'csv:<path>', got {self.dataset!r}")
        if self.dataset == "synthetic":
            if min(self.synthetic_examples, self.synthetic_dim) < 1:
                out.append("synthetic examples and dim must be >= 1")
            if self.synthetic_classes < 2:
                out.append("synthetic classes must be >= 2")
        if not self.alpha > 0:
            out.append(f"alpha must be > 0, got {self.alpha}")
        if self.aggregation not in AGGREGATION_MODES:
            out.append(f"aggregation must be one of {AGGREGATION_MODES}, got {self.aggregation!r}")
        if not self.eta_p > 0:
            out.append(f"eta_p must be > 0, got {self.eta_p}")
        if self.lam < 0:
            out.append(f"lambda must be >= 0, got {self.lam}")
        if not 0 <= self.test_fraction < 1:
            out.append(f"test fraction must lie in [0, 1), got {self.test_fraction}")
        out.extend(self.privacy.problems(num_clients=max(self.num_clients, 1)))
        return out
