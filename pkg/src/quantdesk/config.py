"""Run configuration: one YAML file, flag overrides, and a stable hash.

The config file is a YAML mapping with the sections shown in the README
(``data``, ``run``, ``pool``, ``risk``, ``policy``, ``backend``, ``output``).
CLI flags override file values; the manifest records a hash of the fully
resolved configuration so a run is reproducible from its artifacts.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import date as Date

import yaml

from .errors import ConfigError
from .meetings import DeskConfig
from .risk import RiskWeights
from .strategy import PoolConfig


@dataclass
class RunConfig:
    data_dir: str
    start: Date
    end: Date
    universe: tuple[str, ...] = ()  # empty = every symbol in the dataset
    out_dir: str = "out"
    seed: int = 0
    backend_kind: str = "scripted"  # scripted | http
    backend_endpoint: str = ""
    backend_model: str = ""
    backend_temperature: float = 0.7
    desk: DeskConfig = field(default_factory=DeskConfig)
    pool: PoolConfig = field(default_factory=PoolConfig)

    def validate(self) -> None:
        if self.start > self.end:
            raise ConfigError("start date must not be after end date")
        if self.backend_kind not in ("scripted", "http"):
            raise ConfigError(f"unknown backend kind {self.backend_kind!r}")
        if self.backend_kind == "http" and not self.backend_endpoint:
            raise ConfigError("http backend requires an endpoint")
        if self.backend_kind == "scripted" and self.seed is None:
            raise ConfigError("scripted backend requires a seed")
        if not 0.0 <= self.backend_temperature <= 2.0:
            raise ConfigError("temperature must lie in [0, 2]")
        if self.desk.initial_cash <= 0:
            raise ConfigError("initial cash must be positive")
        if not 0.0 <= self.desk.fee_rate < 0.1:
            raise ConfigError("fee rate must lie in [0, 0.1)")
        if not 0.0 < self.desk.gamma <= 1.0:
            raise ConfigError("gamma must lie in (0, 1]")
        if not 0.0 <= self.desk.lam <= 1.0:
            raise ConfigError("lambda must lie in [0, 1]")
        if self.desk.recent_n < 1 or self.desk.top_m < 1 or self.desk.sdm_window < 10:
            raise ConfigError("recent_n/top_m/sdm_window out of domain")
        self.desk.risk_weights.validate()

    def to_canonical_dict(self) -> dict:
        payload = asdict(self)
        payload["start"] = self.start.isoformat()
        payload["end"] = self.end.isoformat()
        payload["universe"] = list(self.universe)
        payload["desk"]["stress_shocks"] = list(self.desk.stress_shocks)
        payload["pool"]["indicator_specs"] = list(self.pool.indicator_specs)
        payload["pool"]["top_ks"] = list(self.pool.top_ks)
        payload["pool"]["entry_thresholds"] = list(self.pool.entry_thresholds)
        return payload

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_canonical_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _date(value, where: str) -> Date:
    if isinstance(value, Date):
        return value
    try:
        return Date.fromisoformat(str(value))
    except ValueError as exc:
        raise ConfigError(f"{where}: bad date {value!r}") from exc


def load_config(path: str, overrides: dict | None = None) -> RunConfig:
    """Parse the YAML config file and apply flat flag overrides.

    Override keys use dotted paths into the YAML structure, e.g.
    ``run.seed`` or ``backend.model``.
    """
    with open(path, encoding="utf-8") as handle:
        raw = yaml.safe_load(handle) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config root must be a mapping")
    for key, value in (overrides or {}).items():
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    data = raw.get("data", {})
    run = raw.get("run", {})
    pool = raw.get("pool", {})
    risk = raw.get("risk", {})
    policy = raw.get("policy", {})
    backend = raw.get("backend", {})
    output = raw.get("output", {})
    if "dir" not in data:
        raise ConfigError(f"{path}: data.dir is required")
    if "start" not in run or "end" not in run:
        raise ConfigError(f"{path}: run.start and run.end are required")
    weights = risk.get("weights", list(RiskWeights().as_tuple()))
    if len(weights) != 4:
        raise ConfigError("risk.weights must list four values")
    desk = DeskConfig(
        initial_cash=float(run.get("initial_cash", 1_000_000.0)),
        fee_rate=float(run.get("fee_rate", 0.001)),
        benchmark_symbol=run.get("benchmark") or None,
        risk_weights=RiskWeights(*[float(w) for w in weights]),
        ram_resume_below=float(risk.get("resume_below", 0.6)),
        ram_cooldown_days=int(risk.get("cooldown_days", 5)),
        participation=float(risk.get("participation", 0.10)),
        beta_window=int(risk.get("beta_window", 60)),
        vol_window=int(risk.get("vol_window", 20)),
        stress_shocks=tuple(float(s) for s in risk.get("stress_shocks", (-0.10, -0.20, -0.30))),
        derisk_cash_step=float(risk.get("derisk_cash_step", 0.20)),
        max_asset_weight=float(risk.get("max_asset_weight", 0.35)),
        max_sector_weight=float(risk.get("max_sector_weight", 0.60)),
        gamma=float(policy.get("gamma", 0.99)),
        lam=float(policy.get("lambda", 0.5)),
        recent_n=int(policy.get("recent_n", 8)),
        top_m=int(policy.get("top_m", 3)),
        sdm_window=int(policy.get("sdm_window", 126)),
        retrieval_k=int(policy.get("retrieval_k", 10)),
        initial_strategy=str(policy.get("initial_strategy", "cash")),
    )
    pool_config = PoolConfig(
        indicator_specs=tuple(pool.get("indicators", PoolConfig.indicator_specs)),
        top_ks=tuple(int(k) for k in pool.get("top_ks", PoolConfig.top_ks)),
        entry_thresholds=tuple(pool.get("entry_thresholds", (None,))),
        max_size=int(pool.get("max_size", 32)),
        tsm_lookback=int(pool.get("tsm_lookback", 20)),
        tsm_top_k=int(pool.get("tsm_top_k", 5)),
        zmr_window=int(pool.get("zmr_window", 20)),
        zmr_threshold=float(pool.get("zmr_threshold", 1.0)),
        zmr_top_k=int(pool.get("zmr_top_k", 5)),
        mv_window=int(pool.get("mv_window", 60)),
        mv_risk_aversion=float(pool.get("mv_risk_aversion", 1.0)),
    )
    config = RunConfig(
        data_dir=str(data["dir"]),
        start=_date(run["start"], path),
        end=_date(run["end"], path),
        universe=tuple(run.get("universe", ())),
        out_dir=str(output.get("dir", "out")),
        seed=int(run.get("seed", 0)),
        backend_kind=str(backend.get("kind", "scripted")),
        backend_endpoint=str(backend.get("endpoint", "")),
        backend_model=str(backend.get("model", "")),
        backend_temperature=float(backend.get("temperature", 0.7)),
        desk=desk,
        pool=pool_config,
    )
    config.validate()
    return config
