"""Three similarity-searchable memory stores with a deterministic embedder.

Stores are named M_I (market information), M_S (strategy), and M_R (reports).
Retrieval ranks by cosine similarity between the query embedding and record
embeddings, breaking ties by recency and then by latest insertion. The
default embedder hashes character trigrams into a fixed 256-dim frequency
vector and L2-normalizes, so identical text always embeds identically.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from ..errors import ConfigError, ValidationError

STORE_NAMES = ("M_I", "M_S", "M_R")

DEFAULT_EMBED_DIM = 256
DEFAULT_RETRIEVE_K = 10


class HashedNgramEmbedder:
    """Character n-gram frequency hashing; pure function of the text."""

    def __init__(self, dim: int = DEFAULT_EMBED_DIM, n: int = 3):
        if dim < 1 or n < 1:
            raise ConfigError("embedder dim and n must be positive")
        self.dim = dim
        self.n = n

    def _bucket(self, gram: str) -> int:
        digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "big") % self.dim

    def __call__(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim)
        s = text.lower()
        if len(s) < self.n:
            vec[self._bucket(s)] += 1.0
        else:
            for i in range(len(s) - self.n + 1):
                vec[self._bucket(s[i:i + self.n])] += 1.0
        norm = float(np.linalg.norm(vec))
        return vec / norm if norm > 0 else vec


@dataclass(frozen=True)
class MemoryRecord:
    id: str
    store: str
    timestamp: datetime
    text: str
    embedding: np.ndarray
    metadata: dict[str, str] = field(default_factory=dict)

    def to_json_line(self) -> str:
        return json.dumps({
            "id": self.id,
            "store": self.store,
            "timestamp": self.timestamp.isoformat(),
            "text": self.text,
            "embedding": [float(x) for x in self.embedding],
            "metadata": dict(self.metadata),
        }, sort_keys=True)


class MemoryBank:
    """All three stores behind one insert/retrieve interface."""

    def __init__(self, embedder=None):
        self.embedder = embedder or HashedNgramEmbedder()
        self._records: list[MemoryRecord] = []
        self._counters = {name: 0 for name in STORE_NAMES}

    def __len__(self) -> int:
        return len(self._records)

    def size(self, store: str) -> int:
        self._check_store(store)
        return sum(1 for r in self._records if r.store == store)

    @staticmethod
    def _check_store(store: str) -> None:
        if store not in STORE_NAMES:
            raise ValidationError(f"unknown memory store {store!r}")

    def insert(self, store: str, timestamp: datetime, text: str,
               metadata: dict[str, str] | None = None,
               embedding: np.ndarray | None = None) -> MemoryRecord:
        self._check_store(store)
        if embedding is None:
            embedding = self.embedder(text)
        else:
            embedding = np.asarray(embedding, dtype=float)
            norm = float(np.linalg.norm(embedding))
            if norm > 0:
                embedding = embedding / norm
        if self._records and len(embedding) != len(self._records[0].embedding):
            raise ValidationError("embedding dimension must stay constant per run")
        self._counters[store] += 1
        record = MemoryRecord(
            id=f"{store}-{self._counters[store]:06d}",
            store=store,
            timestamp=timestamp,
            text=text,
            embedding=embedding,
            metadata=dict(metadata or {}),
        )
        self._records.append(record)
        return record

    def records(self, stores=STORE_NAMES) -> list[MemoryRecord]:
        for s in stores:
            self._check_store(s)
        return [r for r in self._records if r.store in stores]

    def retrieve(self, query: str, stores=STORE_NAMES, k: int = DEFAULT_RETRIEVE_K) -> list[MemoryRecord]:
        """Top-k records by cosine similarity to the query.

        Ties break toward the more recent timestamp, then the later insert.
        Fewer than k records returns them all.
        """
        if k < 1:
            raise ValidationError("k must be at least 1")
        candidates = self.records(stores)
        if not candidates:
            return []
        q = self.embedder(query)
        scored = []
        for insert_index, record in enumerate(candidates):
            sim = float(np.dot(q, record.embedding))
            scored.append((sim, record.timestamp, insert_index, record))
        scored.sort(key=lambda t: t[:3], reverse=True)
        return [t[3] for t in scored[:k]]

    def save_jsonl(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            for record in self._records:
                handle.write(record.to_json_line() + "\n")

    @classmethod
    def load_jsonl(cls, path: str, embedder=None) -> "MemoryBank":
        bank = cls(embedder=embedder)
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                record = MemoryRecord(
                    id=obj["id"],
                    store=obj["store"],
                    timestamp=datetime.fromisoformat(obj["timestamp"]),
                    text=obj["text"],
                    embedding=np.array(obj["embedding"], dtype=float),
                    metadata=dict(obj.get("metadata", {})),
                )
                bank._check_store(record.store)
                bank._records.append(record)
                seq = int(record.id.rsplit("-", 1)[1])
                bank._counters[record.store] = max(bank._counters[record.store], seq)
        return bank
