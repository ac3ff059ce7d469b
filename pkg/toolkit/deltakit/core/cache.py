from __future__ import annotations

import logging
import threading
from collections import Counter, OrderedDict
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, TypeVar

from toolkit.deltakit.core.config import Settings

logger = logging.getLogger("deltakit.cache")

T = TypeVar("T")


@dataclass
class CacheDebugStats:
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)
    _totals: Counter[str] = field(default_factory=Counter, init=False, repr=False)
    _by_namespace: dict[str, Counter[str]] = field(default_factory=dict, init=False, repr=False)

    def increment(self, namespace: str, metric: str) -> None:
        namespace = (namespace or "").strip() or "unknown"
        metric = (metric or "").strip()
        if not metric:
            return
        with self._lock:
            self._totals[metric] += 1
            ns = self._by_namespace.get(namespace)
            if ns is None:
                ns = Counter()
                self._by_namespace[namespace] = ns
            ns[metric] += 1

    def snapshot(self) -> dict[str, Any]:
        with self._lock:
            totals = dict(sorted(self._totals.items()))
            namespaces = {
                namespace: dict(sorted(counter.items()))
                for namespace, counter in sorted(self._by_namespace.items())
            }
        return {"totals": totals, "namespaces": namespaces}


@dataclass
class _Store:
    max_entries: int
    lock: threading.Lock = field(default_factory=threading.Lock)
    entries: OrderedDict[tuple[str, Hashable], Any] = field(default_factory=OrderedDict)


@dataclass(frozen=True)
class MemoCache:
    """In-process LRU memo shared by the sign oracle, root isolation and elimination.

    Values are pure functions of their keys, so a hit and a recomputation always agree.
    """

    enabled: bool = True
    max_entries: int = 200_000
    debug_log_each: bool = False
    scope: str = "global"
    debug_stats: CacheDebugStats = field(default_factory=CacheDebugStats, repr=False, compare=False)
    _store: _Store | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self._store is None:
            object.__setattr__(self, "_store", _Store(max_entries=self.max_entries))

    @classmethod
    def from_settings(cls, settings: Settings) -> "MemoCache":
        return cls(
            enabled=settings.cache_enabled,
            max_entries=settings.cache_max_entries,
            debug_log_each=settings.cache_debug_log_each,
        )

    def scoped(self, scope: str) -> "MemoCache":
        scope = (scope or "").strip() or "global"
        if scope == self.scope:
            return self
        return MemoCache(
            enabled=self.enabled,
            max_entries=self.max_entries,
            debug_log_each=self.debug_log_each,
            scope=scope,
            debug_stats=self.debug_stats,
            _store=self._store,
        )

    def _debug_log_each(self) -> bool:
        return bool(self.enabled and self.debug_log_each and logger.isEnabledFor(logging.DEBUG))

    def get_or_compute(self, namespace: str, key: Hashable, compute: Callable[[], T]) -> T:
        if not self.enabled or self.max_entries <= 0:
            return compute()
        store = self._store
        assert store is not None
        full_key = (f"{self.scope}:{namespace}", key)
        with store.lock:
            if full_key in store.entries:
                store.entries.move_to_end(full_key)
                value = store.entries[full_key]
                hit = True
            else:
                hit = False
        if hit:
            self.debug_stats.increment(namespace, "hit")
            if self._debug_log_each():
                logger.debug("cache HIT ns=%s scope=%s", namespace, self.scope)
            return value
        self.debug_stats.increment(namespace, "miss")
        if self._debug_log_each():
            logger.debug("cache MISS ns=%s scope=%s", namespace, self.scope)
        value = compute()
        with store.lock:
            store.entries[full_key] = value
            store.entries.move_to_end(full_key)
            while len(store.entries) > store.max_entries:
                store.entries.popitem(last=False)
                self.debug_stats.increment(namespace, "evict")
        return value

    def clear(self) -> None:
        store = self._store
        assert store is not None
        with store.lock:
            store.entries.clear()

    def debug_snapshot(self) -> dict[str, Any]:
        return self.debug_stats.snapshot()


_default_lock = threading.Lock()
_default_cache: MemoCache | None = None


def get_cache() -> MemoCache:
    global _default_cache
    with _default_lock:
        if _default_cache is None:
            _default_cache = MemoCache.from_settings(Settings.from_env())
        return _default_cache


def configure_cache(settings: Settings) -> MemoCache:
    global _default_cache
    with _default_lock:
        _default_cache = MemoCache.from_settings(settings)
        return _default_cache
