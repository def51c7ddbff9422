"""Session-based rating collection with durable append-only persistence.

Raters register with a recruitment code and receive a fixed, per-rater
randomized order over the dataset pairs, with one everyday-language
control pair woven into each block of roughly sixteen items. Ratings are
append-only events: they are fsynced to the log before acknowledgment,
can never be edited, and a restart replays the log into the same state.
"""
from __future__ import annotations

import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..termbase import (
    RATING_CATEGORIES,
    RATING_HEADER,
    EntryCorpus,
    RatingPair,
)


class ServiceError(Exception):
    """Service-level failure with a machine-readable code."""

    def __init__(self, code: str, message: str, http_status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.http_status = http_status


@dataclass(frozen=True)
class ServiceConfig:
    """Static configuration of one rating campaign."""

    codes: frozenset[str]
    corpus: EntryCorpus
    dataset_pairs: tuple[RatingPair, ...]
    control_pairs: tuple[RatingPair, ...]
    seed: int | None = None
    example_sets: tuple[dict, ...] = ()

    def __post_init__(self):
        if not self.codes:
            raise ValueError("at least one recruitment code is required")
        if not self.dataset_pairs:
            raise ValueError("at least one dataset pair is required")
        ids = [p.pair_id for p in self.dataset_pairs + self.control_pairs]
        if len(ids) != len(set(ids)):
            raise ValueError("pair ids must be unique across dataset and control pairs")
        for pair in self.dataset_pairs:
            if pair.kind != "dataset":
                raise ValueError(f"pair {pair.pair_id!r} is not a dataset pair")
        for pair in self.control_pairs:
            if pair.kind != "control":
                raise ValueError(f"pair {pair.pair_id!r} is not a control pair")
        for pair in self.dataset_pairs + self.control_pairs:
            for entry_id in (pair.left_id, pair.right_id):
                if entry_id not in self.corpus:
                    raise ValueError(
                        f"pair {pair.pair_id!r} references unknown entry {entry_id!r}")

    @property
    def total_items(self) -> int:
        return len(self.dataset_pairs) + len(self.control_pairs)


@dataclass
class RaterState:
    rater_id: str
    code: str
    item_order: tuple[str, ...]
    confirmed: bool = False
    ratings: dict[str, int] = field(default_factory=dict)   # pair_id -> category
    rating_order: list[str] = field(default_factory=list)
    postponed: list[str] = field(default_factory=list)
    postpone_ops: int = 0


def interleaved_item_order(
    dataset_ids: list[str], control_ids: list[str], rng: random.Random
) -> list[str]:
    """Uniformly shuffled dataset items with one control per block.

    The shuffled dataset list is cut into len(control_ids) consecutive
    blocks of near-equal size; each block receives exactly one control
    item at a uniformly chosen in-block offset.
    """
    shuffled = list(dataset_ids)
    rng.shuffle(shuffled)
    controls = list(control_ids)
    rng.shuffle(controls)
    if not controls:
        return shuffled
    n_d, n_c = len(shuffled), len(controls)
    order: list[str] = []
    for k in range(n_c):
        start = -(-k * n_d // n_c)            # ceil(k * n_d / n_c)
        end = -(-(k + 1) * n_d // n_c)
        block = shuffled[start:end]
        offset = rng.randint(0, len(block))
        order.extend(block[:offset])
        order.append(controls[k])
        order.extend(block[offset:])
    return order


class EventLog:
    """Append-only JSONL event log; every append is flushed and fsynced."""

    def __init__(self, path: str | Path | None):
        self.path = Path(path) if path is not None else None
        self._handle = None
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._handle = open(self.path, "a", encoding="utf-8")

    def replay(self):
        if self.path is None or not self.path.exists():
            return
        with open(self.path, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    yield json.loads(line)

    def append(self, event: dict) -> None:
        if self._handle is None:
            return
        self._handle.write(json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n")
        self._handle.flush()
        os.fsync(self._handle.fileno())

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None


class RatingService:
    """In-memory session state backed by the durable event log."""

    def __init__(self, config: ServiceConfig, log_path: str | Path | None = None):
        self.config = config
        self._pairs = {
            p.pair_id: p for p in config.dataset_pairs + config.control_pairs
        }
        self._raters: dict[str, RaterState] = {}
        self._lock = threading.Lock()
        self._log = EventLog(log_path)
        for event in self._log.replay():
            self._apply(event)

    def close(self) -> None:
        self._log.close()

    # -- event application ------------------------------------------------

    def _apply(self, event: dict) -> None:
        kind = event["type"]
        if kind == "register":
            state = RaterState(
                rater_id=event["rater_id"],
                code=event["code"],
                item_order=tuple(event["item_order"]),
            )
            self._raters[state.rater_id] = state
        elif kind == "confirm":
            self._raters[event["rater_id"]].confirmed = True
        elif kind == "rating":
            state = self._raters[event["rater_id"]]
            state.ratings[event["pair_id"]] = event["category"]
            state.rating_order.append(event["pair_id"])
        elif kind == "postpone":
            state = self._raters[event["rater_id"]]
            pair_id = event["pair_id"]
            if pair_id in state.postponed:
                state.postponed.remove(pair_id)
            state.postponed.append(pair_id)
            state.postpone_ops += 1
        else:
            raise ValueError(f"unknown event type {kind!r}")

    def _record(self, event: dict) -> None:
        self._log.append(event)
        self._apply(event)

    # -- session operations ------------------------------------------------

    def register(self, code: str) -> str:
        """Create an anonymous rater with a fixed randomized item order."""
        with self._lock:
            if code not in self.config.codes:
                raise ServiceError("unknown_code", f"unknown recruitment code", 403)
            index = len(self._raters)
            rater_id = f"rater-{index + 1:04d}"
            if self.config.seed is not None:
                rng = random.Random(f"{self.config.seed}:{index}")
            else:
                rng = random.Random(random.SystemRandom().getrandbits(64))
            order = interleaved_item_order(
                [p.pair_id for p in self.config.dataset_pairs],
                [p.pair_id for p in self.config.control_pairs],
                rng,
            )
            self._record({
                "type": "register",
                "rater_id": rater_id,
                "code": code,
                "item_order": order,
                "timestamp": time.time(),
            })
            return rater_id

    def _state(self, rater_id: str) -> RaterState:
        state = self._raters.get(rater_id)
        if state is None:
            raise ServiceError("unknown_rater", f"unknown rater {rater_id!r}", 404)
        return state

    def confirm_instructions(self, rater_id: str) -> None:
        with self._lock:
            state = self._state(rater_id)
            if not state.confirmed:
                self._record({
                    "type": "confirm",
                    "rater_id": rater_id,
                    "timestamp": time.time(),
                })

    def _current_pair_id(self, state: RaterState) -> str | None:
        postponed = set(state.postponed)
        for pair_id in state.item_order:
            if pair_id not in state.ratings and pair_id not in postponed:
                return pair_id
        for pair_id in state.postponed:
            if pair_id not in state.ratings:
                return pair_id
        return None

    def _presentation(self, pair_id: str, position: int) -> dict:
        pair = self._pairs[pair_id]
        def entry_payload(entry_id: str) -> dict:
            entry = self.config.corpus[entry_id]
            return {"terms": list(entry.terms), "definition": entry.definition}
        return {
            "pair_id": pair_id,
            "position": position,
            "total": self.config.total_items,
            "left": entry_payload(pair.left_id),
            "right": entry_payload(pair.right_id),
        }

    def next_item(self, rater_id: str) -> dict | None:
        """The rater's current pair presentation, or None once all are rated."""
        with self._lock:
            state = self._state(rater_id)
            if not state.confirmed:
                raise ServiceError(
                    "instructions_not_confirmed",
                    "confirm the instructions before rating", 409)
            pair_id = self._current_pair_id(state)
            if pair_id is None:
                return None
            return self._presentation(pair_id, len(state.ratings) + 1)

    def submit_rating(self, rater_id: str, pair_id: str, category: int) -> dict:
        """Persist a rating for the current item; acknowledged after fsync."""
        with self._lock:
            state = self._state(rater_id)
            if not state.confirmed:
                raise ServiceError(
                    "instructions_not_confirmed",
                    "confirm the instructions before rating", 409)
            if not isinstance(category, int) or category not in RATING_CATEGORIES:
                raise ServiceError(
                    "invalid_category", f"rating must be an integer 0-4", 400)
            if pair_id not in self._pairs:
                raise ServiceError("unknown_pair", f"unknown pair {pair_id!r}", 404)
            if pair_id in state.ratings:
                raise ServiceError(
                    "already_rated",
                    "ratings cannot be modified in retrospect", 409)
            current = self._current_pair_id(state)
            if pair_id != current:
                raise ServiceError(
                    "not_current_item",
                    f"pair {pair_id!r} is not the current item", 409)
            self._record({
                "type": "rating",
                "rater_id": rater_id,
                "pair_id": pair_id,
                "category": category,
                "timestamp": time.time(),
                "ordinal": len(state.rating_order) + 1,
            })
            if pair_id in state.postponed:
                state.postponed.remove(pair_id)
            return {"rated": len(state.ratings), "total": self.config.total_items}

    def postpone(self, rater_id: str, pair_id: str) -> dict:
        """Defer the current item; it replays after the main list."""
        with self._lock:
            state = self._state(rater_id)
            if not state.confirmed:
                raise ServiceError(
                    "instructions_not_confirmed",
                    "confirm the instructions before rating", 409)
            if pair_id in state.ratings:
                raise ServiceError(
                    "already_rated", "rated pairs cannot be postponed", 409)
            current = self._current_pair_id(state)
            if pair_id != current:
                raise ServiceError(
                    "not_current_item",
                    f"pair {pair_id!r} is not the current item", 409)
            if state.postpone_ops >= self.config.total_items:
                raise ServiceError(
                    "postpone_limit",
                    "postponement limit for this session reached", 409)
            self._record({
                "type": "postpone",
                "rater_id": rater_id,
                "pair_id": pair_id,
                "timestamp": time.time(),
            })
            return {"rated": len(state.ratings), "total": self.config.total_items}

    def progress(self, rater_id: str) -> dict:
        with self._lock:
            state = self._state(rater_id)
            return {
                "rated": len(state.ratings),
                "total": self.config.total_items,
                "postponed": len([p for p in state.postponed if p not in state.ratings]),
                "confirmed": state.confirmed,
            }

    def item_order(self, rater_id: str) -> tuple[str, ...]:
        with self._lock:
            return self._state(rater_id).item_order

    # -- export -------------------------------------------------------------

    def export_dataset(self) -> tuple[str, str]:
        """Dataset ratings and control performance as two deterministic files.

        The first file is a canonical rating-dataset file restricted to
        dataset pairs; the second lists control-pair ratings against their
        intended values. Row order is independent of rating arrival order.
        """
        with self._lock:
            dataset_lines = [RATING_HEADER]
            rows = []
            for pair in self.config.dataset_pairs:
                for rater_id in sorted(self._raters):
                    category = self._raters[rater_id].ratings.get(pair.pair_id)
                    if category is None:
                        continue
                    rows.append((pair.pair_id, rater_id, pair, category))
            rows.sort(key=lambda r: (r[0], r[1]))
            for pair_id, rater_id, pair, category in rows:
                dataset_lines.append("\t".join([
                    pair_id, pair.left_id, pair.right_id, pair.kind, "",
                    rater_id, str(category)]))

            control_lines = ["\t".join([
                "rater_id", "pair_id", "left_id", "right_id",
                "intended_rating", "rating", "deviation"])]
            control_rows = []
            for pair in self.config.control_pairs:
                for rater_id in sorted(self._raters):
                    category = self._raters[rater_id].ratings.get(pair.pair_id)
                    if category is None:
                        continue
                    control_rows.append((rater_id, pair.pair_id, pair, category))
            control_rows.sort(key=lambda r: (r[0], r[1]))
            for rater_id, pair_id, pair, category in control_rows:
                control_lines.append("\t".join([
                    rater_id, pair_id, pair.left_id, pair.right_id,
                    str(pair.intended_rating), str(category),
                    str(abs(category - pair.intended_rating))]))
            return ("\n".join(dataset_lines) + "\n",
                    "\n".join(control_lines) + "\n")
