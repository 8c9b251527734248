import json
import random

import pytest

from ego_ranker.config import RunConfig
from ego_ranker.errors import ConfigError, CorruptState, OutOfOrderBatch
from ego_ranker.events import EventStream, InteractionEvent, InteractionType, load_stream
from ego_ranker.pipeline import build_record
from ego_ranker.scoring import InteractionWeights, WindowSpec
from ego_ranker.state import StateStore
from ego_ranker.synth import TraceConfig, generate_truth, sample_trace

DAY = 86_400


@pytest.fixture(scope="module")
def trace():
    truth = generate_truth([3, 6], [5.0, 1.0], seed=1)
    stream = sample_trace(truth, TraceConfig(12), WindowSpec(7 * DAY, 0), seed=1)
    return stream


def config(tmp_path, **kw):
    return RunConfig(state_dir=tmp_path / "state", **kw)


def test_split_ingest_matches_whole(tmp_path, fixture_csv):
    stream = load_stream(fixture_csv)
    cfg = config(tmp_path)
    store = StateStore(cfg.state_dir)
    first, second = stream.events[:3], stream.events[3:]
    store.ingest(EventStream.from_events(first), cfg)
    store.ingest(EventStream.from_events(second), cfg)
    spec = cfg.window_spec(stream)
    whole = build_record(stream, "alice", spec)
    assert store.load("alice").finalized(cfg.weights).to_json() == whole.to_json()


def test_split_inside_a_window(tmp_path, trace):
    cfg = config(tmp_path)
    store = StateStore(cfg.state_dir)
    rng = random.Random(0)
    cuts = sorted(rng.sample(range(1, len(trace)), 4))
    bounds = [0, *cuts, len(trace)]
    for lo, hi in zip(bounds, bounds[1:]):
        store.ingest(EventStream.from_events(trace.events[lo:hi]), cfg)
    whole = build_record(trace, "ego", cfg.window_spec(trace))
    assert store.load("ego").finalized(cfg.weights).to_json() == whole.to_json()


def test_out_of_order_batch(tmp_path, trace):
    cfg = config(tmp_path)
    store = StateStore(cfg.state_dir)
    late = [e for e in trace.events if e.timestamp >= 5 * 7 * DAY]
    early = [e for e in trace.events if e.timestamp < 2 * 7 * DAY]
    store.ingest(EventStream.from_events(late), cfg)
    with pytest.raises(OutOfOrderBatch):
        store.ingest(EventStream.from_events(early), cfg)


def test_batch_before_epoch_is_out_of_order(tmp_path):
    cfg = config(tmp_path)
    store = StateStore(cfg.state_dir)
    store.ingest(EventStream.from_events([InteractionEvent("a", "b", 10 * DAY, InteractionType.CALL)]), cfg)
    with pytest.raises(OutOfOrderBatch):
        store.ingest(EventStream.from_events([InteractionEvent("a", "b", DAY, InteractionType.CALL)]), cfg)


def test_failed_ingest_leaves_state_untouched(tmp_path, trace):
    cfg = config(tmp_path)
    store = StateStore(cfg.state_dir)
    store.ingest(EventStream.from_events(trace.events[len(trace) // 2 :]), cfg)
    before = store.ego_path("ego").read_bytes()
    with pytest.raises(OutOfOrderBatch):
        store.ingest(EventStream.from_events(trace.events[:10]), cfg)
    assert store.ego_path("ego").read_bytes() == before
    assert not list(cfg.state_dir.rglob("*.tmp"))


def test_repeated_digest_warns_and_double_counts(tmp_path):
    cfg = config(tmp_path)
    store = StateStore(cfg.state_dir)
    # a batch inside one window stays open, so repeating it is accepted
    stream = EventStream.from_events(
        [InteractionEvent("a", "b", 100, InteractionType.CALL), InteractionEvent("a", "c", 200, InteractionType.VIDEO)]
    )
    assert store.ingest(stream, cfg).warnings == []
    assert len(store.ingest(stream, cfg).warnings) == 1
    assert store.load("a").pending["b"].p == 2


def test_corrupt_snapshot_detected(tmp_path, fixture_csv):
    cfg = config(tmp_path)
    store = StateStore(cfg.state_dir)
    store.ingest(load_stream(fixture_csv), cfg)
    path = store.ego_path("alice")
    doc = json.loads(path.read_text())
    doc["record"]["windows_processed"] += 1
    path.write_text(json.dumps(doc))
    with pytest.raises(CorruptState):
        store.load("alice")
    path.write_text("{truncated")
    with pytest.raises(CorruptState):
        store.load("alice")


def test_config_mismatch_rejected(tmp_path, fixture_csv):
    store = StateStore(tmp_path / "state")
    store.ingest(load_stream(fixture_csv), config(tmp_path))
    with pytest.raises(ConfigError):
        store.window_spec(config(tmp_path, window_length=DAY))
    with pytest.raises(ConfigError):
        store.window_spec(config(tmp_path, weights=InteractionWeights(1, 1, 1, 1)))


def test_unknown_ego_loads_empty(tmp_path):
    store = StateStore(tmp_path)
    assert len(store.load("nobody").record) == 0
    assert store.egos() == []
