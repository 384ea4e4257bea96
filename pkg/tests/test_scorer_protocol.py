import json
import sys

import pytest

from hopeal.corpus import Document
from hopeal.scorer_protocol import (
    ExternalScorer,
    ProtocolError,
    score_batch_remote,
    spawn_scorer,
)

from helpers import write_csv  # noqa: F401  (keeps helpers importable on path)


def _inline(script: str) -> list[str]:
    return [sys.executable, "-c", script]


HANDSHAKE = '{"protocol":"al-scorer","version":1}'

ECHO_SCORER = f"""
import json, sys
print('{HANDSHAKE}', flush=True)
for line in sys.stdin:
    req = json.loads(line)
    probs = [[0.25, 0.75] for _ in req["texts"]]
    print(json.dumps({{"request_id": req["request_id"], "probs": probs}}), flush=True)
"""


def _table_scorer_argv(tmp_path, table):
    path = tmp_path / "table.json"
    path.write_text(json.dumps(table), encoding="utf-8")
    return [sys.executable, "-m", "hopeal.mock_scorer", "--table", str(path)]


class TestSpawn:
    def test_mock_handshake(self, tmp_path):
        with spawn_scorer(_table_scorer_argv(tmp_path, {"hi": [0.25, 0.75]}), timeout=20) as s:
            dists = score_batch_remote(s, ["hi"])
        assert [d.probs for d in dists] == [(0.25, 0.75)]

    def test_command_not_found(self):
        with pytest.raises(ProtocolError, match="spawn"):
            spawn_scorer(["definitely-not-a-real-binary-xyz"], timeout=5)

    def test_version_mismatch(self):
        argv = _inline('print(\'{"protocol":"al-scorer","version":2}\', flush=True)')
        with pytest.raises(ProtocolError, match="version"):
            spawn_scorer(argv, timeout=20)

    def test_wrong_protocol_name(self):
        argv = _inline('print(\'{"protocol":"other","version":1}\', flush=True)')
        with pytest.raises(ProtocolError, match="protocol"):
            spawn_scorer(argv, timeout=20)

    def test_garbage_handshake(self):
        argv = _inline("print('not json at all', flush=True)")
        with pytest.raises(ProtocolError, match="handshake"):
            spawn_scorer(argv, timeout=20)

    def test_handshake_timeout(self):
        argv = _inline("import time; time.sleep(30)")
        with pytest.raises(ProtocolError, match="no output"):
            spawn_scorer(argv, timeout=0.5)


class TestScoreBatch:
    def test_echo_contract(self):
        with spawn_scorer(_inline(ECHO_SCORER), timeout=20) as s:
            out = score_batch_remote(s, ["hi"])
            assert [d.probs for d in out] == [(0.25, 0.75)]

    def test_request_ids_increase_and_match(self):
        with spawn_scorer(_inline(ECHO_SCORER), timeout=20) as s:
            score_batch_remote(s, ["a"])
            score_batch_remote(s, ["b", "c"])
            assert s._next_request_id == 3

    def test_empty_batch_rejected(self):
        with spawn_scorer(_inline(ECHO_SCORER), timeout=20) as s:
            with pytest.raises(ProtocolError):
                score_batch_remote(s, [])

    def test_count_mismatch(self):
        script = f"""
import json, sys
print('{HANDSHAKE}', flush=True)
for line in sys.stdin:
    req = json.loads(line)
    print(json.dumps({{"request_id": req["request_id"], "probs": [[0.5,0.5],[0.5,0.5]]}}), flush=True)
"""
        with spawn_scorer(_inline(script), timeout=20) as s:
            with pytest.raises(ProtocolError, match="rows"):
                score_batch_remote(s, ["only one"])

    def test_sum_out_of_tolerance(self):
        script = f"""
import json, sys
print('{HANDSHAKE}', flush=True)
for line in sys.stdin:
    req = json.loads(line)
    print(json.dumps({{"request_id": req["request_id"], "probs": [[0.6, 0.6]]}}), flush=True)
"""
        with spawn_scorer(_inline(script), timeout=20) as s:
            with pytest.raises(ProtocolError, match="sum"):
                score_batch_remote(s, ["x"])

    def test_near_one_sum_renormalized(self):
        script = f"""
import json, sys
print('{HANDSHAKE}', flush=True)
for line in sys.stdin:
    req = json.loads(line)
    print(json.dumps({{"request_id": req["request_id"], "probs": [[0.2500001, 0.75]]}}), flush=True)
"""
        with spawn_scorer(_inline(script), timeout=20) as s:
            (dist,) = score_batch_remote(s, ["x"])
        assert sum(dist.probs) == pytest.approx(1.0, abs=1e-12)

    def test_id_mismatch(self):
        script = f"""
import json, sys
print('{HANDSHAKE}', flush=True)
for line in sys.stdin:
    print(json.dumps({{"request_id": 999, "probs": [[0.5, 0.5]]}}), flush=True)
"""
        with spawn_scorer(_inline(script), timeout=20) as s:
            with pytest.raises(ProtocolError, match="id"):
                score_batch_remote(s, ["x"])

    def test_malformed_response(self):
        script = f"""
import sys
print('{HANDSHAKE}', flush=True)
for line in sys.stdin:
    print('{{{{ not json', flush=True)
"""
        with spawn_scorer(_inline(script), timeout=20) as s:
            with pytest.raises(ProtocolError, match="malformed"):
                score_batch_remote(s, ["x"])

    def test_negative_probability_rejected(self):
        script = f"""
import json, sys
print('{HANDSHAKE}', flush=True)
for line in sys.stdin:
    req = json.loads(line)
    print(json.dumps({{"request_id": req["request_id"], "probs": [[-0.2, 1.2]]}}), flush=True)
"""
        with spawn_scorer(_inline(script), timeout=20) as s:
            with pytest.raises(ProtocolError, match="range"):
                score_batch_remote(s, ["x"])

    def test_scorer_death_is_broken_pipe(self):
        script = f"print('{HANDSHAKE}', flush=True)"
        with spawn_scorer(_inline(script), timeout=5) as s:
            with pytest.raises(ProtocolError):
                score_batch_remote(s, ["x"])


class TestExternalScorer:
    def test_sends_raw_text(self, tmp_path):
        # the table is keyed by raw text; a normalized-text key must not hit
        raw = "RAW Text! www.skip.me"
        argv = _table_scorer_argv(tmp_path, {raw: [0.125, 0.875]})
        with spawn_scorer(argv, timeout=20) as s:
            scorer = ExternalScorer(s)
            (dist,) = scorer.score_batch([Document(id="1", raw_text=raw)])
        assert dist.probs == (0.125, 0.875)

    def test_unicode_round_trip(self, tmp_path):
        text = "امید کی کرن – délice"
        argv = _table_scorer_argv(tmp_path, {text: [0.5, 0.5]})
        with spawn_scorer(argv, timeout=20) as s:
            (dist,) = score_batch_remote(s, [text])
        assert dist.probs == (0.5, 0.5)
