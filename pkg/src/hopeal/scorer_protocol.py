"""Client for external scorer processes speaking a line-JSON protocol.

An external scorer is any child process that, on startup, writes the
handshake line ``{"protocol":"al-scorer","version":1}`` to stdout and
then answers one request per line:

    request:  {"request_id":N,"texts":[...]}
    response: {"request_id":N,"probs":[[p_not_hope,p_hope],...]}

UTF-8 throughout, one JSON object per line, one request in flight at a
time.  Raw (pre-normalization) text is sent so subword tokenizers see
the original input.
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Sequence

from .classifier import ProbDist, Scorer
from .corpus import Document

PROTOCOL_NAME = "al-scorer"
PROTOCOL_VERSION = 1
SUM_TOLERANCE = 1e-6


class ProtocolError(RuntimeError):
    """Any failure of the external scorer or its wire format."""


def _pump(stream, lines: queue.Queue) -> None:
    try:
        for line in iter(stream.readline, b""):
            lines.put(line)
    finally:
        lines.put(None)


@dataclass
class ScorerSession:
    proc: subprocess.Popen
    timeout: float
    _lines: queue.Queue = field(default_factory=queue.Queue)
    _next_request_id: int = 1
    closed: bool = False

    def read_line(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise ProtocolError(
                f"scorer produced no output within {self.timeout}s"
            ) from None
        if line is None:
            raise ProtocolError("scorer closed its output stream")
        return line.decode("utf-8")

    def write_line(self, text: str) -> None:
        try:
            self.proc.stdin.write((text + "\n").encode("utf-8"))
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ProtocolError(f"scorer pipe broken: {exc}") from exc

    def close(self) -> None:
        if self.closed:
            return
        self.closed = True
        try:
            self.proc.stdin.close()
        except OSError:
            pass
        try:
            self.proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            self.proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def spawn_scorer(command: Sequence[str] | str, timeout: float = 30.0) -> ScorerSession:
    """Start an external scorer and wait for its handshake line."""
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    try:
        proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            bufsize=0,
        )
    except OSError as exc:
        raise ProtocolError(f"could not spawn scorer {argv!r}: {exc}") from exc

    session = ScorerSession(proc=proc, timeout=timeout)
    threading.Thread(
        target=_pump, args=(proc.stdout, session._lines), daemon=True
    ).start()

    try:
        raw = session.read_line()
        try:
            handshake = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"malformed handshake line: {raw!r}") from exc
        if handshake.get("protocol") != PROTOCOL_NAME:
            raise ProtocolError(f"unexpected protocol: {handshake.get('protocol')!r}")
        if handshake.get("version") != PROTOCOL_VERSION:
            raise ProtocolError(
                f"scorer speaks protocol version {handshake.get('version')!r}, "
                f"expected {PROTOCOL_VERSION}"
            )
    except ProtocolError:
        session.close()
        raise
    return session


def score_batch_remote(session: ScorerSession, texts: Sequence[str]) -> list[ProbDist]:
    """Send one batch of texts and validate the scorer's response."""
    if not texts:
        raise ProtocolError("refusing to send an empty batch")
    request_id = session._next_request_id
    session._next_request_id += 1
    session.write_line(
        json.dumps(
            {"request_id": request_id, "texts": list(texts)},
            ensure_ascii=False,
            separators=(",", ":"),
        )
    )

    raw = session.read_line()
    try:
        response = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed response line: {raw!r}") from exc
    if response.get("request_id") != request_id:
        raise ProtocolError(
            f"response id {response.get('request_id')!r} does not match "
            f"request id {request_id}"
        )
    probs = response.get("probs")
    if not isinstance(probs, list) or len(probs) != len(texts):
        got = len(probs) if isinstance(probs, list) else probs
        raise ProtocolError(f"expected {len(texts)} probability rows, got {got}")

    dists = []
    for row_no, pair in enumerate(probs):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ProtocolError(f"row {row_no}: expected a [p, p] pair, got {pair!r}")
        try:
            a, b = float(pair[0]), float(pair[1])
        except (TypeError, ValueError):
            raise ProtocolError(f"row {row_no}: non-numeric probabilities {pair!r}") from None
        if not (a == a and b == b):  # NaN guard
            raise ProtocolError(f"row {row_no}: NaN probability")
        if a < -SUM_TOLERANCE or a > 1 + SUM_TOLERANCE or b < -SUM_TOLERANCE or b > 1 + SUM_TOLERANCE:
            raise ProtocolError(f"row {row_no}: probability out of range: {pair}")
        total = a + b
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ProtocolError(
                f"row {row_no}: probabilities sum to {total}, outside 1 +/- {SUM_TOLERANCE}"
            )
        a, b = a / total, b / total
        dists.append(ProbDist(probs=(min(max(a, 0.0), 1.0), min(max(b, 0.0), 1.0))))
    return dists


@dataclass
class ExternalScorer:
    """Adapts a live session to the in-process Scorer interface.

    Sends raw document text; the remote side owns its tokenization.
    """

    session: ScorerSession

    def score_batch(self, docs: Sequence[Document]) -> list[ProbDist]:
        return score_batch_remote(self.session, [d.raw_text for d in docs])
