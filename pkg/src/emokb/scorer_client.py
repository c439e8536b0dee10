"""Client for the external validity-scorer protocol.

The protocol is line-delimited JSON over standard streams or a local socket.
Each request is ``{"id": <string>, "text": <string>}``; the scorer replies
``{"id": <string>, "score": <number in [0,1]>}``, in any order. A reply of
``{"id": ..., "error": ...}`` reports a failed request; an error record with
a null id reports a malformed input line and is logged, not fatal, since this
client never sends malformed lines.

Any deviation — unknown or duplicate id, missing reply, score outside [0,1],
non-JSON output — is a ProtocolError. Scores are never clamped.

Transport specs: ``exec:<command line>`` (subprocess over stdio),
``unix:<socket path>``, ``tcp:<host>:<port>``.
"""

from __future__ import annotations

import json
import logging
import shlex
import socket
import subprocess
import threading
from dataclasses import dataclass

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 60.0


class ProtocolError(Exception):
    """The scorer violated the request/reply contract."""


class ScorerTransportError(Exception):
    """Could not reach or keep a connection to the scorer."""


@dataclass
class _Reply:
    id: str
    score: float


class ScorerClient:
    """One scoring session per score_texts() call: connect, stream requests,
    collect replies (a reader thread drains them concurrently so neither side
    blocks on a full pipe), verify the ledger."""

    def __init__(self, transport_spec: str, timeout: float = DEFAULT_TIMEOUT):
        self.transport_spec = transport_spec
        self.timeout = timeout

    def score_texts(self, texts: list[str]) -> list[float]:
        if not texts:
            return []
        ids = [str(i + 1) for i in range(len(texts))]
        writer, reader, closer = self._connect()
        replies: dict[str, float] = {}
        errors: list[str] = []
        done = threading.Event()

        def drain():
            try:
                for line in reader:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        record = json.loads(line)
                    except json.JSONDecodeError:
                        errors.append(f"non-JSON reply line: {line[:120]!r}")
                        return
                    if not isinstance(record, dict):
                        errors.append(f"reply is not an object: {line[:120]!r}")
                        return
                    if "error" in record:
                        if record.get("id") is None:
                            logger.warning("scorer reported malformed line: %s", record["error"])
                            continue
                        errors.append(f"scorer error for id {record['id']!r}: {record['error']}")
                        return
                    rid, score = record.get("id"), record.get("score")
                    if rid not in set(ids):
                        errors.append(f"unknown reply id {rid!r}")
                        return
                    if rid in replies:
                        errors.append(f"duplicate reply for id {rid!r}")
                        return
                    if not isinstance(score, (int, float)) or isinstance(score, bool):
                        errors.append(f"non-numeric score for id {rid!r}: {score!r}")
                        return
                    if not (0.0 <= float(score) <= 1.0):
                        errors.append(f"score {score} for id {rid!r} outside [0, 1]")
                        return
                    replies[rid] = float(score)
                    if len(replies) == len(ids):
                        return
            finally:
                done.set()

        thread = threading.Thread(target=drain, daemon=True)
        thread.start()
        try:
            for rid, text in zip(ids, texts):
                writer(json.dumps({"id": rid, "text": text}, ensure_ascii=False) + "\n")
            writer(None)  # signal end of requests
            if not done.wait(self.timeout):
                raise ProtocolError(
                    f"scorer did not answer within {self.timeout}s "
                    f"({len(replies)}/{len(ids)} replies)"
                )
        finally:
            closer()
        thread.join(timeout=5)
        if errors:
            raise ProtocolError(errors[0])
        missing = [rid for rid in ids if rid not in replies]
        if missing:
            raise ProtocolError(
                f"missing replies for {len(missing)} ids (first: {missing[0]!r})"
            )
        return [replies[rid] for rid in ids]

    # -- transports ----------------------------------------------------------

    def _connect(self):
        spec = self.transport_spec
        if spec.startswith("exec:"):
            return self._connect_exec(spec[len("exec:"):])
        if spec.startswith("unix:"):
            return self._connect_socket(socket.AF_UNIX, spec[len("unix:"):])
        if spec.startswith("tcp:"):
            host, _sep, port = spec[len("tcp:"):].rpartition(":")
            if not host or not port.isdigit():
                raise ValueError(f"bad tcp spec {spec!r}; want tcp:<host>:<port>")
            return self._connect_socket(socket.AF_INET, (host, int(port)))
        raise ValueError(f"unknown transport spec {spec!r}")

    def _connect_exec(self, command: str):
        argv = shlex.split(command)
        if not argv:
            raise ValueError("empty exec command")
        try:
            proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise ScorerTransportError(f"cannot start scorer {argv[0]!r}: {exc}") from exc

        def writer(chunk: str | None):
            if proc.stdin is None or proc.stdin.closed:
                return
            if chunk is None:
                proc.stdin.close()
            else:
                proc.stdin.write(chunk)
                proc.stdin.flush()

        def closer():
            if proc.stdin and not proc.stdin.closed:
                proc.stdin.close()
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()

        return writer, proc.stdout, closer

    def _connect_socket(self, family, address):
        sock = socket.socket(family, socket.SOCK_STREAM)
        sock.settimeout(self.timeout)
        try:
            sock.connect(address)
        except OSError as exc:
            sock.close()
            raise ScorerTransportError(f"cannot connect to {address!r}: {exc}") from exc
        reader = sock.makefile("r", encoding="utf-8")

        def writer(chunk: str | None):
            if chunk is None:
                try:
                    sock.shutdown(socket.SHUT_WR)
                except OSError:
                    pass
            else:
                sock.sendall(chunk.encode("utf-8"))

        def closer():
            try:
                reader.close()
            finally:
                sock.close()

        return writer, reader, closer


def external_score(events, scorer: ScorerClient | str) -> list[tuple[str, float]]:
    """Score each event's surface through the protocol; output order matches
    input order even though replies may arrive out of order."""
    client = ScorerClient(scorer) if isinstance(scorer, str) else scorer
    surfaces = [getattr(e, "surface", e) for e in events]
    scores = client.score_texts(surfaces)
    return list(zip(surfaces, scores))
