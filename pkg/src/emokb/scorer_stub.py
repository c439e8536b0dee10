"""Reference scorer speaking the line-delimited JSON protocol.

Runnable as ``python -m emokb.scorer_stub``. Scores are a deterministic hash
of the text, so the stub needs no model artifact; it exists to exercise the
protocol: id fidelity, out-of-order replies (``--shuffle-window``), and
malformed-line survival (error records, never a crash).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import socket
import sys


def stub_score(text: str) -> float:
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") / float(2**64 - 1)


def handle_line(line: str) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError:
        return {"id": None, "error": "invalid json"}
    if not isinstance(record, dict):
        return {"id": None, "error": "request is not an object"}
    rid = record.get("id")
    if not isinstance(rid, str):
        return {"id": None, "error": "missing or non-string id"}
    text = record.get("text")
    if not isinstance(text, str):
        return {"id": rid, "error": "missing or non-string text"}
    return {"id": rid, "score": stub_score(text)}


def serve_stream(reader, writer, shuffle_window: int = 1) -> None:
    """Reply to every request line. A window > 1 buffers that many replies
    and emits them in reverse, exercising clients' out-of-order handling."""
    window: list[dict] = []

    def flush_window():
        for reply in reversed(window):
            writer.write(json.dumps(reply, ensure_ascii=False) + "\n")
        window.clear()
        writer.flush()

    for line in reader:
        if not line.strip():
            continue
        window.append(handle_line(line))
        if len(window) >= max(1, shuffle_window):
            flush_window()
    flush_window()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="hash-based protocol scorer")
    parser.add_argument("--shuffle-window", type=int, default=1)
    parser.add_argument("--unix", metavar="PATH", help="serve one connection on a unix socket")
    parser.add_argument("--tcp", type=int, metavar="PORT", help="serve one connection on localhost:PORT")
    args = parser.parse_args(argv)

    if args.unix or args.tcp:
        if args.unix:
            server = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
            server.bind(args.unix)
        else:
            server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
            server.bind(("127.0.0.1", args.tcp))
        server.listen(1)
        conn, _addr = server.accept()
        with conn:
            reader = conn.makefile("r", encoding="utf-8")
            writer = conn.makefile("w", encoding="utf-8")
            serve_stream(reader, writer, args.shuffle_window)
        server.close()
        return 0

    serve_stream(sys.stdin, sys.stdout, args.shuffle_window)
    return 0


if __name__ == "__main__":
    sys.exit(main())
