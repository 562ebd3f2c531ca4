"""
External base classifiers reached over a line-delimited JSON protocol.

The child process speaks UTF-8 JSON, one object per line, on its standard
streams:

    child  -> {"hello": {"classes": 2}}                 (first line)
    parent -> {"id": 1, "tokens": ["a", "[MASK]", "c"]}
    child  -> {"id": 1, "scores": [0.2, 0.8]}

Any other line is a protocol error. One process serves one request at a
time; ExternalClassifierPool spreads requests over several processes.
"""
import json
import logging
import math
import queue
import shlex
import subprocess
import threading
import time
from typing import List, Optional, Sequence, Union

from engine.core import MaskedText
from engine.errors import InvalidArgumentError, ProtocolError, TransportError
from .base import BaseClassifier, ClassScores, register_classifier

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 30.0
_EOF = object()


def _split_command(command: Union[str, Sequence[str]]) -> List[str]:
    if isinstance(command, str):
        return shlex.split(command)
    return list(command)


class ExternalClassifier(BaseClassifier):
    """Client for one classifier child process."""

    NAME = "external"

    def __init__(
        self,
        command: Union[str, Sequence[str]],
        timeout: float = DEFAULT_TIMEOUT,
        handshake_timeout: Optional[float] = None,
    ):
        """
        Launch the child and complete the handshake.

        Args:
            command: Command line (string or argv list)
            timeout: Seconds to wait for each response
            handshake_timeout: Seconds to wait for the hello line (default: timeout)

        Raises:
            TransportError: The process cannot be started or stays silent
            ProtocolError: The first line is not a valid hello
        """
        self.command = _split_command(command)
        if not self.command:
            raise InvalidArgumentError("external classifier command is empty")
        self.timeout = float(timeout)
        self._lock = threading.Lock()
        self._next_id = 0
        self._lines: "queue.Queue[object]" = queue.Queue()

        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as e:
            raise TransportError(f"cannot start {self.command[0]}: {e}") from e

        self._reader = threading.Thread(target=self._pump, name="external-classifier-reader", daemon=True)
        self._reader.start()

        try:
            hello = self._decode(self._read_line(handshake_timeout or self.timeout), "handshake")
            classes = int(hello["hello"]["classes"])
        except TransportError:
            self.close()
            raise
        except (KeyError, TypeError, ValueError) as e:
            self.close()
            raise ProtocolError(f"bad handshake line: {hello!r}") from e
        super().__init__(classes)
        logger.info("external classifier %s ready (%d classes)", self.command[0], classes)

    @classmethod
    def from_options(
        cls,
        command: Optional[Union[str, Sequence[str]]] = None,
        timeout: float = DEFAULT_TIMEOUT,
        pool: int = 1,
        **_: object,
    ) -> BaseClassifier:
        if not command:
            raise InvalidArgumentError("external classifier needs --command")
        if int(pool) > 1:
            return ExternalClassifierPool(command, int(pool), timeout)
        return cls(command, timeout)

    # ─────────────────────────────────────────────
    #  Transport helpers
    # ─────────────────────────────────────────────

    def _pump(self) -> None:
        stream = self._proc.stdout
        try:
            for line in stream:
                self._lines.put(line)
        except (OSError, ValueError):
            pass
        finally:
            self._lines.put(_EOF)

    def _read_line(self, timeout: float) -> str:
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            raise TransportError(f"no response within {timeout:.1f}s from {self.command[0]}")
        if line is _EOF:
            code = self._proc.poll()
            raise TransportError(f"{self.command[0]} closed its output (exit code {code})")
        return str(line)

    def _decode(self, line: str, what: str) -> dict:
        try:
            obj = json.loads(line)
        except ValueError as e:
            raise ProtocolError(f"malformed {what} line: {line.strip()[:200]!r}") from e
        if not isinstance(obj, dict):
            raise ProtocolError(f"{what} line is not a JSON object: {line.strip()[:200]!r}")
        return obj

    def _send(self, payload: dict) -> None:
        try:
            self._proc.stdin.write(json.dumps(payload) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError, ValueError) as e:
            raise TransportError(f"cannot write to {self.command[0]}: {e}") from e

    # ─────────────────────────────────────────────
    #  Classification
    # ─────────────────────────────────────────────

    def request(self, tokens: Sequence[str]) -> ClassScores:
        """
        Send one request line and wait for the matching response.

        Replies to earlier requests that timed out are discarded; a reply
        with any other id is a protocol error.
        """
        with self._lock:
            self._next_id += 1
            request_id = self._next_id
            self._send({"id": request_id, "tokens": list(tokens)})
            deadline = time.monotonic() + self.timeout
            while True:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    raise TransportError(f"no response within {self.timeout:.1f}s from {self.command[0]}")
                response = self._decode(self._read_line(remaining), "response")
                stale = response.get("id")
                if isinstance(stale, int) and not isinstance(stale, bool) and stale < request_id:
                    logger.debug("dropping late response %d from %s", stale, self.command[0])
                    continue
                break

        if "id" not in response or "scores" not in response:
            raise ProtocolError(f"response lacks id/scores: {response!r}")
        if response["id"] != request_id:
            raise ProtocolError(f"response id {response['id']!r} does not match request {request_id}")
        scores = response["scores"]
        if not isinstance(scores, list) or len(scores) != self.class_count:
            raise ProtocolError(f"expected {self.class_count} scores, got {scores!r}")
        try:
            values = [float(s) for s in scores]
        except (TypeError, ValueError) as e:
            raise ProtocolError(f"non-numeric scores: {scores!r}") from e
        if not all(math.isfinite(v) for v in values):
            raise ProtocolError(f"non-finite scores: {scores!r}")
        return ClassScores(tuple(values))

    def classify(self, masked: MaskedText) -> ClassScores:
        return self.request(masked.tokens)

    def close(self) -> None:
        """Close stdin and stop the child."""
        proc = getattr(self, "_proc", None)
        if proc is None or proc.poll() is not None:
            return
        try:
            proc.stdin.close()
            proc.wait(timeout=2)
        except (OSError, subprocess.TimeoutExpired):
            proc.kill()
            proc.wait()

    def __enter__(self) -> "ExternalClassifier":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


@register_classifier("external")
class ExternalClassifierPool(BaseClassifier):
    """Several child processes; each request goes to whichever is free."""

    NAME = "external"

    def __init__(self, command: Union[str, Sequence[str]], size: int = 1, timeout: float = DEFAULT_TIMEOUT):
        if size < 1:
            raise InvalidArgumentError(f"pool size must be >= 1, got {size}")
        self.members = [ExternalClassifier(command, timeout) for _ in range(size)]
        widths = {m.class_count for m in self.members}
        if len(widths) != 1:
            self.close()
            raise ProtocolError(f"pool members disagree on class count: {sorted(widths)}")
        super().__init__(widths.pop())
        self._free: "queue.Queue[ExternalClassifier]" = queue.Queue()
        for member in self.members:
            self._free.put(member)

    from_options = ExternalClassifier.from_options

    def classify(self, masked: MaskedText) -> ClassScores:
        member = self._free.get()
        try:
            return member.classify(masked)
        finally:
            self._free.put(member)

    def close(self) -> None:
        for member in self.members:
            member.close()

    def __enter__(self) -> "ExternalClassifierPool":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def classify_external(masked: MaskedText, endpoint: BaseClassifier) -> ClassScores:
    """Score one masked copy through an external process (or pool)."""
    return endpoint.classify(masked)
