"""TCP carrier: the same runners over real connections.

The referee serves both parties concurrently; a connection is bound to a
role by the first frame it delivers (submission and claim types name
their sender). All runner calls are serialized under one lock, so the
protocol logic stays single-threaded and the per-channel byte streams
match the in-process carrier exactly.
"""

from __future__ import annotations

import socket
import threading
from dataclasses import dataclass, field

from ..bits import Message
from ..errors import FrameError
from ..etproto.keys import ROLE_ALICE, ROLE_BOB, PartyKeys, TtpSecret
from ..etproto.session import SessionStore
from .frames import Frame, FrameReader, MsgType, encode_frame
from .runners import PartyRunner, TtpRunner

_SENDER_OF = {
    MsgType.ET_SUBMIT_A: ROLE_ALICE,
    MsgType.ET_SUBMIT_B: ROLE_BOB,
    MsgType.DR_CLAIM_A: ROLE_ALICE,
    MsgType.DR_CLAIM_B: ROLE_BOB,
}


@dataclass
class ChannelLog:
    """Raw frames seen on one party-referee channel, per direction."""

    to_ttp: list[bytes] = field(default_factory=list)
    from_ttp: list[bytes] = field(default_factory=list)


class SocketTtpServer:
    """Context-managed referee endpoint on an ephemeral port."""

    def __init__(
        self,
        secret: TtpSecret,
        store: SessionStore | None = None,
        host: str = "127.0.0.1",
        timeout: float = 10.0,
        port: int = 0,
    ):
        self.runner = TtpRunner(secret, store=store)
        self.timeout = timeout
        self._lock = threading.Lock()
        self._listener = socket.create_server((host, port))
        self._listener.settimeout(0.1)
        self.address = self._listener.getsockname()
        self.logs = {ROLE_ALICE: ChannelLog(), ROLE_BOB: ChannelLog()}
        self._conns: dict[int, socket.socket] = {}
        self._pending: dict[int, list[bytes]] = {ROLE_ALICE: [], ROLE_BOB: []}
        self._threads: list[threading.Thread] = []
        self._stop = threading.Event()

    def __enter__(self) -> "SocketTtpServer":
        t = threading.Thread(target=self._accept_loop, daemon=True)
        t.start()
        self._threads.append(t)
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        self._stop.set()
        self._listener.close()
        with self._lock:
            conns = list(self._conns.values())
        for conn in conns:
            try:
                conn.close()
            except OSError:
                pass
        for t in self._threads:
            t.join(timeout=self.timeout)

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                conn, _ = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            t = threading.Thread(target=self._serve, args=(conn,), daemon=True)
            t.start()
            self._threads.append(t)

    def _serve(self, conn: socket.socket) -> None:
        conn.settimeout(self.timeout)
        reader = FrameReader()
        try:
            while not self._stop.is_set():
                try:
                    data = conn.recv(65536)
                except (socket.timeout, OSError):
                    return
                if not data:
                    return
                try:
                    frames = reader.feed(data)
                except FrameError:
                    return  # unparseable stream; drop the connection
                for frame in frames:
                    self._handle(conn, frame)
        finally:
            conn.close()

    def _handle(self, conn: socket.socket, frame: Frame) -> None:
        raw = encode_frame(frame)
        with self._lock:
            role = _SENDER_OF.get(frame.msg_type)
            if role is not None and role not in self._conns:
                self._conns[role] = conn
                for queued in self._pending[role]:
                    conn.sendall(queued)
                self._pending[role].clear()
            if role is not None:
                self.logs[role].to_ttp.append(raw)
            for dst, out in self.runner.on_frame(raw):
                out_raw = encode_frame(out)
                self.logs[dst].from_ttp.append(out_raw)
                sink = self._conns.get(dst)
                if sink is not None:
                    sink.sendall(out_raw)
                else:
                    self._pending[dst].append(out_raw)


def run_party_session(
    keys: PartyKeys,
    message: Message,
    address: tuple[str, int],
    *,
    dispute: bool = False,
    claim: Message | None = None,
    timeout: float = 10.0,
) -> tuple[PartyRunner, ChannelLog]:
    """Drive one party over TCP through the comparison phase and, if asked,
    the dispute. Returns the finished runner plus the raw channel log."""
    runner = PartyRunner(keys, message)
    log = ChannelLog()
    with socket.create_connection(address, timeout=timeout) as sock:
        sock.settimeout(timeout)
        reader = FrameReader()

        def send(frame: Frame) -> None:
            raw = encode_frame(frame)
            log.to_ttp.append(raw)
            sock.sendall(raw)

        def pump_until(state: str) -> None:
            while runner.state != state and runner.frozen is None:
                try:
                    data = sock.recv(65536)
                except socket.timeout as exc:
                    raise FrameError("timed out waiting for the referee") from exc
                if not data:
                    raise FrameError("referee closed the connection mid-session")
                for frame in reader.feed(data):
                    raw = encode_frame(frame)
                    log.from_ttp.append(raw)
                    for out in runner.on_frame(raw):
                        send(out)

        send(runner.et_submit_frame())
        pump_until("et_done")
        if dispute and runner.frozen is None:
            send(runner.dr_claim_frame(claim))
            pump_until("done")
    return runner, log
