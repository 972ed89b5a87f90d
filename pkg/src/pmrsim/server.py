"""Live service: raw telemetry frames over TCP, canonical JSON over WS.

One asyncio loop owns the simulation. Network handlers never touch
device state directly: client commands go through Simulation's command
queue and take effect at the next tick, and every device message fans
out to per-client send queues, so all clients observe the same sequence.
History requests are answered immediately to the requesting client only,
chunked to fit the frame payload cap.
"""

from __future__ import annotations

import asyncio
import logging

from websockets.asyncio.server import serve as ws_serve

from .protocol import (
    Command,
    HistoryRequest,
    Message,
    StreamDecoder,
    encode,
    message_from_json,
    message_to_json,
    split_history_response,
)
from .simulator import Simulation

log = logging.getLogger(__name__)


def parse_addr(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"expected HOST:PORT, got {text!r}")
    return host, int(port)


class DeviceServer:
    """Ticks a Simulation in real time and bridges it to clients."""

    def __init__(self, sim: Simulation, speed: float = 1.0):
        self.sim = sim
        # Serving needs a real-time pace; 0 (as-fast-as-possible) would
        # spin the loop, so it is promoted to 1x.
        self.speed = speed if speed > 0 else 1.0
        self._queues: list[asyncio.Queue[Message]] = []
        self._tcp_server: asyncio.Server | None = None
        self._ws_server = None
        self.tcp_port: int | None = None
        self.ws_port: int | None = None
        sim.on_message = self._broadcast

    # -- client plumbing --------------------------------------------------

    def _broadcast(self, message: Message) -> None:
        for queue in self._queues:
            queue.put_nowait(message)

    def _subscribe(self) -> asyncio.Queue[Message]:
        queue: asyncio.Queue[Message] = asyncio.Queue()
        self._queues.append(queue)
        return queue

    def _unsubscribe(self, queue: asyncio.Queue[Message]) -> None:
        if queue in self._queues:
            self._queues.remove(queue)

    def _handle_client_message(
        self, message: Message, reply: asyncio.Queue[Message]
    ) -> None:
        if isinstance(message, Command):
            self.sim.inject_command(message.cmd)
        elif isinstance(message, HistoryRequest):
            records = self.sim.history.query_range(message.from_ms, message.to_ms)
            for response in split_history_response(records):
                reply.put_nowait(response)
        else:
            log.debug("ignoring client message %r", message)

    async def _handle_tcp(
        self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter
    ) -> None:
        queue = self._subscribe()

        async def send() -> None:
            while True:
                message = await queue.get()
                writer.write(encode(message))
                await writer.drain()

        sender = asyncio.ensure_future(send())
        decoder = StreamDecoder()
        try:
            while True:
                data = await reader.read(4096)
                if not data:
                    break
                messages, diagnostics = decoder.push(data)
                for diagnostic in diagnostics:
                    log.warning("tcp client sent junk: %s", diagnostic)
                for message in messages:
                    self._handle_client_message(message, queue)
        except ConnectionError:
            pass
        finally:
            self._unsubscribe(queue)
            sender.cancel()
            writer.close()

    async def _handle_ws(self, websocket) -> None:
        queue = self._subscribe()

        async def send() -> None:
            while True:
                message = await queue.get()
                await websocket.send(message_to_json(message))

        sender = asyncio.ensure_future(send())
        try:
            async for text in websocket:
                try:
                    message = message_from_json(text)
                except ValueError as exc:
                    log.warning("ws client sent junk: %s", exc)
                    continue
                self._handle_client_message(message, queue)
        finally:
            self._unsubscribe(queue)
            sender.cancel()

    # -- lifecycle ---------------------------------------------------------

    async def start(
        self, tcp_addr: tuple[str, int] | None, ws_addr: tuple[str, int] | None
    ) -> None:
        """Bind the requested endpoints. Raises OSError on failure."""
        if tcp_addr is not None:
            self._tcp_server = await asyncio.start_server(
                self._handle_tcp, tcp_addr[0], tcp_addr[1]
            )
            self.tcp_port = self._tcp_server.sockets[0].getsockname()[1]
            log.info("telemetry frames on tcp://%s:%d", tcp_addr[0], self.tcp_port)
        if ws_addr is not None:
            self._ws_server = await ws_serve(self._handle_ws, ws_addr[0], ws_addr[1])
            self.ws_port = self._ws_server.sockets[0].getsockname()[1]
            log.info("json mirror on ws://%s:%d", ws_addr[0], self.ws_port)

    async def tick_forever(self) -> None:
        """Advance the virtual clock at the configured pace, forever."""
        loop = asyncio.get_running_loop()
        tick_ms = self.sim.config.tick_ms
        self.sim.boot()
        t = 0
        started = loop.time()
        while True:
            self.sim.step_tick(t)
            t += tick_ms
            delay = started + (t / 1000.0) / self.speed - loop.time()
            await asyncio.sleep(delay if delay > 0 else 0)

    async def stop(self) -> None:
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
            self._tcp_server = None
        if self._ws_server is not None:
            self._ws_server.close()
            await self._ws_server.wait_closed()
            self._ws_server = None

    async def serve_until_cancelled(
        self, tcp_addr: tuple[str, int] | None, ws_addr: tuple[str, int] | None
    ) -> None:
        await self.start(tcp_addr, ws_addr)
        ticker = asyncio.ensure_future(self.tick_forever())
        try:
            await asyncio.Event().wait()
        finally:
            ticker.cancel()
            await self.stop()


def serve(
    sim: Simulation,
    tcp_addr: tuple[str, int] | None,
    ws_addr: tuple[str, int] | None,
    speed: float = 1.0,
) -> None:
    """Blocking entry point; returns on Ctrl-C."""
    server = DeviceServer(sim, speed=speed)
    try:
        asyncio.run(server.serve_until_cancelled(tcp_addr, ws_addr))
    except KeyboardInterrupt:
        log.info("stopped")
