// WebSocket wrapper: reconnects with capped exponential backoff and
// surfaces status changes instead of throwing. The socket constructor
// is injectable so tests can run without a network.

export interface SocketLike {
    onopen: (() => void) | null;
    onmessage: ((event: { data: unknown }) => void) | null;
    onclose: (() => void) | null;
    onerror: (() => void) | null;
    send(data: string): void;
    close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ConnectionHandlers {
    onText(text: string): void;
    onStatus(status: "connecting" | "connected" | "disconnected"): void;
}

const INITIAL_BACKOFF_MS = 1000;
const MAX_BACKOFF_MS = 30_000;

export class DeviceConnection {
    private socket: SocketLike | null = null;
    private open = false;
    private closed = false;
    private backoffMs = INITIAL_BACKOFF_MS;

    constructor(
        private url: string,
        private handlers: ConnectionHandlers,
        private factory: SocketFactory = (u) => new WebSocket(u) as unknown as SocketLike,
    ) {}

    get isOpen(): boolean {
        return this.open;
    }

    connect(): void {
        if (this.closed) return;
        this.handlers.onStatus("connecting");
        const socket = this.factory(this.url);
        this.socket = socket;
        socket.onopen = () => {
            this.open = true;
            this.backoffMs = INITIAL_BACKOFF_MS;
            this.handlers.onStatus("connected");
        };
        socket.onmessage = (event) => {
            if (typeof event.data === "string") {
                this.handlers.onText(event.data);
            }
        };
        socket.onerror = () => {
            // onclose follows; reconnect is handled there
        };
        socket.onclose = () => {
            const wasOpen = this.open;
            this.open = false;
            this.socket = null;
            if (this.closed) return;
            this.handlers.onStatus("disconnected");
            const delay = this.backoffMs;
            if (wasOpen) {
                this.backoffMs = INITIAL_BACKOFF_MS;
            } else {
                this.backoffMs = Math.min(this.backoffMs * 2, MAX_BACKOFF_MS);
            }
            setTimeout(() => this.connect(), delay);
        };
    }

    /** Send if connected; false (and no throw) otherwise. */
    send(text: string): boolean {
        if (!this.open || this.socket === null) return false;
        this.socket.send(text);
        return true;
    }

    close(): void {
        this.closed = true;
        this.socket?.close();
        this.socket = null;
        this.open = false;
    }
}
