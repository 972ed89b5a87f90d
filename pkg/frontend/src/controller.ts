// Headless app core: holds the mirrored state, feeds it from socket
// text, and gates user commands on the connection. User actions never
// mutate the mirror directly; the device's echo does.

import { DeviceConnection } from "./connection.js";
import { CommandName, commandJson, historyRequestJson, parseDeviceMessage } from "./messages.js";
import {
    AppState,
    ConnectionStatus,
    applyMessage,
    initialAppState,
    setConnection,
    startHistoryQuery,
} from "./state.js";

export interface Sender {
    send(text: string): boolean;
    readonly isOpen: boolean;
}

export type StateListener = (state: AppState) => void;

export class Controller {
    state: AppState = initialAppState();
    private listeners: StateListener[] = [];
    private wallAtLastEvent = 0;

    constructor(private sender: Sender, private wallClock: () => number = Date.now) {}

    subscribe(listener: StateListener): void {
        this.listeners.push(listener);
        listener(this.state);
    }

    private update(state: AppState): void {
        this.state = state;
        for (const listener of this.listeners) {
            listener(state);
        }
    }

    handleText(text: string): void {
        const message = parseDeviceMessage(text);
        if (message === null) return; // never crash on junk
        const before = this.state.lastEventMs;
        const next = applyMessage(this.state, message);
        if (next.lastEventMs !== before) {
            this.wallAtLastEvent = this.wallClock();
        }
        this.update(next);
    }

    handleStatus(status: ConnectionStatus): void {
        this.update(setConnection(this.state, status));
    }

    get connected(): boolean {
        return this.state.connection === "connected";
    }

    /** True if the command went out; the UI waits for the echo. */
    sendCommand(cmd: CommandName): boolean {
        if (!this.connected) return false;
        return this.sender.send(commandJson(cmd));
    }

    requestHistory(fromMs: number, toMs: number): boolean {
        if (!this.connected) return false;
        if (!this.sender.send(historyRequestJson(fromMs, toMs))) return false;
        this.update(startHistoryQuery(this.state, fromMs, toMs));
        return true;
    }

    /** Device-time estimate for animating the countdown between events. */
    deviceNowMs(): number {
        if (this.wallAtLastEvent === 0) return this.state.lastEventMs;
        return this.state.lastEventMs + (this.wallClock() - this.wallAtLastEvent);
    }
}

export function connectController(wsUrl: string): { controller: Controller; connection: DeviceConnection } {
    let controller: Controller;
    const connection = new DeviceConnection(wsUrl, {
        onText: (text) => controller.handleText(text),
        onStatus: (status) => controller.handleStatus(status),
    });
    controller = new Controller(connection);
    connection.connect();
    return { controller, connection };
}
