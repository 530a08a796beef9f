// HTTP client for the engine API.
//
// Every data response carries an X-Tick header. A render cycle must show
// one engine tick only, so fetchSnapshot pulls all endpoints and retries
// when a tick boundary lands in the middle of the fetch set.

import {
    AdvisoryMsg,
    LayerImage,
    LayerName,
    PanelSnapshot,
    SituationMsg,
    StateMsg,
    UavStateMsg,
} from "./types.js";

export type FetchFn = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
    constructor(message: string, readonly status: number, readonly detail?: string) {
        super(message);
    }
}

const LAYER_NAMES: LayerName[] = ["reference", "obstacles", "composite"];

export class ApiClient {
    constructor(
        private readonly baseUrl: string,
        private readonly fetchFn: FetchFn = (url, init) => fetch(url, init),
    ) {}

    private async getJson<T>(path: string): Promise<{ body: T; tick: number }> {
        const resp = await this.fetchFn(`${this.baseUrl}${path}`);
        if (!resp.ok) {
            throw new ApiError(`GET ${path} failed: ${resp.status}`, resp.status);
        }
        const tick = Number(resp.headers.get("X-Tick") ?? "-1");
        return { body: (await resp.json()) as T, tick };
    }

    async getState(): Promise<StateMsg> {
        return (await this.getJson<StateMsg>("/state")).body;
    }

    async getSituation(): Promise<SituationMsg> {
        return (await this.getJson<SituationMsg>("/situation")).body;
    }

    async getAdvisory(): Promise<AdvisoryMsg> {
        return (await this.getJson<AdvisoryMsg>("/advisory")).body;
    }

    async getLayer(name: LayerName): Promise<LayerImage> {
        const resp = await this.fetchFn(`${this.baseUrl}/layers/${name}.png`);
        if (!resp.ok) {
            throw new ApiError(`layer ${name} unavailable: ${resp.status}`, resp.status);
        }
        const tick = Number(resp.headers.get("X-Tick") ?? "-1");
        return { name, tick, bytes: await resp.arrayBuffer() };
    }

    async postUav(payload: UavStateMsg): Promise<{ tick: number; level: string }> {
        const resp = await this.fetchFn(`${this.baseUrl}/uav`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(payload),
        });
        if (!resp.ok) {
            const detail = await resp.text();
            throw new ApiError(`POST /uav rejected: ${resp.status}`, resp.status, detail);
        }
        return (await resp.json()) as { tick: number; level: string };
    }

    async postConfig(patch: Record<string, unknown>): Promise<void> {
        const resp = await this.fetchFn(`${this.baseUrl}/config`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(patch),
        });
        if (!resp.ok) {
            const detail = await resp.text();
            throw new ApiError(`POST /config rejected: ${resp.status}`, resp.status, detail);
        }
    }

    /**
     * Assemble one single-tick snapshot. Retries a few times if the engine
     * ticked while the endpoints were being read; throws when the ticks
     * never settle (caller keeps its previous frame).
     */
    async fetchSnapshot(withLayers = true, attempts = 4): Promise<PanelSnapshot> {
        for (let attempt = 0; attempt < attempts; attempt++) {
            const [state, situation, advisory] = await Promise.all([
                this.getState(),
                this.getSituation(),
                this.getAdvisory(),
            ]);
            let layers: LayerImage[] = [];
            if (withLayers && state.tick > 0) {
                layers = await Promise.all(LAYER_NAMES.map((n) => this.getLayer(n)));
            }
            const ticks = [
                state.tick,
                situation.tick,
                advisory.tick,
                ...layers.map((l) => l.tick),
            ];
            if (ticks.every((t) => t === ticks[0])) {
                return { tick: state.tick, state, situation, advisory, layers };
            }
        }
        throw new ApiError("engine kept ticking during snapshot assembly", 0);
    }
}
