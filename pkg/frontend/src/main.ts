// Panel wiring: 600x480 map viewport on the left, advisory / status /
// settings column on the right, Start and Close gating the poll loop.

import { ApiClient, ApiError } from "./api.js";
import { buildUavPayload, UavForm, validateUavForm } from "./controls.js";
import { MapView } from "./mapview.js";
import { renderAdvisoryPanel, renderSituationList, renderStatusPanel } from "./panels.js";
import { Poller } from "./poller.js";
import { PanelSnapshot } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) {
        throw new Error(`missing element #${id}`);
    }
    return node as T;
}

async function layerBitmap(bytes: ArrayBuffer): Promise<ImageBitmap> {
    return createImageBitmap(new Blob([bytes], { type: "image/png" }));
}

export function startApp(baseUrl: string): void {
    const api = new ApiClient(baseUrl);
    const canvas = el<HTMLCanvasElement>("map-canvas");
    const ctx = canvas.getContext("2d");
    if (!ctx) {
        throw new Error("canvas 2d context unavailable");
    }
    const view = new MapView(ctx, canvas.width, canvas.height, el("stale-banner"));
    const advisoryBox = el("advisory-box");
    const statusBox = el("status-box");
    const situationBox = el("situation-box");
    const formError = el("form-error");

    async function cycle(): Promise<void> {
        let snapshot: PanelSnapshot;
        try {
            snapshot = await api.fetchSnapshot();
        } catch {
            view.markStale();
            return;
        }
        renderAdvisoryPanel(advisoryBox, snapshot.advisory);
        renderStatusPanel(statusBox, snapshot.state.uav, snapshot.tick);
        renderSituationList(situationBox, snapshot.situation.entries);
        if (snapshot.layers.length > 0) {
            const byName = new Map(snapshot.layers.map((l) => [l.name, l.bytes]));
            const [reference, obstacles] = await Promise.all([
                layerBitmap(byName.get("reference")!),
                layerBitmap(byName.get("obstacles")!),
            ]);
            view.drawFrame(reference, obstacles);
        }
    }

    const poller = new Poller(cycle, 1000);

    el("start-button").addEventListener("click", () => {
        poller.start();
        el("start-button").classList.add("active");
    });
    el("close-button").addEventListener("click", () => {
        poller.stop();
        el("start-button").classList.remove("active");
    });

    el<HTMLFormElement>("uav-form").addEventListener("submit", (event) => {
        event.preventDefault();
        void (async () => {
            const form: UavForm = {
                lat: el<HTMLInputElement>("field-lat").value,
                lon: el<HTMLInputElement>("field-lon").value,
                height: el<HTMLInputElement>("field-height").value,
                heading: el<HTMLInputElement>("field-heading").value,
                velocity: el<HTMLInputElement>("field-velocity").value,
            };
            const errors = validateUavForm(form);
            if (Object.keys(errors).length > 0) {
                formError.textContent = Object.entries(errors)
                    .map(([field, message]) => `${field}: ${message}`)
                    .join("; ");
                return;
            }
            formError.textContent = "";
            try {
                await api.postUav(buildUavPayload(form));
            } catch (error) {
                formError.textContent =
                    error instanceof ApiError ? error.detail ?? error.message : String(error);
                return;
            }
            await poller.forceTick(); // reflect the new tick without waiting a period
        })();
    });

    el<HTMLFormElement>("settings-form").addEventListener("submit", (event) => {
        event.preventDefault();
        void (async () => {
            const radius = el<HTMLInputElement>("field-radius").value.trim();
            if (radius === "") {
                return;
            }
            try {
                await api.postConfig({ buffer_radius_deg: Number(radius) });
                await poller.forceTick();
            } catch (error) {
                formError.textContent = error instanceof Error ? error.message : String(error);
            }
        })();
    });
}

declare global {
    interface Window {
        UAVFENCE_API?: string;
    }
}

if (typeof document !== "undefined" && document.getElementById("map-canvas")) {
    startApp(window.UAVFENCE_API ?? "http://127.0.0.1:8750");
}
