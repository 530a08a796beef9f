// Right-column panels: advisory alert, UAV status, situation list.
//
// Aviation colour convention: white for information, yellow for caution,
// red for immediate action, all on a black background.

import { AdvisoryMsg, SituationEntryMsg, UavStateMsg } from "./types.js";

export interface AlertStyle {
    color: string;
    showStopSign: boolean;
}

export function alertStyle(level: AdvisoryMsg["level"]): AlertStyle {
    switch (level) {
        case "STOP":
            return { color: "#ff2020", showStopSign: true };
        case "CAUTION":
            return { color: "#ffd000", showStopSign: false };
        default:
            return { color: "#ffffff", showStopSign: false };
    }
}

export function renderAdvisoryPanel(container: HTMLElement, advisory: AdvisoryMsg): void {
    container.replaceChildren();
    const style = alertStyle(advisory.level);
    if (advisory.level === "NONE") {
        return; // nominal: the alert region stays empty
    }
    if (style.showStopSign) {
        const sign = document.createElement("div");
        sign.className = "stop-sign";
        sign.style.color = style.color;
        sign.textContent = "STOP";
        container.appendChild(sign);
    }
    for (const message of advisory.messages) {
        const line = document.createElement("div");
        line.className = "advisory-message";
        line.style.color = style.color;
        line.textContent = message;
        container.appendChild(line);
    }
    if (advisory.eta_s !== null) {
        const eta = document.createElement("div");
        eta.className = "advisory-eta";
        eta.style.color = style.color;
        eta.textContent = `ETA ${advisory.eta_s.toFixed(1)} s`;
        container.appendChild(eta);
    }
}

export function renderStatusPanel(
    container: HTMLElement,
    uav: UavStateMsg | null,
    tick: number,
): void {
    container.replaceChildren();
    const rows: [string, string][] = uav
        ? [
              ["Tick", String(tick)],
              ["Lat", uav.lat.toFixed(6)],
              ["Lon", uav.lon.toFixed(6)],
              ["Height", `${uav.height_m.toFixed(1)} m`],
              ["Heading", `${uav.heading_deg.toFixed(1)}°`],
              ["Speed", `${uav.velocity_ms.toFixed(1)} m/s`],
          ]
        : [["Tick", "-"]];
    for (const [label, value] of rows) {
        const row = document.createElement("div");
        row.className = "status-row";
        const key = document.createElement("span");
        key.textContent = label;
        const val = document.createElement("span");
        val.className = "status-value";
        val.textContent = value;
        row.append(key, val);
        container.appendChild(row);
    }
}

export function renderSituationList(
    container: HTMLElement,
    entries: SituationEntryMsg[],
): void {
    container.replaceChildren();
    for (const entry of entries) {
        const row = document.createElement("div");
        row.className = "situation-row";
        row.textContent =
            `${entry.osm_id}  ${entry.bearing_deg.toFixed(1)}°  ` +
            `${entry.distance_m.toFixed(1)} m`;
        container.appendChild(row);
    }
}
