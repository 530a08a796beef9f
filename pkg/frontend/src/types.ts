// Wire types for the engine's HTTP API.

export interface UavStateMsg {
    lat: number;
    lon: number;
    height_m: number;
    heading_deg: number;
    velocity_ms: number;
    last_update?: string;
}

export interface StateMsg {
    uav: UavStateMsg | null;
    tick: number;
    config: ConfigMsg;
}

export interface ConfigMsg {
    buffer_radius_deg: number;
    obstacle_categories: string[];
    cone_half_angle_deg: number;
    raster_px: number;
    [key: string]: unknown;
}

export interface SituationEntryMsg {
    osm_id: number;
    distance_m: number;
    bearing_deg: number;
}

export interface SituationMsg {
    tick: number;
    entries: SituationEntryMsg[];
}

export type AdvisoryLevel = "NONE" | "CAUTION" | "STOP";

export interface AdvisoryMsg {
    tick: number;
    level: AdvisoryLevel;
    messages: string[];
    eta_s: number | null;
    alert_event: boolean;
}

export type LayerName = "reference" | "obstacles" | "composite";

export interface LayerImage {
    name: LayerName;
    tick: number;
    bytes: ArrayBuffer;
}

/** Everything one render cycle needs, all taken from the same engine tick. */
export interface PanelSnapshot {
    tick: number;
    state: StateMsg;
    situation: SituationMsg;
    advisory: AdvisoryMsg;
    layers: LayerImage[];
}
