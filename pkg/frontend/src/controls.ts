// Form handling for the simulated-UAV controls.

import { UavStateMsg } from "./types.js";

/** Wrap any finite angle into [0, 360). */
export function normalizeHeading(raw: number): number {
    if (!Number.isFinite(raw)) {
        throw new Error(`heading must be finite, got ${raw}`);
    }
    const wrapped = raw % 360;
    return wrapped < 0 ? wrapped + 360 : wrapped;
}

export interface UavForm {
    lat: string;
    lon: string;
    height: string;
    heading: string;
    velocity: string;
}

export type FieldErrors = Partial<Record<keyof UavForm, string>>;

const BOUNDS: Record<keyof UavForm, [number, number]> = {
    lat: [-90, 90],
    lon: [-180, 180],
    height: [-500, 100000],
    heading: [-Infinity, Infinity], // normalized client-side before send
    velocity: [0, Infinity],
};

/** Validate the raw form; returns per-field messages, empty when clean. */
export function validateUavForm(form: UavForm): FieldErrors {
    const errors: FieldErrors = {};
    for (const key of Object.keys(BOUNDS) as (keyof UavForm)[]) {
        const text = form[key].trim();
        if (text === "") {
            errors[key] = "required";
            continue;
        }
        const value = Number(text);
        if (!Number.isFinite(value)) {
            errors[key] = "not a number";
            continue;
        }
        const [lo, hi] = BOUNDS[key];
        if (value < lo || value > hi) {
            errors[key] = `out of range [${lo}, ${hi}]`;
        }
    }
    return errors;
}

/** Build the POST /uav payload; heading is normalized here (400 -> 40). */
export function buildUavPayload(form: UavForm): UavStateMsg {
    const errors = validateUavForm(form);
    if (Object.keys(errors).length > 0) {
        throw new Error(`form has errors: ${JSON.stringify(errors)}`);
    }
    return {
        lat: Number(form.lat),
        lon: Number(form.lon),
        height_m: Number(form.height),
        heading_deg: normalizeHeading(Number(form.heading)),
        velocity_ms: Number(form.velocity),
    };
}
