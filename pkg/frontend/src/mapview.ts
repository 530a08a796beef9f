// The 600x480 map viewport: layer images composited onto a canvas,
// reference under obstacles under the UAV marker.
//
// Layer rasters are square and centered on the UAV, so the marker always
// sits at the center of the drawn square.

export interface Rect {
    x: number;
    y: number;
    size: number;
}

/** Largest centered square that fits the viewport; preserves layer aspect. */
export function fitSquare(viewWidth: number, viewHeight: number): Rect {
    const size = Math.min(viewWidth, viewHeight);
    return { x: (viewWidth - size) / 2, y: (viewHeight - size) / 2, size };
}

/** The 2D-context subset the view needs; tests inject a recording fake. */
export interface DrawContext {
    fillStyle: string | CanvasGradient | CanvasPattern;
    fillRect(x: number, y: number, w: number, h: number): void;
    drawImage(image: CanvasImageSource, x: number, y: number, w: number, h: number): void;
    beginPath(): void;
    arc(x: number, y: number, r: number, a0: number, a1: number): void;
    fill(): void;
}

export class MapView {
    private staleSince: number | null = null;

    constructor(
        private readonly ctx: DrawContext,
        private readonly width = 600,
        private readonly height = 480,
        private readonly banner?: HTMLElement,
    ) {}

    /** Draw one consistent frame: reference, obstacles, then the marker. */
    drawFrame(reference: CanvasImageSource | null, obstacles: CanvasImageSource | null): void {
        const rect = fitSquare(this.width, this.height);
        this.ctx.fillStyle = "#000000";
        this.ctx.fillRect(0, 0, this.width, this.height);
        if (reference) {
            this.ctx.drawImage(reference, rect.x, rect.y, rect.size, rect.size);
        }
        if (obstacles) {
            this.ctx.drawImage(obstacles, rect.x, rect.y, rect.size, rect.size);
        }
        this.ctx.fillStyle = "#ff9500";
        this.ctx.beginPath();
        this.ctx.arc(rect.x + rect.size / 2, rect.y + rect.size / 2, rect.size * 0.012, 0, 2 * Math.PI);
        this.ctx.fill();
        this.setStale(false);
    }

    /** Fetch failed: keep the last frame, surface a stale-data banner. */
    markStale(): void {
        this.setStale(true);
    }

    get isStale(): boolean {
        return this.staleSince !== null;
    }

    private setStale(stale: boolean): void {
        this.staleSince = stale ? Date.now() : null;
        if (this.banner) {
            this.banner.style.display = stale ? "block" : "none";
        }
    }
}
