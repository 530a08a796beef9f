// Poll-cycle gate. Start begins the fixed-cadence cycle, Close stops it;
// while stopped, no requests leave the panel. At most one cycle runs at
// a time: a slow fetch never stacks behind the next interval tick.

export class Poller {
    private handle: ReturnType<typeof setInterval> | null = null;
    private inFlight = false;

    constructor(
        private readonly cycle: () => Promise<void>,
        private readonly periodMs = 1000,
    ) {}

    get running(): boolean {
        return this.handle !== null;
    }

    start(): void {
        if (this.handle !== null) {
            return;
        }
        this.handle = setInterval(() => void this.tick(), this.periodMs);
        void this.tick(); // immediate first cycle, then the cadence
    }

    stop(): void {
        if (this.handle !== null) {
            clearInterval(this.handle);
            this.handle = null;
        }
    }

    /** One cycle on demand (after a control submission). */
    async tick(): Promise<void> {
        if (this.inFlight || this.handle === null) {
            return;
        }
        this.inFlight = true;
        try {
            await this.cycle();
        } finally {
            this.inFlight = false;
        }
    }

    /** A cycle that runs even while polling is stopped (explicit refresh). */
    async forceTick(): Promise<void> {
        if (this.inFlight) {
            return;
        }
        this.inFlight = true;
        try {
            await this.cycle();
        } finally {
            this.inFlight = false;
        }
    }
}
