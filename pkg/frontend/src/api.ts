/**
 * Typed client for the audit session service.
 *
 * The service serialises non-finite log values as the JSON strings
 * "Infinity" / "-Infinity" / "NaN"; decode() turns them back into numbers
 * at the boundary so the rest of the app only sees `number`.
 */

export interface OrderStatus {
    order: number[];
    log_e: number;
    rejected: boolean;
    unrejectable: boolean;
}

export interface RequirementStatus {
    i: number;
    j: number;
    standing: number[];
    log_m: number;
}

export type Decision = 'ongoing' | 'certified' | 'full_count_needed';

export interface SessionStatus {
    session_id: string;
    t: number;
    decision: Decision;
    alpha: number;
    threshold_log: number;
    remaining: number;
    orders: OrderStatus[];
    requirements: RequirementStatus[];
    roster: string[];
    reported_winner: string;
    B: number;
    true_order: number[] | null;
}

export interface CreateSessionRequest {
    ballot_manifest: { roster: string[]; B: number };
    reported_winner: string;
    config?: {
        alpha?: number;
        scheme?: string;
        update_every?: number;
        eta0?: number;
        d?: number;
    };
}

export function decodeNumber(v: unknown): number {
    if (v === 'Infinity') return Infinity;
    if (v === '-Infinity') return -Infinity;
    if (v === 'NaN') return NaN;
    if (typeof v === 'number') return v;
    throw new Error(`expected a number, got ${JSON.stringify(v)}`);
}

export function decodeStatus(raw: any): SessionStatus {
    return {
        ...raw,
        threshold_log: decodeNumber(raw.threshold_log),
        orders: raw.orders.map((o: any) => ({ ...o, log_e: decodeNumber(o.log_e) })),
        requirements: raw.requirements.map((r: any) => ({
            ...r,
            log_m: decodeNumber(r.log_m),
        })),
    };
}

export class ApiError extends Error {
    constructor(readonly status: number, detail: string) {
        super(detail);
    }
}

async function request(base: string, path: string, init?: RequestInit): Promise<any> {
    const resp = await fetch(base + path, {
        headers: { 'content-type': 'application/json' },
        ...init,
    });
    const body = await resp.json();
    if (!resp.ok) {
        throw new ApiError(resp.status, body.detail ?? resp.statusText);
    }
    return body;
}

export class AuditApi {
    constructor(readonly base: string = '') {}

    async createSession(req: CreateSessionRequest): Promise<SessionStatus> {
        const body = await request(this.base, '/sessions', {
            method: 'POST',
            body: JSON.stringify(req),
        });
        return decodeStatus(body.status);
    }

    async getStatus(sessionId: string): Promise<SessionStatus> {
        return decodeStatus(await request(this.base, `/sessions/${sessionId}`));
    }

    async submitBallot(sessionId: string, ranking: string[]): Promise<SessionStatus> {
        return decodeStatus(
            await request(this.base, `/sessions/${sessionId}/ballots`, {
                method: 'POST',
                body: JSON.stringify({ ranking }),
            }),
        );
    }
}
