/**
 * Typed client for the audit session service.
 *
 * The service serialises non-finite log values as the JSON strings
 * "Infinity" / "-Infinity" / "NaN"; decode() turns them back into numbers
 * at the boundary so the rest of the app only sees `number`.
 */
export function decodeNumber(v) {
    if (v === 'Infinity')
        return Infinity;
    if (v === '-Infinity')
        return -Infinity;
    if (v === 'NaN')
        return NaN;
    if (typeof v === 'number')
        return v;
    throw new Error(`expected a number, got ${JSON.stringify(v)}`);
}
export function decodeStatus(raw) {
    return {
        ...raw,
        threshold_log: decodeNumber(raw.threshold_log),
        orders: raw.orders.map((o) => ({ ...o, log_e: decodeNumber(o.log_e) })),
        requirements: raw.requirements.map((r) => ({
            ...r,
            log_m: decodeNumber(r.log_m),
        })),
    };
}
export class ApiError extends Error {
    status;
    constructor(status, detail) {
        super(detail);
        this.status = status;
    }
}
async function request(base, path, init) {
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
    base;
    constructor(base = '') {
        this.base = base;
    }
    async createSession(req) {
        const body = await request(this.base, '/sessions', {
            method: 'POST',
            body: JSON.stringify(req),
        });
        return decodeStatus(body.status);
    }
    async getStatus(sessionId) {
        return decodeStatus(await request(this.base, `/sessions/${sessionId}`));
    }
    async submitBallot(sessionId, ranking) {
        return decodeStatus(await request(this.base, `/sessions/${sessionId}/ballots`, {
            method: 'POST',
            body: JSON.stringify({ ranking }),
        }));
    }
}
