/**
 * Pure view-model for the audit dashboard.
 *
 * Everything here is derived from server-confirmed SessionStatus snapshots;
 * the model never invents a decision or a rejection on its own, and it
 * refuses to apply a snapshot that would roll a rejection back (the audit's
 * rejections are monotone, so a regression means stale or corrupt data).
 */

import type { SessionStatus, OrderStatus } from './api.js';

export interface OrderRow {
    label: string;
    logE: number;
    /** progress toward the rejection threshold, clamped to [0, 1] */
    progress: number;
    rejected: boolean;
    unrejectable: boolean;
}

export interface DashboardView {
    t: number;
    total: number;
    decision: SessionStatus['decision'];
    banner: string;
    bannerKind: 'ongoing' | 'certified' | 'full-count';
    remaining: number;
    rows: OrderRow[];
    trueOrder: string | null;
}

export function orderLabel(order: number[], roster: string[]): string {
    return order.map((c) => roster[c] ?? `#${c}`).join(' → ');
}

function progressToward(logE: number, threshold: number): number {
    if (logE === Infinity) return 1;
    if (!isFinite(threshold) || threshold <= 0) return 0;
    return Math.min(1, Math.max(0, logE / threshold));
}

export function toRow(o: OrderStatus, threshold: number, roster: string[]): OrderRow {
    return {
        label: orderLabel(o.order, roster),
        logE: o.log_e,
        progress: o.rejected ? 1 : progressToward(o.log_e, threshold),
        rejected: o.rejected,
        unrejectable: o.unrejectable,
    };
}

export function buildView(status: SessionStatus): DashboardView {
    const rows = status.orders.map((o) =>
        toRow(o, status.threshold_log, status.roster),
    );
    let banner: string;
    let bannerKind: DashboardView['bannerKind'];
    switch (status.decision) {
        case 'certified':
            banner = `Outcome certified: ${status.reported_winner} confirmed after ${status.t} ballots`;
            bannerKind = 'certified';
            break;
        case 'full_count_needed':
            banner = 'Full hand count needed: the sample was exhausted without certifying';
            bannerKind = 'full-count';
            break;
        default:
            banner = `Auditing: ${status.remaining} of ${rows.length} alternative orders still standing`;
            bannerKind = 'ongoing';
    }
    return {
        t: status.t,
        total: status.B,
        decision: status.decision,
        banner,
        bannerKind,
        remaining: status.remaining,
        rows,
        trueOrder:
            status.true_order === null
                ? null
                : orderLabel(status.true_order, status.roster),
    };
}

/** Reject snapshots that contradict monotone audit progress. */
export function acceptSnapshot(
    prev: SessionStatus | null,
    next: SessionStatus,
): boolean {
    if (prev === null) return true;
    if (next.t < prev.t) return false;
    if (prev.decision !== 'ongoing' && next.decision !== prev.decision) return false;
    return next.orders.every(
        (o, k) => o.rejected || !prev.orders[k]?.rejected,
    );
}

/**
 * Validate a ballot entry before submission: every name must be a distinct
 * roster member.  Returns an error message or null when the ranking is fine
 * (an empty ranking is a valid blank ballot).
 */
export function validateRanking(ranking: string[], roster: string[]): string | null {
    const seen = new Set<string>();
    for (const name of ranking) {
        if (!roster.includes(name)) return `unknown candidate: ${name}`;
        if (seen.has(name)) return `duplicate candidate: ${name}`;
        seen.add(name);
    }
    return null;
}

/** Parse a typed ranking like "Alice > Bob" into candidate names. */
export function parseRankingText(text: string): string[] {
    return text
        .split('>')
        .map((s) => s.trim())
        .filter((s) => s.length > 0);
}
