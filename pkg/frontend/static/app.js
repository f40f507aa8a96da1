/**
 * Thin DOM layer: session setup form, ballot entry, and a poll-driven
 * dashboard.  All state transitions flow through server responses; the page
 * renders exactly what the last accepted SessionStatus snapshot says.
 */
import { AuditApi, ApiError } from './api.js';
import { acceptSnapshot, buildView, parseRankingText, validateRanking, } from './model.js';
const POLL_MS = 2000;
const api = new AuditApi('');
let current = null;
let pollTimer;
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing element #${id}`);
    return node;
}
function showError(message) {
    const box = el('error-box');
    box.textContent = message;
    box.hidden = message === '';
}
function applySnapshot(next) {
    if (!acceptSnapshot(current, next))
        return; // stale response; keep ours
    current = next;
    render();
}
function render() {
    if (current === null)
        return;
    const view = buildView(current);
    el('setup-panel').hidden = true;
    el('dashboard').hidden = false;
    const banner = el('banner');
    banner.textContent = view.banner;
    banner.className = `banner banner-${view.bannerKind}`;
    el('progress-count').textContent =
        `${view.t} / ${view.total} ballots`;
    if (view.trueOrder !== null) {
        el('true-order').textContent =
            `Full-count elimination order: ${view.trueOrder}`;
    }
    const tbody = el('order-rows');
    tbody.replaceChildren(...view.rows.map((row) => {
        const tr = document.createElement('tr');
        tr.className = row.rejected ? 'rejected' : 'standing';
        const label = document.createElement('td');
        label.textContent = row.label;
        const bar = document.createElement('td');
        const outer = document.createElement('div');
        outer.className = 'bar';
        const inner = document.createElement('div');
        inner.className = 'bar-fill';
        inner.style.width = `${(row.progress * 100).toFixed(1)}%`;
        outer.appendChild(inner);
        bar.appendChild(outer);
        const state = document.createElement('td');
        state.textContent = row.rejected
            ? 'rejected'
            : row.unrejectable
                ? 'needs full count'
                : row.logE.toFixed(3);
        tr.append(label, bar, state);
        return tr;
    }));
    const done = view.decision !== 'ongoing';
    el('ballot-fieldset').disabled = done;
    if (done && pollTimer !== undefined) {
        window.clearInterval(pollTimer);
        pollTimer = undefined;
    }
}
async function poll() {
    if (current === null)
        return;
    try {
        applySnapshot(await api.getStatus(current.session_id));
    }
    catch {
        // transient poll failures are fine; the next tick retries
    }
}
async function onCreate(event) {
    event.preventDefault();
    showError('');
    const roster = el('roster')
        .value.split(',')
        .map((s) => s.trim())
        .filter((s) => s.length > 0);
    const winner = el('winner').value.trim();
    const total = Number(el('total').value);
    const alpha = Number(el('alpha').value);
    if (roster.length < 2)
        return showError('need at least two candidates');
    if (!roster.includes(winner))
        return showError('reported winner must be in the roster');
    try {
        applySnapshot(await api.createSession({
            ballot_manifest: { roster, B: total },
            reported_winner: winner,
            config: { alpha },
        }));
        pollTimer = window.setInterval(poll, POLL_MS);
    }
    catch (err) {
        showError(err instanceof ApiError ? err.message : String(err));
    }
}
async function onSubmitBallot(event) {
    event.preventDefault();
    if (current === null)
        return;
    showError('');
    const input = el('ranking');
    const ranking = parseRankingText(input.value);
    const problem = validateRanking(ranking, current.roster);
    if (problem !== null)
        return showError(problem);
    try {
        applySnapshot(await api.submitBallot(current.session_id, ranking));
        input.value = '';
        input.focus();
    }
    catch (err) {
        showError(err instanceof ApiError ? err.message : String(err));
    }
}
export function init() {
    el('setup-form').addEventListener('submit', onCreate);
    el('ballot-form').addEventListener('submit', onSubmitBallot);
}
if (typeof document !== 'undefined' && document.getElementById('setup-form')) {
    init();
}
