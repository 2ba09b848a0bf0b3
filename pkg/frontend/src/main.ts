/**
 * Console bootstrap: wires the DOM to the typed API client.
 *
 * All domain state lives on the server; this file only tracks the session
 * (role, focused item, notification cursor), the latest fetched documents,
 * and which dashboard tab is open. Reloading the page and focusing the same
 * item reproduces the identical view from API state alone.
 */

import { ApiClient, ApiError } from './api.js';
import type { AnswerDoc, MwpDoc, NotificationDoc, ProcedureDoc, StatusDoc } from './api.js';
import {
  ConsoleSession, POLL_INTERVAL_MS, Role, mergeNotifications, newSession,
  parseQrPayload,
} from './state.js';
import {
  DashboardTab, renderAnswer, renderDashboard, renderError, renderMwp,
  renderNotifications, renderProcedure,
} from './render.js';

const api = new ApiClient('');

let session: ConsoleSession = newSession('operator');
let tab: DashboardTab = 'general';
let status: StatusDoc | null = null;
let feed: NotificationDoc[] = [];
let unackedOnly = false;
let mwp: MwpDoc | null = null;
let mwpExecuted = false;
let answer: AnswerDoc | null = null;
let procedure: ProcedureDoc | null = null;
let procedureDone = false;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function showError(target: string, err: unknown): void {
  if (err instanceof ApiError) {
    el(target).innerHTML = renderError(err.message, err.correlationId);
  } else {
    el(target).innerHTML = renderError(String(err));
  }
}

function paintDashboard(): void {
  el('dashboard').innerHTML = status
    ? renderDashboard(status, tab)
    : '<p class="dim">scan or type a QR payload to focus an item</p>';
}

function paintNotifications(): void {
  el('notifications').innerHTML = renderNotifications(feed, unackedOnly);
}

function paintMwp(): void {
  el('mwp').innerHTML = renderMwp(session, mwp, mwpExecuted);
}

async function focusItem(itemId: string): Promise<void> {
  try {
    status = await api.getStatus(itemId);
    session.focusedItem = itemId;
    el('lookup-error').innerHTML = '';
    paintDashboard();
  } catch (err) {
    showError('lookup-error', err);
  }
}

async function poll(): Promise<void> {
  try {
    const page = await api.listNotifications(session.notificationCursor);
    const merged = mergeNotifications(feed, page.notifications);
    feed = merged.feed;
    session.notificationCursor = merged.cursor;
    paintNotifications();
    if (session.focusedItem) {
      status = await api.getStatus(session.focusedItem);
      paintDashboard();
    }
  } catch (err) {
    showError('poll-error', err);
  }
}

function wireEvents(): void {
  el('lookup-form').addEventListener('submit', (ev) => {
    ev.preventDefault();
    const input = el('qr-input') as HTMLInputElement;
    const parsed = parseQrPayload(input.value);
    if (!parsed.ok) {
      el('lookup-error').innerHTML = renderError(parsed.reason);
      return;
    }
    void focusItem(parsed.itemId);
  });

  el('role-select').addEventListener('change', (ev) => {
    const role = (ev.target as HTMLSelectElement).value as Role;
    session = { ...session, role };
    paintMwp();
  });

  el('dashboard').addEventListener('click', (ev) => {
    const t = (ev.target as HTMLElement).closest<HTMLElement>('[data-tab]');
    if (t) {
      tab = t.dataset.tab as DashboardTab;
      paintDashboard();
    }
  });

  el('notifications').addEventListener('click', (ev) => {
    const target = ev.target as HTMLElement;
    if (target.id === 'unacked-only') {
      unackedOnly = (target as HTMLInputElement).checked;
      paintNotifications();
      return;
    }
    const btn = target.closest<HTMLElement>('button.ack');
    if (btn && btn.dataset.note) {
      api.acknowledge(btn.dataset.note)
        .then(() => poll())
        .catch((err) => showError('poll-error', err));
    }
  });

  el('ask-form').addEventListener('submit', (ev) => {
    ev.preventDefault();
    const input = el('ask-input') as HTMLInputElement;
    const question = input.value.trim();
    if (!question) return;
    api.ask(question)
      .then((a) => {
        answer = a;
        el('answer').innerHTML = renderAnswer(answer);
      })
      .catch((err) => showError('answer', err));
  });

  el('mwp-generate').addEventListener('click', () => {
    if (!session.focusedItem) {
      el('mwp').innerHTML = renderError('focus a machine first');
      return;
    }
    mwpExecuted = false;
    api.generateMwp(session.focusedItem)
      .then((doc) => {
        mwp = doc;
        paintMwp();
      })
      .catch((err) => showError('mwp', err));
  });

  el('mwp').addEventListener('click', (ev) => {
    const target = ev.target as HTMLElement;
    if (target.id !== 'mwp-execute' || !mwp) return;
    api.executeMwp(mwp.machine)
      .then(() => {
        mwpExecuted = true;
        paintMwp();
        if (session.focusedItem) void focusItem(session.focusedItem);
      })
      .catch((err) => showError('mwp', err));
  });

  el('tutor-form').addEventListener('submit', (ev) => {
    ev.preventDefault();
    if (!session.focusedItem) {
      el('procedure').innerHTML = renderError('focus an item first');
      return;
    }
    const task = (el('tutor-task') as HTMLInputElement).value.trim();
    if (!task) return;
    procedureDone = false;
    api.getProcedure(session.focusedItem, task)
      .then((proc) => {
        procedure = proc;
        el('procedure').innerHTML = renderProcedure(procedure, procedureDone);
      })
      .catch((err) => showError('procedure', err));
  });

  el('procedure').addEventListener('click', (ev) => {
    const btn = (ev.target as HTMLElement).closest<HTMLElement>('button.confirm');
    if (!btn || !procedure) return;
    const step = Number(btn.dataset.step);
    const confirmation = btn.dataset.confirmation ?? 'ok';
    api.confirmStep(procedure.item_id, procedure.task, step, confirmation)
      .then((result) => {
        if (procedure) procedure.cursor = result.cursor;
        procedureDone = result.done;
        el('procedure').innerHTML = renderProcedure(procedure!, procedureDone);
      })
      .catch((err) => showError('procedure', err));
  });
}

function start(): void {
  wireEvents();
  paintDashboard();
  paintNotifications();
  paintMwp();
  void poll();
  window.setInterval(() => void poll(), POLL_INTERVAL_MS);
}

document.addEventListener('DOMContentLoaded', start);
