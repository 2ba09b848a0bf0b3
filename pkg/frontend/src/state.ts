/**
 * Console session state and the pure transition helpers.
 *
 * The console is stateless with respect to domain data: everything rendered
 * comes from the API on each poll, so a reload reproduces the same view. The
 * only client-side state is the session itself (role, focused item,
 * notification cursor) plus the latest fetched documents.
 */

import type { MwpDoc, NotificationDoc } from './api.js';

export type Role = 'operator' | 'manager';

export interface ConsoleSession {
  role: Role;
  focusedItem: string | null;
  /** newest raised_at already seen; the poll asks for anything >= cursor */
  notificationCursor: number;
}

export const QR_PREFIX = 'twin://item/';

export function newSession(role: Role): ConsoleSession {
  return { role, focusedItem: null, notificationCursor: 0 };
}

/** Parse a QR payload into an item id, or explain why it is malformed. */
export function parseQrPayload(payload: string): { ok: true; itemId: string } | { ok: false; reason: string } {
  const trimmed = payload.trim();
  if (trimmed === '') {
    return { ok: false, reason: 'empty payload' };
  }
  if (!trimmed.startsWith(QR_PREFIX)) {
    // bare ids are accepted too: the field doubles as a manual lookup box
    if (/^[0-9A-Za-z_-]+$/.test(trimmed)) {
      return { ok: true, itemId: trimmed };
    }
    return { ok: false, reason: `not a twin item payload (expected ${QR_PREFIX}<id>)` };
  }
  const itemId = trimmed.slice(QR_PREFIX.length);
  if (itemId === '') {
    return { ok: false, reason: 'empty item id in payload' };
  }
  return { ok: true, itemId };
}

/** Manager-only actions: MWP approval/execution and scenario changes. */
export function canApproveMwp(session: ConsoleSession): boolean {
  return session.role === 'manager';
}

/** Approve is offered only to managers and only for conflict-free plans. */
export function approveEnabled(session: ConsoleSession, mwp: MwpDoc | null): boolean {
  return canApproveMwp(session) && mwp !== null && mwp.feasible;
}

/**
 * Merge a freshly polled notification page into the known feed.
 * Known ids are replaced (ack state may have changed); new ones appended.
 * Returns the merged feed sorted by (raised_at, id) and the next cursor.
 */
export function mergeNotifications(
  known: NotificationDoc[],
  polled: NotificationDoc[],
): { feed: NotificationDoc[]; cursor: number } {
  const byId = new Map(known.map((n) => [n.id, n]));
  for (const n of polled) {
    byId.set(n.id, n);
  }
  const feed = [...byId.values()].sort((a, b) =>
    a.raised_at - b.raised_at || a.id.localeCompare(b.id));
  const cursor = feed.length ? feed[feed.length - 1].raised_at : 0;
  return { feed, cursor };
}

export function unacknowledged(feed: NotificationDoc[]): NotificationDoc[] {
  return feed.filter((n) => !n.acknowledged);
}

/** Poll interval: the responsiveness budget is 2 s end to end. */
export const POLL_INTERVAL_MS = 2000;

export function describeHealth(health: string): { label: string; cls: string } {
  switch (health) {
    case 'nominal':
      return { label: 'NOMINAL', cls: 'ok' };
    case 'warning':
      return { label: 'WARNING', cls: 'warn' };
    case 'fault':
      return { label: 'FAULT', cls: 'bad' };
    default:
      return { label: health.toUpperCase(), cls: 'warn' };
  }
}

/** Minutes-from-epoch pretty printer for plan windows and timestamps. */
export function fmtMinutes(m: number): string {
  const day = Math.floor(m / 1440);
  const rem = m - day * 1440;
  const h = Math.floor(rem / 60);
  const min = Math.round(rem - h * 60);
  return `d${day} ${String(h).padStart(2, '0')}:${String(min).padStart(2, '0')}`;
}
