/**
 * Pure view functions: documents in, HTML strings out.
 *
 * Keeping rendering side-effect free means the views are unit-testable
 * without a DOM and the page always shows server truth (no optimistic UI).
 */

import type { AnswerDoc, MwpDoc, NotificationDoc, ProcedureDoc, StatusDoc } from './api.js';
import type { ConsoleSession } from './state.js';
import { approveEnabled, describeHealth, fmtMinutes } from './state.js';

export function esc(s: unknown): string {
  return String(s)
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export type DashboardTab = 'general' | 'live' | 'wear' | 'operations' | 'media';

export const DASHBOARD_TABS: { id: DashboardTab; label: string }[] = [
  { id: 'general', label: 'General info' },
  { id: 'live', label: 'Live values' },
  { id: 'wear', label: 'Most worn' },
  { id: 'operations', label: 'Critical operations' },
  { id: 'media', label: 'Media' },
];

export function renderError(message: string, correlationId = ''): string {
  const corr = correlationId
    ? ` <span class="corr">correlation ${esc(correlationId)}</span>` : '';
  return `<div class="error-box" role="alert">${esc(message)}${corr}</div>`;
}

export function renderDashboard(doc: StatusDoc, tab: DashboardTab): string {
  const health = describeHealth(doc.health);
  const tabs = DASHBOARD_TABS.map(({ id, label }) =>
    `<button class="tab${id === tab ? ' active' : ''}" data-tab="${id}">${esc(label)}</button>`,
  ).join('');
  return `
  <div class="dashboard" data-item="${esc(doc.item_id)}">
    <div class="dash-head">
      <h2>${esc(doc.name)} <span class="item-id">${esc(doc.item_id)}</span></h2>
      <span class="badge ${health.cls}">${health.label}</span>
    </div>
    ${doc.fault_hypotheses.length ? renderHypotheses(doc) : ''}
    <nav class="tabs">${tabs}</nav>
    <div class="tab-body">${renderTab(doc, tab)}</div>
  </div>`;
}

function renderHypotheses(doc: StatusDoc): string {
  const rows = doc.fault_hypotheses
    .map(([subject, kind, rule]) =>
      `<li>${esc(subject)} <span class="dim">(${esc(kind)}, rule ${esc(rule)})</span></li>`)
    .join('');
  return `<div class="hypotheses"><h3>Fault hypotheses</h3><ul>${rows}</ul></div>`;
}

function renderTab(doc: StatusDoc, tab: DashboardTab): string {
  switch (tab) {
    case 'general':
      return renderGeneral(doc);
    case 'live':
      return renderLive(doc);
    case 'wear':
      return renderWear(doc);
    case 'operations':
      return renderOperations(doc);
    case 'media':
      return renderMedia(doc);
  }
}

function renderGeneral(doc: StatusDoc): string {
  const attrs = Object.entries(doc.custom_attrs)
    .map(([name, a]) =>
      `<tr><td>${esc(name)}</td><td>${esc(a.kind)}</td><td>${esc(a.unit)}</td>` +
      `<td>${esc(a.stream ?? '—')}</td></tr>`)
    .join('');
  return `
    <p>${esc(doc.description)}</p>
    <p class="dim">category ${esc(doc.category)} · last update ${fmtMinutes(doc.last_update)}</p>
    <table><thead><tr><th>attribute</th><th>kind</th><th>unit</th><th>stream</th></tr></thead>
    <tbody>${attrs}</tbody></table>`;
}

function renderLive(doc: StatusDoc): string {
  const rows = Object.entries(doc.snapshot.values)
    .map(([name, v]) => {
      const num = typeof v === 'number' ? v.toFixed(3) : String(v);
      return `<tr><td>${esc(name)}</td><td class="num">${esc(num)}</td></tr>`;
    })
    .join('');
  return `
    <p class="dim">snapshot at ${fmtMinutes(doc.snapshot.timestamp)} (${esc(doc.snapshot.origin)})</p>
    <table><thead><tr><th>attribute</th><th>value</th></tr></thead><tbody>${rows}</tbody></table>
    <p class="dim">${doc.recent_history.length} recent snapshots held server-side</p>`;
}

function renderWear(doc: StatusDoc): string {
  if (!doc.most_worn) {
    return '<p class="dim">no wear model bound to this item</p>';
  }
  const pct = (doc.most_worn.wear * 100).toFixed(1);
  return `
    <p><strong>${esc(doc.most_worn.component)}</strong>
       <span class="dim">(${esc(doc.most_worn.category)})</span></p>
    <div class="wear-bar"><div class="wear-fill" style="width:${pct}%"></div></div>
    <p>${pct}% worn</p>`;
}

function renderOperations(doc: StatusDoc): string {
  if (!doc.scheduled_ops.length) {
    return '<p class="dim">no approved maintenance plan for this item</p>';
  }
  const rows = doc.scheduled_ops
    .map((op) =>
      `<tr><td>${esc(op.op_id)}</td><td>${esc(op.category)}</td>` +
      `<td class="num">${esc(op.duration)} min</td>` +
      `<td>${fmtMinutes(op.window[0])}</td></tr>`)
    .join('');
  return `<table><thead><tr><th>operation</th><th>category</th><th>duration</th><th>start</th></tr></thead>
    <tbody>${rows}</tbody></table>`;
}

function renderMedia(doc: StatusDoc): string {
  if (!doc.media.length) {
    return '<p class="dim">no media attached</p>';
  }
  const rows = doc.media
    .map((m) => `<li><span class="badge dim">${esc(m.kind)}</span> ` +
                `<a href="${esc(m.uri)}">${esc(m.uri)}</a> ${esc(m.caption)}</li>`)
    .join('');
  return `<ul class="media-list">${rows}</ul>`;
}

export function renderNotifications(feed: NotificationDoc[], unackedOnly: boolean): string {
  const shown = unackedOnly ? feed.filter((n) => !n.acknowledged) : feed;
  const rows = shown
    .slice()
    .reverse()
    .map((n) => {
      const ack = n.acknowledged
        ? '<span class="dim">acknowledged</span>'
        : `<button class="ack" data-note="${esc(n.id)}">acknowledge</button>`;
      return `<li class="note ${esc(n.severity)}${n.acknowledged ? ' done' : ''}">
        <span class="badge ${n.severity === 'alarm' ? 'bad' : 'warn'}">${esc(n.severity)}</span>
        ${esc(n.item_id)} · rule ${esc(n.rule)} · ${fmtMinutes(n.raised_at)} ${ack}</li>`;
    })
    .join('');
  return `
  <div class="notes">
    <label><input type="checkbox" id="unacked-only" ${unackedOnly ? 'checked' : ''}>
      unacknowledged only</label>
    <ul>${rows || '<li class="dim">no notifications</li>'}</ul>
  </div>`;
}

export function renderAnswer(a: AnswerDoc): string {
  const source = a.kind === 'document'
    ? `<p class="dim">from document ${esc(a.source)}
         (score ${a.hits.length ? a.hits[0][1].toFixed(3) : '—'})</p>`
    : '';
  return `
  <div class="answer ${a.kind}">
    <p>${esc(a.text)}</p>
    ${source}
    <p class="dim">confidence ${(a.confidence * 100).toFixed(0)}% ·
       ${(a.latency_s * 1000).toFixed(1)} ms</p>
  </div>`;
}

export function renderMwp(session: ConsoleSession, mwp: MwpDoc | null,
                          executed: boolean): string {
  if (!mwp) {
    return '<p class="dim">no plan generated yet</p>';
  }
  const conflicts = mwp.conflicts.length
    ? `<div class="conflicts"><h4>${mwp.conflicts.length} conflicts with the production schedule</h4>
       <ul>${mwp.conflicts.map((c) =>
         `<li>${esc(c.op_id)} at ${fmtMinutes(c.window[0])} vs order ${esc(c.busy[2] || '?')}</li>`,
       ).join('')}</ul></div>`
    : '<p class="ok-line">no conflicts: plan is feasible</p>';
  const canApprove = approveEnabled(session, mwp);
  const why = session.role !== 'manager'
    ? 'manager role required'
    : mwp.feasible ? '' : 'plan has conflicts';
  const entries = mwp.entries.slice(0, 12)
    .map((e) => `<tr><td>${esc(e.op_id)}</td><td>${esc(e.periodicity)}</td>
      <td class="num">${esc(e.duration)} min</td><td>${fmtMinutes(e.window[0])}</td></tr>`)
    .join('');
  return `
  <div class="mwp">
    <p>${mwp.entries.length} operations · ${esc(mwp.total_minutes)} min/year ·
       generated in ${(mwp.generation_time_min * 60000).toFixed(1)} ms</p>
    ${conflicts}
    <table><thead><tr><th>operation</th><th>periodicity</th><th>duration</th><th>start</th></tr></thead>
      <tbody>${entries}</tbody></table>
    ${mwp.entries.length > 12 ? `<p class="dim">… and ${mwp.entries.length - 12} more</p>` : ''}
    <button id="mwp-execute" ${canApprove && !executed ? '' : 'disabled'}
      title="${esc(why)}">approve &amp; execute</button>
    ${executed ? '<span class="ok-line">executed — wear reset, plan approved</span>' : ''}
    ${why && !executed ? `<span class="dim">${esc(why)}</span>` : ''}
  </div>`;
}

export function renderProcedure(proc: ProcedureDoc, done: boolean): string {
  const steps = proc.steps
    .map((s) => {
      const state = done || s.index < proc.cursor ? 'done'
        : s.index === proc.cursor ? 'current' : 'pending';
      const btn = state === 'current'
        ? `<button class="confirm" data-step="${s.index}"
             data-confirmation="${esc(s.expected_confirmation)}">confirm (${esc(s.expected_confirmation)})</button>`
        : '';
      return `<li class="step ${state}">${s.index + 1}. ${esc(s.instruction)} ${btn}</li>`;
    })
    .join('');
  return `
  <div class="procedure" data-task="${esc(proc.task)}">
    <h3>${esc(proc.task)} <span class="dim">on ${esc(proc.item_id)}</span></h3>
    <ol>${steps}</ol>
    ${done ? '<p class="ok-line">procedure complete — recorded in the item history</p>' : ''}
  </div>`;
}
