import { describe, expect, it } from 'vitest';

import type { AnswerDoc, ProcedureDoc } from '../src/api.js';
import {
  esc, renderAnswer, renderDashboard, renderError, renderMwp,
  renderNotifications, renderProcedure,
} from '../src/render.js';
import { newSession } from '../src/state.js';
import { sampleMwp, sampleNote, sampleStatus } from './helpers.js';

describe('renderDashboard', () => {
  it('shows the health badge and marks the active tab', () => {
    const html = renderDashboard(sampleStatus(), 'general');
    expect(html).toContain('badge ok');
    expect(html).toContain('NOMINAL');
    expect(html).toContain('class="tab active" data-tab="general"');
    expect(html).toContain('Cold-rolling finishing line');
  });

  it('lists fault hypotheses when the item is unhealthy', () => {
    const html = renderDashboard(sampleStatus({
      health: 'fault',
      fault_hypotheses: [['T1', 'band', 'upper-band']],
    }), 'general');
    expect(html).toContain('badge bad');
    expect(html).toContain('Fault hypotheses');
    expect(html).toContain('rule upper-band');
  });

  it('renders live values from the snapshot only', () => {
    const html = renderDashboard(sampleStatus(), 'live');
    expect(html).toContain('95.203');
    expect(html).toContain('1 recent snapshots held server-side');
  });

  it('renders the wear bar from the server-reported fraction', () => {
    const html = renderDashboard(sampleStatus(), 'wear');
    expect(html).toContain('bearing');
    expect(html).toContain('width:42.0%');
    const none = renderDashboard(sampleStatus({ most_worn: null }), 'wear');
    expect(none).toContain('no wear model');
  });

  it('escapes HTML coming from the server', () => {
    const html = renderDashboard(
      sampleStatus({ name: '<script>alert(1)</script>' }), 'general');
    expect(html).not.toContain('<script>');
    expect(html).toContain('&lt;script&gt;');
  });
});

describe('renderNotifications', () => {
  it('offers an ack button only for unacknowledged entries', () => {
    const html = renderNotifications(
      [sampleNote('n-1', 1, { acknowledged: true }), sampleNote('n-2', 2)], false);
    expect(html).toContain('data-note="n-2"');
    expect(html).not.toContain('data-note="n-1"');
    expect(html).toContain('acknowledged');
  });

  it('hides acknowledged entries in the filtered view', () => {
    const html = renderNotifications(
      [sampleNote('n-1', 1, { acknowledged: true }), sampleNote('n-2', 2)], true);
    expect(html).not.toContain('n-1');
    expect(html).toContain('data-note="n-2"');
  });
});

describe('renderMwp', () => {
  it('enables approve only for a manager with a feasible plan', () => {
    const manager = renderMwp(newSession('manager'), sampleMwp(), false);
    expect(manager).toContain('<button id="mwp-execute" ');
    expect(manager).not.toContain('id="mwp-execute" disabled');

    const operator = renderMwp(newSession('operator'), sampleMwp(), false);
    expect(operator).toContain('id="mwp-execute" disabled');
    expect(operator).toContain('manager role required');
  });

  it('lists conflicts and disables approve for infeasible plans', () => {
    const conflicted = sampleMwp({
      feasible: false,
      conflicts: [{ op_id: 'lube-01', window: [100, 130], busy: [90, 200, 'ORD-7'] }],
    });
    const html = renderMwp(newSession('manager'), conflicted, false);
    expect(html).toContain('1 conflicts with the production schedule');
    expect(html).toContain('ORD-7');
    expect(html).toContain('id="mwp-execute" disabled');
    expect(html).toContain('plan has conflicts');
  });

  it('reports execution without re-enabling the button', () => {
    const html = renderMwp(newSession('manager'), sampleMwp(), true);
    expect(html).toContain('executed — wear reset, plan approved');
    expect(html).toContain('id="mwp-execute" disabled');
  });
});

describe('renderAnswer', () => {
  it('shows direct answers with confidence and latency', () => {
    const a: AnswerDoc = { kind: 'direct', text: 'health is nominal',
                           confidence: 0.9, latency_s: 0.0006, hits: [], source: '' };
    const html = renderAnswer(a);
    expect(html).toContain('health is nominal');
    expect(html).toContain('confidence 90%');
    expect(html).toContain('0.6 ms');
  });

  it('cites the source document for retrieval answers', () => {
    const a: AnswerDoc = { kind: 'document', text: 'scan the code...',
                           confidence: 0.6, latency_s: 0.001,
                           hits: [['qr-howto', 0.4213]], source: 'qr-howto' };
    expect(renderAnswer(a)).toContain('from document qr-howto');
  });
});

describe('renderProcedure', () => {
  const proc: ProcedureDoc = {
    item_id: '000X',
    task: 'replace-safety-switch',
    steps: [
      { index: 0, instruction: 'isolate power', expected_confirmation: 'ok' },
      { index: 1, instruction: 'open guard', expected_confirmation: 'ok' },
      { index: 2, instruction: 'swap part', expected_confirmation: 'done-swap' },
    ],
    cursor: 1,
  };

  it('marks done, current, and pending steps from the server cursor', () => {
    const html = renderProcedure(proc, false);
    expect(html).toContain('step done">1. isolate power');
    expect(html).toContain('step current">2. open guard');
    expect(html).toContain('step pending">3. swap part');
  });

  it('puts the expected confirmation on the current step button', () => {
    const html = renderProcedure({ ...proc, cursor: 2 }, false);
    expect(html).toContain('data-step="2"');
    expect(html).toContain('data-confirmation="done-swap"');
  });

  it('reports completion', () => {
    expect(renderProcedure({ ...proc, cursor: 3 }, true))
      .toContain('procedure complete');
  });
});

describe('renderError and esc', () => {
  it('surfaces the verbatim message with the correlation id', () => {
    const html = renderError("UnknownItem: no item 'nope'", 'c-12');
    expect(html).toContain("UnknownItem: no item 'nope'");
    expect(html).toContain('correlation c-12');
  });

  it('escapes markup metacharacters', () => {
    expect(esc('<a href="x">&')).toBe('&lt;a href=&quot;x&quot;&gt;&amp;');
  });
});
