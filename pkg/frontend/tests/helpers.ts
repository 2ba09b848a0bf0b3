/** Shared fixtures: a mock fetch speaking the documented JSON envelope. */

import type { FetchLike, MwpDoc, NotificationDoc, StatusDoc } from '../src/api.js';

let corr = 0;

export function okEnvelope(body: unknown): Response {
  corr += 1;
  return new Response(
    JSON.stringify({ status: 'ok', correlation_id: `c-${corr}`, body }),
    { status: 200, headers: { 'Content-Type': 'application/json' } },
  );
}

export function errorEnvelope(code: number, message: string,
                              correlationId = 'c-err-1'): Response {
  return new Response(
    JSON.stringify({ status: 'error', correlation_id: correlationId,
                     error_code: code, error: message }),
    { status: code, headers: { 'Content-Type': 'application/json' } },
  );
}

export interface Call {
  url: string;
  method: string;
  body: unknown;
}

/**
 * Build a fetch stub from a route table. Each entry maps
 * "METHOD pathPrefix" to a handler receiving the recorded call.
 */
export function mockFetch(
  routes: Record<string, (call: Call) => Response>,
): { fetchFn: FetchLike; calls: Call[] } {
  const calls: Call[] = [];
  const fetchFn: FetchLike = async (input, init) => {
    const call: Call = {
      url: input,
      method: init?.method ?? 'GET',
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    };
    calls.push(call);
    for (const [key, handler] of Object.entries(routes)) {
      const [method, prefix] = key.split(' ', 2);
      if (call.method === method && input.startsWith(prefix)) {
        return handler(call);
      }
    }
    return errorEnvelope(404, `no producer registered for ${input}`);
  };
  return { fetchFn, calls };
}

export function sampleStatus(overrides: Partial<StatusDoc> = {}): StatusDoc {
  return {
    item_id: '000X',
    name: 'Finishing machine',
    description: 'Cold-rolling finishing line',
    category: 'machine',
    health: 'nominal',
    snapshot: { timestamp: 120.5, values: { temperature: 95.2031 }, origin: 'sensor' },
    recent_history: [
      { timestamp: 110.5, values: { temperature: 94.8 }, origin: 'sensor' },
    ],
    fault_hypotheses: [],
    scheduled_ops: [],
    most_worn: { component: 'bearing', wear: 0.42, category: 'mechanical' },
    media: [{ kind: 'media', uri: 'doc://manual.pdf', caption: 'manual' }],
    custom_attrs: {
      temperature: { kind: 'double', unit: 'degC', stream: 'T1' },
    },
    last_update: 120.5,
    ...overrides,
  };
}

export function sampleMwp(overrides: Partial<MwpDoc> = {}): MwpDoc {
  return {
    machine: '000X',
    generated_at: 0,
    generation_time_min: 0.0002,
    total_minutes: 28640,
    entries: [
      { op_id: 'lube-01', category: 'lubrication', duration: 30,
        periodicity: 'monthly', due: 43800, window: [43800, 43830] },
    ],
    feasible: true,
    conflicts: [],
    ...overrides,
  };
}

export function sampleNote(id: string, raisedAt: number,
                           overrides: Partial<NotificationDoc> = {}): NotificationDoc {
  return {
    id,
    item_id: '000X',
    severity: 'alarm',
    rule: 'temp-band',
    raised_at: raisedAt,
    acknowledged: false,
    audience: 'operator',
    ...overrides,
  };
}
