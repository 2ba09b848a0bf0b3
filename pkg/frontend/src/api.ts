/**
 * Typed client for the platform's HTTP service bus.
 *
 * Every call goes through the documented JSON envelope:
 *   ok    -> { status: "ok", correlation_id, body }
 *   error -> { status: "error", correlation_id, error_code, error }
 *
 * The console holds no business logic; this module is a thin wire adapter.
 */

export interface Envelope<T> {
  status: 'ok' | 'error';
  correlation_id: string;
  body?: T;
  error_code?: number;
  error?: string;
}

export class ApiError extends Error {
  readonly code: number;
  readonly correlationId: string;

  constructor(code: number, message: string, correlationId: string) {
    super(message);
    this.code = code;
    this.correlationId = correlationId;
  }
}

export interface Snapshot {
  timestamp: number;
  values: Record<string, number | string>;
  origin: string;
}

export interface StatusDoc {
  item_id: string;
  name: string;
  description: string;
  category: string;
  health: 'nominal' | 'warning' | 'fault';
  snapshot: Snapshot;
  recent_history: Snapshot[];
  fault_hypotheses: [string, string, string][];
  scheduled_ops: { op_id: string; category: string; duration: number; window: number[] }[];
  most_worn: { component: string; wear: number; category: string } | null;
  media: { kind: string; uri: string; caption: string }[];
  custom_attrs: Record<string, { kind: string; unit: string; stream: string | null }>;
  last_update: number;
}

export interface MwpDoc {
  machine: string;
  generated_at: number;
  generation_time_min: number;
  total_minutes: number;
  entries: { op_id: string; category: string; duration: number; periodicity: string;
             due: number; window: number[] }[];
  feasible: boolean;
  conflicts: { op_id: string; window: number[]; busy: [number, number, string] }[];
}

export interface NotificationDoc {
  id: string;
  item_id: string;
  severity: string;
  rule: string;
  raised_at: number;
  acknowledged: boolean;
  audience: string;
}

export interface AnswerDoc {
  kind: 'direct' | 'document';
  text: string;
  confidence: number;
  latency_s: number;
  hits: [string, number][];
  source: string;
}

export interface ProcedureDoc {
  item_id: string;
  task: string;
  steps: { index: number; instruction: string; expected_confirmation: string }[];
  cursor: number;
}

export interface StepResultDoc {
  done: boolean;
  cursor: number;
  next?: { index: number; instruction: string };
}

export interface ItemListDoc {
  items: { id: string; name: string; category: string }[];
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = '', fetchFn: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, '');
    this.fetchFn = fetchFn;
  }

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { 'Content-Type': 'application/json' };
    }
    const resp = await this.fetchFn(this.base + path, init);
    const doc = (await resp.json()) as Envelope<T>;
    if (doc.status !== 'ok') {
      throw new ApiError(doc.error_code ?? resp.status,
                         doc.error ?? `HTTP ${resp.status}`,
                         doc.correlation_id ?? '');
    }
    return doc.body as T;
  }

  getStatus(itemId: string): Promise<StatusDoc> {
    return this.call('GET', `/api/getMachine/${encodeURIComponent(itemId)}/getStatus`);
  }

  getHistory(itemId: string, from?: number, to?: number): Promise<{ item_id: string; snapshots: Snapshot[] }> {
    const q = new URLSearchParams();
    if (from !== undefined) q.set('from', String(from));
    if (to !== undefined) q.set('to', String(to));
    const suffix = q.toString() ? `?${q}` : '';
    return this.call('GET', `/api/getMachine/${encodeURIComponent(itemId)}/getHistory${suffix}`);
  }

  diagnose(itemId: string): Promise<StatusDoc & { raw_samples: Record<string, [number, number][]> }> {
    return this.call('GET', `/api/getMachine/${encodeURIComponent(itemId)}/diagnose`);
  }

  listItems(): Promise<ItemListDoc> {
    return this.call('GET', '/api/items');
  }

  generateMwp(machine: string, mode?: string,
              schedule?: { start: number; end: number; order_id?: string }[]): Promise<MwpDoc> {
    return this.call('POST', '/api/mwp/generate', { machine, mode, schedule });
  }

  checkFeasibility(machine: string): Promise<MwpDoc> {
    return this.call('GET', `/api/mwp/${encodeURIComponent(machine)}/feasibility`);
  }

  executeMwp(machine: string): Promise<{ applied: string; machine: string; entries: number }> {
    return this.call('POST', '/api/scenario/execute', { kind: 'mwp', machine });
  }

  listNotifications(since?: number, unackedOnly = false): Promise<{ notifications: NotificationDoc[] }> {
    const q = new URLSearchParams();
    if (since !== undefined) q.set('since', String(since));
    if (unackedOnly) q.set('unacked', '1');
    const suffix = q.toString() ? `?${q}` : '';
    return this.call('GET', `/api/notifications${suffix}`);
  }

  acknowledge(noteId: string): Promise<{ id: string; acknowledged: boolean }> {
    return this.call('POST', `/api/notifications/${encodeURIComponent(noteId)}/ack`, {});
  }

  ask(question: string): Promise<AnswerDoc> {
    return this.call('POST', '/api/ask', { question });
  }

  getProcedure(itemId: string, task: string): Promise<ProcedureDoc> {
    return this.call('GET',
      `/api/tutoring/${encodeURIComponent(itemId)}/${encodeURIComponent(task)}`);
  }

  confirmStep(itemId: string, task: string, step: number,
              confirmation: string): Promise<StepResultDoc> {
    return this.call('POST',
      `/api/tutoring/${encodeURIComponent(itemId)}/${encodeURIComponent(task)}`,
      { step, confirmation });
  }
}
