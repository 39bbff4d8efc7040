// Client-side view state: decision and adjudication forms, batch grouping,
// and the concept picker search.  The server owns all scoring and
// state-machine logic; nothing here derives a confidence or a status.

import { ApiError, newIdempotencyKey, ValidationApi } from './api.js';
import type {
  AdjudicationBody,
  AdjudicationOutcome,
  AdjudicationResponse,
  ConceptEntry,
  DecisionBody,
  DecisionResponse,
  Edge,
  GraphDocument,
  QueueItem,
  QueueResponse,
  ValidatorRole,
  Verdict,
} from './types.js';

// ---------------------------------------------------------------------------
// Decision form

export interface DecisionForm {
  edgeId: string;
  validatorId: string;
  role: ValidatorRole;
  verdict: Verdict | null;
  comment: string;
  newDst: string | null;
  // One key per logical submission: retries and double-clicks reuse it,
  // so the server records a single decision.
  idempotencyKey: string;
}

export function newDecisionForm(
  edgeId: string,
  validatorId: string,
  role: ValidatorRole
): DecisionForm {
  return {
    edgeId,
    validatorId,
    role,
    verdict: null,
    comment: '',
    newDst: null,
    idempotencyKey: newIdempotencyKey(),
  };
}

export function canSubmitDecision(form: DecisionForm): boolean {
  if (form.verdict === null) {
    return false;
  }
  if (form.verdict === 'modify') {
    return form.newDst !== null && form.newDst !== '';
  }
  return true;
}

export function decisionPayload(form: DecisionForm): DecisionBody {
  const body: DecisionBody = {
    edge_id: form.edgeId,
    validator_id: form.validatorId,
    role: form.role,
    verdict: form.verdict as Verdict,
    comment: form.comment,
  };
  if (form.verdict === 'modify') {
    body.modification = { new_dst: form.newDst, new_edge_type: null };
  }
  return body;
}

export type SubmitResult<T> =
  | { ok: true; response: T }
  | { ok: false; error: string };

/**
 * Post the decision.  On failure the form is untouched (same contents,
 * same idempotency key), so the caller can re-render it with an inline
 * error and let the validator retry without losing anything.
 */
export async function submitDecision(
  api: ValidationApi,
  form: DecisionForm
): Promise<SubmitResult<DecisionResponse>> {
  if (!canSubmitDecision(form)) {
    return { ok: false, error: 'decision is not complete' };
  }
  try {
    const response = await api.submitDecision(
      decisionPayload(form),
      form.idempotencyKey
    );
    return { ok: true, response };
  } catch (error) {
    return { ok: false, error: describeError(error) };
  }
}

// ---------------------------------------------------------------------------
// Adjudication form

export interface AdjudicationForm {
  edgeId: string;
  outcome: AdjudicationOutcome | null;
  parallelEdges: string[];
  reasons: string[];
  note: string;
  idempotencyKey: string;
}

export function newAdjudicationForm(edgeId: string): AdjudicationForm {
  return {
    edgeId,
    outcome: null,
    parallelEdges: [],
    reasons: [],
    note: '',
    idempotencyKey: newIdempotencyKey(),
  };
}

export function canSubmitAdjudication(form: AdjudicationForm): boolean {
  if (form.outcome === null) {
    return false;
  }
  if (form.outcome !== 'retain_parallel') {
    return true;
  }
  return (
    form.parallelEdges.length >= 2 &&
    form.reasons.length === form.parallelEdges.length &&
    form.reasons.every((reason) => reason.trim() !== '')
  );
}

export function adjudicationPayload(form: AdjudicationForm): AdjudicationBody {
  const body: AdjudicationBody = {
    outcome: form.outcome as AdjudicationOutcome,
    note: form.note,
  };
  if (form.outcome === 'retain_parallel') {
    body.parallel_edges = form.parallelEdges;
    body.reasons = form.reasons;
  }
  return body;
}

export async function submitAdjudication(
  api: ValidationApi,
  form: AdjudicationForm
): Promise<SubmitResult<AdjudicationResponse>> {
  if (!canSubmitAdjudication(form)) {
    return { ok: false, error: 'adjudication is not complete' };
  }
  try {
    const response = await api.adjudicate(
      form.edgeId,
      adjudicationPayload(form),
      form.idempotencyKey
    );
    return { ok: true, response };
  } catch (error) {
    return { ok: false, error: describeError(error) };
  }
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    return error.message;
  }
  return 'service unreachable';
}

// ---------------------------------------------------------------------------
// Queue grouping

export interface BatchGroup {
  batchKey: string;
  conceptDisplay: string;
  items: QueueItem[];
}

/** Group queue items by batch key, highest-priority batch first. */
export function groupBatches(response: QueueResponse): BatchGroup[] {
  const groups = new Map<string, BatchGroup>();
  for (const item of response.items) {
    let group = groups.get(item.batch_key);
    if (!group) {
      group = {
        batchKey: item.batch_key,
        conceptDisplay: item.dst_display,
        items: [],
      };
      groups.set(item.batch_key, group);
    }
    group.items.push(item);
  }
  const out = [...groups.values()];
  const top = (group: BatchGroup) =>
    Math.max(...group.items.map((item) => item.priority));
  out.sort((a, b) => top(b) - top(a));
  return out;
}

export function withoutItem(items: QueueItem[], edgeId: string): QueueItem[] {
  return items.filter((item) => item.edge_id !== edgeId);
}

// ---------------------------------------------------------------------------
// Concept picker and graph lookups

/** Case-insensitive substring search over concept codes and labels. */
export function searchConcepts(
  concepts: ConceptEntry[],
  query: string
): ConceptEntry[] {
  const needle = query.trim().toLowerCase();
  if (!needle) {
    return concepts;
  }
  return concepts.filter(
    (concept) =>
      concept.code.toLowerCase().includes(needle) ||
      concept.label.toLowerCase().includes(needle)
  );
}

export function edgesInAdjudication(doc: GraphDocument): Edge[] {
  return doc.edges.filter((edge) => edge.status === 'Adjudication');
}

/** All edges retained in the same parallel group, the given edge included. */
export function parallelSiblings(doc: GraphDocument, edge: Edge): Edge[] {
  if (!edge.parallel_group) {
    return [edge];
  }
  return doc.edges.filter(
    (candidate) => candidate.parallel_group === edge.parallel_group
  );
}

// ---------------------------------------------------------------------------
// Polling

export class Poller {
  private tick: () => void;
  private intervalMs: number;
  private handle: ReturnType<typeof setInterval> | null = null;

  constructor(tick: () => void, intervalMs: number = 15000) {
    this.tick = tick;
    this.intervalMs = intervalMs;
  }

  start(): void {
    if (this.handle === null) {
      this.handle = setInterval(this.tick, this.intervalMs);
    }
  }

  stop(): void {
    if (this.handle !== null) {
      clearInterval(this.handle);
      this.handle = null;
    }
  }
}
