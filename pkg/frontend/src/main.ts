// DOM shell: owns fetch timing and event wiring, delegates everything
// else to the pure view and state modules.

import { ValidationApi } from './api.js';
import {
  newAdjudicationForm,
  Poller,
  submitAdjudication,
  submitDecision,
  withoutItem,
  edgesInAdjudication,
  parallelSiblings,
} from './state.js';
import type { AdjudicationForm } from './state.js';
import {
  adjudicationView,
  defaultCardState,
  errorBanner,
  explanationView,
  parallelGroupView,
  queueView,
} from './views.js';
import type { CardViewState } from './views.js';
import type {
  ConceptEntry,
  EdgeDetail,
  ExpressionEntry,
  GraphDocument,
  QueueItem,
  QueueResponse,
  ValidatorRole,
} from './types.js';

const params = new URLSearchParams(location.search);
const POLL_INTERVAL_MS = Number(params.get('poll') ?? '15000');
// Default is same-origin; the review service sends no CORS headers, so a
// cross-origin ?api= override needs a proxy that adds them.
const API_BASE = params.get('api') ?? '';

const queuePane = document.getElementById('queue') as HTMLElement;
const detailPane = document.getElementById('detail') as HTMLElement;
const adjudicationPane = document.getElementById('adjudication') as HTMLElement;
const banner = document.getElementById('banner') as HTMLElement;
const roleSelect = document.getElementById('role') as HTMLSelectElement;
const validatorInput = document.getElementById('validator') as HTMLInputElement;
const tokenInput = document.getElementById('token') as HTMLInputElement;
const refreshButton = document.getElementById('refresh') as HTMLButtonElement;

const api = new ValidationApi(API_BASE);

let inventory: GraphDocument | null = null;
let queue: QueueResponse = { role: 'linguistic', items: [] };
let cardStates = new Map<string, CardViewState>();
let adjudicationForms = new Map<string, AdjudicationForm>();
let adjudicationErrors = new Map<string, string>();

function role(): ValidatorRole {
  return roleSelect.value as ValidatorRole;
}

function concepts(): ConceptEntry[] {
  return inventory?.concepts ?? [];
}

function expressionsById(): Map<string, ExpressionEntry> {
  return new Map((inventory?.expressions ?? []).map((e) => [e.id, e]));
}

function conceptsById(): Map<string, ConceptEntry> {
  return new Map(concepts().map((c) => [c.id, c]));
}

function stateFor(item: QueueItem): CardViewState {
  let state = cardStates.get(item.edge_id);
  if (!state) {
    state = defaultCardState(item, validatorInput.value || 'validator-1', role());
    state.concepts = concepts();
    cardStates.set(item.edge_id, state);
  }
  return state;
}

async function refresh(): Promise<void> {
  api.setToken(tokenInput.value || null);
  try {
    [queue, inventory] = await Promise.all([
      api.queue(role()),
      api.graphExport(),
    ]);
    banner.innerHTML = '';
  } catch (error) {
    banner.innerHTML = errorBanner(
      error instanceof Error ? error.message : 'service unreachable'
    );
    return;
  }
  cardStates = new Map(
    [...cardStates].filter(([edgeId]) =>
      queue.items.some((item) => item.edge_id === edgeId)
    )
  );
  render();
}

function render(): void {
  queuePane.innerHTML = queueView(queue, stateFor, expressionsById());
  renderAdjudications();
}

function renderAdjudications(): void {
  if (!inventory) {
    adjudicationPane.innerHTML = '';
    return;
  }
  const pending = edgesInAdjudication(inventory);
  adjudicationPane.innerHTML = pending.length
    ? `<h2>${pending.length} awaiting adjudication</h2>` +
      pending
        .map(
          (edge) =>
            `<button data-action="open-adjudication" data-edge="${edge.id}">${edge.id}</button>`
        )
        .join(' ')
    : '';
}

async function openExplanation(edgeId: string): Promise<void> {
  try {
    const [bundle, detail] = await Promise.all([
      api.explanation(edgeId),
      api.edgeDetail(edgeId),
    ]);
    let parallel = '';
    if (inventory && detail.edge.parallel_group) {
      const displays = expressionsById();
      parallel = parallelGroupView(
        parallelSiblings(inventory, detail.edge),
        (edge) => displays.get(edge.src)?.surface_text ?? edge.src
      );
    }
    detailPane.innerHTML =
      explanationView(bundle, detail, conceptsById()) + parallel;
  } catch (error) {
    detailPane.innerHTML = errorBanner(
      error instanceof Error ? error.message : 'service unreachable'
    );
  }
}

async function openAdjudication(edgeId: string): Promise<void> {
  let detail: EdgeDetail;
  try {
    detail = await api.edgeDetail(edgeId);
  } catch (error) {
    detailPane.innerHTML = errorBanner(
      error instanceof Error ? error.message : 'service unreachable'
    );
    return;
  }
  let form = adjudicationForms.get(edgeId);
  if (!form) {
    form = newAdjudicationForm(edgeId);
    adjudicationForms.set(edgeId, form);
  }
  detailPane.innerHTML = adjudicationView(
    detail,
    form,
    adjudicationErrors.get(edgeId) ?? null
  );
}

async function decide(edgeId: string, verdict: 'accept' | 'reject' | 'modify') {
  const state = cardStates.get(edgeId);
  if (!state) {
    return;
  }
  state.form.verdict = verdict;
  if (verdict === 'modify') {
    state.showPicker = true;
    render();
    return;
  }
  await postDecision(edgeId, state);
}

async function postDecision(edgeId: string, state: CardViewState) {
  state.pending = true;
  render();
  const result = await submitDecision(api, state.form);
  state.pending = false;
  if (result.ok) {
    queue = { ...queue, items: withoutItem(queue.items, edgeId) };
    cardStates.delete(edgeId);
    void refresh();
  } else {
    state.error = result.error;
  }
  render();
}

async function resolveAdjudication(edgeId: string) {
  const form = adjudicationForms.get(edgeId);
  if (!form) {
    return;
  }
  const result = await submitAdjudication(api, form);
  if (result.ok) {
    adjudicationForms.delete(edgeId);
    adjudicationErrors.delete(edgeId);
    detailPane.innerHTML = '';
    void refresh();
  } else {
    adjudicationErrors.set(edgeId, result.error);
    void openAdjudication(edgeId);
  }
}

document.addEventListener('click', (event) => {
  const target = (event.target as HTMLElement).closest<HTMLElement>(
    '[data-action]'
  );
  if (!target) {
    const card = (event.target as HTMLElement).closest<HTMLElement>('.card');
    if (card?.dataset.edge) {
      void openExplanation(card.dataset.edge);
    }
    return;
  }
  const card = target.closest<HTMLElement>('[data-edge]');
  const edgeId = card?.dataset.edge ?? '';
  const action = target.dataset.action;
  if (action === 'accept' || action === 'reject' || action === 'modify') {
    void decide(edgeId, action);
  } else if (action === 'pick-concept') {
    const state = cardStates.get(edgeId);
    if (state) {
      state.form.newDst = target.dataset.concept ?? null;
      render();
    }
  } else if (action === 'submit-modify' || action === 'retry-decision') {
    const state = cardStates.get(edgeId);
    if (state) {
      state.error = null;
      void postDecision(edgeId, state);
    }
  } else if (action === 'open-adjudication') {
    void openAdjudication(edgeId);
  } else if (action === 'submit-adjudication') {
    void resolveAdjudication(edgeId);
  } else if (action === 'retry') {
    void refresh();
  }
});

document.addEventListener('input', (event) => {
  const target = event.target as HTMLInputElement;
  const card = target.closest<HTMLElement>('[data-edge]');
  const edgeId = card?.dataset.edge ?? '';
  if (target.dataset.field === 'comment') {
    const state = cardStates.get(edgeId);
    if (state) {
      state.form.comment = target.value;
    }
  } else if (target.dataset.field === 'concept-query') {
    const state = cardStates.get(edgeId);
    if (state) {
      state.conceptQuery = target.value;
      render();
    }
  } else if (target.dataset.field === 'note') {
    const form = adjudicationForms.get(edgeId);
    if (form) {
      form.note = target.value;
    }
  } else if (target.dataset.edgeReason !== undefined) {
    const form = adjudicationForms.get(edgeId);
    if (form) {
      const index = form.parallelEdges.indexOf(target.dataset.edgeReason);
      if (index >= 0) {
        form.reasons[index] = target.value;
      }
    }
  }
});

document.addEventListener('change', (event) => {
  const target = event.target as HTMLInputElement;
  if (target.dataset.action === 'outcome') {
    const section = target.closest<HTMLElement>('[data-edge]');
    const form = adjudicationForms.get(section?.dataset.edge ?? '');
    if (form) {
      form.outcome = target.value as AdjudicationForm['outcome'];
      if (form.outcome === 'retain_parallel' && inventory) {
        const edge = inventory.edges.find((e) => e.id === form!.edgeId);
        const siblings = inventory.edges.filter(
          (e) => edge && e.src === edge.src && e.status === 'Adjudication'
        );
        form.parallelEdges = siblings.map((e) => e.id);
        form.reasons = siblings.map(() => '');
      }
      void openAdjudication(form.edgeId);
    }
  }
});

refreshButton.addEventListener('click', () => void refresh());
roleSelect.addEventListener('change', () => {
  cardStates.clear();
  void refresh();
});

const poller = new Poller(() => void refresh(), POLL_INTERVAL_MS);
poller.start();
void refresh();
