// HTML renderers.  Every function returns a markup string built purely
// from API data and form state, which keeps snapshot testing trivial and
// the DOM layer a thin shell.

import { escapeHtml, formatScore, provenanceSummary, shadeBucket } from './format.js';
import {
  canSubmitAdjudication,
  canSubmitDecision,
  newDecisionForm,
  searchConcepts,
  groupBatches,
} from './state.js';
import type { AdjudicationForm, DecisionForm } from './state.js';
import type {
  ConceptEntry,
  Edge,
  EdgeDetail,
  ExplanationBundle,
  ExpressionEntry,
  QueueItem,
  QueueResponse,
  ValidatorRole,
} from './types.js';

export interface CardViewState {
  form: DecisionForm;
  showPicker: boolean;
  conceptQuery: string;
  concepts: ConceptEntry[];
  error: string | null;
  pending: boolean;
}

export function defaultCardState(
  item: QueueItem,
  validatorId: string,
  role: ValidatorRole
): CardViewState {
  return {
    form: newDecisionForm(item.edge_id, validatorId, role),
    showPicker: false,
    conceptQuery: '',
    concepts: [],
    error: null,
    pending: false,
  };
}

export function statusChip(status: string): string {
  return `<span class="status status-${escapeHtml(status.toLowerCase())}">${escapeHtml(status)}</span>`;
}

// ---------------------------------------------------------------------------
// Queue

export function emptyQueueView(): string {
  return '<p class="empty-queue">No pending mappings for this role.</p>';
}

export function queueView(
  response: QueueResponse,
  stateFor: (item: QueueItem) => CardViewState,
  expressionsById?: Map<string, ExpressionEntry>
): string {
  if (response.items.length === 0) {
    return emptyQueueView();
  }
  const sections = groupBatches(response).map((group) => {
    const cards = group.items
      .map((item) => mappingCard(item, stateFor(item), expressionsById))
      .join('\n');
    return [
      `<section class="batch" data-batch="${escapeHtml(group.batchKey)}">`,
      `<h2 class="batch-header">${escapeHtml(group.conceptDisplay)} ` +
        `<span class="batch-size">(${group.items.length} candidates)</span></h2>`,
      cards,
      '</section>',
    ].join('\n');
  });
  return sections.join('\n');
}

export function mappingCard(
  item: QueueItem,
  card: CardViewState,
  expressionsById?: Map<string, ExpressionEntry>
): string {
  const expression = expressionsById?.get(item.edge.src);
  const language = expression ? expression.language : null;
  const gloss = expression?.gloss ?? null;
  const parts = [
    `<article class="card" data-edge="${escapeHtml(item.edge_id)}">`,
    '<header class="card-header">',
    language ? `<span class="lang-chip">${escapeHtml(language)}</span>` : '',
    `<strong class="expression">${escapeHtml(item.src_display)}</strong>`,
    gloss ? `<span class="gloss">${escapeHtml(gloss)}</span>` : '',
    '</header>',
    '<p class="mapping">',
    `<span class="edge-type">${escapeHtml(item.edge.edge_type)}</span> to `,
    `<span class="concept">${escapeHtml(item.dst_display)}</span>`,
    '</p>',
    '<dl class="scores">',
    `<dt>model confidence</dt><dd>${formatScore(item.edge.model_confidence)}</dd>`,
    `<dt>combined confidence</dt><dd>${formatScore(item.edge.combined_confidence)}</dd>`,
    `<dt>queue priority</dt><dd>${formatScore(item.priority)}</dd>`,
    '</dl>',
    `<p class="provenance">${escapeHtml(provenanceSummary(item.edge.provenance))}</p>`,
    `<p class="rationale">${escapeHtml(item.edge.rationale)}</p>`,
    explanationPreview(item.bundle),
    decisionPanel(item, card),
    '</article>',
  ];
  return parts.filter(Boolean).join('\n');
}

function explanationPreview(bundle: ExplanationBundle): string {
  return [
    '<details class="preview"><summary>Explanation preview</summary>',
    perspectiveSection('Linguistic perspective', bundle.linguistic),
    perspectiveSection('Cultural perspective', bundle.cultural),
    perspectiveSection('Clinical perspective', bundle.clinical),
    bundle.contrastive
      ? `<p class="alternatives">${escapeHtml(bundle.contrastive.text)}</p>`
      : '',
    '</details>',
  ]
    .filter(Boolean)
    .join('\n');
}

function decisionPanel(item: QueueItem, card: CardViewState): string {
  const picker = card.showPicker ? conceptPicker(card) : '';
  const submitModify =
    card.showPicker
      ? `<button class="submit-modify" data-action="submit-modify"` +
        `${canSubmitDecision(card.form) ? '' : ' disabled'}>Submit modification</button>`
      : '';
  const error = card.error
    ? `<p class="inline-error">${escapeHtml(card.error)} <button data-action="retry-decision">Retry</button></p>`
    : '';
  const busy = card.pending ? ' disabled' : '';
  return [
    '<div class="decision-panel">',
    `<button data-action="accept"${busy}>Accept</button>`,
    `<button data-action="reject"${busy}>Reject</button>`,
    `<button data-action="modify"${busy}>Modify</button>`,
    `<input class="comment" data-field="comment" placeholder="optional comment" value="${escapeHtml(card.form.comment)}">`,
    picker,
    submitModify,
    error,
    '</div>',
  ]
    .filter(Boolean)
    .join('\n');
}

function conceptPicker(card: CardViewState): string {
  const matches = searchConcepts(card.concepts, card.conceptQuery);
  const rows = matches
    .map((concept) => {
      const chosen = card.form.newDst === concept.id ? ' class="chosen"' : '';
      return (
        `<li${chosen} data-action="pick-concept" data-concept="${escapeHtml(concept.id)}">` +
        `<code>${escapeHtml(concept.code)}</code> ${escapeHtml(concept.label)} ` +
        `<span class="framework">${escapeHtml(concept.framework)}</span></li>`
      );
    })
    .join('\n');
  return [
    '<div class="concept-picker">',
    `<input class="concept-search" data-field="concept-query" placeholder="search code or label" value="${escapeHtml(card.conceptQuery)}">`,
    `<ul class="concept-matches">${rows}</ul>`,
    '</div>',
  ].join('\n');
}

// ---------------------------------------------------------------------------
// Explanation

export function tokenHighlight(contributions: [string, number][]): string {
  if (contributions.length === 0) {
    return '<p class="tokens tokens-empty">no token contributions</p>';
  }
  const maxAbs = Math.max(...contributions.map(([, score]) => Math.abs(score)));
  const maxScore = Math.max(...contributions.map(([, score]) => score));
  let topMarked = false;
  const spans = contributions.map(([token, score]) => {
    const classes = ['tok', `tok-s${shadeBucket(score, maxAbs)}`];
    if (score < 0) {
      classes.push('tok-neg');
    }
    if (!topMarked && maxScore > 0 && score === maxScore) {
      classes.push('tok-top');
      topMarked = true;
    }
    return (
      `<span class="${classes.join(' ')}" title="${score.toFixed(6)}">` +
      `${escapeHtml(token)}</span>`
    );
  });
  return `<p class="tokens">${spans.join(' ')}</p>`;
}

function perspectiveSection(title: string, text: string): string {
  const body = text.trim()
    ? `<p>${escapeHtml(text)}</p>`
    : '<p class="unavailable">unavailable</p>';
  return `<section class="perspective"><h3>${escapeHtml(title)}</h3>${body}</section>`;
}

export function explanationView(
  bundle: ExplanationBundle,
  detail: EdgeDetail | null,
  conceptsById?: Map<string, ConceptEntry>
): string {
  const header = detail
    ? `<h2 class="explanation-title">${escapeHtml(detail.src_display)} ` +
      `to ${escapeHtml(detail.dst_display)} ${statusChip(detail.edge.status)}</h2>`
    : `<h2 class="explanation-title">Edge ${escapeHtml(bundle.edge_id)}</h2>`;
  const incomplete = bundle.incomplete
    ? '<p class="incomplete-banner">Annotation layer missing; some sections may be unavailable.</p>'
    : '';
  const rules = bundle.matched_rules.length
    ? `<section class="matched-rules"><h3>Matched rules</h3><ul>${bundle.matched_rules
        .map((rule) => `<li>${escapeHtml(rule)}</li>`)
        .join('')}</ul></section>`
    : '';
  const nearest = bundle.nearest_examples.length
    ? `<section class="nearest"><h3>Nearest validated examples</h3><ul>${bundle.nearest_examples
        .map(
          ([edgeId, score]) =>
            `<li><code>${escapeHtml(edgeId)}</code> similarity ${score.toFixed(3)}</li>`
        )
        .join('')}</ul></section>`
    : '';
  const contrastive = bundle.contrastive
    ? contrastivePanel(bundle, conceptsById)
    : '';
  const refs = bundle.provenance_refs
    .map((ref) => `<li>${escapeHtml(ref)}</li>`)
    .join('');
  return [
    '<div class="explanation">',
    header,
    incomplete,
    tokenHighlight(bundle.token_contributions),
    perspectiveSection('Linguistic perspective', bundle.linguistic),
    perspectiveSection('Cultural perspective', bundle.cultural),
    perspectiveSection('Clinical perspective', bundle.clinical),
    rules,
    nearest,
    contrastive,
    '<footer class="bundle-footer">',
    `<p class="confidence">confidence ${formatScore(bundle.confidence)}</p>`,
    `<ul class="provenance-refs">${refs}</ul>`,
    '</footer>',
    '</div>',
  ]
    .filter(Boolean)
    .join('\n');
}

function contrastivePanel(
  bundle: ExplanationBundle,
  conceptsById?: Map<string, ConceptEntry>
): string {
  const record = bundle.contrastive!;
  const runnerUp =
    conceptsById?.get(record.runner_up_dst)?.label ?? record.runner_up_dst;
  return [
    '<aside class="contrastive">',
    `<h3>Why not ${escapeHtml(runnerUp)}?</h3>`,
    `<p>${escapeHtml(record.text)}</p>`,
    `<p class="delta">score margin ${record.score_delta.toFixed(3)}</p>`,
    '</aside>',
  ].join('\n');
}

// ---------------------------------------------------------------------------
// Adjudication

export function adjudicationView(
  detail: EdgeDetail,
  form: AdjudicationForm,
  error: string | null = null
): string {
  const rows = detail.decisions
    .map(
      (decision) =>
        '<tr>' +
        `<td><span class="badge badge-${escapeHtml(decision.role)}">${escapeHtml(decision.role)}</span></td>` +
        `<td>${escapeHtml(decision.validator_id)}</td>` +
        `<td class="verdict-${escapeHtml(decision.verdict)}">${escapeHtml(decision.verdict)}</td>` +
        `<td>${escapeHtml(decision.comment)}</td>` +
        '</tr>'
    )
    .join('\n');
  const outcomes = (
    ['consensus_accept', 'consensus_reject', 'retain_parallel'] as const
  )
    .map(
      (outcome) =>
        `<label><input type="radio" name="outcome" value="${outcome}" ` +
        `data-action="outcome"${form.outcome === outcome ? ' checked' : ''}> ${outcome}</label>`
    )
    .join('\n');
  const reasons =
    form.outcome === 'retain_parallel'
      ? [
          '<fieldset class="parallel-reasons"><legend>Reasons per retained edge</legend>',
          ...form.parallelEdges.map((edgeId, i) => {
            const value = form.reasons[i] ?? '';
            return (
              `<label><code>${escapeHtml(edgeId)}</code>` +
              `<input class="reason" data-edge-reason="${escapeHtml(edgeId)}" value="${escapeHtml(value)}"></label>`
            );
          }),
          '</fieldset>',
        ].join('\n')
      : '';
  const submitDisabled = canSubmitAdjudication(form) ? '' : ' disabled';
  const errorLine = error
    ? `<p class="inline-error">${escapeHtml(error)}</p>`
    : '';
  return [
    `<section class="adjudication" data-edge="${escapeHtml(detail.edge.id)}">`,
    `<h2>Adjudication: ${escapeHtml(detail.src_display)} to ${escapeHtml(detail.dst_display)}</h2>`,
    '<table class="panel-decisions">',
    '<thead><tr><th>role</th><th>validator</th><th>verdict</th><th>comment</th></tr></thead>',
    `<tbody>${rows}</tbody>`,
    '</table>',
    `<div class="outcomes">${outcomes}</div>`,
    reasons,
    `<input class="note" data-field="note" placeholder="adjudication note" value="${escapeHtml(form.note)}">`,
    `<button data-action="submit-adjudication"${submitDisabled}>Resolve</button>`,
    errorLine,
    '</section>',
  ]
    .filter(Boolean)
    .join('\n');
}

export function parallelGroupView(
  edges: Edge[],
  displayFor?: (edge: Edge) => string
): string {
  const rows = edges
    .map((edge) => {
      const display = displayFor ? ` ${escapeHtml(displayFor(edge))}` : '';
      return (
        `<li><code>${escapeHtml(edge.id)}</code>${display} ${statusChip(edge.status)} ` +
        `<em class="reason">${escapeHtml(edge.parallel_reason ?? '')}</em></li>`
      );
    })
    .join('\n');
  return [
    '<section class="parallel-group">',
    '<h3>Interpretations retained in parallel</h3>',
    `<ul>${rows}</ul>`,
    '</section>',
  ].join('\n');
}

// ---------------------------------------------------------------------------
// Errors

export function errorBanner(message: string): string {
  return (
    `<div class="error-banner"><p>${escapeHtml(message)}</p>` +
    '<button data-action="retry">Retry</button></div>'
  );
}
