// Small pure formatting helpers shared by the views.

import type { Provenance } from './types.js';

const HTML_ESCAPES: Record<string, string> = {
  '&': '&amp;',
  '<': '&lt;',
  '>': '&gt;',
  '"': '&quot;',
  "'": '&#39;',
};

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => HTML_ESCAPES[ch]);
}

/** Three-decimal score, or "pending" when the server has not computed one. */
export function formatScore(value: number | null): string {
  return value === null ? 'pending' : value.toFixed(3);
}

export function provenanceSummary(provenance: Provenance): string {
  const anonymized = provenance.anonymized ? 'anonymized' : 'not anonymized';
  const collected = provenance.collected_at
    ? `, collected ${provenance.collected_at}`
    : '';
  return `${provenance.source_kind} ${provenance.source_id} (${anonymized}${collected})`;
}

/**
 * Shade intensity bucket 0..4 for a token score relative to the strongest
 * absolute score in the same text.  Everything lands in bucket 0 when the
 * whole text carries no signal.
 */
export function shadeBucket(score: number, maxAbs: number): number {
  if (maxAbs <= 0) {
    return 0;
  }
  const ratio = Math.abs(score) / maxAbs;
  return Math.min(4, Math.floor(ratio * 4 + 1e-9));
}
