// API response and request shapes, field names as the service returns them.

export type ValidatorRole = 'linguistic' | 'clinical' | 'cultural';

export type Verdict = 'accept' | 'reject' | 'modify';

export type EdgeStatus =
  | 'Proposed'
  | 'UnderValidation'
  | 'Accepted'
  | 'Rejected'
  | 'Superseded'
  | 'Adjudication'
  | 'ParallelRetained';

export type AdjudicationOutcome =
  | 'consensus_accept'
  | 'consensus_reject'
  | 'retain_parallel';

export interface Provenance {
  source_kind: string;
  source_id: string;
  collected_at: string;
  anonymized: boolean;
}

export interface Edge {
  id: string;
  src: string;
  dst: string;
  edge_type: string;
  status: EdgeStatus;
  model_confidence: number;
  validator_agreement: number | null;
  combined_confidence: number | null;
  rationale: string;
  provenance: Provenance;
  parallel_group: string | null;
  revision_of: string | null;
  adjudication_note: string | null;
  parallel_reason: string | null;
}

export interface ContrastiveRecord {
  runner_up_dst: string;
  score_delta: number;
  text: string;
}

export interface ExplanationBundle {
  edge_id: string;
  linguistic: string;
  cultural: string;
  clinical: string;
  token_contributions: [string, number][];
  matched_rules: string[];
  nearest_examples: [string, number][];
  contrastive: ContrastiveRecord | null;
  confidence: number;
  provenance_refs: string[];
  incomplete: boolean;
}

export interface QueueItem {
  edge_id: string;
  priority: number;
  batch_key: string;
  enqueued_at: string;
  edge: Edge;
  src_display: string;
  dst_display: string;
  bundle: ExplanationBundle;
}

export interface QueueResponse {
  role: ValidatorRole;
  items: QueueItem[];
}

export interface Modification {
  new_dst: string | null;
  new_edge_type: string | null;
}

export interface DecisionBody {
  edge_id: string;
  validator_id: string;
  role: ValidatorRole;
  verdict: Verdict;
  comment?: string;
  modification?: Modification | null;
}

export interface DecisionRecord {
  edge_id: string;
  validator_id: string;
  role: ValidatorRole;
  verdict: Verdict;
  comment: string;
  modification: Modification | null;
  decided_at: string;
}

export interface DecisionResponse {
  edge: Edge;
  aggregated: boolean;
  revised_edge: Edge | null;
  tau: number;
}

export interface AdjudicationBody {
  outcome: AdjudicationOutcome;
  parallel_edges?: string[];
  reasons?: string[];
  note?: string;
}

export interface AdjudicationResponse {
  edges: Edge[];
}

export interface EdgeDetail {
  edge: Edge;
  src_display: string;
  dst_display: string;
  decisions: DecisionRecord[];
}

export interface ExpressionEntry {
  id: string;
  surface_text: string;
  language: string;
  gloss: string | null;
  status: string;
  annotation: Record<string, unknown>;
  provenance: Provenance;
}

export interface ConceptEntry {
  id: string;
  code: string;
  framework: string;
  label: string;
  description: string | null;
}

export interface GraphDocument {
  expressions: ExpressionEntry[];
  concepts: ConceptEntry[];
  edges: (Edge & { explanation: unknown })[];
}

export interface HealthResponse {
  status: string;
  expressions: number;
  concepts: number;
  edges: number;
  edges_by_status: Record<string, number>;
  queue_depth: number;
  events: number;
  tau: number;
}
