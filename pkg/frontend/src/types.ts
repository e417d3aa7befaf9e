// Shapes of the documents the service returns. The client displays these
// values verbatim; it never computes metrics of its own.

export interface FieldStats {
  min: number | string | null;
  max: number | string | null;
  n_unique: number;
  n_null: number;
  n_rows: number;
}

export interface FieldProfile {
  name: string;
  atomic_type: string;
  stats: FieldStats;
  samples: (number | string | boolean | null)[];
  semantic_type: string | null;
  description: string | null;
}

export interface DatasetSummary {
  name: string;
  source_path: string;
  description: string | null;
  fields: FieldProfile[];
  row_count: number;
  enrichment_status: string;
  enrichment_warning?: string;
}

export interface GoalDoc {
  index: number;
  question: string;
  visualization: string;
  rationale: string;
}

export interface CandidateDoc {
  goal_index: number;
  scaffold_ref: string;
  stub: string;
  assembled_code: string;
  status: string;
  error_detail: string | null;
  artifact: string | null;
  correctness_score: number | null;
}

export interface UploadResult {
  session_id: string;
  condition: string;
  summary: DatasetSummary;
  goals: GoalDoc[];
}

export interface VisualizeResult {
  index: number;
  candidate: CandidateDoc;
  goal: GoalDoc;
  scaffold_id: string;
  condition: string;
  summary_text: string;
}

export interface TurnDoc {
  instruction: string;
  before_stub: string;
  after_stub: string;
  status: string;
  error_detail: string | null;
  succeeded: boolean;
}

export interface DimensionScoreDoc {
  dimension: string;
  score: number;
  rationale: string;
}

export interface EvaluationDoc {
  scores: DimensionScoreDoc[];
  sevq: number;
  partial: boolean;
  failed_dimensions: string[];
}

export interface ExplanationDoc {
  walkthrough: string;
  accessibility: string;
}

export interface RepairResult {
  candidate: CandidateDoc;
  n_attempts: number;
  critiques: string[];
}

export interface StyleDoc {
  id: string;
  prompt: string;
  tags: string[];
}

export interface InfographicResult {
  index: number;
  url: string;
  request: Record<string, unknown>;
}

export interface ProgressEvent {
  stage: string;
  status: string;
  [extra: string]: unknown;
}

// Declarative chart document produced by the chart-json grammar.
export interface ChartChannel {
  field: string;
  type?: "quantitative" | "nominal" | "ordinal" | "temporal";
  aggregate?: "count" | "sum" | "mean" | "median" | "min" | "max";
  bin?: boolean;
}

export interface ChartSpec {
  title?: string;
  mark: "bar" | "line" | "point" | "area" | "arc" | "boxplot";
  encoding: { x: ChartChannel; y?: ChartChannel; color?: ChartChannel; size?: ChartChannel };
}

export const GRAMMARS = ["chart-json", "matplotlib", "seaborn"] as const;
export const CONDITIONS = ["no_summary", "schema", "no_enrich", "enrich"] as const;
