import type { Http, MultipartField } from "./http.js";
import { encodeMultipart } from "./http.js";
import type {
  ChartSpec,
  EvaluationDoc,
  ExplanationDoc,
  GoalDoc,
  InfographicResult,
  RepairResult,
  StyleDoc,
  TurnDoc,
  CandidateDoc,
  DatasetSummary,
  UploadResult,
  VisualizeResult,
} from "./types.js";

export const UPLOAD_CAP_BYTES = 20 * 1024 * 1024;

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorClass: string,
    public detail: string,
  ) {
    super(`${errorClass}: ${detail}`);
  }
}

// Raised client-side, before any request is made.
export class FileTooLarge extends Error {
  constructor(size: number, cap: number) {
    super(`file is ${size} bytes; the upload cap is ${cap} bytes`);
  }
}

function parseError(status: number, bodyText: string): ApiError {
  try {
    const parsed = JSON.parse(bodyText);
    const detail = parsed.detail ?? parsed;
    if (detail && typeof detail === "object" && "error_class" in detail) {
      return new ApiError(status, String(detail.error_class), String(detail.detail));
    }
    return new ApiError(status, "HTTPError", JSON.stringify(detail));
  } catch {
    return new ApiError(status, "HTTPError", bodyText.slice(0, 300));
  }
}

export interface UploadOptions {
  condition?: string;
  nGoals?: number;
}

export interface VisualizeOptions {
  goalIndex?: number;
  nlGoal?: string;
  grammarId?: string;
  condition?: string;
  policy?: string;
  nCandidates?: number;
}

export class ApiClient {
  constructor(
    private http: Http,
    private capBytes: number = UPLOAD_CAP_BYTES,
  ) {}

  private async json<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const res = await this.http.request({
      method,
      path,
      body: body === undefined ? undefined : JSON.stringify(body),
      contentType: body === undefined ? undefined : "application/json",
    });
    if (res.status >= 400) throw parseError(res.status, res.bodyText);
    return JSON.parse(res.bodyText) as T;
  }

  async uploadDataset(
    filename: string,
    bytes: Uint8Array,
    opts: UploadOptions = {},
  ): Promise<UploadResult> {
    if (bytes.length > this.capBytes) throw new FileTooLarge(bytes.length, this.capBytes);
    const fields: MultipartField[] = [
      { name: "file", value: bytes, filename, type: "text/csv" },
    ];
    if (opts.condition) fields.push({ name: "condition", value: opts.condition });
    if (opts.nGoals !== undefined) fields.push({ name: "n_goals", value: String(opts.nGoals) });
    const { contentType, body } = encodeMultipart(fields);
    const res = await this.http.request({ method: "POST", path: "/datasets", body, contentType });
    if (res.status >= 400) throw parseError(res.status, res.bodyText);
    return JSON.parse(res.bodyText) as UploadResult;
  }

  getSession(id: string) {
    return this.json<Record<string, unknown>>("GET", `/sessions/${id}`);
  }

  refineSummary(
    id: string,
    edit: { description?: string; fields?: Record<string, { semantic_type?: string; description?: string }> },
  ) {
    return this.json<{ summary: DatasetSummary }>("POST", `/sessions/${id}/summary/refine`, edit);
  }

  visualize(id: string, opts: VisualizeOptions): Promise<VisualizeResult> {
    return this.json("POST", `/sessions/${id}/visualize`, {
      goal_index: opts.goalIndex,
      nl_goal: opts.nlGoal,
      grammar_id: opts.grammarId,
      condition: opts.condition,
      policy: opts.policy ?? "compile_discard",
      n_candidates: opts.nCandidates ?? 1,
    });
  }

  artifactPath(id: string, index: number): string {
    return `/sessions/${id}/visualizations/${index}/artifact`;
  }

  async fetchChartSpec(id: string, index: number): Promise<ChartSpec> {
    const res = await this.http.request({ method: "GET", path: this.artifactPath(id, index) });
    if (res.status >= 400) throw parseError(res.status, res.bodyText);
    return JSON.parse(res.bodyText) as ChartSpec;
  }

  refine(id: string, index: number, instruction: string) {
    return this.json<{ turn: TurnDoc; candidate: CandidateDoc }>(
      "POST",
      `/sessions/${id}/visualizations/${index}/refine`,
      { instruction },
    );
  }

  evaluate(id: string, index: number) {
    return this.json<{ evaluation: EvaluationDoc }>(
      "POST",
      `/sessions/${id}/visualizations/${index}/evaluate`,
    );
  }

  explain(id: string, index: number) {
    return this.json<{ explanation: ExplanationDoc }>(
      "POST",
      `/sessions/${id}/visualizations/${index}/explain`,
    );
  }

  repair(id: string, index: number, maxDepth = 2): Promise<RepairResult> {
    return this.json("POST", `/sessions/${id}/visualizations/${index}/repair`, {
      max_depth: maxDepth,
    });
  }

  recommend(id: string, index: number, k = 3) {
    return this.json<{ goals: GoalDoc[] }>(
      "POST",
      `/sessions/${id}/visualizations/${index}/recommend`,
      { k },
    );
  }

  styles() {
    return this.json<{ styles: StyleDoc[] }>("GET", "/styles");
  }

  infographic(
    id: string,
    index: number,
    body: { style_ids: string[]; custom_prompt?: string; strength?: number; seed?: number },
  ): Promise<InfographicResult> {
    return this.json("POST", `/sessions/${id}/visualizations/${index}/infographic`, body);
  }
}
