import type {
  ChartSpec,
  EvaluationDoc,
  ExplanationDoc,
  GoalDoc,
  ProgressEvent,
  TurnDoc,
  UploadResult,
  VisualizeResult,
} from "./types.js";

export type ViewName = "upload" | "summary" | "visualization";

export interface ErrorNotice {
  message: string;
  retry: (() => void) | null;
}

// Everything the visualization view needs about the current candidate.
export interface VizState {
  result: VisualizeResult;
  spec: ChartSpec | null; // fetched artifact, declarative grammar only
  turns: TurnDoc[];
  evaluation: EvaluationDoc | null;
  explanation: ExplanationDoc | null;
  critiques: string[];
  infographicUrl: string | null;
}

export interface AppState {
  view: ViewName;
  grammar: string;
  session: UploadResult | null;
  viz: VizState | null;
  pendingOp: string | null;
  progress: ProgressEvent[];
  error: ErrorNotice | null;
}

export class StateError extends Error {}

type Listener = (state: AppState) => void;

export class Store {
  private state: AppState = {
    view: "upload",
    grammar: "chart-json",
    session: null,
    viz: null,
    pendingOp: null,
    progress: [],
    error: null,
  };
  private listeners: Listener[] = [];

  get(): AppState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of [...this.listeners]) listener(this.state);
  }

  private patch(partial: Partial<AppState>): void {
    this.state = { ...this.state, ...partial };
    this.notify();
  }

  setView(view: ViewName): void {
    if (view !== "upload" && !this.state.session) {
      throw new StateError(`${view} view requires an uploaded dataset`);
    }
    if (view === "visualization") {
      if (!this.state.session || this.state.session.goals.length < 1) {
        throw new StateError("visualization view requires a session with at least one goal");
      }
      if (!this.state.viz) {
        throw new StateError("visualization view requires a generated candidate");
      }
    }
    this.patch({ view });
  }

  setGrammar(grammar: string): void {
    this.patch({ grammar });
  }

  setSession(session: UploadResult): void {
    this.patch({ session, viz: null, progress: [], view: "summary" });
  }

  updateSummary(summary: UploadResult["summary"]): void {
    if (!this.state.session) throw new StateError("no session");
    this.patch({ session: { ...this.state.session, summary } });
  }

  appendGoals(goals: GoalDoc[]): void {
    if (!this.state.session) throw new StateError("no session");
    this.patch({
      session: { ...this.state.session, goals: [...this.state.session.goals, ...goals] },
    });
  }

  setViz(result: VisualizeResult, spec: ChartSpec | null): void {
    this.patch({
      viz: {
        result,
        spec,
        turns: [],
        evaluation: null,
        explanation: null,
        critiques: [],
        infographicUrl: null,
      },
      view: "visualization",
    });
  }

  // Mirrors the server: the response candidate is always current; a
  // successful turn invalidates any earlier evaluation.
  applyTurn(turn: TurnDoc, candidate: VisualizeResult["candidate"], spec: ChartSpec | null): void {
    const viz = this.requireViz();
    this.patch({
      viz: {
        ...viz,
        result: { ...viz.result, candidate },
        spec,
        turns: [...viz.turns, turn],
        evaluation: turn.succeeded ? null : viz.evaluation,
      },
    });
  }

  applyRepair(
    candidate: VisualizeResult["candidate"],
    critiques: string[],
    spec: ChartSpec | null,
  ): void {
    const viz = this.requireViz();
    this.patch({
      viz: { ...viz, result: { ...viz.result, candidate }, spec, critiques, evaluation: null },
    });
  }

  setEvaluation(evaluation: EvaluationDoc): void {
    this.patch({ viz: { ...this.requireViz(), evaluation } });
  }

  setExplanation(explanation: ExplanationDoc): void {
    this.patch({ viz: { ...this.requireViz(), explanation } });
  }

  setInfographicUrl(url: string): void {
    this.patch({ viz: { ...this.requireViz(), infographicUrl: url } });
  }

  private requireViz(): VizState {
    if (!this.state.viz) throw new StateError("no visualization in progress");
    return this.state.viz;
  }

  // One mutating operation in flight at a time, mirroring the service's 409.
  beginOp(name: string): boolean {
    if (this.state.pendingOp) return false;
    this.patch({ pendingOp: name, error: null });
    return true;
  }

  endOp(): void {
    this.patch({ pendingOp: null });
  }

  addProgress(event: ProgressEvent): void {
    this.patch({ progress: [...this.state.progress, event].slice(-50) });
  }

  setError(message: string, retry: (() => void) | null): void {
    this.patch({ error: { message, retry } });
  }

  clearError(): void {
    if (this.state.error) this.patch({ error: null });
  }

  waitIdle(): Promise<void> {
    if (!this.state.pendingOp) return Promise.resolve();
    return new Promise((resolve) => {
      const unsubscribe = this.subscribe((state) => {
        if (!state.pendingOp) {
          unsubscribe();
          resolve();
        }
      });
    });
  }
}

// Shared wrapper for every mutating UI action: single-flight guard, error
// banner with a retry affordance, pending indicator.
export async function runOp(store: Store, name: string, fn: () => Promise<void>): Promise<void> {
  if (!store.beginOp(name)) return;
  try {
    await fn();
    store.clearError();
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    store.setError(message, () => void runOp(store, name, fn));
  } finally {
    store.endOp();
  }
}
