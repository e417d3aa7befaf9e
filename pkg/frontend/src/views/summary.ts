import type { AppContext } from "../context.js";
import { el, displayValue } from "../render.js";
import { runOp } from "../state.js";
import type { FieldProfile, GoalDoc, VisualizeResult } from "../types.js";

export async function performVisualize(
  ctx: AppContext,
  selector: { goalIndex?: number; nlGoal?: string },
): Promise<void> {
  const state = ctx.store.get();
  const session = state.session;
  if (!session) throw new Error("upload a dataset first");
  const result = await ctx.api.visualize(session.session_id, {
    ...selector,
    grammarId: state.grammar,
  });
  if (result.goal.index >= session.goals.length) ctx.store.appendGoals([result.goal]);
  const spec = await maybeFetchSpec(ctx, result);
  ctx.store.setViz(result, spec);
}

export async function maybeFetchSpec(ctx: AppContext, result: VisualizeResult) {
  if (result.scaffold_id !== "chart-json" || result.candidate.status !== "compiled_ok") {
    return null;
  }
  return ctx.api.fetchChartSpec(ctx.store.get().session!.session_id, result.index);
}

function fieldCard(ctx: AppContext, field: FieldProfile): HTMLElement {
  const stats = field.stats;
  const descInput = el("input", {
    class: "field-desc-input",
    type: "text",
    value: field.description ?? "",
    placeholder: "describe this field",
  });
  const saveButton = el("button", { class: "field-desc-save", type: "button" }, "Save");
  saveButton.addEventListener("click", () => {
    void runOp(ctx.store, "refine summary", async () => {
      const session = ctx.store.get().session!;
      const updated = await ctx.api.refineSummary(session.session_id, {
        fields: { [field.name]: { description: descInput.value } },
      });
      ctx.store.updateSummary(updated.summary);
    });
  });

  const statBits = [
    `type: ${field.atomic_type}`,
    stats.min !== null ? `min: ${displayValue(stats.min)}` : null,
    stats.max !== null ? `max: ${displayValue(stats.max)}` : null,
    `unique: ${stats.n_unique}`,
    `nulls: ${stats.n_null}`,
  ].filter((bit): bit is string => bit !== null);

  return el(
    "div",
    { class: "field-card", "data-field": field.name },
    el("h4", { class: "field-name" }, field.name),
    el("p", { class: "field-stats" }, statBits.join(" | ")),
    field.semantic_type ? el("p", { class: "field-semantic" }, `semantic: ${field.semantic_type}`) : "",
    el("p", { class: "field-samples" }, `samples: ${field.samples.map(displayValue).join(", ")}`),
    el("div", { class: "field-desc-row" }, descInput, saveButton),
  );
}

function sampleTable(fields: FieldProfile[]): HTMLElement {
  const maxRows = Math.max(0, ...fields.map((f) => f.samples.length));
  const head = el("tr", {}, ...fields.map((f) => el("th", {}, f.name)));
  const rows: HTMLElement[] = [];
  for (let r = 0; r < maxRows; r += 1) {
    rows.push(
      el(
        "tr",
        {},
        ...fields.map((f) => el("td", {}, f.samples[r] === undefined ? "" : displayValue(f.samples[r]!))),
      ),
    );
  }
  return el(
    "div",
    { class: "table-wrap" },
    el("p", { class: "hint" }, "Sampled values, drawn per column."),
    el("table", { class: "sample-table" }, el("thead", {}, head), el("tbody", {}, ...rows)),
  );
}

function goalItem(ctx: AppContext, goal: GoalDoc): HTMLElement {
  const goButton = el("button", { class: "goal-generate", type: "button" }, "Visualize");
  goButton.addEventListener("click", () => {
    void runOp(ctx.store, "visualize", () => performVisualize(ctx, { goalIndex: goal.index }));
  });
  return el(
    "li",
    { class: "goal-item", "data-goal-index": String(goal.index) },
    el("span", { class: "goal-question" }, goal.question),
    el("span", { class: "goal-visualization" }, ` ${goal.visualization} `),
    el("span", { class: "goal-rationale" }, goal.rationale),
    goButton,
  );
}

export function renderSummary(ctx: AppContext): HTMLElement {
  const session = ctx.store.get().session;
  if (!session) return el("p", {}, "No dataset uploaded yet.");
  const summary = session.summary;

  const descInput = el("input", {
    class: "dataset-desc-input",
    type: "text",
    value: summary.description ?? "",
  });
  const descSave = el("button", { class: "dataset-desc-save", type: "button" }, "Save description");
  descSave.addEventListener("click", () => {
    void runOp(ctx.store, "refine summary", async () => {
      const updated = await ctx.api.refineSummary(session.session_id, {
        description: descInput.value,
      });
      ctx.store.updateSummary(updated.summary);
    });
  });

  const nlInput = el("input", {
    class: "nl-goal-input",
    type: "text",
    placeholder: "describe the chart you want",
  });
  const nlButton = el("button", { class: "nl-goal-generate", type: "button" }, "Generate");
  nlButton.addEventListener("click", () => {
    const text = nlInput.value.trim();
    if (!text) {
      ctx.store.setError("type a visualization request first", null);
      return;
    }
    void runOp(ctx.store, "visualize", () => performVisualize(ctx, { nlGoal: text }));
  });

  return el(
    "section",
    { class: "summary-view" },
    el("h2", {}, `Dataset: ${summary.name}`),
    el(
      "p",
      { class: "dataset-meta" },
      `${summary.row_count} rows | ${summary.fields.length} fields | enrichment: ${summary.enrichment_status}`,
    ),
    el("div", { class: "form-row" }, descInput, descSave),
    el("h3", {}, "Fields"),
    el("div", { class: "field-grid" }, ...summary.fields.map((f) => fieldCard(ctx, f))),
    el("h3", {}, "Table preview"),
    sampleTable(summary.fields),
    el("h3", {}, "Goals"),
    el("ol", { class: "goal-list" }, ...session.goals.map((g) => goalItem(ctx, g))),
    el("div", { class: "form-row nl-goal-row" }, nlInput, nlButton),
  );
}
