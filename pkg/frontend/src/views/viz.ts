import { renderChartSkeleton } from "../chartjson.js";
import type { AppContext } from "../context.js";
import { el } from "../render.js";
import { runOp } from "../state.js";
import type { VizState } from "../state.js";
import type { ChartSpec } from "../types.js";
import { maybeFetchSpec } from "./summary.js";

function artifactPanel(ctx: AppContext, viz: VizState): HTMLElement {
  const candidate = viz.result.candidate;
  if (candidate.status !== "compiled_ok") {
    const repairCta = el("button", { class: "repair-cta", type: "button" }, "Attempt repair");
    repairCta.addEventListener("click", () => doRepair(ctx));
    return el(
      "div",
      { class: "generation-error" },
      el("p", {}, `Generation failed with status ${candidate.status}.`),
      el("pre", { class: "error-detail" }, candidate.error_detail ?? "no detail"),
      repairCta,
    );
  }
  if (viz.spec) {
    return el(
      "div",
      { class: "artifact-panel" },
      renderChartSkeleton(viz.spec),
      el(
        "details",
        { class: "spec-raw" },
        el("summary", {}, "Chart document"),
        el("pre", {}, JSON.stringify(viz.spec, null, 2)),
      ),
    );
  }
  const session = ctx.store.get().session!;
  const src = ctx.base + ctx.api.artifactPath(session.session_id, viz.result.index);
  return el(
    "div",
    { class: "artifact-panel" },
    el("img", { class: "artifact-image", src, alt: viz.result.goal.visualization }),
  );
}

function doRepair(ctx: AppContext): void {
  void runOp(ctx.store, "repair", async () => {
    const session = ctx.store.get().session!;
    const viz = ctx.store.get().viz!;
    const result = await ctx.api.repair(session.session_id, viz.result.index);
    const spec = await maybeFetchSpec(ctx, { ...viz.result, candidate: result.candidate });
    ctx.store.applyRepair(result.candidate, result.critiques, spec);
  });
}

function codeEditor(ctx: AppContext, viz: VizState): HTMLElement {
  const editor = el("textarea", { class: "code-editor", rows: "10", spellcheck: "false" });
  editor.value = viz.result.candidate.stub;
  const children: (HTMLElement | string)[] = [
    el("h3", {}, "Generated code"),
    editor,
  ];
  if (viz.result.scaffold_id === "chart-json") {
    const preview = el("div", { class: "edited-preview" });
    const rerender = el(
      "button",
      { class: "rerender-spec", type: "button" },
      "Preview edited document",
    );
    rerender.addEventListener("click", () => {
      try {
        const spec = JSON.parse(editor.value) as ChartSpec;
        preview.replaceChildren(renderChartSkeleton(spec));
        ctx.store.clearError();
      } catch (err) {
        ctx.store.setError(`edited document is not valid JSON: ${String(err)}`, null);
      }
    });
    children.push(el("div", { class: "form-row" }, rerender), preview);
  }
  return el("div", { class: "code-panel" }, ...children);
}

function opsToolbar(ctx: AppContext, viz: VizState): HTMLElement {
  const session = ctx.store.get().session!;
  const index = viz.result.index;

  const refineInput = el("input", {
    class: "refine-input",
    type: "text",
    placeholder: "describe a change, e.g. set the title",
  });
  const refineButton = el("button", { class: "refine-button", type: "button" }, "Refine");
  refineButton.addEventListener("click", () => {
    const instruction = refineInput.value.trim();
    if (!instruction) {
      ctx.store.setError("type a refinement instruction first", null);
      return;
    }
    void runOp(ctx.store, "refine", async () => {
      const response = await ctx.api.refine(session.session_id, index, instruction);
      const spec = await maybeFetchSpec(ctx, { ...viz.result, candidate: response.candidate });
      ctx.store.applyTurn(response.turn, response.candidate, spec);
    });
  });

  const evaluateButton = el("button", { class: "evaluate-button", type: "button" }, "Evaluate");
  evaluateButton.addEventListener("click", () => {
    void runOp(ctx.store, "evaluate", async () => {
      const response = await ctx.api.evaluate(session.session_id, index);
      ctx.store.setEvaluation(response.evaluation);
    });
  });

  const explainButton = el("button", { class: "explain-button", type: "button" }, "Explain");
  explainButton.addEventListener("click", () => {
    void runOp(ctx.store, "explain", async () => {
      const response = await ctx.api.explain(session.session_id, index);
      ctx.store.setExplanation(response.explanation);
    });
  });

  const repairButton = el("button", { class: "repair-button", type: "button" }, "Repair");
  repairButton.addEventListener("click", () => doRepair(ctx));

  const recommendButton = el("button", { class: "recommend-button", type: "button" }, "More goals");
  recommendButton.addEventListener("click", () => {
    void runOp(ctx.store, "recommend", async () => {
      const response = await ctx.api.recommend(session.session_id, index, 3);
      ctx.store.appendGoals(response.goals);
    });
  });

  return el(
    "div",
    { class: "ops-toolbar" },
    el("div", { class: "form-row" }, refineInput, refineButton),
    el(
      "div",
      { class: "form-row" },
      evaluateButton,
      explainButton,
      repairButton,
      recommendButton,
    ),
  );
}

function evaluationPanel(viz: VizState): HTMLElement | "" {
  const evaluation = viz.evaluation;
  if (!evaluation) return "";
  const rows = evaluation.scores.map((score) =>
    el(
      "div",
      { class: "dimension-row", "data-dimension": score.dimension },
      el("span", { class: "dimension-name" }, score.dimension),
      el("span", { class: "dimension-score" }, String(score.score)),
      el("span", { class: "dimension-rationale" }, score.rationale),
    ),
  );
  return el(
    "div",
    { class: "evaluation-panel" },
    el("h3", {}, "Evaluation"),
    ...rows,
    el(
      "div",
      { class: "sevq-row" },
      el("span", {}, "mean quality (sevq): "),
      el("span", { class: "sevq-value" }, String(evaluation.sevq)),
    ),
    evaluation.partial
      ? el("p", { class: "partial-note" }, `partial report; failed: ${evaluation.failed_dimensions.join(", ")}`)
      : "",
  );
}

function explanationPanel(viz: VizState): HTMLElement | "" {
  const explanation = viz.explanation;
  if (!explanation) return "";
  return el(
    "div",
    { class: "explanation-panel" },
    el("h3", {}, "Explanation"),
    el("h4", {}, "Code walkthrough"),
    el("pre", { class: "walkthrough" }, explanation.walkthrough),
    el("h4", {}, "Accessibility description"),
    el("pre", { class: "accessibility" }, explanation.accessibility),
  );
}

function transcriptPanel(viz: VizState): HTMLElement {
  const turns = viz.turns.map((turn, i) =>
    el(
      "li",
      { class: "transcript-turn", "data-turn": String(i) },
      el("span", { class: "turn-instruction" }, turn.instruction),
      el(
        "span",
        { class: turn.succeeded ? "turn-status turn-ok" : "turn-status turn-failed" },
        turn.succeeded ? " applied" : ` failed (${turn.status})`,
      ),
    ),
  );
  return el(
    "div",
    { class: "transcript-panel" },
    el("h3", {}, "Refinement transcript"),
    turns.length ? el("ol", { class: "transcript" }, ...turns) : el("p", { class: "hint" }, "No refinements yet."),
  );
}

function infographicPanel(ctx: AppContext, viz: VizState): HTMLElement | "" {
  if (ctx.styles.length === 0) return "";
  if (viz.result.scaffold_id === "chart-json") return "";
  const select = el("select", { class: "style-select" });
  for (const style of ctx.styles) select.append(el("option", { value: style.id }, style.id));
  const strength = el("input", {
    class: "strength-input",
    type: "number",
    min: "0",
    max: "1",
    step: "0.1",
    value: "0.7",
  });
  const makeButton = el("button", { class: "infographic-button", type: "button" }, "Stylize");
  makeButton.addEventListener("click", () => {
    void runOp(ctx.store, "infographic", async () => {
      const session = ctx.store.get().session!;
      const result = await ctx.api.infographic(session.session_id, viz.result.index, {
        style_ids: [select.value],
        strength: Number(strength.value),
      });
      ctx.store.setInfographicUrl(ctx.base + result.url);
    });
  });
  return el(
    "div",
    { class: "infographic-panel" },
    el("h3", {}, "Infographic"),
    el("div", { class: "form-row" }, select, strength, makeButton),
    viz.infographicUrl
      ? el("img", { class: "infographic-image", src: viz.infographicUrl, alt: "stylized chart" })
      : "",
  );
}

export function renderVisualization(ctx: AppContext): HTMLElement {
  const viz = ctx.store.get().viz;
  if (!viz) return el("p", {}, "Generate a visualization from the goal list first.");
  const goal = viz.result.goal;

  return el(
    "section",
    { class: "viz-view" },
    el("h2", {}, goal.question),
    el(
      "p",
      { class: "viz-meta" },
      `${goal.visualization} | grammar: ${viz.result.scaffold_id} | context: ${viz.result.condition}`,
    ),
    artifactPanel(ctx, viz),
    viz.critiques.length
      ? el(
          "div",
          { class: "critiques" },
          el("h3", {}, "Repair critiques"),
          el("ul", {}, ...viz.critiques.map((c) => el("li", { class: "critique" }, c))),
        )
      : "",
    codeEditor(ctx, viz),
    opsToolbar(ctx, viz),
    evaluationPanel(viz),
    explanationPanel(viz),
    transcriptPanel(viz),
    infographicPanel(ctx, viz),
    el(
      "details",
      { class: "intermediate-output" },
      el("summary", {}, "Intermediate outputs"),
      el("h4", {}, "Summary text used for generation"),
      el("pre", { class: "summary-text" }, viz.result.summary_text),
      el("h4", {}, "Goal record"),
      el("pre", { class: "goal-record" }, JSON.stringify(goal, null, 2)),
    ),
  );
}
