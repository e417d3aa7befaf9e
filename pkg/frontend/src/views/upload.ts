import type { AppContext } from "../context.js";
import { el } from "../render.js";
import { runOp } from "../state.js";
import { CONDITIONS, GRAMMARS } from "../types.js";

// Blob.arrayBuffer is missing from some DOM environments; FileReader is the
// universally supported way to get a file's bytes.
function readFileBytes(file: File): Promise<Uint8Array> {
  if (typeof file.arrayBuffer === "function") {
    return file.arrayBuffer().then((buf) => new Uint8Array(buf));
  }
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => resolve(new Uint8Array(reader.result as ArrayBuffer));
    reader.onerror = () => reject(reader.error ?? new Error("failed to read file"));
    reader.readAsArrayBuffer(file);
  });
}

export async function performUpload(
  ctx: AppContext,
  filename: string,
  bytes: Uint8Array,
  condition: string,
): Promise<void> {
  // The cap check inside uploadDataset rejects oversized files before any
  // request is made.
  const result = await ctx.api.uploadDataset(filename, bytes, { condition });
  ctx.store.setSession(result);
  ctx.feed.connect(result.session_id, (event) => ctx.store.addProgress(event));
}

export function renderUpload(ctx: AppContext): HTMLElement {
  const state = ctx.store.get();

  const fileInput = el("input", { type: "file", accept: ".csv,.json", class: "file-input" });

  const grammarSelect = el("select", { class: "grammar-select" });
  for (const grammar of GRAMMARS) {
    const option = el("option", { value: grammar }, grammar);
    if (grammar === state.grammar) option.setAttribute("selected", "selected");
    grammarSelect.append(option);
  }
  grammarSelect.addEventListener("change", () => ctx.store.setGrammar(grammarSelect.value));

  const conditionSelect = el("select", { class: "condition-select" });
  for (const condition of CONDITIONS) {
    const option = el("option", { value: condition }, condition);
    if (condition === "enrich") option.setAttribute("selected", "selected");
    conditionSelect.append(option);
  }

  const uploadButton = el("button", { class: "upload-button", type: "button" }, "Upload dataset");
  uploadButton.addEventListener("click", () => {
    const file = fileInput.files?.[0];
    if (!file) {
      ctx.store.setError("choose a CSV or JSON file first", null);
      return;
    }
    void runOp(ctx.store, "upload", async () => {
      const bytes = await readFileBytes(file);
      await performUpload(ctx, file.name, bytes, conditionSelect.value);
    });
  });

  return el(
    "section",
    { class: "upload-view" },
    el("h2", {}, "Upload a dataset"),
    el(
      "p",
      { class: "hint" },
      "Pick a CSV or JSON table. The service profiles it and proposes visualization goals.",
    ),
    el("div", { class: "form-row" }, el("label", {}, "File "), fileInput),
    el("div", { class: "form-row" }, el("label", {}, "Grammar "), grammarSelect),
    el("div", { class: "form-row" }, el("label", {}, "Summary context "), conditionSelect),
    el("div", { class: "form-row" }, uploadButton),
  );
}
