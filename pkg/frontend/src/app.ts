import { ApiClient } from "./api.js";
import type { AppContext } from "./context.js";
import { browserSocketFactory, EventFeed } from "./events.js";
import { FetchHttp } from "./http.js";
import { el, clear } from "./render.js";
import { Store } from "./state.js";
import type { ViewName } from "./state.js";
import { renderSummary } from "./views/summary.js";
import { renderUpload } from "./views/upload.js";
import { renderVisualization } from "./views/viz.js";

const VIEW_TABS: { view: ViewName; label: string }[] = [
  { view: "upload", label: "Upload" },
  { view: "summary", label: "Summary" },
  { view: "visualization", label: "Visualization" },
];

function tabEnabled(ctx: AppContext, view: ViewName): boolean {
  const state = ctx.store.get();
  if (view === "upload") return true;
  if (view === "summary") return state.session !== null;
  return state.session !== null && state.session.goals.length >= 1 && state.viz !== null;
}

function header(ctx: AppContext): HTMLElement {
  const state = ctx.store.get();
  const tabs = VIEW_TABS.map(({ view, label }) => {
    const attrs: Record<string, string> = {
      class: state.view === view ? "tab tab-active" : "tab",
      type: "button",
      "data-view": view,
    };
    if (!tabEnabled(ctx, view)) attrs.disabled = "disabled";
    const tab = el("button", attrs, label);
    tab.addEventListener("click", () => {
      try {
        ctx.store.setView(view);
      } catch (err) {
        ctx.store.setError(err instanceof Error ? err.message : String(err), null);
      }
    });
    return tab;
  });
  return el("header", { class: "app-header" }, el("h1", {}, "vizsmith"), el("nav", {}, ...tabs));
}

function statusBar(ctx: AppContext): HTMLElement {
  const state = ctx.store.get();
  const bits: (HTMLElement | string)[] = [];
  if (state.pendingOp) {
    const latest = state.progress[state.progress.length - 1];
    bits.push(
      el("span", { class: "spinner" }, "⏳ "),
      el("span", { class: "pending-op" }, `running: ${state.pendingOp}`),
    );
    if (latest) {
      bits.push(el("span", { class: "latest-event" }, ` | ${latest.stage}: ${latest.status}`));
    }
  }
  const bar = el("div", { class: "progress-indicator" }, ...bits);
  if (!state.pendingOp) bar.setAttribute("data-idle", "true");
  return bar;
}

function errorBanner(ctx: AppContext): HTMLElement | "" {
  const error = ctx.store.get().error;
  if (!error) return "";
  const children: (HTMLElement | string)[] = [el("span", { class: "error-message" }, error.message)];
  if (error.retry) {
    const retry = el("button", { class: "error-retry", type: "button" }, "Retry");
    const retryFn = error.retry;
    retry.addEventListener("click", () => {
      ctx.store.clearError();
      retryFn();
    });
    children.push(retry);
  }
  const dismiss = el("button", { class: "error-dismiss", type: "button" }, "Dismiss");
  dismiss.addEventListener("click", () => ctx.store.clearError());
  children.push(dismiss);
  return el("div", { class: "error-banner", role: "alert" }, ...children);
}

function renderView(ctx: AppContext): HTMLElement {
  switch (ctx.store.get().view) {
    case "upload":
      return renderUpload(ctx);
    case "summary":
      return renderSummary(ctx);
    case "visualization":
      return renderVisualization(ctx);
  }
}

export function mountApp(root: HTMLElement, ctx: AppContext): void {
  const rerender = () => {
    clear(root);
    root.append(header(ctx), statusBar(ctx), errorBanner(ctx) || "", renderView(ctx));
  };
  ctx.store.subscribe(rerender);
  rerender();
  void ctx.api
    .styles()
    .then((response) => {
      ctx.styles = response.styles;
    })
    .catch(() => {
      // styles are optional decoration; the app works without them
    });
}

export function boot(): void {
  const root = document.getElementById("app");
  if (!root) return;
  const ctx: AppContext = {
    api: new ApiClient(new FetchHttp("")),
    store: new Store(),
    feed: new EventFeed(browserSocketFactory),
    base: "",
    styles: [],
  };
  mountApp(root, ctx);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
