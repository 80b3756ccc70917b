import { ApiClient } from "./api";
import { clear, el } from "./dom";
import { Store } from "./state";
import type { ViewName } from "./types";
import { renderAnglesView } from "./views/angles";
import { renderExplainView } from "./views/explain";
import { renderJlView } from "./views/jl";
import { renderPairingView } from "./views/pairing";
import { renderRectsView } from "./views/rects";

const VIEWS: { name: ViewName; label: string }[] = [
  { name: "pairing", label: "Pairing" },
  { name: "spc-rules", label: "Rectangle rules" },
  { name: "glcl", label: "Angles" },
  { name: "explain", label: "Explain" },
  { name: "jl", label: "Bounds" },
];

const STORAGE_KEY = "glcvis-explorer-session";

function bootstrap(): void {
  const root = document.getElementById("app");
  if (!root) {
    return;
  }
  const baseUrl =
    new URLSearchParams(window.location.search).get("service") ??
    "http://127.0.0.1:8000";
  const api = new ApiClient(baseUrl);
  const store = new Store({ api });

  const header = el("div", { class: "header" });
  const tabs = el("nav", {});
  for (const view of VIEWS) {
    const tab = el("button", { "data-view": view.name }, [view.label]);
    tab.addEventListener("click", () => store.setActiveView(view.name));
    tabs.append(tab);
  }
  const upload = el("input", { type: "file", accept: ".csv" });
  const labelColumn = el("input", { type: "text", value: "class", size: "8" });
  upload.addEventListener("change", async () => {
    const file = (upload as HTMLInputElement).files?.[0];
    if (!file) {
      return;
    }
    const text = await file.text();
    await store.createSession(text, (labelColumn as HTMLInputElement).value);
    window.sessionStorage.setItem(
      STORAGE_KEY,
      JSON.stringify({ sessionId: store.state.sessionId }),
    );
  });
  header.append(tabs, el("span", {}, [" label column: "]), labelColumn, upload);

  const body = el("div", { class: "body" });
  root.append(header, body);

  const renderers: Record<ViewName, (host: HTMLElement, s: Store) => void> = {
    pairing: renderPairingView,
    "spc-rules": renderRectsView,
    glcl: renderAnglesView,
    explain: renderExplainView,
    jl: renderJlView,
  };

  const redraw = () => {
    clear(body);
    const host = el("div", {});
    body.append(host);
    renderers[store.state.activeView](host, store);
  };
  store.subscribe(redraw);
  redraw();
}

bootstrap();
