import { clear, el } from "../dom";
import {
  DEFAULT_GEOMETRY,
  drawPanes,
  planeAt,
  screenToWorld,
  worldToPlane,
} from "../panes";
import type { Store } from "../state";
import type { RectClauseJson } from "../types";

/** Rectangle tool: drag on a pane to draw a clause, toggle its membership,
 * watch the accuracy badge follow the service's evaluation. */
export function renderRectsView(host: HTMLElement, store: Store): void {
  clear(host);
  const state = store.state;
  if (!state.graphs) {
    host.append(el("p", {}, ["Encode the dataset first (pairing view)."]));
    return;
  }

  const badge = el(
    "span",
    { class: "badge", "data-role": "accuracy-badge" },
    [state.badgeAccuracy === null ? "--" : state.badgeAccuracy.toFixed(4)],
  );
  const fspButton = el("button", { "data-role": "run-fsp" }, ["run FSP"]);
  fspButton.addEventListener("click", () => void store.runFsp(0));
  host.append(el("div", { class: "toolbar" }, ["accuracy: ", badge, " ", fspButton]));

  const panes = el("div", { "data-role": "rect-panes" });
  const svg = drawPanes(panes, state.graphs, state.clauses);

  let dragStart: { plane: number; x: number; y: number } | null = null;
  svg.addEventListener("mousedown", (event) => {
    const rect = svg.getBoundingClientRect();
    const world = screenToWorld(
      event.clientX - rect.left,
      event.clientY - rect.top,
      DEFAULT_GEOMETRY,
    );
    const plane = planeAt(world.x, DEFAULT_GEOMETRY);
    const local = worldToPlane(plane, world.x, world.y, DEFAULT_GEOMETRY);
    dragStart = { plane, x: local.x, y: local.y };
  });
  svg.addEventListener("mouseup", (event) => {
    if (!dragStart) {
      return;
    }
    const rect = svg.getBoundingClientRect();
    const world = screenToWorld(
      event.clientX - rect.left,
      event.clientY - rect.top,
      DEFAULT_GEOMETRY,
    );
    const local = worldToPlane(dragStart.plane, world.x, world.y, DEFAULT_GEOMETRY);
    const clause: RectClauseJson = {
      plane: dragStart.plane,
      rect: [
        Math.min(dragStart.x, local.x),
        Math.max(dragStart.x, local.x),
        Math.min(dragStart.y, local.y),
        Math.max(dragStart.y, local.y),
      ],
      membership: "inside",
    };
    dragStart = null;
    store.upsertClause(null, clause);
  });

  const clauseList = el("ol", { "data-role": "clause-list" });
  state.clauses.forEach((clause, index) => {
    const toggle = el("button", {}, [clause.membership]);
    toggle.addEventListener("click", () => store.toggleMembership(index));
    const remove = el("button", {}, ["remove"]);
    remove.addEventListener("click", () => store.removeClause(index));
    const label = `plane ${clause.plane + 1}: [${clause.rect
      .map((v) => v.toFixed(2))
      .join(", ")}] `;
    clauseList.append(el("li", {}, [label, toggle, " ", remove]));
  });

  const ruleText = el("p", { "data-role": "rule-text" }, [state.ruleText ?? ""]);
  if (state.error) {
    host.append(el("p", { class: "error" }, [state.error]));
  }
  host.append(panes, clauseList, ruleText);
}
