import { clear, el } from "../dom";
import type { Store } from "../state";

/** Pick a row; the service returns its nearest correctly-classified peers
 * and per-attribute deltas. Changed attributes are marked (dashed). */
export function renderExplainView(host: HTMLElement, store: Store): void {
  clear(host);
  const state = store.state;
  if (!state.summary) {
    host.append(el("p", {}, ["Upload a dataset to begin."]));
    return;
  }
  if (!state.model) {
    host.append(el("p", {}, ["Run auto-train first (angles view)."]));
    return;
  }

  const input = el("input", {
    type: "number",
    min: "0",
    max: String(state.summary.n_rows - 1),
    value: String(state.explainRow ?? 0),
    "data-role": "explain-row",
  });
  const button = el("button", { "data-role": "explain-go" }, ["explain"]);
  button.addEventListener("click", () => {
    void store.selectMisclassifiedRow(Number((input as HTMLInputElement).value));
  });
  host.append(el("div", { class: "toolbar" }, ["row: ", input, " ", button]));

  if (state.error) {
    host.append(el("p", { class: "error" }, [state.error]));
  }
  const diff = state.explainDiff;
  if (!diff) {
    return;
  }
  host.append(
    el("p", {}, [
      `row ${state.explainRow}: predicted ${diff.predicted_class}, `,
      `true ${diff.true_class}; neighbors ${diff.neighbor_rows.join(", ")}`,
    ]),
  );
  const table = el("table", { "data-role": "diff-table" });
  const header = el("tr", {}, [el("th", {}, ["attribute"]), el("th", {}, ["query"])]);
  diff.neighbor_rows.forEach((row) => header.append(el("th", {}, [`row ${row}`])));
  table.append(header);
  state.summary.attributes.forEach((attr, j) => {
    const tr = el("tr", {}, [
      el("td", {}, [attr.name]),
      el("td", {}, [diff.query[j].toFixed(3)]),
    ]);
    diff.neighbors.forEach((neighbor, k) => {
      const cell = el("td", {}, [neighbor[j].toFixed(3)]);
      if (diff.changed[k][j]) {
        cell.setAttribute("class", "changed");
        cell.setAttribute("style", "border: 1px dashed #b2182b;");
      }
      tr.append(cell);
    });
    table.append(tr);
  });
  host.append(table);
}
