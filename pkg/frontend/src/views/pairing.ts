import { clear, el } from "../dom";
import { drawPanes } from "../panes";
import type { Store } from "../state";

/** Drag-reorder the attribute list; each drop re-pairs and re-encodes
 * through the service, and the panes redraw from the response. */
export function renderPairingView(host: HTMLElement, store: Store): void {
  clear(host);
  const state = store.state;
  if (!state.summary) {
    host.append(el("p", {}, ["Upload a dataset to begin."]));
    return;
  }

  const list = el("ul", { class: "attribute-list", "data-role": "attribute-order" });
  state.attributeOrder.forEach((attrIndex, position) => {
    const name = state.summary!.attributes[attrIndex]?.name ?? `x${attrIndex + 1}`;
    const item = el("li", { draggable: "true", "data-position": String(position) }, [
      name,
    ]);
    item.addEventListener("dragstart", (event) => {
      event.dataTransfer?.setData("text/plain", String(position));
    });
    item.addEventListener("dragover", (event) => event.preventDefault());
    item.addEventListener("drop", (event) => {
      event.preventDefault();
      const from = Number(event.dataTransfer?.getData("text/plain"));
      if (!Number.isNaN(from)) {
        store.moveAttribute(from, position);
      }
    });
    list.append(item);
  });

  const pairingLabel = el("p", { "data-role": "pairing-label" }, [
    "pairs: " +
      store
        .currentPairing()
        .map(([i, j]) => `(${i + 1}, ${j + 1})`)
        .join(" "),
  ]);

  const panes = el("div", { "data-role": "pairing-panes" });
  if (state.graphs) {
    drawPanes(panes, state.graphs, []);
  }
  host.append(list, pairingLabel, panes);
}
