import { clear, el } from "../dom";
import type { Store } from "../state";

/** Dimension-bound calculator; the numbers come from the service. */
export function renderJlView(host: HTMLElement, store: Store): void {
  clear(host);
  const state = store.state;
  const m = el("input", { type: "number", value: "10", min: "1", "data-role": "jl-m" });
  const eps = el("input", {
    type: "number",
    value: "0.5",
    step: "0.05",
    min: "0.05",
    max: "0.95",
    "data-role": "jl-eps",
  });
  const button = el("button", { "data-role": "jl-go" }, ["compute"]);
  button.addEventListener("click", () => {
    void store.queryMinDimension(
      Number((m as HTMLInputElement).value),
      Number((eps as HTMLInputElement).value),
    );
  });
  host.append(
    el("div", { class: "toolbar" }, ["points m: ", m, " tolerance: ", eps, " ", button]),
  );
  if (state.jlEstimate) {
    host.append(
      el("p", { "data-role": "jl-result" }, [
        `preserving all pairwise distances of ${state.jlEstimate.m} points within `,
        `${Math.round(state.jlEstimate.epsilon * 100)}% needs dimension k >= ${state.jlEstimate.k_min}`,
      ]),
    );
    host.append(
      el("p", {}, [
        "a 2-D scatter cannot satisfy this for arbitrary point sets; ",
        "the graph encodings in the other views avoid the problem by being exact.",
      ]),
    );
  }
}
