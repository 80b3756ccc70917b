import { clear, el, svgEl } from "../dom";
import type { Store } from "../state";

/** Angle console: one slider per attribute plus an optional threshold
 * override; on release the service re-projects and returns accuracy.
 * The dot strip below is drawn from the returned projections. */
export function renderAnglesView(host: HTMLElement, store: Store): void {
  clear(host);
  const state = store.state;
  if (!state.summary) {
    host.append(el("p", {}, ["Upload a dataset to begin."]));
    return;
  }

  const accuracy = el("span", { "data-role": "angles-accuracy" }, [
    state.anglesResult ? state.anglesResult.accuracy.toFixed(4) : "--",
  ]);
  const trainButton = el("button", { "data-role": "auto-train" }, ["auto-train"]);
  trainButton.addEventListener("click", () => void store.autoTrain(0));
  const trained = el("span", { "data-role": "train-accuracy" }, [
    state.trainAccuracy === null ? "" : ` trained: ${state.trainAccuracy.toFixed(4)}`,
  ]);
  host.append(el("div", { class: "toolbar" }, ["accuracy: ", accuracy, " ", trainButton, trained]));

  const sliders = el("div", { "data-role": "angle-sliders" });
  state.angles.forEach((value, index) => {
    const name = state.summary!.attributes[index]?.name ?? `x${index + 1}`;
    const slider = el("input", {
      type: "range",
      min: "0",
      max: String(Math.PI / 2),
      step: "0.01",
      value: String(value),
      "data-angle-index": String(index),
    });
    slider.addEventListener("input", () => {
      store.setAngle(index, Number((slider as HTMLInputElement).value));
    });
    slider.addEventListener("change", () => store.commitAngles());
    const sign = el("button", {}, [state.signs[index] < 0 ? "-" : "+"]);
    sign.addEventListener("click", () => {
      store.setSign(index, state.signs[index] < 0 ? 1 : -1);
      store.commitAngles();
    });
    sliders.append(el("div", {}, [`${name} `, slider, sign]));
  });
  host.append(sliders);

  if (state.anglesResult) {
    const width = 720;
    const svg = svgEl("svg", {
      width: String(width),
      height: "60",
      "data-role": "projection-strip",
    });
    const u = state.anglesResult.projections;
    const lo = Math.min(...u, state.anglesResult.threshold);
    const hi = Math.max(...u, state.anglesResult.threshold);
    const span = hi - lo || 1;
    const toX = (v: number) => 10 + ((v - lo) / span) * (width - 20);
    svg.append(
      svgEl("line", {
        x1: "10",
        y1: "30",
        x2: String(width - 10),
        y2: "30",
        stroke: "#333333",
      }),
    );
    const labels = state.summary.labels;
    const classes = [...new Set(labels)].sort();
    u.forEach((value, row) => {
      svg.append(
        svgEl("circle", {
          cx: String(toX(value)),
          cy: "30",
          r: "3",
          fill: classes.indexOf(labels[row]) === 0 ? "#2166ac" : "#b2182b",
          opacity: "0.55",
          "data-row": String(row),
        }),
      );
    });
    svg.append(
      svgEl("line", {
        x1: String(toX(state.anglesResult.threshold)),
        y1: "5",
        x2: String(toX(state.anglesResult.threshold)),
        y2: "55",
        stroke: "#e6c000",
        "stroke-width": "2",
        "data-role": "threshold-marker",
      }),
    );
    host.append(svg);
  }
}
