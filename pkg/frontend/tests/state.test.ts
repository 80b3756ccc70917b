import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient, type FetchLike } from "../src/api";
import { Store, buildPairing } from "../src/state";
import type { RectClauseJson } from "../src/types";

interface Recorded {
  url: string;
  body: any;
  resolve: (payload: unknown, status?: number) => void;
}

/** Transport harness: records every request and lets the test resolve them
 * in any order, which is how out-of-order delivery is simulated. */
function makeTransport() {
  const requests: Recorded[] = [];
  const fetchFn: FetchLike = (url, init) =>
    new Promise((resolvePromise) => {
      requests.push({
        url,
        body: init?.body ? JSON.parse(String(init.body)) : undefined,
        resolve: (payload, status = 200) =>
          resolvePromise(
            new Response(JSON.stringify(payload), {
              status,
              headers: { "content-type": "application/json" },
            }),
          ),
      });
    });
  return { requests, fetchFn };
}

const SUMMARY = {
  attributes: [
    { name: "a", min: 0, max: 1 },
    { name: "b", min: 0, max: 1 },
    { name: "c", min: 0, max: 1 },
    { name: "d", min: 0, max: 1 },
  ],
  n_rows: 3,
  classes: ["A", "B"],
  class_counts: { A: 2, B: 1 },
  dropped_rows: 0,
  labels: ["A", "B", "A"],
};

async function readySession(store: Store, requests: Recorded[]) {
  const creating = store.createSession("a,b,c,d,cls\n...", "cls");
  await vi.waitFor(() => expect(requests.length).toBe(1));
  requests[0].resolve({ id: "s1", dataset_version: 1, summary: SUMMARY });
  await creating;
}

function clause(plane: number, rect: [number, number, number, number]): RectClauseJson {
  return { plane, rect, membership: "inside" };
}

describe("store", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("builds pairings over the padded width", () => {
    expect(buildPairing([0, 1, 2, 3], 4)).toEqual([
      [0, 1],
      [2, 3],
    ]);
    expect(buildPairing([2, 0, 1], 3)).toEqual([
      [2, 0],
      [1, 3], // service pads odd widths with a duplicate slot at index n
    ]);
  });

  it("shows exactly the accuracy the service returned, never a local number", async () => {
    const { requests, fetchFn } = makeTransport();
    const store = new Store({ api: new ApiClient("http://svc", fetchFn) });
    await readySession(store, requests);

    expect(store.upsertClause(null, clause(0, [0, 1, 0, 1]))).toBe(true);
    await vi.advanceTimersByTimeAsync(150);
    const evalRequest = requests.find((r) => r.url.includes("/rules/eval"));
    expect(evalRequest).toBeDefined();
    // a value no local computation of this rule could produce
    evalRequest!.resolve({
      report: { accuracy: 0.42, correct: 42, total: 100, confusion: [], covered_ids: [] },
      accuracy: 0.42,
      text: "if ... then A else B",
      dataset_version: 1,
    });
    await vi.waitFor(() => expect(store.state.badgeAccuracy).toBe(0.42));
  });

  it("rejects zero-area rectangles client-side without a request", async () => {
    const { requests, fetchFn } = makeTransport();
    const store = new Store({ api: new ApiClient("http://svc", fetchFn) });
    await readySession(store, requests);
    const before = requests.length;

    expect(store.upsertClause(null, clause(0, [0.5, 0.5, 0, 1]))).toBe(false);
    await vi.advanceTimersByTimeAsync(400);
    expect(requests.length).toBe(before);
    expect(store.state.error).toContain("zero-area");
    expect(store.state.clauses.length).toBe(0);
  });

  it("never lets a delayed older response overwrite newer state", async () => {
    const { requests, fetchFn } = makeTransport();
    const store = new Store({ api: new ApiClient("http://svc", fetchFn), debounceMs: 0 });
    await readySession(store, requests);

    store.upsertClause(null, clause(0, [0, 0.5, 0, 0.5]));
    await vi.advanceTimersByTimeAsync(1);
    store.upsertClause(0, clause(0, [0, 0.9, 0, 0.9]));
    await vi.advanceTimersByTimeAsync(1);

    const evals = requests.filter((r) => r.url.includes("/rules/eval"));
    expect(evals.length).toBe(2);
    // the newer request resolves first ...
    evals[1].resolve({
      report: { accuracy: 0.9, correct: 9, total: 10, confusion: [], covered_ids: [] },
      accuracy: 0.9,
      text: "newer",
      dataset_version: 1,
    });
    await vi.waitFor(() => expect(store.state.badgeAccuracy).toBe(0.9));
    // ... and the older one arrives late: it must be dropped
    evals[0].resolve({
      report: { accuracy: 0.1, correct: 1, total: 10, confusion: [], covered_ids: [] },
      accuracy: 0.1,
      text: "older",
      dataset_version: 1,
    });
    await vi.advanceTimersByTimeAsync(5);
    expect(store.state.badgeAccuracy).toBe(0.9);
    expect(store.state.ruleText).toBe("newer");
  });

  it("coalesces rapid reorders into one encode of the final pairing", async () => {
    const { requests, fetchFn } = makeTransport();
    const store = new Store({ api: new ApiClient("http://svc", fetchFn) });
    await readySession(store, requests);
    // settle the initial encode fired by session creation
    const initial = requests.filter((r) => r.url.includes("/encode"));
    for (const r of initial) {
      r.resolve({ system: "spc", graphs: [], labels: [], dataset_version: 1 });
    }
    await vi.advanceTimersByTimeAsync(200);
    const baseline = requests.filter((r) => r.url.includes("/encode")).length;

    store.moveAttribute(0, 1);
    await vi.advanceTimersByTimeAsync(50);
    store.moveAttribute(1, 2);
    await vi.advanceTimersByTimeAsync(50);
    store.moveAttribute(2, 3);
    await vi.advanceTimersByTimeAsync(150);

    const encodes = requests.filter((r) => r.url.includes("/encode"));
    expect(encodes.length).toBe(baseline + 1); // three edits, one request
    expect(encodes[encodes.length - 1].body.pairing).toEqual(
      buildPairing(store.state.attributeOrder, 4),
    );
  });

  it("drops responses tagged with a stale dataset version", async () => {
    const { requests, fetchFn } = makeTransport();
    const store = new Store({ api: new ApiClient("http://svc", fetchFn), debounceMs: 0 });
    await readySession(store, requests);
    store.state.datasetVersion = 2; // dataset was replaced meanwhile

    store.upsertClause(null, clause(0, [0, 1, 0, 1]));
    await vi.advanceTimersByTimeAsync(1);
    const evalRequest = requests.find((r) => r.url.includes("/rules/eval"));
    evalRequest!.resolve({
      report: { accuracy: 0.7, correct: 7, total: 10, confusion: [], covered_ids: [] },
      accuracy: 0.7,
      text: "old generation",
      dataset_version: 1,
    });
    await vi.advanceTimersByTimeAsync(5);
    expect(store.state.badgeAccuracy).toBeNull();
  });

  it("surfaces service validation errors without clobbering shown numbers", async () => {
    const { requests, fetchFn } = makeTransport();
    const store = new Store({ api: new ApiClient("http://svc", fetchFn), debounceMs: 0 });
    await readySession(store, requests);

    store.upsertClause(null, clause(0, [0, 1, 0, 1]));
    await vi.advanceTimersByTimeAsync(1);
    let evalRequest = requests.filter((r) => r.url.includes("/rules/eval")).at(-1)!;
    evalRequest.resolve({
      report: { accuracy: 0.8, correct: 8, total: 10, confusion: [], covered_ids: [] },
      accuracy: 0.8,
      text: "ok",
      dataset_version: 1,
    });
    await vi.waitFor(() => expect(store.state.badgeAccuracy).toBe(0.8));

    store.toggleMembership(0);
    await vi.advanceTimersByTimeAsync(1);
    evalRequest = requests.filter((r) => r.url.includes("/rules/eval")).at(-1)!;
    evalRequest.resolve({ detail: "rule rejected" }, 422);
    await vi.advanceTimersByTimeAsync(5);
    expect(store.state.error).toContain("rule rejected");
    expect(store.state.badgeAccuracy).toBe(0.8); // last good number stays
  });

  it("adopts trained angles into the slider state", async () => {
    const { requests, fetchFn } = makeTransport();
    const store = new Store({ api: new ApiClient("http://svc", fetchFn), debounceMs: 0 });
    await readySession(store, requests);

    const training = store.autoTrain(0);
    await vi.waitFor(() =>
      expect(requests.some((r) => r.url.includes("/glcl/train"))).toBe(true),
    );
    const trainRequest = requests.find((r) => r.url.includes("/glcl/train"))!;
    trainRequest.resolve({
      name: "default",
      model: {
        coefficients: [1, -0.5, 0, 0.25],
        threshold: 0.6,
        positive_class: "B",
        negative_class: "A",
      },
      accuracy: 0.95,
      angles: [0, 1.0472, 1.5708, 1.3181],
      dataset_version: 1,
    });
    await training;
    expect(store.state.trainAccuracy).toBe(0.95);
    expect(store.state.angles).toEqual([0, 1.0472, 1.5708, 1.3181]);
    expect(store.state.signs).toEqual([1, -1, 1, 1]);
  });
});
