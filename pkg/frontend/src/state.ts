import { ApiClient } from "./api";
import type {
  AnglesResponse,
  DatasetSummary,
  EncodeResponse,
  ExplainDiff,
  JlEstimateResponse,
  ModelJson,
  Pairing,
  RectClauseJson,
  RectRuleJson,
  RuleEvalResponse,
  ViewName,
} from "./types";

/** Request channels with independent monotone sequencing: a late response
 * on one channel can never clobber a newer one on the same channel. */
type Channel = "encode" | "rules" | "angles" | "train" | "explain" | "jl" | "fsp";

export interface ViewState {
  sessionId: string | null;
  datasetVersion: number | null;
  activeView: ViewName;
  summary: DatasetSummary | null;
  /** pending edit: attribute order driving the next pairing request */
  attributeOrder: number[];
  graphs: EncodeResponse | null;
  /** pending edit: rectangle clauses being drawn/resized */
  clauses: RectClauseJson[];
  thenClass: string | null;
  elseClass: string | null;
  /** accuracy badge — set exclusively from service responses */
  badgeAccuracy: number | null;
  ruleText: string | null;
  report: RuleEvalResponse["report"] | null;
  /** pending edits: angle sliders, signs, optional threshold override */
  angles: number[];
  signs: number[];
  thresholdOverride: number | null;
  anglesResult: AnglesResponse | null;
  model: ModelJson | null;
  trainAccuracy: number | null;
  explainDiff: ExplainDiff | null;
  explainRow: number | null;
  jlEstimate: JlEstimateResponse | null;
  error: string | null;
}

export interface StoreOptions {
  api: ApiClient;
  /** debounce for coalescing rapid edits; service round trips stay calm */
  debounceMs?: number;
}

export type Listener = (state: ViewState) => void;

const DEFAULT_DEBOUNCE_MS = 150;

export function buildPairing(order: number[], nAttributes: number): Pairing {
  const padded = [...order];
  if (padded.length % 2 === 1) {
    padded.push(nAttributes); // the service pads odd widths with a duplicate slot
  }
  const pairs: Pairing = [];
  for (let i = 0; i < padded.length; i += 2) {
    pairs.push([padded[i], padded[i + 1]]);
  }
  return pairs;
}

export class Store {
  readonly state: ViewState = {
    sessionId: null,
    datasetVersion: null,
    activeView: "pairing",
    summary: null,
    attributeOrder: [],
    graphs: null,
    clauses: [],
    thenClass: null,
    elseClass: null,
    badgeAccuracy: null,
    ruleText: null,
    report: null,
    angles: [],
    signs: [],
    thresholdOverride: null,
    anglesResult: null,
    model: null,
    trainAccuracy: null,
    explainDiff: null,
    explainRow: null,
    jlEstimate: null,
    error: null,
  };

  private readonly api: ApiClient;
  private readonly debounceMs: number;
  private readonly listeners = new Set<Listener>();
  private issued: Record<Channel, number>;
  private applied: Record<Channel, number>;
  private timers = new Map<Channel, { id: ReturnType<typeof setTimeout>; fn: () => void }>();
  private inflight = new Set<Promise<void>>();

  constructor(options: StoreOptions) {
    this.api = options.api;
    this.debounceMs = options.debounceMs ?? DEFAULT_DEBOUNCE_MS;
    this.issued = { encode: 0, rules: 0, angles: 0, train: 0, explain: 0, jl: 0, fsp: 0 };
    this.applied = { encode: 0, rules: 0, angles: 0, train: 0, explain: 0, jl: 0, fsp: 0 };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** Wait for every scheduled edit and in-flight request to finish. */
  async settle(): Promise<void> {
    for (let round = 0; round < 10; round += 1) {
      const timers = [...this.timers.values()];
      this.timers.clear();
      for (const timer of timers) {
        clearTimeout(timer.id);
        timer.fn();
      }
      if (this.inflight.size === 0 && this.timers.size === 0) {
        return;
      }
      await Promise.allSettled([...this.inflight]);
    }
  }

  // -- transport plumbing ---------------------------------------------------

  private dispatch<T extends object>(
    channel: Channel,
    work: () => Promise<T>,
    apply: (result: T) => void,
  ): Promise<void> {
    const seq = ++this.issued[channel];
    const promise = (async () => {
      try {
        const result = await work();
        if (seq <= this.applied[channel]) {
          return; // a newer response already landed: drop the stale one
        }
        const version = (result as { dataset_version?: number }).dataset_version;
        if (
          version !== undefined &&
          this.state.datasetVersion !== null &&
          version !== this.state.datasetVersion
        ) {
          return; // response from another dataset generation
        }
        this.applied[channel] = seq;
        this.state.error = null;
        apply(result);
        this.emit();
      } catch (err) {
        if (seq > this.applied[channel]) {
          this.state.error = err instanceof Error ? err.message : String(err);
          this.emit();
        }
      }
    })();
    this.inflight.add(promise);
    promise.finally(() => this.inflight.delete(promise));
    return promise;
  }

  /** Debounce + coalesce: only the last edit within the window is sent. */
  private schedule(channel: Channel, fn: () => void): void {
    const existing = this.timers.get(channel);
    if (existing) {
      clearTimeout(existing.id);
    }
    const id = setTimeout(() => {
      this.timers.delete(channel);
      fn();
    }, this.debounceMs);
    this.timers.set(channel, { id, fn });
  }

  // -- session --------------------------------------------------------------

  async createSession(csv: string, labelColumn: string | number): Promise<void> {
    const created = await this.api.createSession(csv, labelColumn);
    this.state.sessionId = created.id;
    this.state.datasetVersion = created.dataset_version;
    this.state.summary = created.summary;
    const n = created.summary.attributes.length;
    this.state.attributeOrder = Array.from({ length: n }, (_, i) => i);
    const classes = created.summary.classes;
    this.state.thenClass = classes[classes.length - 1] ?? null;
    this.state.elseClass = classes[0] ?? null;
    this.state.angles = new Array(n).fill(0);
    this.state.signs = new Array(n).fill(1);
    this.emit();
    this.requestEncode(); // initial panes
  }

  private requireSession(): string {
    if (!this.state.sessionId) {
      throw new Error("no active session");
    }
    return this.state.sessionId;
  }

  currentPairing(): Pairing {
    const n = this.state.summary?.attributes.length ?? 0;
    return buildPairing(this.state.attributeOrder, n);
  }

  // -- pairing editor -------------------------------------------------------

  moveAttribute(from: number, to: number): void {
    const order = this.state.attributeOrder;
    if (from < 0 || from >= order.length || to < 0 || to >= order.length) {
      return;
    }
    const [item] = order.splice(from, 1);
    order.splice(to, 0, item);
    this.emit();
    this.schedule("encode", () => this.requestEncode());
  }

  private requestEncode(): void {
    const sessionId = this.requireSession();
    const pairing = this.currentPairing();
    void this.dispatch(
      "encode",
      () => this.api.encode(sessionId, "spc", pairing, this.state.datasetVersion),
      (response) => {
        this.state.graphs = response;
      },
    );
  }

  // -- rectangle tool -------------------------------------------------------

  /** Returns false (and sends nothing) for degenerate rectangles. */
  upsertClause(index: number | null, clause: RectClauseJson): boolean {
    const [xLo, xHi, yLo, yHi] = clause.rect;
    if (!(xLo < xHi && yLo < yHi)) {
      this.state.error = "zero-area rectangle rejected";
      this.emit();
      return false;
    }
    if (index === null) {
      this.state.clauses.push(clause);
    } else if (index >= 0 && index < this.state.clauses.length) {
      this.state.clauses[index] = clause;
    } else {
      return false;
    }
    this.emit();
    this.schedule("rules", () => this.requestRuleEval());
    return true;
  }

  removeClause(index: number): void {
    this.state.clauses.splice(index, 1);
    this.emit();
    if (this.state.clauses.length > 0) {
      this.schedule("rules", () => this.requestRuleEval());
    }
  }

  toggleMembership(index: number): void {
    const clause = this.state.clauses[index];
    if (!clause) {
      return;
    }
    clause.membership = clause.membership === "inside" ? "outside" : "inside";
    this.emit();
    this.schedule("rules", () => this.requestRuleEval());
  }

  currentRule(): RectRuleJson | null {
    if (!this.state.thenClass || !this.state.elseClass) {
      return null;
    }
    return {
      clauses: this.state.clauses,
      then_class: this.state.thenClass,
      else_class: this.state.elseClass,
    };
  }

  private requestRuleEval(): void {
    const sessionId = this.requireSession();
    const rule = this.currentRule();
    if (!rule) {
      return;
    }
    const pairing = this.currentPairing();
    void this.dispatch(
      "rules",
      () => this.api.rulesEval(sessionId, rule, pairing, this.state.datasetVersion),
      (response) => {
        this.state.badgeAccuracy = response.accuracy;
        this.state.ruleText = response.text;
        this.state.report = response.report;
      },
    );
  }

  /** Hand the search over to the service; the found rule replaces the
   * hand-drawn clauses and its accuracy feeds the badge. */
  runFsp(seed: number): Promise<void> {
    const sessionId = this.requireSession();
    return this.dispatch(
      "fsp",
      () => this.api.fsp(sessionId, seed, this.state.datasetVersion),
      (response) => {
        this.state.clauses = response.rule.clauses;
        this.state.thenClass = response.rule.then_class;
        this.state.elseClass = response.rule.else_class;
        this.state.badgeAccuracy = response.accuracy;
        this.state.ruleText = response.text;
        this.state.report = response.report;
      },
    );
  }

  // -- angle console --------------------------------------------------------

  setAngle(index: number, radians: number): void {
    if (index < 0 || index >= this.state.angles.length) {
      return;
    }
    this.state.angles[index] = radians;
    this.emit();
  }

  setSign(index: number, sign: 1 | -1): void {
    if (index < 0 || index >= this.state.signs.length) {
      return;
    }
    this.state.signs[index] = sign;
    this.emit();
  }

  setThresholdOverride(value: number | null): void {
    this.state.thresholdOverride = value;
    this.emit();
  }

  /** Slider release: ask the service to re-project with the edited angles. */
  commitAngles(): void {
    this.schedule("angles", () => this.requestAngles());
  }

  private requestAngles(): void {
    const sessionId = this.requireSession();
    void this.dispatch(
      "angles",
      () =>
        this.api.angles(
          sessionId,
          [...this.state.angles],
          [...this.state.signs],
          this.state.thresholdOverride,
        ),
      (response) => {
        this.state.anglesResult = response;
      },
    );
  }

  /** Train on the service and adopt the found angles into the sliders. */
  autoTrain(seed: number): Promise<void> {
    const sessionId = this.requireSession();
    return this.dispatch(
      "train",
      () => this.api.train(sessionId, seed),
      (response) => {
        this.state.model = response.model;
        this.state.trainAccuracy = response.accuracy;
        this.state.angles = [...response.angles];
        this.state.signs = response.model.coefficients.map((c) => (c < 0 ? -1 : 1));
        this.state.thresholdOverride = null;
      },
    );
  }

  // -- explanation panel ----------------------------------------------------

  selectMisclassifiedRow(row: number, k = 2): Promise<void> {
    const sessionId = this.requireSession();
    this.state.explainRow = row;
    return this.dispatch(
      "explain",
      () => this.api.explain(sessionId, row, k),
      (response) => {
        this.state.explainDiff = response.diff;
      },
    );
  }

  // -- dimension bounds view ------------------------------------------------

  queryMinDimension(m: number, eps: number): Promise<void> {
    return this.dispatch(
      "jl",
      () => this.api.jlMinDim(m, eps),
      (response) => {
        this.state.jlEstimate = response;
      },
    );
  }

  setActiveView(view: ViewName): void {
    this.state.activeView = view;
    this.emit();
  }
}
