import { ApiError, ConnectionError, type ReviewService } from "./api.js";
import { cycleTag, offendingTokenIndex, tagOptions } from "./tags.js";
import type { Progress, QueueItem, TokenView } from "./types.js";

export interface ValidationDisplay {
  message: string;
  tokenIndex: number | null;
}

export interface ActiveExample {
  exampleId: number;
  tokens: TokenView[];
  /** Editable copy; always exactly tokens.length entries. */
  tags: string[];
  /** What the server currently holds (latest correction, else machine tags). */
  serverTags: string[];
  cursor: number;
  status: "PENDING" | "REVIEWED";
  validationError: ValidationDisplay | null;
}

export interface Banner {
  kind: "connection" | "server";
  message: string;
}

export type SubmitResult =
  | { kind: "submitted"; revision: number }
  | { kind: "needs-confirmation" }
  | { kind: "rejected"; message: string }
  | { kind: "offline" };

const LOW_CONFIDENCE_DEFAULT = 0.5;

/**
 * UI state machine. Pure client of the review service: every state change
 * round-trips through it, and the only local data is the in-progress edit.
 */
export class ReviewModel {
  queue: QueueItem[] = [];
  entityTypes: string[] = [];
  options: string[] = ["O"];
  progress: Progress = { reviewed: 0, pending: 0 };
  active: ActiveExample | null = null;
  banner: Banner | null = null;
  showConfidences = true;
  lowConfidenceThreshold = LOW_CONFIDENCE_DEFAULT;
  annotator: string;

  constructor(
    private readonly service: ReviewService,
    annotator = "reviewer",
  ) {
    this.annotator = annotator;
  }

  async init(): Promise<void> {
    this.banner = null;
    try {
      const schema = await this.service.schema();
      this.entityTypes = schema.entity_types;
      this.options = tagOptions(this.entityTypes);
      await this.refresh();
    } catch (err) {
      this.banner = toBanner(err);
    }
  }

  /** Re-pull queue and progress; statuses (badges) update here. */
  async refresh(): Promise<void> {
    try {
      this.queue = await this.service.queue();
      this.progress = await this.service.progress();
      this.banner = null;
    } catch (err) {
      this.banner = toBanner(err);
    }
  }

  retry(): Promise<void> {
    return this.init();
  }

  async open(exampleId: number): Promise<void> {
    try {
      const detail = await this.service.example(exampleId);
      this.active = {
        exampleId,
        tokens: detail.tokens,
        tags: [...detail.current_tags],
        serverTags: [...detail.current_tags],
        cursor: 0,
        status: detail.status,
        validationError: null,
      };
    } catch (err) {
      this.banner = toBanner(err);
    }
  }

  close(): void {
    this.active = null;
  }

  isDirty(): boolean {
    const active = this.active;
    if (!active) return false;
    return active.tags.some((tag, i) => tag !== active.serverTags[i]);
  }

  /**
   * The single write path for edits. Out-of-range positions and tags outside
   * the picker options are rejected, so a length-changing or free-text
   * submission cannot be produced through the editor.
   */
  setTagAt(index: number, tag: string): void {
    const active = this.active;
    if (!active) throw new Error("no active example");
    if (!Number.isInteger(index) || index < 0 || index >= active.tags.length) {
      throw new RangeError(`token index ${index} out of range`);
    }
    if (!this.options.includes(tag)) {
      throw new RangeError(`tag ${tag} is not in the schema picker`);
    }
    active.tags[index] = tag;
  }

  cycleTagAt(index: number, step: 1 | -1): void {
    const active = this.active;
    if (!active) return;
    const current = active.tags[index];
    if (current === undefined) return;
    this.setTagAt(index, cycleTag(current, this.options, step));
  }

  moveCursor(step: number): void {
    const active = this.active;
    if (!active) return;
    const last = active.tokens.length - 1;
    active.cursor = Math.min(last, Math.max(0, active.cursor + step));
  }

  /** Submitting unchanged tags means "accept machine labels as-is". */
  needsConfirmation(): boolean {
    return this.active !== null && !this.isDirty();
  }

  async submit(acceptUnchanged = false): Promise<SubmitResult> {
    const active = this.active;
    if (!active) throw new Error("no active example");
    if (!this.isDirty() && !acceptUnchanged) {
      return { kind: "needs-confirmation" };
    }
    try {
      // body is exactly the edited tags, one per token
      const ack = await this.service.submit(
        active.exampleId, [...active.tags], this.annotator);
      active.validationError = null;
      active.status = "REVIEWED";
      const item = this.queue.find((q) => q.example_id === active.exampleId);
      if (item) item.status = "REVIEWED";
      await this.refresh();
      this.focusNextPending(active.exampleId);
      return { kind: "submitted", revision: ack.revision };
    } catch (err) {
      if (err instanceof ApiError) {
        // edits stay in place; the offending token is highlighted
        active.validationError = {
          message: err.message,
          tokenIndex: offendingTokenIndex(err.message),
        };
        return { kind: "rejected", message: err.message };
      }
      this.banner = toBanner(err);
      return { kind: "offline" };
    }
  }

  /** After a successful submission the next pending item opens itself. */
  private focusNextPending(after: number): void {
    const ids = this.queue.map((q) => q.example_id);
    const start = ids.indexOf(after);
    for (let offset = 1; offset <= ids.length; offset += 1) {
      const item = this.queue[(start + offset) % ids.length];
      if (item && item.status === "PENDING") {
        void this.open(item.example_id);
        return;
      }
    }
    this.close();
  }

  async exportCorpus() {
    return this.service.exportCorpus();
  }

  /** Presentational only: never changes what gets submitted. */
  isLowConfidence(token: TokenView): boolean {
    return token.confidence < this.lowConfidenceThreshold;
  }

  toggleConfidences(): void {
    this.showConfidences = !this.showConfidences;
  }
}

function toBanner(err: unknown): Banner {
  if (err instanceof ConnectionError) {
    return { kind: "connection", message: err.message };
  }
  return { kind: "server", message: err instanceof Error ? err.message : String(err) };
}
