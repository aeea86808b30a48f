/** Client-side drive of one annotation session.
 *
 * The controller owns everything the widgets need: the last status, the
 * open query batch, locally staged labels, and a log of every phase it has
 * seen.  It talks to the service only through the ServiceApi interface, so
 * tests can script the far side.
 */

import type {
  Phase,
  QueryBatch,
  ServiceApi,
  SessionStatus,
  SubmitResult,
} from "./api.js";

export class SessionController {
  status: SessionStatus | null = null;
  batch: QueryBatch | null = null;
  cursor = 0;
  /** Deduplicated sequence of phases observed, in order. */
  readonly phaseLog: Phase[] = [];
  private staged = new Map<string, number>();

  constructor(
    private readonly api: ServiceApi,
    readonly sessionId: string,
  ) {}

  notePhase(phase: Phase): void {
    if (this.phaseLog[this.phaseLog.length - 1] !== phase) {
      this.phaseLog.push(phase);
    }
  }

  /** Fetch status; when a new batch opened, pull it and reset staging. */
  async poll(): Promise<SessionStatus> {
    const status = await this.api.status(this.sessionId);
    this.status = status;
    this.notePhase(status.phase);
    if (status.phase === "awaiting_labels") {
      const round = status.iteration + 1;
      if (this.batch === null || this.batch.iteration !== round) {
        this.batch = await this.api.queries(this.sessionId);
        this.staged.clear();
        this.cursor = 0;
      }
    } else if (this.batch !== null) {
      // the server moved past our batch (submit landed, or another client)
      this.batch = null;
      this.staged.clear();
      this.cursor = 0;
    }
    return status;
  }

  get queriedIds(): string[] {
    return this.batch?.queried_ids ?? [];
  }

  get currentId(): string | null {
    return this.queriedIds[this.cursor] ?? null;
  }

  labelOf(sampleId: string): number | undefined {
    return this.staged.get(sampleId);
  }

  get stagedCount(): number {
    return this.staged.size;
  }

  get complete(): boolean {
    const ids = this.queriedIds;
    return ids.length > 0 && ids.every((id) => this.staged.has(id));
  }

  /** Label the sample under the cursor, then jump to the next unlabeled one. */
  stage(classIndex: number): void {
    const id = this.currentId;
    if (id === null) throw new Error("no open query batch");
    const names = this.status?.class_names ?? [];
    if (!Number.isInteger(classIndex) || classIndex < 0 || classIndex >= names.length) {
      throw new RangeError(`class index ${classIndex} outside 0..${names.length - 1}`);
    }
    this.staged.set(id, classIndex);
    this.advanceToUnlabeled();
  }

  clearLabel(sampleId: string): void {
    this.staged.delete(sampleId);
  }

  move(delta: number): void {
    const n = this.queriedIds.length;
    if (n === 0) return;
    this.cursor = Math.min(n - 1, Math.max(0, this.cursor + delta));
  }

  moveTo(sampleId: string): void {
    const i = this.queriedIds.indexOf(sampleId);
    if (i >= 0) this.cursor = i;
  }

  private advanceToUnlabeled(): void {
    const ids = this.queriedIds;
    for (let step = 1; step <= ids.length; step++) {
      const i = (this.cursor + step) % ids.length;
      const id = ids[i];
      if (id !== undefined && !this.staged.has(id)) {
        this.cursor = i;
        return;
      }
    }
    // everything staged: park on the last sample for review
    this.cursor = ids.length - 1;
  }

  /** Submit the full batch.  The service rejects partial batches, so this
   * throws locally when labels are missing. */
  async submit(): Promise<SubmitResult> {
    if (this.batch === null) throw new Error("no open query batch");
    if (!this.complete) {
      throw new Error(`batch incomplete: ${this.stagedCount}/${this.queriedIds.length} staged`);
    }
    const labels: Record<string, number> = {};
    for (const id of this.batch.queried_ids) labels[id] = this.staged.get(id)!;
    const result = await this.api.submitLabels(this.sessionId, labels);
    this.notePhase(result.phase);
    this.batch = null;
    this.staged.clear();
    this.cursor = 0;
    return result;
  }
}

/** Poll until the session reaches one of `want`.  Rejects on phase "error"
 * (unless asked for) and on timeout. */
export async function pollUntil(
  controller: SessionController,
  want: readonly Phase[],
  timeoutMs: number,
  intervalMs = 150,
): Promise<SessionStatus> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const status = await controller.poll();
    if (want.includes(status.phase)) return status;
    if (status.phase === "error") {
      throw new Error(`session failed: ${status.last_error}`);
    }
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${want.join("/")} (at ${status.phase})`);
    }
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}
