/** Local buffer for annotations made while the server is unreachable.
 *
 * Entries replay in FIFO order on reconnect. Replay stops at the first
 * failure other than a duplicate (stale) so nothing is silently dropped.
 */

import type { AnnotationBody, SaveResult } from "./types.js";

export type PostFn = (body: AnnotationBody) => Promise<SaveResult>;

export class OfflineQueue {
  private entries: AnnotationBody[] = [];

  get size(): number {
    return this.entries.length;
  }

  pending(): readonly AnnotationBody[] {
    return this.entries;
  }

  enqueue(body: AnnotationBody): void {
    this.entries.push(body);
  }

  /** Replay queued annotations; returns how many were accepted. */
  async replay(post: PostFn): Promise<{ sent: number; remaining: number }> {
    let sent = 0;
    while (this.entries.length > 0) {
      const head = this.entries[0];
      const result = await post(head);
      if (result.status === "created" || result.status === "stale") {
        // Stale means someone saved while we were offline; the queued copy
        // is superseded, not lost evidence, so drop it and continue.
        this.entries.shift();
        sent += 1;
        continue;
      }
      if (result.status === "offline") break;
      // Invalid entries cannot succeed later either; drop and continue.
      this.entries.shift();
    }
    return { sent, remaining: this.entries.length };
  }
}
