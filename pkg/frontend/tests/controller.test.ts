import { describe, expect, it } from "vitest";

import type { ApiClient } from "../src/api.js";
import { AnnotationController } from "../src/controller.js";
import type { AnnotationBody, PlanNext, SaveResult, VocabResponse } from "../src/types.js";

const VOCAB: VocabResponse = {
  context: ["PATROL_VEHICLE", "OUTDOOR", "INDOOR", "LOW_VIS"],
  activity: ["ROUTINE", "FOOT_PURSUIT", "HIGH_ACTIVITY", "UNKNOWN"],
  low_evidence: { context: "LOW_VIS", activity: "UNKNOWN" },
};

/** In-memory stand-in implementing the server's queue and revision rules. */
class FakeApi {
  queue: string[];
  saved = new Map<string, { body: AnnotationBody; revision: number }>();
  posted: AnnotationBody[] = [];
  offline = false;

  constructor(keys: string[]) {
    this.queue = keys;
  }

  async getVocab(): Promise<VocabResponse> {
    return VOCAB;
  }

  async getPlanNext(passId: number): Promise<PlanNext> {
    for (let i = 0; i < this.queue.length; i++) {
      const key = this.queue[i];
      if (!this.saved.has(`${key}#${passId}`)) {
        return {
          done: false,
          key,
          video_id: key.split(":")[0],
          index: Number(key.split(":")[1]),
          start_time_s: 10 * i,
          end_time_s: 10 * (i + 1),
          position: i,
          total: this.queue.length,
        };
      }
    }
    return { done: true, total: this.queue.length };
  }

  async postAnnotation(body: AnnotationBody): Promise<SaveResult> {
    if (this.offline) return { status: "offline" };
    this.posted.push(body);
    const slot = `${body.key}#${body.pass_id}`;
    const current = this.saved.get(slot)?.revision ?? 0;
    if (body.base_revision !== current) {
      return { status: "stale", revision: current };
    }
    const revision = current + 1;
    this.saved.set(slot, { body, revision });
    return { status: "created", revision };
  }
}

function controllerWith(api: FakeApi, passId = 1): AnnotationController {
  return new AnnotationController(api as unknown as ApiClient, {
    passId,
    annotatorId: "tester",
    now: () => "2026-08-10T00:00:00Z",
  });
}

async function labelCurrent(controller: AnnotationController, ctxKey = "2", actKey = "q") {
  controller.handleKey(ctxKey);
  controller.handleKey(actKey);
  return controller.save();
}

describe("annotate flow", () => {
  it("saving advances through the queue in order", async () => {
    const api = new FakeApi(["v1:00000", "v1:00002", "v2:00001"]);
    const controller = controllerWith(api);
    await controller.start();
    const served: string[] = [];
    while (!controller.state.queueDone) {
      served.push(controller.state.window!.key);
      await labelCurrent(controller);
    }
    expect(served).toEqual(["v1:00000", "v1:00002", "v2:00001"]);
    expect(api.saved.size).toBe(3);
  });

  it("save without both selections never hits the server", async () => {
    const api = new FakeApi(["v1:00000"]);
    const controller = controllerWith(api);
    await controller.start();
    controller.handleKey("1"); // context only
    const result = await controller.save();
    expect(result).toBeNull();
    expect(api.posted).toHaveLength(0);
    expect(controller.state.message).toMatch(/activity/);
  });

  it("keyboard selections map through the server vocabulary", async () => {
    const api = new FakeApi(["v1:00000"]);
    const controller = controllerWith(api);
    await controller.start();
    controller.handleKey("3");
    controller.handleKey("e");
    controller.handleKey("t");
    await controller.save();
    expect(api.posted[0]).toMatchObject({
      context: "INDOOR",
      activity: "HIGH_ACTIVITY",
      context_transition: true,
      activity_transition: false,
    });
  });

  it("a stale save reloads revision state and prompts instead of overwriting", async () => {
    const api = new FakeApi(["v1:00000"]);
    // Another writer already saved revision 1 for this slot.
    await api.postAnnotation({
      key: "v1:00000",
      context: "OUTDOOR",
      activity: "ROUTINE",
      context_transition: false,
      activity_transition: false,
      pass_id: 1,
      annotator_id: "other",
      created_at: "2026-08-09T00:00:00Z",
      base_revision: 0,
    });
    const controller = controllerWith(api);
    // The fake queue treats the slot as labeled; point the controller at it anyway.
    controller.vocab = VOCAB;
    controller.state = {
      ...controller.state,
      window: { key: "v1:00000", videoId: "v1", index: 0, startTimeS: 0, endTimeS: 10, position: 0, total: 1 },
    };
    controller.selectContextLabel("INDOOR");
    controller.selectActivityLabel("ROUTINE");
    const first = await controller.save();
    expect(first?.status).toBe("stale");
    expect(controller.state.saveStatus).toBe("stale");
    expect(controller.state.message).toMatch(/review and save again/);
    // Saving again with the reloaded base revision succeeds.
    const second = await controller.save();
    expect(second?.status).toBe("created");
    expect(api.saved.get("v1:00000#1")!.revision).toBe(2);
    expect(api.saved.get("v1:00000#1")!.body.context).toBe("INDOOR");
  });

  it("offline saves queue locally and replay on reconnect", async () => {
    const api = new FakeApi(["v1:00000", "v1:00001"]);
    const controller = controllerWith(api);
    await controller.start();

    api.offline = true;
    const result = await labelCurrent(controller);
    expect(result?.status).toBe("offline");
    expect(controller.offline.size).toBe(1);
    expect(controller.state.saveStatus).toBe("queued-offline");
    expect(controller.state.message).toMatch(/offline/);

    api.offline = false;
    // The next successful save flushes the local queue first.
    await controller.advance();
    expect(controller.state.window!.key).toBe("v1:00000"); // still unlabeled server-side
    await labelCurrent(controller, "2", "q");
    expect(controller.offline.size).toBe(0);
    expect(api.saved.has("v1:00000#1")).toBe(true);
  });

  it("pass 2 serves the same order as pass 1", async () => {
    const api = new FakeApi(["v1:00000", "v1:00003", "v2:00002"]);
    const pass1 = controllerWith(api, 1);
    await pass1.start();
    const order1: string[] = [];
    while (!pass1.state.queueDone) {
      order1.push(pass1.state.window!.key);
      await labelCurrent(pass1);
    }
    const pass2 = controllerWith(api, 2);
    await pass2.start();
    const order2: string[] = [];
    while (!pass2.state.queueDone) {
      order2.push(pass2.state.window!.key);
      await labelCurrent(pass2, "4", "r");
    }
    expect(order2).toEqual(order1);
  });
});
