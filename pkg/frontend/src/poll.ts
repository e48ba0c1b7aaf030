// Poll a job until it reaches a terminal state. At most one in-flight
// request per job; a terminal snapshot (or a 404 after deletion) stops the
// loop.

import { ApiClient, ApiError } from "./api.js";
import type { OptimizeJob } from "./types.js";

export interface PollHandle {
  stop: () => void;
  done: Promise<OptimizeJob>;
}

export function pollJob(
  client: ApiClient,
  jobId: string,
  onUpdate: (job: OptimizeJob) => void,
  intervalMs = 250,
  sleep: (ms: number) => Promise<void> = (ms) =>
    new Promise((resolve) => setTimeout(resolve, ms)),
): PollHandle {
  let stopped = false;

  const done = (async () => {
    for (;;) {
      if (stopped) throw new Error("polling stopped");
      let job: OptimizeJob;
      try {
        job = await client.job(jobId);
      } catch (err) {
        if (err instanceof ApiError && err.status === 404) {
          throw new Error(`job ${jobId} no longer exists`);
        }
        throw err;
      }
      onUpdate(job);
      if (job.status === "done") return job;
      if (job.status === "failed") {
        throw new Error(job.error ?? "optimisation failed");
      }
      await sleep(intervalMs);
    }
  })();

  return { stop: () => (stopped = true), done };
}
