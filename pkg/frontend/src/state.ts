/** View model for the annotation session.
 *
 * Mutations are queued so at most one request is in flight; after every
 * round trip (success or failure) the local mirror is replaced by the
 * server's session, so the marker set always equals GET /api/session.
 * Fits re-run automatically after each edit when auto-fit is on and at
 * least four points exist.
 */

import { ApiClient } from "./api.js";
import { ApiError, FitPayload, SessionPayload } from "./types.js";

export interface ViewState {
  session: SessionPayload | null;
  fit: FitPayload | null;
  /** non-fatal message surfaced inline, cleared on the next success */
  notice: string | null;
  exportPaths: { homography: string; session: string } | null;
  busy: boolean;
}

type Listener = (state: ViewState) => void;

export class SessionStore {
  private state: ViewState = {
    session: null,
    fit: null,
    notice: null,
    exportPaths: null,
    busy: false,
  };
  private listeners: Listener[] = [];
  private queue: Promise<void> = Promise.resolve();
  autoFit = true;

  constructor(private readonly api: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
    listener(this.state);
  }

  get current(): ViewState {
    return this.state;
  }

  private emit(partial: Partial<ViewState>): void {
    this.state = { ...this.state, ...partial };
    for (const l of this.listeners) l(this.state);
  }

  /** Queue one mutation; reconcile against the server whatever happens. */
  private enqueue(work: () => Promise<void>): Promise<void> {
    const run = async () => {
      // a fresh attempt clears the previous notice; work() may set a new one
      this.emit({ busy: true, notice: null });
      try {
        await work();
      } catch (err) {
        const message =
          err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
        this.emit({ notice: message });
      } finally {
        try {
          await this.reload();
        } catch {
          // unreachable backend: keep the stale mirror, the next call retries
        }
        this.emit({ busy: false });
      }
    };
    this.queue = this.queue.then(run, run);
    return this.queue;
  }

  /** Surface a client-side message in the same inline slot as server errors. */
  showNotice(message: string): void {
    this.emit({ notice: message });
  }

  /** Replace the local mirror with the server's state. */
  async reload(): Promise<void> {
    const payload = await this.api.getSession();
    this.emit({ session: payload.session, fit: payload.fit });
  }

  async refit(): Promise<void> {
    try {
      const fit = await this.api.fit();
      this.emit({ fit, notice: null });
    } catch (err) {
      if (err instanceof ApiError) {
        this.emit({ fit: null, notice: `${err.code}: ${err.message}` });
      } else {
        throw err;
      }
    }
  }

  private async maybeAutoFit(): Promise<void> {
    const n = this.state.session?.points.length ?? 0;
    if (this.autoFit && n >= 4) {
      await this.refit();
    }
  }

  addPoint(image: [number, number], plane: [number, number]): Promise<void> {
    return this.enqueue(async () => {
      await this.api.addPoint(image, plane);
      await this.reload();
      await this.maybeAutoFit();
    });
  }

  updatePoint(index: number, image: [number, number], plane: [number, number]): Promise<void> {
    return this.enqueue(async () => {
      await this.api.updatePoint(index, image, plane);
      await this.reload();
      await this.maybeAutoFit();
    });
  }

  deletePoint(index: number): Promise<void> {
    return this.enqueue(async () => {
      await this.api.deletePoint(index);
      await this.reload();
      await this.maybeAutoFit();
    });
  }

  fitNow(): Promise<void> {
    return this.enqueue(() => this.refit());
  }

  exportFiles(): Promise<void> {
    return this.enqueue(async () => {
      const paths = await this.api.exportFiles();
      this.emit({
        exportPaths: { homography: paths.homography_path, session: paths.session_path },
      });
    });
  }

  /** Resolves once every queued mutation has settled. */
  idle(): Promise<void> {
    return this.queue;
  }
}
