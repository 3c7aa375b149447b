/** Popup-side session state machine.
 *
 * Drives one consultation at a time: upload, watch the pipeline, surface
 * the summary for review, and only ever touch the form after the
 * physician's explicit confirmation. The `applied` phase is reachable
 * solely through confirmAndApply from `review`; there is no other code
 * path that writes to the page.
 */

import type { PipelineServiceApi } from './api';
import { applyFillPlan, type ApplicationReport } from './autofill';
import type { FillPlan, SiteProfile, UiPhase } from './types';

export interface UiSessionView {
  sessionId: string | null;
  phase: UiPhase;
  stageProgress: string;
  summary: Record<string, string> | null;
  plan: FillPlan | null;
  warnings: string[];
  errorMessage: string;
}

export interface SessionControllerOptions {
  pollIntervalMs?: number;
  maxPolls?: number;
  sleep?: (ms: number) => Promise<void>;
  onChange?: (view: UiSessionView) => void;
}

export interface PageTarget {
  document: Document;
  url: string;
}

const TERMINAL_STATES = new Set(['plan_ready', 'failed']);

export class SessionController {
  private readonly client: PipelineServiceApi;
  private readonly pollIntervalMs: number;
  private readonly maxPolls: number;
  private readonly sleep: (ms: number) => Promise<void>;
  private readonly onChange?: (view: UiSessionView) => void;
  private view: UiSessionView = emptyView();

  constructor(client: PipelineServiceApi, options: SessionControllerOptions = {}) {
    this.client = client;
    this.pollIntervalMs = options.pollIntervalMs ?? 500;
    this.maxPolls = options.maxPolls ?? 240;
    this.sleep = options.sleep ?? ((ms) => new Promise((resolve) => setTimeout(resolve, ms)));
    this.onChange = options.onChange;
  }

  snapshot(): UiSessionView {
    return { ...this.view, warnings: [...this.view.warnings] };
  }

  markRecording(): void {
    if (this.view.phase !== 'idle') {
      return; // recording can only start from a fresh popup state
    }
    this.patch({ phase: 'recording', stageProgress: 'recording' });
  }

  markRecordingStopped(): void {
    if (this.view.phase === 'recording') {
      this.patch({ phase: 'idle', stageProgress: '' });
    }
  }

  reset(): void {
    this.view = emptyView();
    this.emit();
  }

  /** Upload a WAV blob, run the pipeline, and poll until review or error. */
  async submitAndPoll(wav: Blob): Promise<UiSessionView> {
    if (this.view.phase !== 'idle' && this.view.phase !== 'recording') {
      throw new Error(`cannot submit while in phase ${this.view.phase}`);
    }
    this.patch({ phase: 'uploading', stageProgress: 'uploading', errorMessage: '' });
    let sessionId: string;
    try {
      sessionId = await this.client.createSession();
      this.patch({ sessionId });
      await this.client.uploadAudio(sessionId, wav);
    } catch (error) {
      return this.fail('upload', error);
    }

    this.patch({ phase: 'processing', stageProgress: 'queued' });
    // run in the background; polling surfaces the stage transitions
    const runPromise = this.client.run(sessionId).catch(() => undefined);

    for (let i = 0; i < this.maxPolls; i++) {
      let session;
      try {
        session = await this.client.getSession(sessionId);
      } catch (error) {
        return this.fail('status poll', error);
      }
      if (!TERMINAL_STATES.has(session.state)) {
        if (session.state !== this.view.stageProgress) {
          this.patch({ stageProgress: session.state });
        }
        await this.sleep(this.pollIntervalMs);
        continue;
      }
      await runPromise;
      if (session.state === 'failed') {
        const stage = session.failure?.stage ?? 'unknown';
        this.patch({
          phase: 'error',
          stageProgress: stage,
          errorMessage: session.failure?.message ?? 'pipeline failed',
        });
        return this.snapshot();
      }
      let plan: FillPlan;
      try {
        plan = await this.client.getFillPlan(sessionId);
      } catch (error) {
        return this.fail('fill plan fetch', error);
      }
      this.patch({
        phase: 'review',
        stageProgress: 'plan_ready',
        summary: session.summary,
        plan,
        warnings: plan.warnings,
      });
      return this.snapshot();
    }
    return this.fail('status poll', new Error('timed out waiting for the pipeline'));
  }

  /** The confirm button. Only valid in review phase.
   *
   * The applier does the actual writing (directly for a same-page form,
   * via the content script for the EHR tab); this gate is the only code
   * path that ever invokes one. A failed application keeps the session in
   * review so the physician can retry or reject.
   */
  async confirmAndApply(
    applier: (plan: FillPlan, profile: SiteProfile) => ApplicationReport | Promise<ApplicationReport>,
    profile: SiteProfile,
  ): Promise<ApplicationReport> {
    if (this.view.phase !== 'review') {
      throw new Error(`confirm is only available during review, not ${this.view.phase}`);
    }
    if (this.view.plan === null) {
      throw new Error('no fill plan to apply');
    }
    const report = await applier(this.view.plan, profile);
    this.patch({ phase: 'applied', stageProgress: 'applied' });
    return report;
  }

  /** Convenience for forms living in the same document (tests, demo form). */
  confirmAndApplyToPage(target: PageTarget, profile: SiteProfile): Promise<ApplicationReport> {
    return this.confirmAndApply(
      (plan, prof) => applyFillPlan(plan, prof, target.document, target.url),
      profile,
    );
  }

  /** The reject button: discard the plan without touching the form. */
  reject(): void {
    if (this.view.phase !== 'review') {
      return;
    }
    this.reset();
  }

  private fail(context: string, error: unknown): UiSessionView {
    this.patch({
      phase: 'error',
      stageProgress: context,
      errorMessage: String(error instanceof Error ? error.message : error),
    });
    return this.snapshot();
  }

  private patch(changes: Partial<UiSessionView>): void {
    this.view = { ...this.view, ...changes };
    this.emit();
  }

  private emit(): void {
    this.onChange?.(this.snapshot());
  }
}

function emptyView(): UiSessionView {
  return {
    sessionId: null,
    phase: 'idle',
    stageProgress: '',
    summary: null,
    plan: null,
    warnings: [],
    errorMessage: '',
  };
}
