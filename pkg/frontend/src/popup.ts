/** Popup wiring: recording controls, upload, status, review, confirm. */

import { ServiceClient } from './api';
import { ConsultationRecorder, RecorderError, blobToWav } from './recorder';
import { SessionController, type UiSessionView } from './session';
import { SUMMARY_KEYS, type SiteProfile } from './types';

const DEFAULT_SERVICE_URL = 'http://127.0.0.1:8400';
const DEFAULT_PROFILE: SiteProfile = { formUrlPattern: '*', fieldIdOverrides: {} };

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`popup markup is missing #${id}`);
  }
  return found as T;
}

async function loadSettings(): Promise<{ serviceUrl: string; profile: SiteProfile }> {
  try {
    const stored = await chrome.storage.local.get(['serviceUrl', 'siteProfile']);
    return {
      serviceUrl: stored.serviceUrl ?? DEFAULT_SERVICE_URL,
      profile: stored.siteProfile ?? DEFAULT_PROFILE,
    };
  } catch {
    return { serviceUrl: DEFAULT_SERVICE_URL, profile: DEFAULT_PROFILE };
  }
}

function renderSummary(view: UiSessionView, container: HTMLElement): void {
  container.textContent = '';
  if (!view.plan) {
    return;
  }
  // preview shows exactly what will be written, straight from the plan
  for (const entry of view.plan.entries) {
    const row = document.createElement('div');
    row.className = 'summary-row';
    const label = document.createElement('strong');
    label.textContent = entry.field_id;
    const value = document.createElement('div');
    value.textContent = entry.value;
    row.append(label, value);
    container.append(row);
  }
  if (view.warnings.length) {
    const warnings = document.createElement('div');
    warnings.className = 'warnings';
    warnings.textContent = `warnings: ${view.warnings.join(', ')}`;
    container.append(warnings);
  }
}

async function main(): Promise<void> {
  const settings = await loadSettings();
  const statusEl = el<HTMLDivElement>('status');
  const summaryEl = el<HTMLDivElement>('summary');
  const startBtn = el<HTMLButtonElement>('start');
  const stopBtn = el<HTMLButtonElement>('stop');
  const uploadInput = el<HTMLInputElement>('upload');
  const confirmBtn = el<HTMLButtonElement>('confirm');
  const rejectBtn = el<HTMLButtonElement>('reject');

  const client = new ServiceClient(settings.serviceUrl);
  const recorder = new ConsultationRecorder();
  const controller = new SessionController(client, {
    onChange: (view) => {
      statusEl.textContent = view.errorMessage
        ? `${view.phase}: ${view.errorMessage} (${view.stageProgress})`
        : `${view.phase}${view.stageProgress ? ' - ' + view.stageProgress : ''}`;
      confirmBtn.disabled = view.phase !== 'review';
      rejectBtn.disabled = view.phase !== 'review';
      stopBtn.disabled = view.phase !== 'recording';
      startBtn.disabled = view.phase !== 'idle';
      renderSummary(view, summaryEl);
    },
  });
  controller.reset();

  startBtn.addEventListener('click', async () => {
    try {
      await recorder.start();
      controller.markRecording();
    } catch (error) {
      statusEl.textContent =
        error instanceof RecorderError ? `error: ${error.code}` : `error: ${String(error)}`;
    }
  });

  stopBtn.addEventListener('click', async () => {
    const captured = await recorder.stop();
    controller.markRecordingStopped();
    if (!captured) {
      return; // stop without start: nothing changes
    }
    const wav = await blobToWav(captured);
    await controller.submitAndPoll(wav);
  });

  uploadInput.addEventListener('change', async () => {
    const file = uploadInput.files?.[0];
    if (!file) {
      return;
    }
    const wav = file.name.toLowerCase().endsWith('.wav') ? file : await blobToWav(file);
    await controller.submitAndPoll(wav);
  });

  confirmBtn.addEventListener('click', async () => {
    try {
      const report = await controller.confirmAndApply(async (plan, profile) => {
        const [tab] = await chrome.tabs.query({ active: true, currentWindow: true });
        if (!tab?.id) {
          throw new Error('no active tab to fill');
        }
        const response = await chrome.tabs.sendMessage(tab.id, {
          type: 'apply-fill-plan',
          plan,
          profile,
        });
        if (!response?.ok) {
          throw new Error(`${response?.code ?? 'ApplyFailed'}: ${response?.message ?? ''}`);
        }
        return response.report;
      }, settings.profile);
      statusEl.textContent = `applied ${report.applied.length}, missing ${report.missing.length}`;
    } catch (error) {
      statusEl.textContent = `error: ${String(error instanceof Error ? error.message : error)}`;
    }
  });

  rejectBtn.addEventListener('click', () => controller.reject());

  // make the eight expected keys visible for quick operator sanity checks
  summaryEl.dataset.expectedKeys = SUMMARY_KEYS.join(',');
}

void main();
