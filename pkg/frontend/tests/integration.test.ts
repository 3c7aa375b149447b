// @vitest-environment node
/**
 * End-to-end against a real service instance.
 *
 * Runs in the node environment so fetch, FormData, and Blob are the native
 * implementations; the form page is an explicit JSDOM document. Skipped
 * unless the environment points at a running service preloaded with
 * fixtures (scripts/start_test_service.py prints both variables):
 *
 *   SCRIBE_SERVICE_URL=http://127.0.0.1:8400 \
 *   SCRIBE_TEST_WAV=/path/to/integration.wav npx vitest run tests/integration.test.ts
 */

import { readFileSync } from 'node:fs';

import { JSDOM } from 'jsdom';
import { describe, expect, it } from 'vitest';

import { ServiceClient } from '../src/api';
import { SessionController } from '../src/session';
import { DEFAULT_FIELD_IDS, SUMMARY_KEYS, type SiteProfile } from '../src/types';

const serviceUrl = process.env.SCRIBE_SERVICE_URL;
const wavPath = process.env.SCRIBE_TEST_WAV;

const PROFILE: SiteProfile = { formUrlPattern: '*', fieldIdOverrides: {} };

describe.skipIf(!serviceUrl || !wavPath)('against a live service', () => {
  it('records -> review -> confirm fills the demo form', async () => {
    const client = new ServiceClient(serviceUrl!);
    const phases: string[] = [];
    const controller = new SessionController(client, {
      pollIntervalMs: 50,
      onChange: (view) => phases.push(view.phase),
    });

    const wav = new Blob([readFileSync(wavPath!)], { type: 'audio/wav' });
    const view = await controller.submitAndPoll(wav);
    expect(view.phase).toBe('review');
    expect(view.plan?.entries).toHaveLength(8);
    expect(view.summary?.chief_complaint).toBeTruthy();

    const markup = SUMMARY_KEYS.map(
      (key) => `<textarea id="${DEFAULT_FIELD_IDS[key]}"></textarea>`,
    ).join('');
    const dom = new JSDOM(`<body>${markup}</body>`, { url: 'https://ehr.example/anamnesis' });
    const report = await controller.confirmAndApplyToPage(
      { document: dom.window.document, url: dom.window.location.href },
      PROFILE,
    );
    expect(report.applied).toHaveLength(8);
    expect(controller.snapshot().phase).toBe('applied');
    for (const entry of view.plan!.entries) {
      const el = dom.window.document.getElementById(entry.field_id) as HTMLTextAreaElement;
      expect(el.value).toBe(entry.value);
    }
  }, 30_000);
});
