import { readFileSync } from 'node:fs';
import { join } from 'node:path';

import { beforeEach, describe, expect, it } from 'vitest';

import { NoMatchingForm, applyFillPlan, urlMatchesPattern } from '../src/autofill';
import { DEFAULT_FIELD_IDS, SUMMARY_KEYS, type FillPlan, type SiteProfile } from '../src/types';

const DEMO_URL = 'https://ehr.example/anamnesis/form';
const PROFILE: SiteProfile = { formUrlPattern: 'https://ehr.example/*', fieldIdOverrides: {} };

const demoHtml = readFileSync(join(process.cwd(), 'demo', 'form.html'), 'utf-8');

function loadDemoForm(): void {
  const bodyMatch = demoHtml.match(/<body>([\s\S]*)<\/body>/);
  document.body.innerHTML = bodyMatch![1];
}

function demoPlan(): FillPlan {
  return {
    summary_digest: 'd'.repeat(64),
    entries: SUMMARY_KEYS.map((key, i) => ({
      field_id: DEFAULT_FIELD_IDS[key],
      value: `nilai ${i}: contoh isi untuk ${key}`,
    })),
    warnings: [],
  };
}

function fieldValue(id: string): string {
  return (document.getElementById(id) as HTMLTextAreaElement).value;
}

beforeEach(loadDemoForm);

describe('applyFillPlan on the demo form', () => {
  it('writes all 8 fields byte-identically to the plan', () => {
    const plan = demoPlan();
    const report = applyFillPlan(plan, PROFILE, document, DEMO_URL);
    expect(report.applied).toHaveLength(8);
    expect(report.missing).toHaveLength(0);
    for (const entry of plan.entries) {
      expect(fieldValue(entry.field_id)).toBe(entry.value);
    }
  });

  it('reports exactly one missing field when one input is removed', () => {
    document.getElementById('anamnesis_education')!.remove();
    const report = applyFillPlan(demoPlan(), PROFILE, document, DEMO_URL);
    expect(report.applied).toHaveLength(7);
    expect(report.missing).toEqual(['anamnesis_education']);
  });

  it('is idempotent: applying twice leaves identical values', () => {
    const plan = demoPlan();
    applyFillPlan(plan, PROFILE, document, DEMO_URL);
    const first = plan.entries.map((e) => fieldValue(e.field_id));
    applyFillPlan(plan, PROFILE, document, DEMO_URL);
    const second = plan.entries.map((e) => fieldValue(e.field_id));
    expect(second).toEqual(first);
  });

  it('refuses to write on a non-matching page', () => {
    expect(() =>
      applyFillPlan(demoPlan(), PROFILE, document, 'https://elsewhere.example/'),
    ).toThrow(NoMatchingForm);
    for (const key of SUMMARY_KEYS) {
      expect(fieldValue(DEFAULT_FIELD_IDS[key])).toBe('');
    }
  });

  it('dispatches input and change events on each write', () => {
    const seen: string[] = [];
    const target = document.getElementById('anamnesis_chief_complaint')!;
    target.addEventListener('input', () => seen.push('input'));
    target.addEventListener('change', () => seen.push('change'));
    applyFillPlan(demoPlan(), PROFILE, document, DEMO_URL);
    expect(seen).toEqual(['input', 'change']);
  });

  it('honors site-profile field id overrides', () => {
    const custom = document.createElement('textarea');
    custom.id = 'facility_keluhan';
    document.body.append(custom);
    const profile: SiteProfile = {
      formUrlPattern: 'https://ehr.example/*',
      fieldIdOverrides: { chief_complaint: 'facility_keluhan' },
    };
    const plan = demoPlan();
    const report = applyFillPlan(plan, profile, document, DEMO_URL);
    expect(report.applied).toContain('facility_keluhan');
    expect(fieldValue('facility_keluhan')).toBe(plan.entries[0].value);
    expect(fieldValue('anamnesis_chief_complaint')).toBe('');
  });

  it('rejects profiles that override unknown keys', () => {
    const profile = {
      formUrlPattern: '*',
      fieldIdOverrides: { diagnosis: 'x' },
    } as unknown as SiteProfile;
    expect(() => applyFillPlan(demoPlan(), profile, document, DEMO_URL)).toThrow(/unknown summary key/);
  });
});

describe('urlMatchesPattern', () => {
  it('supports wildcard segments', () => {
    expect(urlMatchesPattern('https://ehr.example/*', 'https://ehr.example/a/b')).toBe(true);
    expect(urlMatchesPattern('*', 'anything')).toBe(true);
    expect(urlMatchesPattern('https://ehr.example/*', 'https://other.example/')).toBe(false);
  });

  it('escapes regex metacharacters in patterns', () => {
    expect(urlMatchesPattern('https://ehr.example/a?b=1', 'https://ehr.example/a?b=1')).toBe(true);
    expect(urlMatchesPattern('https://ehr.example/a?b=1', 'https://ehr.example/aXb=1')).toBe(false);
  });
});
