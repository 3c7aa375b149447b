/** Applies a fill plan to the EHR form in the page.
 *
 * Writes go through the page's normal change notifications so framework
 * listeners see them. Misses are reported, never fatal; writing to the
 * wrong page is prevented by the site-profile URL guard.
 */

import { DEFAULT_FIELD_IDS, SUMMARY_KEYS } from './types';
import type { FillPlan, SiteProfile, SummaryKey } from './types';

export class NoMatchingForm extends Error {
  constructor(url: string, pattern: string) {
    super(`page ${url} does not match the form pattern ${pattern}`);
    this.name = 'NoMatchingForm';
  }
}

export interface ApplicationReport {
  applied: string[];
  missing: string[];
}

export function validateSiteProfile(profile: SiteProfile): void {
  for (const key of Object.keys(profile.fieldIdOverrides)) {
    if (!(SUMMARY_KEYS as readonly string[]).includes(key)) {
      throw new Error(`site profile overrides unknown summary key: ${key}`);
    }
  }
}

export function urlMatchesPattern(pattern: string, url: string): boolean {
  const escaped = pattern.replace(/[.+?^${}()|[\]\\]/g, '\\$&');
  const regex = new RegExp('^' + escaped.replace(/\*/g, '.*') + '$');
  return regex.test(url);
}

const KEY_BY_DEFAULT_ID = new Map<string, SummaryKey>(
  (Object.entries(DEFAULT_FIELD_IDS) as [SummaryKey, string][]).map(([key, id]) => [id, key]),
);

/** Default field ids are rewritten by the profile; custom ids pass through. */
export function resolveTargetId(fieldId: string, profile: SiteProfile): string {
  const key = KEY_BY_DEFAULT_ID.get(fieldId);
  if (key !== undefined) {
    const override = profile.fieldIdOverrides[key];
    if (override) {
      return override;
    }
  }
  return fieldId;
}

// tag-name check rather than instanceof: elements from another realm
// (iframes, injected documents) fail cross-realm instanceof
function isFillable(el: Element): el is HTMLInputElement | HTMLTextAreaElement {
  return el.tagName === 'INPUT' || el.tagName === 'TEXTAREA';
}

export function applyFillPlan(
  plan: FillPlan,
  profile: SiteProfile,
  doc: Document,
  pageUrl: string,
): ApplicationReport {
  validateSiteProfile(profile);
  if (!urlMatchesPattern(profile.formUrlPattern, pageUrl)) {
    throw new NoMatchingForm(pageUrl, profile.formUrlPattern);
  }
  const EventCtor = doc.defaultView?.Event ?? Event;
  const report: ApplicationReport = { applied: [], missing: [] };
  for (const entry of plan.entries) {
    const targetId = resolveTargetId(entry.field_id, profile);
    const element = doc.getElementById(targetId);
    if (!element || !isFillable(element)) {
      report.missing.push(targetId);
      continue;
    }
    element.value = entry.value;
    element.dispatchEvent(new EventCtor('input', { bubbles: true }));
    element.dispatchEvent(new EventCtor('change', { bubbles: true }));
    report.applied.push(targetId);
  }
  return report;
}
