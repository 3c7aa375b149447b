/** Content script: applies a fill plan to the page on request.
 *
 * The popup only sends the apply message after the physician confirmed in
 * the review screen; this script does no writing on its own.
 */

import { NoMatchingForm, applyFillPlan } from './autofill';
import type { FillPlan, SiteProfile } from './types';

interface ApplyMessage {
  type: 'apply-fill-plan';
  plan: FillPlan;
  profile: SiteProfile;
}

chrome.runtime.onMessage.addListener((message: ApplyMessage, _sender, sendResponse) => {
  if (message?.type !== 'apply-fill-plan') {
    return;
  }
  try {
    const report = applyFillPlan(message.plan, message.profile, document, window.location.href);
    sendResponse({ ok: true, report });
  } catch (error) {
    sendResponse({
      ok: false,
      code: error instanceof NoMatchingForm ? 'NoMatchingForm' : 'ApplyFailed',
      message: String(error instanceof Error ? error.message : error),
    });
  }
  return true;
});
