/** Wire formats shared with the pipeline service, plus extension-local types. */

export const SUMMARY_KEYS = [
  'chief_complaint',
  'additional_complaint',
  'history_of_present_illness',
  'past_medical_history',
  'family_history',
  'recommended_medication_therapy',
  'recommended_non_medication_therapy',
  'education',
] as const;

export type SummaryKey = (typeof SUMMARY_KEYS)[number];

/** Field ids the default mapping emits; site profiles override these per key. */
export const DEFAULT_FIELD_IDS: Record<SummaryKey, string> = {
  chief_complaint: 'anamnesis_chief_complaint',
  additional_complaint: 'anamnesis_additional_complaint',
  history_of_present_illness: 'anamnesis_history_of_present_illness',
  past_medical_history: 'anamnesis_past_medical_history',
  family_history: 'anamnesis_family_history',
  recommended_medication_therapy: 'anamnesis_recommended_medication_therapy',
  recommended_non_medication_therapy: 'anamnesis_recommended_non_medication_therapy',
  education: 'anamnesis_education',
};

export interface FillPlanEntry {
  field_id: string;
  value: string;
}

export interface FillPlan {
  summary_digest: string;
  entries: FillPlanEntry[];
  warnings: string[];
}

export interface SessionFailure {
  stage: string;
  error_code: string;
  message: string;
}

export interface SessionView {
  session_id: string;
  state: string;
  summary: Record<string, string> | null;
  fill_plan: FillPlan | null;
  failure: SessionFailure | null;
}

export interface SiteProfile {
  /** URL pattern the EHR form lives at; '*' matches any run of characters. */
  formUrlPattern: string;
  fieldIdOverrides: Partial<Record<SummaryKey, string>>;
}

export type UiPhase =
  | 'idle'
  | 'recording'
  | 'uploading'
  | 'processing'
  | 'review'
  | 'applied'
  | 'error';
