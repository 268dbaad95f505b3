/**
 * Manifest-driven ballot drafting and validation.
 *
 * Every vocabulary item (discourse codes, emotion names, confidence labels,
 * weight bounds, the discourse cap) comes from the server's manifest; nothing
 * is hardcoded here. The rules mirror the server's validators exactly, so a
 * draft that passes `validateDraft` is never rejected by the service.
 */

export interface Manifest {
  discourses: { code: string; label: string }[];
  emotions: string[];
  discourse_confidence: string[];
  emotion_confidence: string[];
  emotion_confidence_values: Record<string, number>;
  weight: { min: number; max: number; step: number };
  max_discourses: number;
}

export interface DiscourseSelection {
  d: string;
  conf: string;
  w: number;
}

/** Emotion label map; names absent from the map mean "Definitely Not". */
export interface BallotDraft {
  discourses: DiscourseSelection[];
  emotions: Record<string, string>;
}

export interface BallotPayload {
  discourses: { d: string; conf: string; w: number }[];
  emotions: { e: string; conf: string }[];
}

export interface ToggleResult {
  ok: boolean;
  message?: string;
}

export function emptyDraft(): BallotDraft {
  return { discourses: [], emotions: {} };
}

/** The manifest's lowest emotion label, used as the implicit default. */
export function defaultEmotionLabel(manifest: Manifest): string {
  return manifest.emotion_confidence[0];
}

/**
 * Select or deselect a discourse. Selecting beyond the manifest's cap is
 * refused with a message for inline display; a fresh selection starts at
 * the first confidence level with full weight.
 */
export function toggleDiscourse(
  draft: BallotDraft,
  manifest: Manifest,
  code: string,
): ToggleResult {
  const present = draft.discourses.findIndex((s) => s.d === code);
  if (present >= 0) {
    draft.discourses.splice(present, 1);
    return { ok: true };
  }
  if (!manifest.discourses.some((d) => d.code === code)) {
    return { ok: false, message: `unknown discourse: ${code}` };
  }
  if (draft.discourses.length >= manifest.max_discourses) {
    return {
      ok: false,
      message: `at most ${manifest.max_discourses} discourses per sentence`,
    };
  }
  draft.discourses.push({
    d: code,
    conf: manifest.discourse_confidence[0],
    w: manifest.weight.max,
  });
  return { ok: true };
}

export function setDiscourseConfidence(
  draft: BallotDraft,
  code: string,
  conf: string,
): void {
  const selection = draft.discourses.find((s) => s.d === code);
  if (selection) {
    selection.conf = conf;
  }
}

/** Clamp to the manifest's bounds and snap to its slider step. */
export function quantizeWeight(manifest: Manifest, value: number): number {
  const { min, max, step } = manifest.weight;
  const clamped = Math.min(max, Math.max(min, value));
  const steps = Math.round((clamped - min) / step);
  return Number((min + steps * step).toFixed(4));
}

export function setDiscourseWeight(
  draft: BallotDraft,
  manifest: Manifest,
  code: string,
  value: number,
): void {
  const selection = draft.discourses.find((s) => s.d === code);
  if (selection) {
    selection.w = quantizeWeight(manifest, value);
  }
}

/**
 * Set an emotion's four-level label. The lowest label clears the entry:
 * the server treats unmentioned emotions as that label anyway.
 */
export function setEmotionLabel(
  draft: BallotDraft,
  manifest: Manifest,
  emotion: string,
  label: string,
): void {
  if (label === defaultEmotionLabel(manifest)) {
    delete draft.emotions[emotion];
  } else {
    draft.emotions[emotion] = label;
  }
}

/**
 * Canonical payload: entries sorted the way the server serializes them,
 * so a submitted ballot re-exports byte-for-byte.
 */
export function buildPayload(draft: BallotDraft): BallotPayload {
  const discourses = [...draft.discourses]
    .sort((a, b) => (a.d < b.d ? -1 : a.d > b.d ? 1 : 0))
    .map((s) => ({ d: s.d, conf: s.conf, w: s.w }));
  const emotions = Object.keys(draft.emotions)
    .sort()
    .map((name) => ({ e: name, conf: draft.emotions[name] }));
  return { discourses, emotions };
}

/** Mirror of the server-side ballot rules; empty result means valid. */
export function validateDraft(
  draft: BallotDraft,
  manifest: Manifest,
): string[] {
  const problems: string[] = [];
  const codes = new Set(manifest.discourses.map((d) => d.code));
  const emotionNames = new Set(manifest.emotions);
  const discourseLabels = new Set(manifest.discourse_confidence);
  const emotionLabels = new Set(manifest.emotion_confidence);

  if (draft.discourses.length > manifest.max_discourses) {
    problems.push(`max ${manifest.max_discourses} discourses`);
  }
  const seen = new Set<string>();
  for (const selection of draft.discourses) {
    if (!codes.has(selection.d)) {
      problems.push(`unknown discourse: ${selection.d}`);
    }
    if (seen.has(selection.d)) {
      problems.push(`duplicate discourse: ${selection.d}`);
    }
    seen.add(selection.d);
    if (!discourseLabels.has(selection.conf)) {
      problems.push(`unknown confidence: ${selection.conf}`);
    }
    if (
      selection.w < manifest.weight.min ||
      selection.w > manifest.weight.max
    ) {
      problems.push(`weight out of range: ${selection.w}`);
    }
  }
  for (const [name, label] of Object.entries(draft.emotions)) {
    if (!emotionNames.has(name)) {
      problems.push(`unknown emotion: ${name}`);
    }
    if (!emotionLabels.has(label)) {
      problems.push(`unknown emotion confidence: ${label}`);
    }
  }
  return problems;
}

/** Prefill a draft from a previously stored ballot (review mode). */
export function draftFromBallot(
  manifest: Manifest,
  ballot: {
    discourses: { d: string; conf: string | number; w: number | null }[];
    emotions: { e: string; conf: string }[];
  },
): BallotDraft {
  const draft = emptyDraft();
  for (const entry of ballot.discourses) {
    draft.discourses.push({
      d: entry.d,
      conf:
        typeof entry.conf === "string"
          ? entry.conf
          : manifest.discourse_confidence[0],
      w: entry.w === null ? manifest.weight.max : entry.w,
    });
  }
  for (const entry of ballot.emotions) {
    setEmotionLabel(draft, manifest, entry.e, entry.conf);
  }
  return draft;
}
