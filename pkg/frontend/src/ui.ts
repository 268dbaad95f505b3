/**
 * DOM rendering for the annotation views: dialogue browser, sentence
 * annotation form, progress panel. All vocabulary comes from the manifest.
 */

import type {
  ApiClient,
  DialogueDetail,
  DialogueSummary,
  Progress,
  SentenceStatus,
} from "./api.js";
import { ApiError } from "./api.js";
import {
  BallotDraft,
  Manifest,
  buildPayload,
  defaultEmotionLabel,
  draftFromBallot,
  emptyDraft,
  setDiscourseConfidence,
  setDiscourseWeight,
  setEmotionLabel,
  toggleDiscourse,
  validateDraft,
} from "./validation.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  private manifest!: Manifest;
  private root: HTMLElement;

  constructor(
    private readonly api: ApiClient,
    rootId = "app",
  ) {
    const root = document.getElementById(rootId);
    if (!root) throw new Error(`missing #${rootId} container`);
    this.root = root;
  }

  async start(): Promise<void> {
    this.manifest = await this.api.manifest();
    const saved = sessionStorage.getItem("demrel-token");
    if (saved) {
      this.api.setToken(saved);
      await this.showDialogues();
    } else {
      this.showLogin();
    }
  }

  private swap(...nodes: HTMLElement[]): void {
    this.root.replaceChildren(...nodes);
  }

  private header(title: string, backTo?: () => void): HTMLElement {
    const bar = el("header", "bar");
    if (backTo) {
      const back = el("button", "link", "< back");
      back.addEventListener("click", backTo);
      bar.append(back);
    }
    bar.append(el("h1", undefined, title));
    const progress = el("button", "link", "progress");
    progress.addEventListener("click", () => void this.showProgress());
    bar.append(progress);
    return bar;
  }

  // --- login --------------------------------------------------------------

  private showLogin(message = ""): void {
    const panel = el("section", "panel");
    panel.append(el("h1", undefined, "annotator sign-in"));
    const input = el("input");
    input.type = "password";
    input.placeholder = "access token";
    const note = el("p", "error", message);
    const go = el("button", undefined, "enter");
    go.addEventListener("click", async () => {
      this.api.setToken(input.value.trim());
      try {
        await this.api.dialogues();
        sessionStorage.setItem("demrel-token", input.value.trim());
        await this.showDialogues();
      } catch (error) {
        note.textContent =
          error instanceof ApiError && error.status === 401
            ? "unknown token"
            : String(error);
      }
    });
    panel.append(input, go, note);
    this.swap(panel);
  }

  // --- dialogue browser -----------------------------------------------------

  private async showDialogues(): Promise<void> {
    let dialogues: DialogueSummary[];
    try {
      dialogues = await this.api.dialogues();
    } catch (error) {
      if (error instanceof ApiError && error.status === 401) {
        sessionStorage.removeItem("demrel-token");
        this.showLogin("session expired; enter your token");
        return;
      }
      throw error;
    }
    const list = el("section", "panel");
    list.append(el("h2", undefined, "dialogues"));
    for (const dialogue of dialogues) {
      const row = el("button", "dialogue-row");
      row.append(el("span", "dialogue-id", dialogue.id));
      const mine = `${dialogue.annotated_by_me}/${dialogue.sentences} mine`;
      const all = `${dialogue.complete}/${dialogue.sentences} complete`;
      const badge = el(
        "span",
        dialogue.annotated_by_me === dialogue.sentences
          ? "badge done"
          : "badge",
        `${mine} - ${all}`,
      );
      row.append(badge);
      row.addEventListener("click", () => void this.showDialogue(dialogue.id));
      list.append(row);
    }
    this.swap(this.header("discourse & emotion annotation"), list);
  }

  // --- sentence list + annotation form --------------------------------------

  private async showDialogue(id: string, openIndex?: number): Promise<void> {
    const detail = await this.api.dialogue(id);
    const panel = el("section", "panel");
    panel.append(el("h2", undefined, id));
    for (const sentence of detail.sentences) {
      const row = el("div", "sentence-row");
      const open = el(
        "button",
        sentence.annotated_by_me ? "sentence annotated" : "sentence",
      );
      open.append(
        el("span", "index", String(sentence.index)),
        el("span", undefined, sentence.text),
        el(
          "span",
          "badge",
          sentence.annotated_by_me ? `saved - ${sentence.ballots}/3` : `${sentence.ballots}/3`,
        ),
      );
      open.addEventListener("click", () =>
        this.showDialogue(id, sentence.index),
      );
      row.append(open);
      if (sentence.index === openIndex) {
        row.append(this.annotationForm(detail, sentence));
      }
      panel.append(row);
    }
    this.swap(this.header(id, () => void this.showDialogues()), panel);
  }

  private annotationForm(
    detail: DialogueDetail,
    sentence: SentenceStatus,
  ): HTMLElement {
    // Review mode: prefill from the stored ballot when one exists.
    const draft: BallotDraft = sentence.my_ballot
      ? draftFromBallot(this.manifest, sentence.my_ballot)
      : emptyDraft();
    const form = el("div", "annotation-form");
    const message = el("p", "error");
    const discourseBox = el("div", "discourse-box");
    const emotionBox = el("div", "emotion-grid");

    const renderDiscourses = () => {
      discourseBox.replaceChildren();
      const chips = el("div", "chips");
      for (const { code, label } of this.manifest.discourses) {
        const selected = draft.discourses.some((s) => s.d === code);
        const full =
          !selected &&
          draft.discourses.length >= this.manifest.max_discourses;
        const chip = el(
          "button",
          selected ? "chip selected" : full ? "chip disabled" : "chip",
          `${label} (${code})`,
        );
        chip.disabled = full;
        chip.title = full
          ? `at most ${this.manifest.max_discourses} discourses`
          : "";
        chip.addEventListener("click", () => {
          const result = toggleDiscourse(draft, this.manifest, code);
          message.textContent = result.ok ? "" : result.message ?? "";
          renderDiscourses();
        });
        chips.append(chip);
      }
      discourseBox.append(chips);
      for (const selection of draft.discourses) {
        const row = el("div", "discourse-settings");
        row.append(el("span", "code", selection.d));
        const conf = el("select");
        for (const level of this.manifest.discourse_confidence) {
          const option = el("option", undefined, level);
          option.value = level;
          option.selected = level === selection.conf;
          conf.append(option);
        }
        conf.addEventListener("change", () =>
          setDiscourseConfidence(draft, selection.d, conf.value),
        );
        const slider = el("input");
        slider.type = "range";
        slider.min = String(this.manifest.weight.min);
        slider.max = String(this.manifest.weight.max);
        slider.step = String(this.manifest.weight.step);
        slider.value = String(selection.w);
        const value = el("span", "weight-value", selection.w.toFixed(1));
        slider.addEventListener("input", () => {
          setDiscourseWeight(
            draft,
            this.manifest,
            selection.d,
            Number(slider.value),
          );
          const current = draft.discourses.find((s) => s.d === selection.d);
          value.textContent = (current?.w ?? 0).toFixed(1);
        });
        row.append(conf, slider, value);
        discourseBox.append(row);
      }
      if (draft.discourses.length === 0) {
        discourseBox.append(
          el("p", "hint", 'no discourse selected: saves as a "(none)" vote'),
        );
      }
    };

    const renderEmotions = () => {
      emotionBox.replaceChildren();
      const fallback = defaultEmotionLabel(this.manifest);
      for (const emotion of this.manifest.emotions) {
        const row = el("div", "emotion-row");
        row.append(el("span", "emotion-name", emotion));
        const current = draft.emotions[emotion] ?? fallback;
        for (const label of this.manifest.emotion_confidence) {
          const toggle = el(
            "button",
            label === current ? "toggle on" : "toggle",
            label,
          );
          toggle.addEventListener("click", () => {
            setEmotionLabel(draft, this.manifest, emotion, label);
            renderEmotions();
          });
          row.append(toggle);
        }
        emotionBox.append(row);
      }
    };

    renderDiscourses();
    renderEmotions();

    const submit = el("button", "submit", "save ballot");
    submit.addEventListener("click", async () => {
      const problems = validateDraft(draft, this.manifest);
      if (problems.length > 0) {
        message.textContent = problems.join("; ");
        return;
      }
      try {
        await this.api.submitBallot(
          detail.id,
          sentence.index,
          buildPayload(draft),
        );
        await this.showDialogue(detail.id, sentence.index);
      } catch (error) {
        message.textContent =
          error instanceof ApiError
            ? `${error.message}${error.field ? ` (${error.field})` : ""}`
            : String(error);
      }
    });

    form.append(
      el("h3", undefined, "discourses"),
      discourseBox,
      el("h3", undefined, "emotions"),
      emotionBox,
      submit,
      message,
    );
    return form;
  }

  // --- progress panel -------------------------------------------------------

  private async showProgress(): Promise<void> {
    const progress: Progress = await this.api.progress();
    const panel = el("section", "panel");
    panel.append(el("h2", undefined, "progress"));
    panel.append(
      el(
        "p",
        undefined,
        `${progress.sentences_complete}/${progress.sentences_total} ` +
          "sentences have all three ballots",
      ),
    );
    const voters = el("ul");
    for (const [voter, count] of Object.entries(progress.voters)) {
      voters.append(el("li", undefined, `${voter}: ${count} sentences`));
    }
    panel.append(el("h3", undefined, "per voter"), voters);
    const dialogues = el("ul");
    for (const [id, info] of Object.entries(progress.dialogues)) {
      dialogues.append(
        el("li", undefined, `${id}: ${info.complete}/${info.sentences} complete`),
      );
    }
    panel.append(el("h3", undefined, "per dialogue"), dialogues);
    this.swap(this.header("progress", () => void this.showDialogues()), panel);
  }
}
