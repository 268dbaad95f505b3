/** Thin typed client for the annotation service HTTP API. */

import type { BallotPayload, Manifest } from "./validation.js";

export interface DialogueSummary {
  id: string;
  sentences: number;
  annotated_by_me: number;
  complete: number;
}

export interface StoredBallot {
  voter: string;
  dialogue: string;
  sentence: number;
  discourses: { d: string; conf: string | number; w: number | null }[];
  emotions: { e: string; conf: string }[];
}

export interface SentenceStatus {
  index: number;
  text: string;
  annotated_by_me: boolean;
  ballots: number;
  my_ballot: StoredBallot | null;
}

export interface DialogueDetail {
  id: string;
  sentences: SentenceStatus[];
}

export interface Progress {
  voters: Record<string, number>;
  dialogues: Record<string, { sentences: number; complete: number }>;
  sentences_total: number;
  sentences_complete: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly field: string | null,
    message: string,
  ) {
    super(message);
  }
}

async function fail(response: Response): Promise<never> {
  let field: string | null = null;
  let message = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    if (typeof body.detail === "string") {
      message = body.detail;
    } else if (body.detail) {
      field = body.detail.field ?? null;
      message = body.detail.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(response.status, field, message);
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private token: string,
  ) {}

  setToken(token: string): void {
    this.token = token;
  }

  private async request(path: string, init: RequestInit = {}): Promise<Response> {
    const headers = new Headers(init.headers);
    if (this.token) {
      headers.set("Authorization", `Bearer ${this.token}`);
    }
    const response = await fetch(this.base + path, { ...init, headers });
    if (!response.ok) {
      await fail(response);
    }
    return response;
  }

  /** The manifest is public: fetched before a token is known. */
  async manifest(): Promise<Manifest> {
    const response = await fetch(this.base + "/api/manifest");
    if (!response.ok) {
      await fail(response);
    }
    return response.json();
  }

  async dialogues(): Promise<DialogueSummary[]> {
    const response = await this.request("/api/dialogues");
    return (await response.json()).dialogues;
  }

  async dialogue(id: string): Promise<DialogueDetail> {
    return (await this.request(`/api/dialogues/${encodeURIComponent(id)}`)).json();
  }

  async submitBallot(
    dialogueId: string,
    sentence: number,
    payload: BallotPayload,
  ): Promise<StoredBallot> {
    const response = await this.request(
      `/api/dialogues/${encodeURIComponent(dialogueId)}/sentences/${sentence}/ballot`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
      },
    );
    return (await response.json()).ballot;
  }

  async progress(): Promise<Progress> {
    return (await this.request("/api/progress")).json();
  }

  async exportLog(): Promise<string> {
    return (await this.request("/api/export")).text();
  }
}
