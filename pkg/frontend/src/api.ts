import { Point } from "./geometry.js";

export interface GridDims {
  cols: number;
  rows: number;
}

export interface ChallengePayload {
  nonce: string;
  grid: GridDims;
  cells: string[];
  head_cell: number;
  tail_cell: number;
  max_len: number;
  expires_at: number;
}

export interface EnrollResponse {
  user: string;
  state: string;
  challenge: ChallengePayload;
}

export interface CatalogImage {
  id: string;
  png_base64: string;
}

export interface CatalogPayload {
  width: number;
  height: number;
  images: CatalogImage[];
}

export interface VerifyResponse {
  status: number;
  result: "accepted" | "rejected" | "error";
  reason?: string;
}

/** Thin typed client over the authentication service HTTP API. */
export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async post(path: string, body: unknown): Promise<Response> {
    return fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async enroll(user: string, imageIds: string[]): Promise<EnrollResponse> {
    const r = await this.post("/api/enroll", { user, image_ids: imageIds });
    if (!r.ok) {
      const body = await r.json().catch(() => ({}));
      throw new Error(`enroll failed: ${body.reason ?? r.status}`);
    }
    return r.json();
  }

  async challenge(user: string): Promise<ChallengePayload> {
    const r = await this.post("/api/challenge", { user });
    if (!r.ok) {
      const body = await r.json().catch(() => ({}));
      throw new Error(`challenge failed: ${body.reason ?? r.status}`);
    }
    return r.json();
  }

  /** Submit a drawn stroke; protocol errors come back as result "error". */
  async verify(user: string, nonce: string, polyline: Point[]): Promise<VerifyResponse> {
    const r = await this.post("/api/verify", { user, nonce, polyline });
    const body = await r.json().catch(() => ({ result: "error", reason: "BadResponse" }));
    return { status: r.status, ...body };
  }

  async catalog(): Promise<CatalogPayload> {
    const r = await fetch(this.baseUrl + "/api/catalog");
    if (!r.ok) throw new Error(`catalog failed: ${r.status}`);
    return r.json();
  }

  /** Degraded per-challenge image; login must only ever use this endpoint. */
  challengeImageUrl(nonce: string, cell: number): string {
    return `${this.baseUrl}/api/challenge/${encodeURIComponent(nonce)}/image/${cell}`;
  }
}
