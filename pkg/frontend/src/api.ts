/** Thin typed client for the calibration backend.
 *
 * Every number the UI displays comes back from these calls; the client does
 * no geometry of its own.
 */

import {
  ApiError,
  ExportResponse,
  FitPayload,
  PreviewResponse,
  SessionResponse,
} from "./types.js";

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(base + path, init);
  const text = await response.text();
  const body = text ? JSON.parse(text) : null;
  if (!response.ok) {
    throw new ApiError(response.status, body ?? { error: "HttpError", detail: `${response.status}` });
  }
  return body as T;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  getSession(): Promise<SessionResponse> {
    return request(this.base, "/api/session");
  }

  addPoint(image: [number, number], plane: [number, number]): Promise<{ index: number }> {
    return request(this.base, "/api/points", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ image, plane }),
    });
  }

  updatePoint(
    index: number,
    image: [number, number],
    plane: [number, number],
  ): Promise<{ index: number }> {
    return request(this.base, `/api/points/${index}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ image, plane }),
    });
  }

  deletePoint(index: number): Promise<{ removed: number }> {
    return request(this.base, `/api/points/${index}`, { method: "DELETE" });
  }

  fit(): Promise<FitPayload> {
    return request(this.base, "/api/fit", { method: "POST" });
  }

  preview(u: number, v: number): Promise<PreviewResponse> {
    return request(this.base, `/api/preview?u=${u}&v=${v}`);
  }

  exportFiles(): Promise<ExportResponse> {
    return request(this.base, "/api/export", { method: "POST" });
  }

  imageUrl(): string {
    return this.base + "/api/image";
  }
}
