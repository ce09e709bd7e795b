/** Wire types mirroring the serve-mode JSON API. */

export interface SessionPoint {
  image: [number, number];
  plane: [number, number];
}

export interface SessionPayload {
  image_id: string;
  camera_height_m: number;
  intrinsics: { fx: number; fy: number; cu: number; cv: number } | null;
  vanishing_point: { vu: number; vv: number } | null;
  points: SessionPoint[];
}

export interface HomographyPayload {
  matrix: number[][];
  camera_height_m: number;
  camera_id: string;
  units: string;
}

export interface FitPayload {
  homography: HomographyPayload;
  residuals: number[];
}

export interface SessionResponse {
  session: SessionPayload;
  fit: FitPayload | null;
}

export interface PreviewResponse {
  plane: [number, number];
  ground_distance_m: number;
}

export interface ExportResponse {
  homography_path: string;
  session_path: string;
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}

/** Server-reported failure; carries the machine-readable error code. */
export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, body: ApiErrorBody) {
    super(body.detail || body.error);
    this.code = body.error;
    this.status = status;
  }
}
