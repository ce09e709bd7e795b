"""HTTP backend for the calibration UI.

Single-session, localhost-by-default operator tool. Mutations (point edits,
fits, exports) are serialized under one lock; reads are unrestricted. The
current fit is invalidated by any session change, so a non-null fit always
reflects the stored correspondences.

Endpoints (JSON unless noted):
    GET    /api/session          session (CorrespondenceSet schema) + fit
    GET    /api/image            calibration image bytes
    POST   /api/points           {"image":[u,v],"plane":[x,y]} -> {"index": i}
    PUT    /api/points/{i}       same body; replaces point i
    DELETE /api/points/{i}       removes point i (indices shift down)
    POST   /api/fit              {"homography": ..., "residuals": [...]}
    GET    /api/preview?u=&v=    projected plane point + ground distance
    POST   /api/export           writes homography + session files
Static UI assets are served at /.

Errors are {"error": code, "detail": str} with 400 for malformed bodies,
404 for missing resources (including preview without a fit), and 422 for
domain failures; failed requests never change state.
"""

from __future__ import annotations

import json
import mimetypes
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .calibration import CalibrationSession, fit_session, session_to_dict, write_session
from .errors import DomainError, InvalidInput
from .geometry import (
    Homography,
    PixelPoint,
    PlanePoint,
    ground_distance,
    homography_to_dict,
    project,
    write_homography,
)

_STATUS_BY_CODE = {
    "InsufficientPoints": 422,
    "DegenerateConfiguration": 422,
    "PointAtInfinity": 422,
    "InvalidInput": 400,
}

_FALLBACK_INDEX = b"""<!doctype html>
<html><head><title>planeval calibration</title></head>
<body><h1>planeval serve</h1>
<p>No UI build found. Point --ui-dir at the built frontend assets, or use the
JSON API under /api/.</p></body></html>
"""


@dataclass
class SessionState:
    session: CalibrationSession
    out_dir: Path
    image_bytes: bytes | None = None
    image_media_type: str = "application/octet-stream"
    current_fit: tuple[Homography, list[float]] | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def invalidate(self) -> None:
        self.current_fit = None

    def fit_payload(self) -> dict | None:
        if self.current_fit is None:
            return None
        h, residuals = self.current_fit
        return {
            "homography": homography_to_dict(h, self.session.image_id),
            "residuals": residuals,
        }


def _parse_point_body(payload: dict) -> tuple[PixelPoint, PlanePoint]:
    try:
        image = payload["image"]
        plane = payload["plane"]
        return (
            PixelPoint(float(image[0]), float(image[1])),
            PlanePoint(float(plane[0]), float(plane[1])),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InvalidInput(f"point body must be {{'image':[u,v],'plane':[x,y]}}: {exc}") from None


class _Handler(BaseHTTPRequestHandler):
    state: SessionState
    ui_dir: Path | None

    # ----- plumbing

    def log_message(self, fmt, *args):  # quiet by default; the CLI logs startup
        pass

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error_payload(self, code: str, detail: str, status: int) -> None:
        self._send_json({"error": code, "detail": detail}, status=status)

    def _send_domain_error(self, exc: DomainError) -> None:
        self._send_error_payload(exc.code, str(exc), _STATUS_BY_CODE.get(exc.code, 422))

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            raise InvalidInput("request body is required")
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"malformed JSON body: {exc}") from None
        if not isinstance(payload, dict):
            raise InvalidInput("request body must be a JSON object")
        return payload

    def _point_index(self, path: str) -> int:
        tail = path.rsplit("/", 1)[-1]
        try:
            index = int(tail)
        except ValueError:
            raise InvalidInput(f"bad point index {tail!r}") from None
        if not (0 <= index < len(self.state.session.correspondences)):
            self._send_error_payload("IndexOutOfRange", f"no point {index}", 404)
            raise _Handled()
        return index

    # ----- GET

    def do_GET(self):
        parsed = urlparse(self.path)
        try:
            if parsed.path == "/api/session":
                self._send_json(
                    {
                        "session": session_to_dict(self.state.session),
                        "fit": self.state.fit_payload(),
                    }
                )
            elif parsed.path == "/api/image":
                if self.state.image_bytes is None:
                    self._send_error_payload("NoImage", "no calibration image configured", 404)
                    return
                self.send_response(200)
                self.send_header("Content-Type", self.state.image_media_type)
                self.send_header("Content-Length", str(len(self.state.image_bytes)))
                self.end_headers()
                self.wfile.write(self.state.image_bytes)
            elif parsed.path == "/api/preview":
                self._preview(parse_qs(parsed.query))
            else:
                self._static(parsed.path)
        except _Handled:
            pass
        except DomainError as exc:
            self._send_domain_error(exc)

    def _preview(self, query: dict) -> None:
        if self.state.current_fit is None:
            self._send_error_payload("NoFit", "no current fit; add points and POST /api/fit", 404)
            return
        try:
            u = float(query["u"][0])
            v = float(query["v"][0])
        except (KeyError, ValueError, IndexError) as exc:
            raise InvalidInput(f"preview needs numeric u and v query params: {exc}") from None
        h, _ = self.state.current_fit
        pixel = PixelPoint(u, v)
        plane = project(h, pixel)
        self._send_json(
            {
                "plane": [plane.x, plane.y],
                "ground_distance_m": ground_distance(h, pixel),
            }
        )

    def _static(self, path: str) -> None:
        if self.ui_dir is None:
            if path in ("/", "/index.html"):
                self.send_response(200)
                self.send_header("Content-Type", "text/html")
                self.send_header("Content-Length", str(len(_FALLBACK_INDEX)))
                self.end_headers()
                self.wfile.write(_FALLBACK_INDEX)
            else:
                self._send_error_payload("NotFound", f"no such path {path}", 404)
            return
        rel = "index.html" if path in ("", "/") else path.lstrip("/")
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            self._send_error_payload("NotFound", f"no such path {path}", 404)
            return
        media = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", media)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    # ----- mutations

    def do_POST(self):
        parsed = urlparse(self.path)
        try:
            if parsed.path == "/api/points":
                body = self._read_body()
                image, plane = _parse_point_body(body)
                with self.state.lock:
                    index = self.state.session.add_point(image, plane)
                    self.state.invalidate()
                self._send_json({"index": index}, status=201)
            elif parsed.path == "/api/fit":
                with self.state.lock:
                    h, residuals = fit_session(self.state.session)
                    self.state.current_fit = (h, residuals)
                self._send_json(self.state.fit_payload())
            elif parsed.path == "/api/export":
                self._export()
            else:
                self._send_error_payload("NotFound", f"no such endpoint {parsed.path}", 404)
        except _Handled:
            pass
        except DomainError as exc:
            self._send_domain_error(exc)

    def do_PUT(self):
        parsed = urlparse(self.path)
        try:
            if parsed.path.startswith("/api/points/"):
                index = self._point_index(parsed.path)
                image, plane = _parse_point_body(self._read_body())
                with self.state.lock:
                    self.state.session.update_point(index, image, plane)
                    self.state.invalidate()
                self._send_json({"index": index})
            else:
                self._send_error_payload("NotFound", f"no such endpoint {parsed.path}", 404)
        except _Handled:
            pass
        except DomainError as exc:
            self._send_domain_error(exc)

    def do_DELETE(self):
        parsed = urlparse(self.path)
        try:
            if parsed.path.startswith("/api/points/"):
                index = self._point_index(parsed.path)
                with self.state.lock:
                    self.state.session.delete_point(index)
                    self.state.invalidate()
                self._send_json({"removed": index})
            else:
                self._send_error_payload("NotFound", f"no such endpoint {parsed.path}", 404)
        except _Handled:
            pass
        except DomainError as exc:
            self._send_domain_error(exc)

    def _export(self) -> None:
        with self.state.lock:
            if self.state.current_fit is None:
                h, residuals = fit_session(self.state.session)
                self.state.current_fit = (h, residuals)
            h, _ = self.state.current_fit
            self.state.out_dir.mkdir(parents=True, exist_ok=True)
            homography_path = self.state.out_dir / "homography.json"
            session_path = self.state.out_dir / "session.json"
            write_homography(h, homography_path, camera_id=self.state.session.image_id)
            write_session(self.state.session, session_path)
        self._send_json(
            {"homography_path": str(homography_path), "session_path": str(session_path)}
        )


class _Handled(Exception):
    """Response already sent."""


def build_server(
    session: CalibrationSession,
    image_path: str | None,
    out_dir: str,
    port: int = 8791,
    ui_dir: str | None = None,
    host: str = "127.0.0.1",
) -> ThreadingHTTPServer:
    state = SessionState(session=session, out_dir=Path(out_dir))
    if image_path:
        state.image_bytes = Path(image_path).read_bytes()
        state.image_media_type = mimetypes.guess_type(image_path)[0] or "application/octet-stream"

    handler = type("BoundHandler", (_Handler,), {"state": state, "ui_dir": Path(ui_dir) if ui_dir else None})
    return ThreadingHTTPServer((host, port), handler)
