/** Image canvas with zoom/pan, point markers, and a hover distance probe.
 *
 * Screen-to-image mapping is screen = image * scale + offset; clicks invert
 * it, so labeled points are sub-pixel at any zoom. A short mouse movement
 * between press and release counts as a click (adds a point); longer drags
 * pan. Rendering no-ops when no 2D context is available (headless tests).
 */

export interface CanvasPoint {
  u: number;
  v: number;
  label: string;
  color: string;
}

export class ImageCanvas {
  scale = 1;
  offsetX = 0;
  offsetY = 0;
  onImageClick: ((u: number, v: number) => void) | null = null;
  onHover: ((u: number, v: number) => void) | null = null;

  private image: HTMLImageElement | null = null;
  private points: CanvasPoint[] = [];
  private dragging = false;
  private moved = 0;
  private lastX = 0;
  private lastY = 0;
  private ctx2d: CanvasRenderingContext2D | null | undefined;

  constructor(private readonly canvas: HTMLCanvasElement) {
    canvas.addEventListener("mousedown", (e) => this.handleDown(e));
    canvas.addEventListener("mousemove", (e) => this.handleMove(e));
    canvas.addEventListener("mouseup", (e) => this.handleUp(e));
    canvas.addEventListener("wheel", (e) => this.handleWheel(e), { passive: false });
  }

  setImage(image: HTMLImageElement): void {
    this.image = image;
    this.draw();
  }

  setPoints(points: CanvasPoint[]): void {
    this.points = points;
    this.draw();
  }

  toImage(clientX: number, clientY: number): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    const sx = clientX - rect.left;
    const sy = clientY - rect.top;
    return [(sx - this.offsetX) / this.scale, (sy - this.offsetY) / this.scale];
  }

  private handleDown(e: MouseEvent): void {
    this.dragging = true;
    this.moved = 0;
    this.lastX = e.clientX;
    this.lastY = e.clientY;
  }

  private handleMove(e: MouseEvent): void {
    if (this.dragging) {
      const dx = e.clientX - this.lastX;
      const dy = e.clientY - this.lastY;
      this.moved += Math.abs(dx) + Math.abs(dy);
      this.offsetX += dx;
      this.offsetY += dy;
      this.lastX = e.clientX;
      this.lastY = e.clientY;
      this.draw();
    } else if (this.onHover) {
      const [u, v] = this.toImage(e.clientX, e.clientY);
      this.onHover(u, v);
    }
  }

  private handleUp(e: MouseEvent): void {
    const wasClick = this.dragging && this.moved < 3;
    this.dragging = false;
    if (wasClick && this.onImageClick) {
      const [u, v] = this.toImage(e.clientX, e.clientY);
      this.onImageClick(u, v);
    }
  }

  private handleWheel(e: WheelEvent): void {
    e.preventDefault();
    const rect = this.canvas.getBoundingClientRect();
    const sx = e.clientX - rect.left;
    const sy = e.clientY - rect.top;
    const factor = e.deltaY < 0 ? 1.2 : 1 / 1.2;
    const next = Math.min(32, Math.max(0.1, this.scale * factor));
    // keep the pixel under the cursor fixed while zooming
    this.offsetX = sx - ((sx - this.offsetX) / this.scale) * next;
    this.offsetY = sy - ((sy - this.offsetY) / this.scale) * next;
    this.scale = next;
    this.draw();
  }

  draw(): void {
    if (this.ctx2d === undefined) {
      try {
        this.ctx2d = this.canvas.getContext("2d");
      } catch {
        this.ctx2d = null;
      }
    }
    const ctx = this.ctx2d;
    if (!ctx) return;
    ctx.setTransform(1, 0, 0, 1, 0, 0);
    ctx.fillStyle = "#1b1e23";
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.setTransform(this.scale, 0, 0, this.scale, this.offsetX, this.offsetY);
    if (this.image) {
      ctx.drawImage(this.image, 0, 0);
    }
    const r = 5 / this.scale;
    for (const p of this.points) {
      ctx.beginPath();
      ctx.arc(p.u, p.v, r, 0, 2 * Math.PI);
      ctx.fillStyle = p.color;
      ctx.fill();
      ctx.strokeStyle = "#ffffff";
      ctx.lineWidth = 1 / this.scale;
      ctx.stroke();
      ctx.fillStyle = "#ffffff";
      ctx.font = `${12 / this.scale}px sans-serif`;
      ctx.fillText(p.label, p.u + 1.5 * r, p.v - 1.5 * r);
    }
  }
}
