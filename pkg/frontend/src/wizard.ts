/** Grid wizard: auto-fill plane coordinates for regular ground patterns.
 *
 * Parking-lot calibration targets sit on a regular grid, so instead of
 * typing every coordinate the operator enters the origin, the spacing in
 * meters, and the column count, then clicks the pattern corners row by
 * row (left to right, near row first). The k-th click gets the k-th grid
 * coordinate. Plane coordinates are operator input, not geometry: the
 * wizard never touches image pixels.
 */

export interface GridWizardConfig {
  originX: number;
  originY: number;
  spacingX: number;
  spacingY: number;
  columns: number;
}

export class GridWizard {
  private count = 0;

  constructor(readonly config: GridWizardConfig) {
    if (config.columns < 1 || !Number.isInteger(config.columns)) {
      throw new Error(`columns must be a positive integer, got ${config.columns}`);
    }
    if (config.spacingX === 0 && config.spacingY === 0) {
      throw new Error("at least one spacing must be nonzero");
    }
  }

  /** Plane coordinate of the k-th click (row-major walk of the grid). */
  planeAt(k: number): [number, number] {
    const col = k % this.config.columns;
    const row = Math.floor(k / this.config.columns);
    return [
      this.config.originX + col * this.config.spacingX,
      this.config.originY + row * this.config.spacingY,
    ];
  }

  next(): [number, number] {
    return this.planeAt(this.count++);
  }

  get used(): number {
    return this.count;
  }

  reset(): void {
    this.count = 0;
  }
}
