/** Residual display helpers: color scale and list rows.
 *
 * Colors are display-only: green below 5 cm fading to red above 50 cm
 * (defaults, configurable). The numbers themselves always come from the
 * server's fit response.
 */

export interface ResidualScale {
  greenBelowM: number;
  redAboveM: number;
}

export const DEFAULT_SCALE: ResidualScale = { greenBelowM: 0.05, redAboveM: 0.5 };

export function residualColor(residualM: number, scale: ResidualScale = DEFAULT_SCALE): string {
  const span = scale.redAboveM - scale.greenBelowM;
  const t = Math.min(1, Math.max(0, (residualM - scale.greenBelowM) / span));
  const hue = 120 * (1 - t); // 120 = green, 0 = red
  return `hsl(${hue.toFixed(0)}, 80%, 45%)`;
}

export function formatResidual(residualM: number): string {
  if (residualM < 0.01) return `${(residualM * 1000).toFixed(2)} mm`;
  if (residualM < 1) return `${(residualM * 100).toFixed(1)} cm`;
  return `${residualM.toFixed(2)} m`;
}

export function formatDistance(meters: number): string {
  return `${meters.toFixed(2)} m`;
}
