// Stage geometry: fitting the image into the canvas and mapping pointer
// coordinates back onto exact image pixels, plus drag-to-box handling.

import type { Box, SceneObject } from "./types.js";

export interface FitTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

/** Contain-fit the image into the view, centered, never upscaled past 4x. */
export function fitImage(
  imageW: number,
  imageH: number,
  viewW: number,
  viewH: number,
): FitTransform {
  const scale = Math.min(viewW / imageW, viewH / imageH, 4);
  return {
    scale,
    offsetX: (viewW - imageW * scale) / 2,
    offsetY: (viewH - imageH * scale) / 2,
  };
}

export function viewToImage(t: FitTransform, px: number, py: number): { x: number; y: number } {
  return { x: (px - t.offsetX) / t.scale, y: (py - t.offsetY) / t.scale };
}

export function imageToView(t: FitTransform, x: number, y: number): { x: number; y: number } {
  return { x: x * t.scale + t.offsetX, y: y * t.scale + t.offsetY };
}

/**
 * Normalize a drag gesture (any corner order, image coordinates) into an
 * integer pixel box clamped to the image. Degenerate drags yield null.
 */
export function dragToBox(
  start: { x: number; y: number },
  end: { x: number; y: number },
  imageW: number,
  imageH: number,
): Box | null {
  const x0 = Math.max(0, Math.floor(Math.min(start.x, end.x)));
  const y0 = Math.max(0, Math.floor(Math.min(start.y, end.y)));
  const x1 = Math.min(imageW, Math.ceil(Math.max(start.x, end.x)));
  const y1 = Math.min(imageH, Math.ceil(Math.max(start.y, end.y)));
  const w = x1 - x0;
  const h = y1 - y0;
  if (w < 1 || h < 1) return null;
  return { x: x0, y: y0, w, h };
}

export interface OverlayStyle {
  boxColor: string;
  boundColor: string;
  labelFont: string;
}

const DEFAULT_STYLE: OverlayStyle = {
  boxColor: "#4da3ff",
  boundColor: "#ffd24d",
  labelFont: "12px system-ui, sans-serif",
};

/** Draw object boxes, labels, and binding badges over the image. */
export function drawOverlays(
  ctx: CanvasRenderingContext2D,
  t: FitTransform,
  objects: SceneObject[],
  boundIds: Set<string>,
  style: OverlayStyle = DEFAULT_STYLE,
): void {
  ctx.font = style.labelFont;
  ctx.lineWidth = 2;
  for (const obj of objects) {
    const p = imageToView(t, obj.box.x, obj.box.y);
    const w = obj.box.w * t.scale;
    const h = obj.box.h * t.scale;
    const bound = boundIds.has(obj.id);
    ctx.strokeStyle = bound ? style.boundColor : style.boxColor;
    ctx.strokeRect(p.x, p.y, w, h);
    const tag = bound ? `${obj.label} ♪` : obj.label;
    const textW = ctx.measureText(tag).width + 8;
    ctx.fillStyle = "rgba(0,0,0,0.65)";
    ctx.fillRect(p.x, Math.max(0, p.y - 16), textW, 16);
    ctx.fillStyle = "#fff";
    ctx.fillText(tag, p.x + 4, Math.max(12, p.y - 4));
  }
}
