/**
 * Minimal deterministic software rasterizer.
 *
 * Everything is drawn into an RGBA byte buffer with integer-snapped
 * primitives and a fixed 5x7 bitmap font, so identical inputs produce
 * identical pixels on every platform.
 */

export type Color = readonly [number, number, number, number];

export const WHITE: Color = [255, 255, 255, 255];
export const BLACK: Color = [20, 20, 24, 255];
export const GRAY: Color = [170, 170, 176, 255];
export const LIGHT: Color = [228, 228, 234, 255];
export const BLUE: Color = [38, 96, 168, 255];
export const RED: Color = [186, 52, 46, 255];
export const GREEN: Color = [42, 128, 70, 255];
export const ORANGE: Color = [210, 128, 30, 255];
export const PURPLE: Color = [116, 76, 158, 255];

export const SERIES_COLORS: Color[] = [BLUE, RED, GREEN, ORANGE, PURPLE];

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Color = WHITE) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.data.set(background, i * 4);
    }
  }

  set(x: number, y: number, c: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    this.data.set(c, (y * this.width + x) * 4);
  }

  fillRect(x0: number, y0: number, w: number, h: number, c: Color): void {
    const x1 = Math.min(this.width, Math.max(0, Math.round(x0 + w)));
    const y1 = Math.min(this.height, Math.max(0, Math.round(y0 + h)));
    for (let y = Math.max(0, Math.round(y0)); y < y1; y++) {
      for (let x = Math.max(0, Math.round(x0)); x < x1; x++) {
        this.set(x, y, c);
      }
    }
  }

  /** Bresenham segment with optional square pen. */
  line(x0: number, y0: number, x1: number, y1: number, c: Color, thick = 1): void {
    let ax = Math.round(x0);
    let ay = Math.round(y0);
    const bx = Math.round(x1);
    const by = Math.round(y1);
    const dx = Math.abs(bx - ax);
    const dy = -Math.abs(by - ay);
    const sx = ax < bx ? 1 : -1;
    const sy = ay < by ? 1 : -1;
    let err = dx + dy;
    const r = Math.floor(thick / 2);
    for (;;) {
      if (thick <= 1) {
        this.set(ax, ay, c);
      } else {
        for (let oy = -r; oy <= r; oy++) {
          for (let ox = -r; ox <= r; ox++) {
            this.set(ax + ox, ay + oy, c);
          }
        }
      }
      if (ax === bx && ay === by) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        ax += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ay += sy;
      }
    }
  }

  disc(cx: number, cy: number, radius: number, c: Color): void {
    const r2 = radius * radius;
    for (let y = -radius; y <= radius; y++) {
      for (let x = -radius; x <= radius; x++) {
        if (x * x + y * y <= r2) this.set(Math.round(cx) + x, Math.round(cy) + y, c);
      }
    }
  }

  text(x: number, y: number, s: string, c: Color, scale = 1): void {
    let cx = Math.round(x);
    const cy = Math.round(y);
    for (const ch of s) {
      const glyph = FONT[ch] ?? FONT["?"];
      for (let row = 0; row < 7; row++) {
        for (let col = 0; col < 5; col++) {
          if ((glyph[row] >> (4 - col)) & 1) {
            if (scale === 1) {
              this.set(cx + col, cy + row, c);
            } else {
              this.fillRect(cx + col * scale, cy + row * scale, scale, scale, c);
            }
          }
        }
      }
      cx += 6 * scale;
    }
  }
}

export function textWidth(s: string, scale = 1): number {
  return s.length * 6 * scale - scale;
}

/* 5x7 font: each glyph is 7 rows of 5-bit masks (MSB = leftmost column). */
const FONT: Record<string, number[]> = {
  " ": [0, 0, 0, 0, 0, 0, 0],
  "0": [0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110],
  "1": [0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110],
  "2": [0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111],
  "3": [0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110],
  "4": [0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010],
  "5": [0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110],
  "6": [0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110],
  "7": [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000],
  "8": [0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110],
  "9": [0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100],
  ".": [0, 0, 0, 0, 0, 0b00100, 0b00100],
  ",": [0, 0, 0, 0, 0b00100, 0b00100, 0b01000],
  "-": [0, 0, 0, 0b11111, 0, 0, 0],
  "+": [0, 0b00100, 0b00100, 0b11111, 0b00100, 0b00100, 0],
  "=": [0, 0, 0b11111, 0, 0b11111, 0, 0],
  "/": [0b00001, 0b00010, 0b00010, 0b00100, 0b01000, 0b01000, 0b10000],
  ":": [0, 0b00100, 0b00100, 0, 0b00100, 0b00100, 0],
  "(": [0b00010, 0b00100, 0b01000, 0b01000, 0b01000, 0b00100, 0b00010],
  ")": [0b01000, 0b00100, 0b00010, 0b00010, 0b00010, 0b00100, 0b01000],
  "^": [0b00100, 0b01010, 0b10001, 0, 0, 0, 0],
  "_": [0, 0, 0, 0, 0, 0, 0b11111],
  "'": [0b00100, 0b00100, 0, 0, 0, 0, 0],
  "?": [0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0, 0b00100],
  "a": [0, 0, 0b01110, 0b00001, 0b01111, 0b10001, 0b01111],
  "b": [0b10000, 0b10000, 0b11110, 0b10001, 0b10001, 0b10001, 0b11110],
  "c": [0, 0, 0b01111, 0b10000, 0b10000, 0b10000, 0b01111],
  "d": [0b00001, 0b00001, 0b01111, 0b10001, 0b10001, 0b10001, 0b01111],
  "e": [0, 0, 0b01110, 0b10001, 0b11111, 0b10000, 0b01110],
  "f": [0b00110, 0b01001, 0b01000, 0b11100, 0b01000, 0b01000, 0b01000],
  "g": [0, 0b01111, 0b10001, 0b10001, 0b01111, 0b00001, 0b01110],
  "h": [0b10000, 0b10000, 0b11110, 0b10001, 0b10001, 0b10001, 0b10001],
  "i": [0b00100, 0, 0b01100, 0b00100, 0b00100, 0b00100, 0b01110],
  "j": [0b00010, 0, 0b00110, 0b00010, 0b00010, 0b10010, 0b01100],
  "k": [0b10000, 0b10000, 0b10010, 0b10100, 0b11000, 0b10100, 0b10010],
  "l": [0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110],
  "m": [0, 0, 0b11010, 0b10101, 0b10101, 0b10101, 0b10101],
  "n": [0, 0, 0b11110, 0b10001, 0b10001, 0b10001, 0b10001],
  "o": [0, 0, 0b01110, 0b10001, 0b10001, 0b10001, 0b01110],
  "p": [0, 0b11110, 0b10001, 0b10001, 0b11110, 0b10000, 0b10000],
  "q": [0, 0b01111, 0b10001, 0b10001, 0b01111, 0b00001, 0b00001],
  "r": [0, 0, 0b10110, 0b11001, 0b10000, 0b10000, 0b10000],
  "s": [0, 0, 0b01111, 0b10000, 0b01110, 0b00001, 0b11110],
  "t": [0b01000, 0b01000, 0b11100, 0b01000, 0b01000, 0b01001, 0b00110],
  "u": [0, 0, 0b10001, 0b10001, 0b10001, 0b10011, 0b01101],
  "v": [0, 0, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100],
  "w": [0, 0, 0b10101, 0b10101, 0b10101, 0b10101, 0b01010],
  "x": [0, 0, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001],
  "y": [0, 0b10001, 0b10001, 0b10001, 0b01111, 0b00001, 0b01110],
  "z": [0, 0, 0b11111, 0b00010, 0b00100, 0b01000, 0b11111],
  A: [0b01110, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001],
  B: [0b11110, 0b10001, 0b10001, 0b11110, 0b10001, 0b10001, 0b11110],
  C: [0b01110, 0b10001, 0b10000, 0b10000, 0b10000, 0b10001, 0b01110],
  D: [0b11100, 0b10010, 0b10001, 0b10001, 0b10001, 0b10010, 0b11100],
  E: [0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b11111],
  F: [0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b10000],
  G: [0b01110, 0b10001, 0b10000, 0b10111, 0b10001, 0b10001, 0b01111],
  H: [0b10001, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001],
  I: [0b01110, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110],
  J: [0b00111, 0b00010, 0b00010, 0b00010, 0b00010, 0b10010, 0b01100],
  K: [0b10001, 0b10010, 0b10100, 0b11000, 0b10100, 0b10010, 0b10001],
  L: [0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111],
  M: [0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001],
  N: [0b10001, 0b11001, 0b10101, 0b10011, 0b10001, 0b10001, 0b10001],
  O: [0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110],
  P: [0b11110, 0b10001, 0b10001, 0b11110, 0b10000, 0b10000, 0b10000],
  Q: [0b01110, 0b10001, 0b10001, 0b10001, 0b10101, 0b10010, 0b01101],
  R: [0b11110, 0b10001, 0b10001, 0b11110, 0b10100, 0b10010, 0b10001],
  S: [0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110],
  T: [0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100],
  U: [0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110],
  V: [0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100],
  W: [0b10001, 0b10001, 0b10001, 0b10101, 0b10101, 0b10101, 0b01010],
  X: [0b10001, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001, 0b10001],
  Y: [0b10001, 0b10001, 0b01010, 0b00100, 0b00100, 0b00100, 0b00100],
  Z: [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b10000, 0b11111],
};

/** Axis mapping from data coordinates to pixel coordinates. */
export class Scale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly pixLo: number,
    readonly pixHi: number,
    readonly log = false,
  ) {}

  static linear(lo: number, hi: number, pixLo: number, pixHi: number): Scale {
    if (!(hi > lo)) hi = lo + 1;
    return new Scale(lo, hi, pixLo, pixHi, false);
  }

  static logarithmic(lo: number, hi: number, pixLo: number, pixHi: number): Scale {
    if (!(lo > 0) || !(hi > lo)) throw new Error(`bad log range [${lo}, ${hi}]`);
    return new Scale(lo, hi, pixLo, pixHi, true);
  }

  map(v: number): number {
    const [a, b] = this.log ? [Math.log(this.lo), Math.log(this.hi)] : [this.lo, this.hi];
    const x = this.log ? Math.log(v) : v;
    const t = (x - a) / (b - a);
    return this.pixLo + t * (this.pixHi - this.pixLo);
  }

  ticks(count = 5): number[] {
    if (this.log) {
      const out: number[] = [];
      const d0 = Math.ceil(Math.log10(this.lo) - 1e-9);
      const d1 = Math.floor(Math.log10(this.hi) + 1e-9);
      for (let d = d0; d <= d1; d++) out.push(10 ** d);
      if (out.length === 0) out.push(this.lo, this.hi);
      return out;
    }
    const span = this.hi - this.lo;
    const step = niceStep(span / count);
    const start = Math.ceil(this.lo / step) * step;
    const out: number[] = [];
    for (let v = start; v <= this.hi + 1e-12 * span; v += step) out.push(v);
    return out;
  }
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(raw));
  const r = raw / mag;
  if (r < 1.5) return mag;
  if (r < 3.5) return 2 * mag;
  if (r < 7.5) return 5 * mag;
  return 10 * mag;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.001 && a < 10000) {
    return String(Number(v.toPrecision(4)));
  }
  const exp = Math.floor(Math.log10(a));
  const mant = v / 10 ** exp;
  return `${Number(mant.toPrecision(3))}e${exp}`;
}

export interface Frame {
  left: number;
  top: number;
  right: number;
  bottom: number;
}

/** Draw axes, tick marks, labels and a title; returns the plot frame. */
export function drawFrame(
  img: Raster,
  title: string,
  xLabel: string,
  yLabel: string,
  xs: Scale,
  ys: Scale,
): Frame {
  const f = { left: xs.pixLo, top: ys.pixHi, right: xs.pixHi, bottom: ys.pixLo };
  img.line(f.left, f.bottom, f.right, f.bottom, BLACK);
  img.line(f.left, f.top, f.left, f.bottom, BLACK);
  for (const v of xs.ticks()) {
    const px = Math.round(xs.map(v));
    img.line(px, f.bottom, px, f.bottom + 4, BLACK);
    img.line(px, f.top, px, f.bottom, LIGHT);
    const label = formatTick(v);
    img.text(px - textWidth(label) / 2, f.bottom + 7, label, BLACK);
  }
  for (const v of ys.ticks()) {
    const py = Math.round(ys.map(v));
    img.line(f.left - 4, py, f.left, py, BLACK);
    img.line(f.left, py, f.right, py, LIGHT);
    const label = formatTick(v);
    img.text(f.left - 6 - textWidth(label), py - 3, label, BLACK);
  }
  // redraw the axes over the grid lines
  img.line(f.left, f.bottom, f.right, f.bottom, BLACK);
  img.line(f.left, f.top, f.left, f.bottom, BLACK);
  img.text((f.left + f.right) / 2 - textWidth(title, 2) / 2, 8, title, BLACK, 2);
  img.text((f.left + f.right) / 2 - textWidth(xLabel) / 2, img.height - 12, xLabel, BLACK);
  img.text(6, 10, yLabel, BLACK);
  return f;
}
