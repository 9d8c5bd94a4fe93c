/** Client-side grayscale conversion and binary PGM (P5) encoding.
 *
 * The service accepts only raw PGM bytes, so the browser re-encodes any
 * selected image before upload; the 8 MiB limit mirrors the server's 413.
 */

export const MAX_UPLOAD_BYTES = 8 * 1024 * 1024;

/** Rec.601 luma from interleaved RGBA bytes, rounded to nearest. */
export function rgbaToGray(rgba: Uint8ClampedArray | Uint8Array, width: number, height: number): Uint8Array {
  if (rgba.length !== width * height * 4) {
    throw new Error(`RGBA buffer length ${rgba.length} does not match ${width}x${height}`);
  }
  const gray = new Uint8Array(width * height);
  for (let i = 0; i < gray.length; i++) {
    const offset = i * 4;
    const luma = 0.299 * rgba[offset] + 0.587 * rgba[offset + 1] + 0.114 * rgba[offset + 2];
    gray[i] = Math.min(255, Math.round(luma));
  }
  return gray;
}

export function encodePgm(gray: Uint8Array, width: number, height: number): Uint8Array {
  if (gray.length !== width * height) {
    throw new Error(`gray buffer length ${gray.length} does not match ${width}x${height}`);
  }
  const header = new TextEncoder().encode(`P5\n${width} ${height}\n255\n`);
  const out = new Uint8Array(header.length + gray.length);
  out.set(header, 0);
  out.set(gray, header.length);
  return out;
}
