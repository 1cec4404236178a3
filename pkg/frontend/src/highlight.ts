/** Numeral highlighting for the side-by-side texts, so evaluators can check
 * the numbers-preserved criterion at a glance. Texts arrive normalized
 * (space-separated tokens). */

export interface Segment {
  text: string;
  isNumber: boolean;
}

const NUMBER_TOKEN = /^(?:\d+(?:,\d{3})+(?:\.\d+)?|\d+\.\d+|\.\d+|\d+)$/;

export function isNumberToken(token: string): boolean {
  return NUMBER_TOKEN.test(token);
}

/** Split normalized text into alternating plain/number segments; separator
 * spaces stay plain and joining the segments reproduces the input exactly. */
export function segmentNumerals(text: string): Segment[] {
  const segments: Segment[] = [];
  const push = (piece: string, isNumber: boolean) => {
    const last = segments[segments.length - 1];
    if (last && last.isNumber === isNumber) {
      last.text += piece;
    } else {
      segments.push({ text: piece, isNumber });
    }
  };
  text.split(" ").forEach((token, i) => {
    if (i > 0) push(" ", false);
    if (token) push(token, isNumberToken(token));
  });
  return segments;
}

export function joinSegments(segments: Segment[]): string {
  return segments.map((s) => s.text).join("");
}
