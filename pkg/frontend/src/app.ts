/** DOM wiring: renders the one-sample-at-a-time rating flow against the
 * review service on the same origin. All decisions live in RatingFlow. */

import { ReviewApi } from "./api.js";
import { segmentNumerals } from "./highlight.js";
import { RatingFlow, type FlowSnapshot } from "./state.js";
import { SEMANTIC_STEP } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  node.append(...children);
  return node;
}

function highlighted(text: string): HTMLElement {
  const box = el("div", { class: "text-box" });
  for (const segment of segmentNumerals(text)) {
    if (segment.isNumber) {
      box.append(el("mark", { class: "num" }, segment.text));
    } else {
      box.append(segment.text);
    }
  }
  return box;
}

function yesNo(
  name: string,
  label: string,
  current: boolean | null,
  onPick: (value: boolean) => void,
): HTMLElement {
  const row = el("div", { class: "field" }, el("span", { class: "label" }, label));
  for (const value of [true, false]) {
    const input = el("input", {
      type: "radio",
      name,
      id: `${name}-${value}`,
    }) as HTMLInputElement;
    input.checked = current === value;
    input.addEventListener("change", () => onPick(value));
    row.append(
      el("label", { class: "choice", for: `${name}-${value}` }, input, value ? "yes" : "no"),
    );
  }
  return row;
}

export function render(root: HTMLElement, flow: RatingFlow, rerender: () => void): void {
  const snap: FlowSnapshot = flow.snapshot();
  root.replaceChildren();

  const header = el(
    "header",
    {},
    el("h1", {}, "Sample review"),
    el("div", { class: "progress" }, `${snap.rated}/${snap.total} rated`),
  );
  root.append(header);

  if (snap.phase === "loading" || snap.phase === "idle" || snap.phase === "submitting") {
    root.append(el("p", { class: "status" }, "working..."));
    return;
  }
  if (snap.phase === "failed") {
    root.append(el("p", { class: "error" }, `could not start: ${snap.error ?? "unknown error"}`));
    return;
  }
  if (snap.phase === "done") {
    const s = flow.personalSummary();
    root.append(
      el("h2", {}, "All samples rated - thank you"),
      el(
        "ul",
        { class: "summary" },
        el("li", {}, `ratings submitted: ${s.rated}`),
        el("li", {}, `equation preserved: ${s.equationPreservedPct.toFixed(1)}%`),
        el("li", {}, `numbers preserved: ${s.numbersPreservedPct.toFixed(1)}%`),
        el("li", {}, `mean semantic similarity: ${s.meanSemanticSimilarity.toFixed(2)}`),
        el("li", {}, `mean grammaticality: ${s.meanGrammaticality.toFixed(2)}`),
      ),
    );
    return;
  }

  const sample = snap.sample;
  if (!sample) return;

  if (snap.banner) {
    const retry = el("button", { class: "retry" }, "resend rating");
    retry.addEventListener("click", () => void flow.retry().then(rerender));
    root.append(el("div", { class: "banner" }, snap.banner, " ", retry));
  }

  root.append(
    el(
      "section",
      { class: "pair" },
      el("div", {}, el("h2", {}, "Original"), highlighted(sample.original)),
      el("div", {}, el("h2", {}, "Augmented"), highlighted(sample.augmented)),
    ),
  );

  const form = el("section", { class: "form" });
  form.append(
    yesNo("equation", "Would it produce the same equation?", snap.input.equation_preserved, (v) => {
      flow.setEquationPreserved(v);
      rerender();
    }),
    yesNo("numbers", "Are the numerical values preserved?", snap.input.numbers_preserved, (v) => {
      flow.setNumbersPreserved(v);
      rerender();
    }),
  );

  const slider = el("input", {
    type: "range",
    min: "0",
    max: "1",
    step: String(SEMANTIC_STEP),
    value: snap.input.semantic_similarity === null ? "0.5" : String(snap.input.semantic_similarity),
  }) as HTMLInputElement;
  const sliderValue = el(
    "span",
    { class: "slider-value" },
    snap.input.semantic_similarity === null ? "unset" : snap.input.semantic_similarity.toFixed(2),
  );
  slider.addEventListener("input", () => {
    flow.setSemanticSimilarity(Number(slider.value));
    sliderValue.textContent = Number(slider.value).toFixed(2);
  });
  form.append(
    el(
      "div",
      { class: "field" },
      el("span", { class: "label" }, "Semantic similarity (0 to 1)"),
      slider,
      sliderValue,
    ),
  );

  const gram = el("div", { class: "field" }, el("span", { class: "label" }, "Grammaticality (1 to 5)"));
  for (let score = 1; score <= 5; score += 1) {
    const input = el("input", { type: "radio", name: "gram", id: `gram-${score}` }) as HTMLInputElement;
    input.checked = snap.input.grammaticality === score;
    input.addEventListener("change", () => {
      flow.setGrammaticality(score);
      rerender();
    });
    gram.append(el("label", { class: "choice", for: `gram-${score}` }, input, String(score)));
  }
  form.append(gram);

  if (snap.error) form.append(el("p", { class: "error" }, snap.error));

  const submit = el("button", { class: "submit" }, "Submit rating") as HTMLButtonElement;
  submit.disabled = !flow.canSubmit();
  submit.addEventListener("click", () => void flow.submit().then(rerender));
  form.append(submit);
  root.append(form);
}

export async function main(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  let evaluator = window.localStorage.getItem("mwpa-evaluator");
  if (!evaluator) {
    evaluator = window.prompt("Evaluator id:")?.trim() || "anonymous";
    window.localStorage.setItem("mwpa-evaluator", evaluator);
  }
  const flow = new RatingFlow(new ReviewApi(""), evaluator);
  const rerender = () => render(root, flow, rerender);
  await flow.start();
  rerender();
}

if (typeof document !== "undefined") {
  void main();
}
