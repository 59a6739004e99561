/* DOM wiring: textarea + submit on the left, live result panel on the
 * right, session history with a two-entry compare view below. */

import { ApiClient } from "./api.js";
import { debounce } from "./debounce.js";
import { renderComparison, renderErrorBanner, renderResult } from "./render.js";
import { DashboardStore, type ViewState } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

const draft = el<HTMLTextAreaElement>("draft");
const submit = el<HTMLButtonElement>("submit");
const banner = el<HTMLDivElement>("banner");
const result = el<HTMLDivElement>("result");
const status = el<HTMLSpanElement>("status");
const historyList = el<HTMLOListElement>("history");
const compareA = el<HTMLSelectElement>("compare-a");
const compareB = el<HTMLSelectElement>("compare-b");
const comparePanel = el<HTMLDivElement>("comparison");

const api = new ApiClient("");

function renderState(state: ViewState): void {
  submit.disabled = !state.draft.trim();
  status.textContent = state.status;
  banner.innerHTML = renderErrorBanner(state.error);
  if (state.last) {
    result.innerHTML = renderResult(state.last);
  }
  const options = state.history
    .map((entry, i) => `<option value="${i}">#${i + 1} ${entry.text.slice(0, 40)}</option>`)
    .join("");
  historyList.innerHTML = state.history
    .map((entry, i) => `<li>#${i + 1} ${entry.text.slice(0, 80)}</li>`)
    .join("");
  for (const select of [compareA, compareB]) {
    const previous = select.value;
    select.innerHTML = options;
    if (previous && Number(previous) < state.history.length) {
      select.value = previous;
    }
  }
  renderCompare(state);
}

function renderCompare(state: ViewState): void {
  const i = Number(compareA.value);
  const j = Number(compareB.value);
  if (Number.isInteger(i) && Number.isInteger(j) && state.history[i] && state.history[j]) {
    comparePanel.innerHTML = renderComparison(store.compare(i, j));
  } else {
    comparePanel.innerHTML = "";
  }
}

const store = new DashboardStore(api, renderState);

submit.addEventListener("click", () => {
  void store.submit();
});
draft.addEventListener("keydown", (event) => {
  if (event.key === "Enter" && (event.ctrlKey || event.metaKey)) {
    void store.submit();
  }
});

const preview = debounce(() => {
  if (store.canSubmit()) {
    void store.submit();
  }
}, 400);
draft.addEventListener("input", () => {
  store.setDraft(draft.value);
  preview();
});
for (const select of [compareA, compareB]) {
  select.addEventListener("change", () => renderCompare(store.state));
}

renderState(store.state);
