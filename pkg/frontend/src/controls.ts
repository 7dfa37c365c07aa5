import type { ControlValues, ScoringMethod } from "./types";

export const GAMMA_STOPS = [0, 0.25, 0.5, 0.75, 1] as const;
export const MIN_LENGTH_CHOICES = [50, 70] as const;
export const METHODS: ScoringMethod[] = ["O", "ER", "EG"];
export const RESCORE_DEBOUNCE_MS = 300;

export const DEFAULT_CONTROLS: ControlValues = {
  gamma: 0.25,
  method: "EG",
  min_length: 50,
  include_query: false,
};

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), waitMs);
  };
}

/**
 * What-if controls for a single turn: gamma slider over the five sweep stops,
 * method selector, minimum-length choice and the include-query toggle.
 * Changes are debounced into a single rescore request.
 */
export function buildControls(
  container: HTMLElement,
  initial: ControlValues,
  onChange: (values: ControlValues) => void,
  debounceMs: number = RESCORE_DEBOUNCE_MS,
): void {
  container.innerHTML = "";
  const values: ControlValues = { ...initial };
  const emit = debounce(() => onChange({ ...values }), debounceMs);

  const slider = document.createElement("input");
  slider.type = "range";
  slider.id = "gamma-slider";
  slider.min = "0";
  slider.max = String(GAMMA_STOPS.length - 1);
  slider.step = "1";
  slider.value = String(GAMMA_STOPS.indexOf(values.gamma as 0));
  slider.addEventListener("input", () => {
    values.gamma = GAMMA_STOPS[Number(slider.value)];
    emit();
  });
  container.appendChild(labelled("γ", slider));

  const methodSelect = document.createElement("select");
  methodSelect.id = "method-select";
  for (const method of METHODS) {
    const option = document.createElement("option");
    option.value = method;
    option.textContent = method;
    option.selected = method === values.method;
    methodSelect.appendChild(option);
  }
  methodSelect.addEventListener("change", () => {
    values.method = methodSelect.value as ScoringMethod;
    container.classList.toggle("method-plain", values.method === "O");
    emit();
  });
  container.appendChild(labelled("method", methodSelect));

  const lengthSelect = document.createElement("select");
  lengthSelect.id = "min-length-select";
  for (const words of MIN_LENGTH_CHOICES) {
    const option = document.createElement("option");
    option.value = String(words);
    option.textContent = `${words} words`;
    option.selected = words === values.min_length;
    lengthSelect.appendChild(option);
  }
  lengthSelect.addEventListener("change", () => {
    values.min_length = Number(lengthSelect.value);
    emit();
  });
  container.appendChild(labelled("min length", lengthSelect));

  const includeQuery = document.createElement("input");
  includeQuery.type = "checkbox";
  includeQuery.id = "include-query-toggle";
  includeQuery.checked = values.include_query;
  includeQuery.addEventListener("change", () => {
    values.include_query = includeQuery.checked;
    emit();
  });
  container.appendChild(labelled("weave query into answer", includeQuery));

  container.classList.toggle("method-plain", values.method === "O");
}

function labelled(text: string, control: HTMLElement): HTMLLabelElement {
  const label = document.createElement("label");
  const span = document.createElement("span");
  span.textContent = text;
  label.appendChild(span);
  label.appendChild(control);
  return label;
}
