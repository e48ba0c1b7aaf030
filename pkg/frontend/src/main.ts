// DOM wiring for the control panel: targets form (top left), live best
// recipe (top right), inventory grid, and the parallel-coordinates
// solutions view underneath.

import { ApiClient } from "./api.js";
import { ebcFromSrm, srmSwatch } from "./colors.js";
import { pollJob, type PollHandle } from "./poll.js";
import {
  axesFromInventory,
  buildPolylines,
  clusterIds,
  toSvgPath,
  type Axis,
} from "./polyline.js";
import { appendSample, sparklinePath, type ProgressSample } from "./sparkline.js";
import { applyPreset, findPreset } from "./presets.js";
import type { IngredientRecord, OptimizeJob, TargetProfile } from "./types.js";
import { canSubmit, parseNumericField, validateTarget, type TargetInput } from "./validation.js";

const api = new ApiClient();

const el = <T extends Element>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as unknown as T;
};

const state = {
  presets: [] as TargetProfile[],
  inventory: [] as IngredientRecord[],
  axes: [] as Axis[],
  series: [] as ProgressSample[],
  job: null as OptimizeJob | null,
  poll: null as PollHandle | null,
  selectedCluster: null as number | null,
};

function readTargetForm(): TargetInput {
  return {
    abv: parseNumericField(el<HTMLInputElement>("abv").value),
    ibu: parseNumericField(el<HTMLInputElement>("ibu").value),
    srm: parseNumericField(el<HTMLInputElement>("srm").value),
    target_error: parseNumericField(el<HTMLInputElement>("target-error").value),
  };
}

function refreshFormState(): void {
  const input = readTargetForm();
  const errors = validateTarget(input);
  el<HTMLButtonElement>("submit").disabled = errors.length > 0;
  el<HTMLDivElement>("form-errors").textContent = errors
    .map((e) => e.message)
    .join("; ");
  if (input.srm !== null && !Number.isNaN(input.srm)) {
    const swatch = srmSwatch(input.srm);
    const chip = el<HTMLSpanElement>("srm-swatch");
    chip.style.background = swatch.hex;
    chip.title = `${swatch.name} (EBC ${ebcFromSrm(input.srm).toFixed(0)})`;
    el<HTMLSpanElement>("srm-name").textContent = swatch.name;
  }
}

function renderPresets(): void {
  const select = el<HTMLSelectElement>("preset");
  select.innerHTML = "<option value=''>custom target</option>";
  for (const preset of state.presets) {
    const option = document.createElement("option");
    option.value = preset.name;
    option.textContent = `${preset.name} (${preset.abv}% / ${preset.ibu} IBU / ${preset.srm} SRM)`;
    select.appendChild(option);
  }
}

function renderInventory(): void {
  const body = el<HTMLTableSectionElement>("inventory-body");
  body.innerHTML = "";
  state.inventory.forEach((item, index) => {
    const row = document.createElement("tr");
    const stockCell = `<input data-index="${index}" class="stock-input" type="number" min="0" step="any" value="${item.stock}">`;
    row.innerHTML =
      `<td>${item.kind}</td><td>${item.name}</td>` +
      `<td>${stockCell} ${item.stock_unit}</td>`;
    body.appendChild(row);
  });
  body.querySelectorAll<HTMLInputElement>(".stock-input").forEach((input) => {
    input.addEventListener("change", () => {
      const index = Number(input.dataset.index);
      const value = Number(input.value);
      if (Number.isFinite(value) && value >= 0) {
        state.inventory[index].stock = value;
      }
    });
  });
}

function renderProgress(job: OptimizeJob): void {
  el<HTMLSpanElement>("job-status").textContent = job.status;
  el<HTMLSpanElement>("job-fes").textContent = String(job.progress.fes_used);
  el<HTMLSpanElement>("job-error").textContent =
    job.progress.best_error === null ? "-" : job.progress.best_error.toPrecision(4);
  state.series = appendSample(
    state.series,
    job.progress.fes_used,
    job.progress.best_error,
  );
  el<SVGPathElement>("sparkline-path").setAttribute(
    "d",
    sparklinePath(state.series, 280, 60),
  );
  const recipe = job.progress.best_recipe;
  const list = el<HTMLDivElement>("best-recipe");
  if (recipe) {
    list.innerHTML = state.axes
      .map((axis) => {
        const qty = recipe[axis.name] ?? 0;
        const pct = axis.stock > 0 ? Math.min(100, (qty / axis.stock) * 100) : 0;
        return (
          `<div class="bar-row"><span class="bar-label">${axis.name}</span>` +
          `<span class="bar"><span class="bar-fill" style="width:${pct.toFixed(1)}%"></span></span>` +
          `<span class="bar-value">${qty.toFixed(2)}</span></div>`
        );
      })
      .join("");
  }
}

function renderSolutions(job: OptimizeJob): void {
  const svg = el<SVGSVGElement>("solutions-svg");
  const hover = el<HTMLDivElement>("solution-metrics");
  const filter = el<HTMLSelectElement>("cluster-filter");
  svg.querySelectorAll("path.solution").forEach((p) => p.remove());
  if (!job.results) return;

  const report = job.results.cluster_report;
  filter.innerHTML = "<option value=''>all clusters</option>";
  for (const id of clusterIds(report)) {
    const option = document.createElement("option");
    option.value = String(id);
    option.textContent = `cluster ${id + 1}`;
    filter.appendChild(option);
  }
  filter.value = state.selectedCluster === null ? "" : String(state.selectedCluster);

  const lines = buildPolylines(
    job.results.solutions,
    state.axes,
    report,
    state.selectedCluster,
  );
  const palette = ["#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#16a085"];
  for (const line of lines) {
    const path = document.createElementNS("http://www.w3.org/2000/svg", "path");
    path.classList.add("solution");
    path.setAttribute("d", toSvgPath(line, 640, 220));
    path.setAttribute("fill", "none");
    path.setAttribute(
      "stroke",
      line.cluster === null ? "#555" : palette[line.cluster % palette.length],
    );
    path.setAttribute("stroke-opacity", line.dimmed ? "0.12" : "0.85");
    path.addEventListener("mouseenter", () => {
      const m = line.solution.metrics;
      hover.textContent =
        `trial ${line.trial}: ABV ${m.abv.toFixed(2)}%, IBU ${m.ibu.toFixed(1)}, ` +
        `SRM ${m.srm.toFixed(1)}, OG ${m.og.toFixed(4)}, error ${line.solution.error.toPrecision(3)}`;
    });
    svg.appendChild(path);
  }
  el<HTMLSpanElement>("solution-count").textContent = String(
    job.results.solutions.length,
  );
}

async function submitJob(): Promise<void> {
  const input = readTargetForm();
  if (!canSubmit(input)) return;
  state.poll?.stop();
  state.series = [];
  state.selectedCluster = null;
  const request = {
    target: {
      name: el<HTMLSelectElement>("preset").value || "custom",
      abv: input.abv as number,
      ibu: input.ibu as number,
      srm: input.srm as number,
      target_error: input.target_error as number,
    },
    algorithm: el<HTMLSelectElement>("algorithm").value,
    options: { trials: Number(el<HTMLInputElement>("trials").value) || 1 },
  };
  const { id } = await api.optimize(request);
  const handle = pollJob(api, id, (job) => {
    state.job = job;
    renderProgress(job);
    if (job.status === "done") renderSolutions(job);
  });
  state.poll = handle;
  handle.done.catch((err) => {
    el<HTMLDivElement>("form-errors").textContent = String(err);
  });
}

async function init(): Promise<void> {
  const [{ presets }, { ingredients }] = await Promise.all([
    api.presets(),
    api.inventory(),
  ]);
  state.presets = presets;
  state.inventory = ingredients;
  state.axes = axesFromInventory(ingredients);
  renderPresets();
  renderInventory();

  el<HTMLSelectElement>("preset").addEventListener("change", (event) => {
    const name = (event.target as HTMLSelectElement).value;
    const preset = findPreset(state.presets, name);
    if (preset) {
      const filled = applyPreset(preset);
      el<HTMLInputElement>("abv").value = String(filled.abv);
      el<HTMLInputElement>("ibu").value = String(filled.ibu);
      el<HTMLInputElement>("srm").value = String(filled.srm);
      el<HTMLInputElement>("target-error").value = String(filled.target_error);
    }
    refreshFormState();
  });
  for (const id of ["abv", "ibu", "srm", "target-error"]) {
    el<HTMLInputElement>(id).addEventListener("input", refreshFormState);
  }
  el<HTMLButtonElement>("submit").addEventListener("click", (event) => {
    event.preventDefault();
    void submitJob();
  });
  el<HTMLButtonElement>("save-inventory").addEventListener("click", async () => {
    const { ingredients } = await api.replaceInventory(state.inventory);
    state.inventory = ingredients;
    state.axes = axesFromInventory(ingredients);
    renderInventory();
  });
  el<HTMLSelectElement>("cluster-filter").addEventListener("change", (event) => {
    const raw = (event.target as HTMLSelectElement).value;
    state.selectedCluster = raw === "" ? null : Number(raw);
    if (state.job) renderSolutions(state.job);
  });
  refreshFormState();
}

void init();
