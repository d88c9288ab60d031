/** Run dashboard: launch, poll while pending, and render the analytics the
 * service returns.  Every displayed number comes from the API verbatim. */

import { StudioApi } from "./api.js";
import { barChartSvg, lineChartSvg } from "./charts.js";
import type { ChartPoint } from "./charts.js";
import { cloneExperiment } from "./state.js";
import type { Draft } from "./state.js";
import type { AdviceDoc, RunDetail, RunRequest } from "./model.js";

const DEFAULT_POLL_MS = 2000;

const BADGE_KINDS = new Set([
  "dimension_dominates",
  "dimension_negligible",
  "low_dispersion",
]);

export interface DashboardOptions {
  pollIntervalMs?: number;
  onCloneDraft?: (draft: Draft) => void;
}

export class RunDashboard {
  private runId: string | null = null;
  private detail: RunDetail | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private readonly pollIntervalMs: number;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: StudioApi,
    private readonly options: DashboardOptions = {},
  ) {
    this.pollIntervalMs = options.pollIntervalMs ?? DEFAULT_POLL_MS;
  }

  async launch(request: RunRequest): Promise<string> {
    const { run_id } = await this.api.startRun(request);
    await this.track(run_id);
    return run_id;
  }

  async track(runId: string): Promise<void> {
    this.stop();
    this.runId = runId;
    await this.refresh();
  }

  stop(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  currentDetail(): RunDetail | null {
    return this.detail;
  }

  private async refresh(): Promise<void> {
    if (!this.runId) return;
    const detail = await this.api.getRun(this.runId);
    this.detail = detail;
    this.render();
    if (detail.status === "pending") {
      this.timer = setTimeout(() => void this.refresh(), this.pollIntervalMs);
    }
  }

  /** Mean rank-difference trend across several finished runs. */
  async renderHistory(runIds: string[]): Promise<void> {
    const points: ChartPoint[] = [];
    for (const runId of runIds) {
      const detail = await this.api.getRun(runId);
      if (detail.status === "done" && detail.rank_diff) {
        points.push({ label: runId, value: detail.rank_diff.mean_abs_diff });
      }
    }
    let history = this.root.querySelector<HTMLElement>(".history");
    if (!history) {
      history = document.createElement("section");
      history.className = "history";
      this.root.appendChild(history);
    }
    history.innerHTML = `<h3>Mean rank difference across runs</h3>${lineChartSvg(points, "mean |rank diff|")}`;
  }

  render(): void {
    const detail = this.detail;
    this.root.innerHTML = "";
    this.root.classList.add("dashboard");
    if (!detail) {
      const hint = document.createElement("p");
      hint.className = "dashboard-empty";
      hint.textContent = "launch a run or pick one from the history";
      this.root.appendChild(hint);
      return;
    }
    if (detail.status === "pending") {
      const pending = document.createElement("div");
      pending.className = "run-pending";
      pending.textContent = `run ${detail.run_id} is pending...`;
      this.root.appendChild(pending);
      return;
    }
    this.root.appendChild(this.renderHead(detail));
    this.root.appendChild(this.renderScores(detail));
    if (detail.failures && detail.failures.length > 0) {
      this.root.appendChild(this.renderFailures(detail));
    }
    this.root.appendChild(this.renderRankDiff(detail));
    this.root.appendChild(this.renderContributions(detail));
    this.root.appendChild(this.renderAdvisor(detail));
    this.root.appendChild(this.renderClone(detail));
  }

  private renderHead(detail: RunDetail): HTMLElement {
    const head = document.createElement("div");
    head.className = "run-head";
    const title = document.createElement("span");
    title.className = "run-id";
    title.textContent = `run ${detail.run_id} (${detail.experiment_id ?? "?"})`;
    const download = document.createElement("a");
    download.className = "report-link";
    download.href = this.api.reportUrl(detail.run_id);
    download.textContent = "download scores CSV";
    head.append(title, download);
    return head;
  }

  private renderScores(detail: RunDetail): HTMLElement {
    const section = document.createElement("section");
    section.className = "scores";
    const table = document.createElement("table");
    table.className = "scores-table";
    const scores = detail.site_scores ?? [];
    const dimensionNames = scores[0]?.dimensions.map((d) => d.dimension) ?? [];
    const header = document.createElement("tr");
    for (const name of ["site", ...dimensionNames, "total_raw", "total_scaled"]) {
      const cell = document.createElement("th");
      cell.textContent = name;
      header.appendChild(cell);
    }
    table.appendChild(header);
    for (const score of scores) {
      const row = document.createElement("tr");
      row.className = "score-row";
      row.dataset.site = score.site;
      const site = document.createElement("td");
      site.textContent = score.site;
      row.appendChild(site);
      for (const dimension of score.dimensions) {
        const cell = document.createElement("td");
        cell.className = "subtotal";
        cell.textContent = dimension.subtotal.toFixed(4);
        row.appendChild(cell);
      }
      const raw = document.createElement("td");
      raw.className = "total-raw";
      raw.textContent = score.total_raw.toFixed(4);
      const scaled = document.createElement("td");
      scaled.className = "total-scaled";
      scaled.textContent = score.total_scaled.toFixed(4);
      row.append(raw, scaled);
      table.appendChild(row);
    }
    section.appendChild(table);
    return section;
  }

  private renderFailures(detail: RunDetail): HTMLElement {
    const section = document.createElement("section");
    section.className = "failures";
    const heading = document.createElement("h3");
    heading.textContent = "failures";
    section.appendChild(heading);
    const list = document.createElement("ul");
    for (const [site, error] of detail.failures ?? []) {
      const item = document.createElement("li");
      item.className = "failure";
      item.textContent = `${site}: ${error}`;
      list.appendChild(item);
    }
    section.appendChild(list);
    return section;
  }

  private renderRankDiff(detail: RunDetail): HTMLElement {
    const section = document.createElement("section");
    section.className = "rankdiff";
    const heading = document.createElement("h3");
    heading.textContent = "Rank agreement vs ground truth";
    section.appendChild(heading);
    if (detail.rank_diff) {
      const bars = detail.rank_diff.per_site.map((entry) => ({
        label: entry.site,
        value: entry.abs_diff,
      }));
      const chart = document.createElement("div");
      chart.className = "rankdiff-chart";
      chart.innerHTML = barChartSvg(bars, "per-site |rank diff|");
      section.appendChild(chart);
      const mean = document.createElement("div");
      mean.className = "mean-diff";
      mean.dataset.value = String(detail.rank_diff.mean_abs_diff);
      mean.textContent = `mean |rank diff|: ${detail.rank_diff.mean_abs_diff.toFixed(4)}`;
      section.appendChild(mean);
    } else {
      const note = document.createElement("p");
      note.className = "rankdiff-note";
      note.textContent =
        detail.rank_diff_error ?? "attach a ground-truth CSV when launching to compare orders";
      section.appendChild(note);
    }
    return section;
  }

  private badgesFor(detail: RunDetail, dimension: string): AdviceDoc[] {
    return (detail.advices ?? []).filter(
      (advice) => advice.dimension === dimension && BADGE_KINDS.has(advice.kind),
    );
  }

  private renderContributions(detail: RunDetail): HTMLElement {
    const section = document.createElement("section");
    section.className = "contributions";
    const heading = document.createElement("h3");
    heading.textContent = "Dimension contributions";
    section.appendChild(heading);
    const table = document.createElement("table");
    table.className = "contrib-table";
    const header = document.createElement("tr");
    for (const name of ["dimension", "relations", "contribution %", "std dev", "mean subtotal"]) {
      const cell = document.createElement("th");
      cell.textContent = name;
      header.appendChild(cell);
    }
    table.appendChild(header);
    for (const row of detail.contributions ?? []) {
      const tr = document.createElement("tr");
      tr.className = "contrib-row";
      tr.dataset.dimension = row.dimension;
      const dimension = document.createElement("td");
      dimension.textContent = row.dimension;
      for (const advice of this.badgesFor(detail, row.dimension)) {
        const badge = document.createElement("span");
        badge.className = "badge";
        badge.dataset.kind = advice.kind;
        badge.title = advice.message;
        badge.textContent = advice.kind.replace(/_/g, " ");
        dimension.appendChild(badge);
        tr.classList.add("flagged");
      }
      const count = document.createElement("td");
      count.className = "attr-count";
      count.textContent = String(row.attribute_count);
      const pct = document.createElement("td");
      pct.className = "contribution";
      pct.textContent = `${row.contribution_pct.toFixed(2)}%`;
      const std = document.createElement("td");
      std.className = "std-dev";
      std.textContent = row.std_dev.toFixed(2);
      const mean = document.createElement("td");
      mean.className = "mean-subtotal";
      mean.textContent = row.mean_subtotal.toFixed(2);
      tr.append(dimension, count, pct, std, mean);
      table.appendChild(tr);
    }
    section.appendChild(table);
    return section;
  }

  private renderAdvisor(detail: RunDetail): HTMLElement {
    const section = document.createElement("section");
    section.className = "advisor";
    const heading = document.createElement("h3");
    heading.textContent = "Advisor";
    section.appendChild(heading);
    const list = document.createElement("ul");
    for (const advice of detail.advices ?? []) {
      const item = document.createElement("li");
      item.className = "advice";
      item.dataset.kind = advice.kind;
      item.textContent = advice.message;
      list.appendChild(item);
    }
    section.appendChild(list);
    return section;
  }

  private renderClone(detail: RunDetail): HTMLElement {
    const section = document.createElement("section");
    section.className = "clone";
    const heading = document.createElement("h3");
    heading.textContent = "Next experiment";
    section.appendChild(heading);

    const idInput = document.createElement("input");
    idInput.className = "clone-id";
    idInput.value = `${detail.experiment_id ?? "experiment"}-next`;
    section.appendChild(idInput);

    const button = document.createElement("button");
    button.className = "clone-btn";
    button.textContent = detail.suggested_scale
      ? "clone with suggested scale"
      : "clone experiment";
    button.addEventListener("click", () => void this.clone(detail, idInput.value));
    section.appendChild(button);

    if (detail.suggested_scale) {
      const preview = document.createElement("div");
      preview.className = "suggested-scale";
      preview.dataset.divisor = String(detail.suggested_scale.post_divisor);
      preview.textContent = `suggested scale: [${detail.suggested_scale.p.join(", ")}] / ${detail.suggested_scale.post_divisor}`;
      section.appendChild(preview);
    }
    return section;
  }

  private async clone(detail: RunDetail, newId: string): Promise<void> {
    if (!detail.experiment_id) return;
    const source = await this.api.getExperiment(detail.experiment_id);
    const draft = cloneExperiment(source, newId, {
      scale: detail.suggested_scale ?? undefined,
      label: `${source.label} (next)`,
    });
    this.options.onCloneDraft?.(draft);
  }
}
