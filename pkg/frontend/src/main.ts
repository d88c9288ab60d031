/** Studio shell: token entry, experiment list, editor, and run dashboard. */

import { ApiError, StudioApi } from "./api.js";
import { RunDashboard } from "./dashboard.js";
import { MappingEditor } from "./editor.js";
import type { Draft } from "./state.js";

const DEFAULT_BASE_URL = "http://127.0.0.1:8470";

function el<T extends HTMLElement>(selector: string): T {
  const node = document.querySelector<T>(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node;
}

function boot(): void {
  const root = document.getElementById("app");
  if (!root) return;

  root.innerHTML = `
    <header class="topbar">
      <h1>octoscore studio</h1>
      <input id="base-url" value="${DEFAULT_BASE_URL}" title="service URL">
      <input id="token" placeholder="bearer token" type="password">
      <select id="role">
        <option value="administrator">administrator</option>
        <option value="researcher">researcher</option>
      </select>
      <button id="connect">connect</button>
      <span id="conn-status"></span>
    </header>
    <main class="columns">
      <aside class="sidebar">
        <h2>Experiments</h2>
        <ul id="experiment-list"></ul>
        <h2>Runs</h2>
        <ul id="run-list"></ul>
      </aside>
      <section class="content">
        <div id="editor"></div>
        <div class="launcher">
          <h2>Launch run</h2>
          <textarea id="sites" rows="4" placeholder="one URL or file path per line"></textarea>
          <textarea id="truth" rows="3" placeholder="optional ground truth CSV (site,cr,category)"></textarea>
          <button id="launch">launch</button>
          <span id="launch-status"></span>
        </div>
        <div id="dashboard"></div>
      </section>
    </main>`;

  let api = new StudioApi(DEFAULT_BASE_URL, "");
  let editor = new MappingEditor(el("#editor"), api);
  let dashboard = new RunDashboard(el("#dashboard"), api, {
    onCloneDraft: (draft: Draft) => {
      editor.loadDraft(draft);
      el<HTMLElement>("#editor").scrollIntoView();
    },
  });
  let currentExperimentId: string | null = null;

  async function refreshExperiments(): Promise<void> {
    const list = el<HTMLUListElement>("#experiment-list");
    list.innerHTML = "";
    for (const experiment of await api.listExperiments()) {
      const item = document.createElement("li");
      const link = document.createElement("a");
      link.href = "#";
      link.textContent = `${experiment.id}  ${experiment.label}`;
      link.addEventListener("click", (event) => {
        event.preventDefault();
        currentExperimentId = experiment.id;
        editor.load(experiment);
      });
      item.appendChild(link);
      list.appendChild(item);
    }
  }

  async function refreshRuns(): Promise<void> {
    const list = el<HTMLUListElement>("#run-list");
    list.innerHTML = "";
    for (const run of await api.listRuns()) {
      const item = document.createElement("li");
      const link = document.createElement("a");
      link.href = "#";
      link.textContent = `${run.run_id} (${run.status})`;
      link.addEventListener("click", (event) => {
        event.preventDefault();
        void dashboard.track(run.run_id);
      });
      item.appendChild(link);
      list.appendChild(item);
    }
  }

  el<HTMLButtonElement>("#connect").addEventListener("click", () => {
    void (async () => {
      const baseUrl = el<HTMLInputElement>("#base-url").value.trim();
      const token = el<HTMLInputElement>("#token").value.trim();
      const role = el<HTMLSelectElement>("#role").value;
      api = new StudioApi(baseUrl, token);
      editor = new MappingEditor(el("#editor"), api, {
        readOnly: role !== "administrator",
        onSaved: () => void refreshExperiments(),
      });
      dashboard = new RunDashboard(el("#dashboard"), api, {
        onCloneDraft: (draft: Draft) => editor.loadDraft(draft),
      });
      const status = el<HTMLElement>("#conn-status");
      try {
        await refreshExperiments();
        await refreshRuns();
        status.textContent = `connected as ${role}`;
      } catch (error) {
        status.textContent =
          error instanceof ApiError ? `error ${error.status}: ${error.message}` : String(error);
      }
    })();
  });

  el<HTMLButtonElement>("#launch").addEventListener("click", () => {
    void (async () => {
      const status = el<HTMLElement>("#launch-status");
      if (!currentExperimentId) {
        status.textContent = "pick an experiment first";
        return;
      }
      const sites = el<HTMLTextAreaElement>("#sites")
        .value.split("\n")
        .map((line) => line.trim())
        .filter((line) => line && !line.startsWith("#"));
      if (sites.length === 0) {
        status.textContent = "no sites to evaluate";
        return;
      }
      const truth = el<HTMLTextAreaElement>("#truth").value.trim();
      try {
        const runId = await dashboard.launch({
          experiment_id: currentExperimentId,
          sites,
          ...(truth ? { ground_truth_csv: truth } : {}),
        });
        status.textContent = `launched ${runId}`;
        await refreshRuns();
      } catch (error) {
        status.textContent =
          error instanceof ApiError ? `error ${error.status}: ${error.message}` : String(error);
      }
    })();
  });
}

boot();
