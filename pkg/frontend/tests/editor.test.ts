import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiError, StudioApi } from "../src/api.js";
import { MappingEditor } from "../src/editor.js";
import { sameExperiment } from "../src/state.js";
import type { ExperimentDoc } from "../src/model.js";
import { makeExperiment } from "./fixtures.js";

function mount(): HTMLElement {
  document.body.innerHTML = '<div id="root"></div>';
  const root = document.getElementById("root");
  if (!root) throw new Error("no root");
  return root;
}

function mockApi(putImpl?: (doc: ExperimentDoc) => Promise<ExperimentDoc>) {
  const putExperiment = vi.fn(putImpl ?? (async (doc: ExperimentDoc) => doc));
  return { api: { putExperiment } as unknown as StudioApi, putExperiment };
}

function setInput(element: Element | null, value: string, event = "input"): void {
  const input = element as HTMLInputElement | null;
  if (!input) throw new Error("input not found");
  input.value = value;
  input.dispatchEvent(new Event(event, { bubbles: true }));
}

describe("MappingEditor", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("saving an untouched draft sends a structurally equal body", async () => {
    const root = mount();
    const { api, putExperiment } = mockApi();
    const editor = new MappingEditor(root, api);
    const doc = makeExperiment();
    editor.load(doc);

    await editor.save();

    expect(putExperiment).toHaveBeenCalledTimes(1);
    const body = putExperiment.mock.calls[0]?.[0] as ExperimentDoc;
    expect(sameExperiment(body, doc)).toBe(true);
  });

  it("adding a Review relation puts a body containing it", async () => {
    const root = mount();
    const { api, putExperiment } = mockApi();
    const editor = new MappingEditor(root, api);
    editor.load(makeExperiment());

    (root.querySelector('.rel-add[data-dimension="Collaboration"]') as HTMLButtonElement).click();
    const rows = root.querySelectorAll('.relation-row[data-dimension="Collaboration"]');
    const newRow = rows[rows.length - 1];
    if (!newRow) throw new Error("no new row");
    setInput(newRow.querySelector(".rel-name"), "Review");
    setInput(newRow.querySelector(".rel-pattern"), "review");
    setInput(newRow.querySelector(".rel-weight"), "5");

    (root.querySelector(".save-btn") as HTMLButtonElement).click();
    await Promise.resolve();

    const body = putExperiment.mock.calls[0]?.[0] as ExperimentDoc;
    expect(body.mappings["Collaboration"]).toContainEqual({
      name: "Review",
      kind: "keyword",
      pattern: "review",
      weight: 5,
    });
  });

  it("a negative weight disables save and surfaces a message", () => {
    const root = mount();
    const { api, putExperiment } = mockApi();
    const editor = new MappingEditor(root, api);
    editor.load(makeExperiment());

    const firstWeight = root.querySelector('.relation-row[data-dimension="Context"] .rel-weight');
    setInput(firstWeight, "-1");

    const save = root.querySelector(".save-btn") as HTMLButtonElement;
    expect(save.disabled).toBe(true);
    expect(root.querySelector(".issues")?.textContent).toMatch(/weight/);

    // fixing the weight re-enables saving
    setInput(firstWeight, "2");
    expect(save.disabled).toBe(false);
    expect(putExperiment).not.toHaveBeenCalled();
  });

  it("researcher tokens get a read-only editor", async () => {
    const root = mount();
    const { api, putExperiment } = mockApi();
    const editor = new MappingEditor(root, api, { readOnly: true });
    editor.load(makeExperiment());

    expect(root.querySelector(".readonly-banner")).not.toBeNull();
    const inputs = Array.from(root.querySelectorAll("input, select, button"));
    expect(inputs.length).toBeGreaterThan(0);
    for (const element of inputs) {
      expect((element as HTMLInputElement).disabled).toBe(true);
    }

    await editor.save();
    expect(putExperiment).not.toHaveBeenCalled();
  });

  it("a 403 from the service flips the editor to read-only", async () => {
    const root = mount();
    const { api } = mockApi(async () => {
      throw new ApiError(403, "administrator role required");
    });
    const editor = new MappingEditor(root, api);
    editor.load(makeExperiment());
    expect(root.querySelector(".readonly-banner")).toBeNull();

    await editor.save();

    expect(root.querySelector(".readonly-banner")).not.toBeNull();
    expect((root.querySelector(".save-btn") as HTMLButtonElement).disabled).toBe(true);
  });

  it("a 422 from the service is shown as a server issue", async () => {
    const root = mount();
    const { api } = mockApi(async () => {
      throw new ApiError(422, "missing mappings for dimension(s): ['Commerce']");
    });
    const editor = new MappingEditor(root, api);
    editor.load(makeExperiment());

    await editor.save();

    expect(root.querySelector(".issues")?.textContent).toMatch(/Commerce/);
  });
});
