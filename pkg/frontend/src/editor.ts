/** Mapping editor: dimensions -> relation rows with inline weight editing. */

import { ApiError, StudioApi } from "./api.js";
import { DIMENSIONS } from "./model.js";
import type { ExperimentDoc, RelationDoc } from "./model.js";
import { draftFromExperiment, draftToBody, validateDraft } from "./state.js";
import type { Draft, ValidationIssue } from "./state.js";

const READ_ONLY_MESSAGE = "read-only: this token cannot edit mappings";

function numeric(input: HTMLInputElement): number {
  return input.value.trim() === "" ? Number.NaN : Number(input.value);
}

export interface EditorOptions {
  readOnly?: boolean;
  onSaved?: (doc: ExperimentDoc) => void;
}

export class MappingEditor {
  private draft: Draft | null = null;
  private readOnly: boolean;
  private banner: string | null = null;
  private serverIssue: string | null = null;
  private status = "";

  constructor(
    private readonly root: HTMLElement,
    private readonly api: StudioApi,
    private readonly options: EditorOptions = {},
  ) {
    this.readOnly = options.readOnly ?? false;
    if (this.readOnly) {
      this.banner = READ_ONLY_MESSAGE;
    }
  }

  load(doc: ExperimentDoc): void {
    this.loadDraft(draftFromExperiment(doc));
  }

  loadDraft(draft: Draft): void {
    this.draft = draft;
    this.serverIssue = null;
    this.status = "";
    this.render();
  }

  getDraft(): Draft | null {
    return this.draft;
  }

  setReadOnly(flag: boolean): void {
    this.readOnly = flag;
    this.banner = flag ? READ_ONLY_MESSAGE : null;
    this.render();
  }

  addRelation(dimension: string, relation?: RelationDoc): void {
    if (!this.draft) return;
    const relations = this.draft.mappings[dimension] ?? [];
    relations.push(relation ?? { name: "", kind: "keyword", pattern: "", weight: 1 });
    this.draft.mappings[dimension] = relations;
    this.render();
  }

  removeRelation(dimension: string, index: number): void {
    if (!this.draft) return;
    const relations = this.draft.mappings[dimension] ?? [];
    relations.splice(index, 1);
    this.render();
  }

  async save(): Promise<void> {
    if (!this.draft || this.readOnly) return;
    const issues = validateDraft(this.draft);
    if (issues.length > 0) return;
    this.serverIssue = null;
    try {
      const saved = await this.api.putExperiment(draftToBody(this.draft));
      this.status = `saved ${saved.id}`;
      this.options.onSaved?.(saved);
    } catch (error) {
      if (error instanceof ApiError && error.status === 403) {
        this.setReadOnly(true);
        return;
      }
      if (error instanceof ApiError) {
        this.serverIssue = error.message;
      } else {
        this.serverIssue = String(error);
      }
    }
    this.render();
  }

  render(): void {
    this.root.innerHTML = "";
    this.root.classList.add("editor");
    if (this.banner) {
      const banner = document.createElement("div");
      banner.className = "banner readonly-banner";
      banner.textContent = this.banner;
      this.root.appendChild(banner);
    }
    if (!this.draft) {
      const empty = document.createElement("p");
      empty.className = "editor-empty";
      empty.textContent = "select an experiment to edit its mappings";
      this.root.appendChild(empty);
      return;
    }

    this.root.appendChild(this.renderHead(this.draft));
    this.root.appendChild(this.renderScale(this.draft));
    for (const dimension of DIMENSIONS) {
      this.root.appendChild(this.renderDimension(this.draft, dimension));
    }

    const issues = document.createElement("ul");
    issues.className = "issues";
    this.root.appendChild(issues);

    const saveRow = document.createElement("div");
    saveRow.className = "save-row";
    const saveButton = document.createElement("button");
    saveButton.className = "save-btn";
    saveButton.textContent = "Save experiment";
    saveButton.addEventListener("click", () => void this.save());
    const statusSpan = document.createElement("span");
    statusSpan.className = "save-status";
    statusSpan.textContent = this.status;
    saveRow.append(saveButton, statusSpan);
    this.root.appendChild(saveRow);

    this.refreshValidation();
  }

  /** Re-checks the draft and toggles the save button without re-rendering. */
  private refreshValidation(): void {
    if (!this.draft) return;
    const list = this.root.querySelector<HTMLUListElement>(".issues");
    const saveButton = this.root.querySelector<HTMLButtonElement>(".save-btn");
    if (!list || !saveButton) return;
    const issues = validateDraft(this.draft);
    list.innerHTML = "";
    const render = (issue: ValidationIssue) => {
      const item = document.createElement("li");
      item.className = "issue";
      item.textContent = `${issue.field}: ${issue.message}`;
      list.appendChild(item);
    };
    issues.forEach(render);
    if (this.serverIssue) {
      render({ field: "server", message: this.serverIssue });
    }
    saveButton.disabled = this.readOnly || issues.length > 0;
  }

  private renderHead(draft: Draft): HTMLElement {
    const head = document.createElement("div");
    head.className = "editor-head";

    const title = document.createElement("span");
    title.className = "exp-id";
    title.textContent = draft.id;
    head.appendChild(title);

    const label = document.createElement("input");
    label.className = "exp-label";
    label.value = draft.label;
    label.disabled = this.readOnly;
    label.addEventListener("input", () => {
      draft.label = label.value;
      this.refreshValidation();
    });
    head.appendChild(label);

    const scalar = document.createElement("input");
    scalar.className = "exp-scalar";
    scalar.type = "number";
    scalar.value = String(draft.scalar);
    scalar.disabled = this.readOnly;
    scalar.addEventListener("input", () => {
      draft.scalar = numeric(scalar);
      this.refreshValidation();
    });
    const scalarLabel = document.createElement("label");
    scalarLabel.textContent = "scalar ";
    scalarLabel.appendChild(scalar);
    head.appendChild(scalarLabel);

    return head;
  }

  private renderScale(draft: Draft): HTMLElement {
    const row = document.createElement("div");
    row.className = "scale-row";
    const caption = document.createElement("span");
    caption.textContent = "scale";
    row.appendChild(caption);
    draft.scale.p.forEach((value, index) => {
      const input = document.createElement("input");
      input.className = "scale-p";
      input.dataset.index = String(index);
      input.type = "number";
      input.step = "0.01";
      input.value = String(value);
      input.disabled = this.readOnly;
      input.title = DIMENSIONS[index] ?? `p${index + 1}`;
      input.addEventListener("input", () => {
        draft.scale.p[index] = numeric(input);
        this.refreshValidation();
      });
      row.appendChild(input);
    });
    const divisorLabel = document.createElement("label");
    divisorLabel.textContent = "post divisor ";
    const divisor = document.createElement("input");
    divisor.className = "scale-divisor";
    divisor.type = "number";
    divisor.step = "0.1";
    divisor.value = String(draft.scale.post_divisor);
    divisor.disabled = this.readOnly;
    divisor.addEventListener("input", () => {
      draft.scale.post_divisor = numeric(divisor);
      this.refreshValidation();
    });
    divisorLabel.appendChild(divisor);
    row.appendChild(divisorLabel);
    return row;
  }

  private renderDimension(draft: Draft, dimension: string): HTMLElement {
    const section = document.createElement("section");
    section.className = "dimension";
    section.dataset.dimension = dimension;

    const heading = document.createElement("h3");
    const relations = draft.mappings[dimension] ?? [];
    heading.textContent = `${dimension} (${relations.length})`;
    section.appendChild(heading);

    const table = document.createElement("table");
    table.className = "relations";
    const body = document.createElement("tbody");
    relations.forEach((relation, index) => {
      body.appendChild(this.renderRelationRow(dimension, relation, index));
    });
    table.appendChild(body);
    section.appendChild(table);

    const add = document.createElement("button");
    add.className = "rel-add";
    add.dataset.dimension = dimension;
    add.textContent = "add relation";
    add.disabled = this.readOnly;
    add.addEventListener("click", () => this.addRelation(dimension));
    section.appendChild(add);
    return section;
  }

  private renderRelationRow(dimension: string, relation: RelationDoc, index: number): HTMLElement {
    const row = document.createElement("tr");
    row.className = "relation-row";
    row.dataset.dimension = dimension;
    row.dataset.index = String(index);

    const nameCell = document.createElement("td");
    const name = document.createElement("input");
    name.className = "rel-name";
    name.value = relation.name;
    name.disabled = this.readOnly;
    name.addEventListener("input", () => {
      relation.name = name.value;
      this.refreshValidation();
    });
    nameCell.appendChild(name);

    const kindCell = document.createElement("td");
    const kind = document.createElement("select");
    kind.className = "rel-kind";
    for (const option of ["tag", "keyword"] as const) {
      const element = document.createElement("option");
      element.value = option;
      element.textContent = option;
      element.selected = relation.kind === option;
      kind.appendChild(element);
    }
    kind.disabled = this.readOnly;
    kind.addEventListener("change", () => {
      relation.kind = kind.value as RelationDoc["kind"];
      this.refreshValidation();
    });
    kindCell.appendChild(kind);

    const patternCell = document.createElement("td");
    const pattern = document.createElement("input");
    pattern.className = "rel-pattern";
    pattern.value = relation.pattern;
    pattern.disabled = this.readOnly;
    pattern.addEventListener("input", () => {
      relation.pattern = pattern.value;
      this.refreshValidation();
    });
    patternCell.appendChild(pattern);

    const weightCell = document.createElement("td");
    const weight = document.createElement("input");
    weight.className = "rel-weight";
    weight.type = "number";
    weight.step = "0.5";
    weight.value = String(relation.weight);
    weight.disabled = this.readOnly;
    weight.addEventListener("input", () => {
      relation.weight = numeric(weight);
      this.refreshValidation();
    });
    weightCell.appendChild(weight);

    const deleteCell = document.createElement("td");
    const remove = document.createElement("button");
    remove.className = "rel-delete";
    remove.textContent = "remove";
    remove.disabled = this.readOnly;
    remove.addEventListener("click", () => this.removeRelation(dimension, index));
    deleteCell.appendChild(remove);

    row.append(nameCell, kindCell, patternCell, weightCell, deleteCell);
    return row;
  }
}
