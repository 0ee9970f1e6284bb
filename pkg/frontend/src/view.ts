/**
 * View state and the fold that updates it, one response line at a time.
 *
 * applyResponse is pure: (state, request, response line) -> state. All
 * text shown to the user (types, results, probabilities, environments)
 * is carried verbatim from the kernel payload; the view decides layout,
 * never content.
 */

import {
  CellSummary,
  Node,
  ProtocolError,
  SuggestionRow,
  ScopeEntry,
  parseResponse,
  parseTree,
  readSExp,
} from "./protocol.js";

export interface EnvEntry {
  name: string;
  /** serialized result bound to the name, exactly as the kernel sent it */
  valueText: string;
}

export type ResultPiece =
  | { kind: "text"; text: string }
  | { kind: "hole-badge"; hole: string; env: EnvEntry[]; inner: ResultPiece[] | null };

export interface ResultView {
  /** the whole result payload, verbatim */
  resultText: string;
  pieces: ResultPiece[];
}

export interface Inspector {
  cellId: string;
  mode: string;
  typeText: string | null;
  scope: ScopeEntry[];
}

export interface ViewState {
  cells: CellSummary[];
  /** cell id -> last edit state tree sent by the kernel */
  trees: Map<string, Node>;
  treeTexts: Map<string, string>;
  results: Map<string, ResultView>;
  inspector: Inspector | null;
  palette: SuggestionRow[] | null;
  /** transport or parse trouble; sticky until a line parses again */
  banner: string | null;
  /** last rejected request or status note; replaced on every response */
  toast: string | null;
}

export function emptyView(): ViewState {
  return {
    cells: [],
    trees: new Map(),
    treeTexts: new Map(),
    results: new Map(),
    inspector: null,
    palette: null,
    banner: null,
    toast: null,
  };
}

/** Reassembles a node's source text from its ordered parts. */
export function nodeText(n: Node): string {
  if (n.head !== "" && n.parts.length === 0) return n.head;
  const rendered = n.parts.map((p) => (typeof p === "string" ? p : nodeText(p)));
  return `(${[...(n.head === "" ? [] : [n.head]), ...rendered].join(" ")})`;
}

function envEntries(envNode: Node | undefined): EnvEntry[] {
  if (!envNode) return [];
  return envNode.kids.map((pair) => ({
    name: pair.head,
    valueText: pair.kids.length === 1 ? nodeText(pair.kids[0]) : nodeText(pair),
  }));
}

export function renderResult(n: Node): ResultPiece[] {
  switch (n.head) {
    case "num":
      return [{ kind: "text", text: n.atoms[0] ?? "" }];
    case "vclosure":
      return [{ kind: "text", text: `<fun ${n.atoms[0] ?? ""}>` }];
    case "ihole":
      return [{ kind: "hole-badge", hole: n.atoms[0] ?? "", env: envEntries(n.kids[0]), inner: null }];
    case "inehole":
      return [{
        kind: "hole-badge",
        hole: n.atoms[0] ?? "",
        env: envEntries(n.kids[1]),
        inner: renderResult(n.kids[0]),
      }];
    case "ap":
      return [
        ...renderResult(n.kids[0]),
        { kind: "text", text: "(" },
        ...renderResult(n.kids[1]),
        { kind: "text", text: ")" },
      ];
    case "plus":
      return [
        ...renderResult(n.kids[0]),
        { kind: "text", text: " + " },
        ...renderResult(n.kids[1]),
      ];
    default:
      return [{ kind: "text", text: nodeText(n) }];
  }
}

export function resultViewOf(resultText: string, tree: Node): ResultView {
  return { resultText, pieces: renderResult(tree) };
}

function requestOp(request: string): [string, string] {
  const words = request.split(" ");
  return [words[0] ?? "", words[1] ?? ""];
}

export function applyResponse(view: ViewState, request: string, line: string): ViewState {
  let response;
  try {
    response = parseResponse(line);
  } catch (err) {
    if (err instanceof ProtocolError) return { ...view, banner: err.message };
    throw err;
  }
  const [op] = requestOp(request);

  switch (response.kind) {
    case "error":
      // a refused request changes nothing but the toast
      return { ...view, banner: null, toast: `${response.code}: ${response.message}` };

    case "cells": {
      const next: ViewState = { ...view, banner: null, toast: null, cells: response.cells };
      if (op === "new" || op === "load") {
        next.trees = new Map();
        next.treeTexts = new Map();
        next.results = new Map();
        next.inspector = null;
        next.palette = null;
      } else {
        const alive = new Set(response.cells.map((c) => c.id));
        next.trees = new Map([...view.trees].filter(([id]) => alive.has(id)));
        next.treeTexts = new Map([...view.treeTexts].filter(([id]) => alive.has(id)));
        next.results = new Map([...view.results].filter(([id]) => alive.has(id)));
      }
      return next;
    }

    case "edited": {
      const trees = new Map(view.trees).set(response.cellId, response.tree);
      const treeTexts = new Map(view.treeTexts).set(response.cellId, response.treeText);
      const results = new Map(view.results);
      for (const row of response.recomputed) {
        if (row.resultText === "error") results.delete(row.id);
        else results.set(row.id, resultViewOf(row.resultText, parsedResult(row.resultText)));
      }
      // the palette described the pre-edit state
      return { ...view, banner: null, toast: null, palette: null, trees, treeTexts, results };
    }

    case "cursor-info":
      return {
        ...view,
        banner: null,
        toast: null,
        inspector: {
          cellId: requestOp(request)[1],
          mode: response.mode,
          typeText: response.typeText,
          scope: response.scope,
        },
      };

    case "result": {
      const results = new Map(view.results).set(
        requestOp(request)[1], resultViewOf(response.resultText, response.tree));
      return { ...view, banner: null, toast: null, results };
    }

    case "suggestions":
      // rows stay in kernel order; ranking is not the view's business
      return { ...view, banner: null, toast: null, palette: response.rows };

    case "saved":
      return { ...view, banner: null, toast: "saved" };
  }
}

function parsedResult(resultText: string): Node {
  return parseTree(readSExp(resultText));
}
