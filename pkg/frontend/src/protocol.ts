/**
 * Reader for kernel responses. Everything the kernel sends is one line:
 * `ok <payload>` or `error <CODE> <message>`, with payloads in the same
 * s-expression grammar the kernel uses for expressions, types, results,
 * and edit states. This module only reshapes those lines; it never
 * computes a type, a result, or a probability of its own.
 */

export type SExp = string | SExp[];

export class ProtocolError extends Error {}

export function readSExp(text: string): SExp {
  const [value, rest] = readFrom(tokenize(text), 0);
  if (rest !== undefined) throw new ProtocolError(`trailing input in ${text}`);
  return value;
}

export function writeSExp(s: SExp): string {
  return typeof s === "string" ? s : `(${s.map(writeSExp).join(" ")})`;
}

function tokenize(text: string): string[] {
  return text.replace(/\(/g, " ( ").replace(/\)/g, " ) ").trim().split(/\s+/);
}

function readFrom(tokens: string[], at: number): [SExp, number | undefined] {
  if (at >= tokens.length) throw new ProtocolError("unexpected end of payload");
  const tok = tokens[at];
  if (tok === ")") throw new ProtocolError("unexpected )");
  if (tok !== "(") return [tok, at + 1 < tokens.length ? at + 1 : undefined];
  const items: SExp[] = [];
  let i = at + 1;
  for (;;) {
    if (i >= tokens.length) throw new ProtocolError("unclosed (");
    if (tokens[i] === ")") {
      const next = i + 1;
      return [items, next < tokens.length ? next : undefined];
    }
    const [item, rest] = readFrom(tokens, i);
    items.push(item);
    i = rest ?? tokens.length;
  }
}

/**
 * A parsed tree node. `head` is the constructor word (`plus`, `hole`,
 * `lam`, `ihole`, ...), `atoms` its non-tree arguments rendered verbatim,
 * `kids` its subtrees, and `cursor` marks the node the editor cursor sits
 * on (the kernel wraps that node in `(cursor ...)`).
 */
export interface Node {
  head: string;
  atoms: string[];
  kids: Node[];
  /** arguments in payload order; atoms stay strings, subtrees are Nodes */
  parts: Array<string | Node>;
  cursor: boolean;
}

export function parseTree(s: SExp): Node {
  if (typeof s === "string") return { head: s, atoms: [], kids: [], parts: [], cursor: false };
  if (s.length === 0) return { head: "", atoms: [], kids: [], parts: [], cursor: false };
  const [head, ...rest] = s;
  if (typeof head !== "string") {
    // a bare grouping, e.g. an environment: a list of (name value) pairs
    const kids = s.map(parseTree);
    return { head: "", atoms: [], kids, parts: [...kids], cursor: false };
  }
  if (head === "cursor") {
    if (rest.length !== 1) throw new ProtocolError("cursor wraps one node");
    return { ...parseTree(rest[0]), cursor: true };
  }
  const node: Node = { head, atoms: [], kids: [], parts: [], cursor: false };
  for (const item of rest) {
    if (typeof item === "string") {
      node.atoms.push(item);
      node.parts.push(item);
    } else {
      const kid = parseTree(item);
      node.kids.push(kid);
      node.parts.push(kid);
    }
  }
  return node;
}

/** Views one ordered part as a Node (bare atoms become leaf nodes). */
export function partNode(part: string | Node): Node {
  if (typeof part !== "string") return part;
  return { head: part, atoms: [], kids: [], parts: [], cursor: false };
}

export interface CellSummary {
  id: string;
  name: string;
  /** serialized type, or the word `error` for a broken cell */
  typeText: string;
}

export interface RecomputedEntry {
  id: string;
  /** serialized result, or the word `error` */
  resultText: string;
}

export interface SuggestionRow {
  /** probability exactly as the kernel printed it */
  probText: string;
  /** action words, ready to splice into an `action <cell> ...` request */
  actionText: string;
}

export interface ScopeEntry {
  name: string;
  typeText: string;
}

export type Response =
  | { kind: "error"; code: string; message: string }
  | { kind: "cells"; cells: CellSummary[] }
  | { kind: "edited"; cellId: string; cellName: string; tree: Node;
      treeText: string; recomputed: RecomputedEntry[] }
  | { kind: "cursor-info"; mode: string; typeText: string | null;
      scope: ScopeEntry[] }
  | { kind: "result"; resultText: string; tree: Node }
  | { kind: "suggestions"; rows: SuggestionRow[] }
  | { kind: "saved" };

export function parseResponse(line: string): Response {
  if (line.startsWith("error ")) {
    const rest = line.slice("error ".length);
    const space = rest.indexOf(" ");
    if (space < 0) return { kind: "error", code: rest, message: "" };
    return { kind: "error", code: rest.slice(0, space), message: rest.slice(space + 1) };
  }
  if (!line.startsWith("ok ")) throw new ProtocolError(`not a response: ${line}`);
  const payload = readSExp(line.slice(3));
  if (!Array.isArray(payload) || typeof payload[0] !== "string") {
    throw new ProtocolError(`unrecognized payload: ${line}`);
  }
  switch (payload[0]) {
    case "saved":
      return { kind: "saved" };
    case "cells":
      return { kind: "cells", cells: payload.slice(1).map(parseCellRow) };
    case "edited":
      return parseEdited(payload);
    case "cursor-info":
      return parseCursorInfo(payload);
    case "result": {
      if (payload.length !== 2) throw new ProtocolError("result carries one value");
      return { kind: "result", resultText: writeSExp(payload[1]), tree: parseTree(payload[1]) };
    }
    case "suggestions":
      return { kind: "suggestions", rows: payload.slice(1).map(parseSuggestionRow) };
    default:
      throw new ProtocolError(`unknown payload ${payload[0]}`);
  }
}

function parseCellRow(s: SExp): CellSummary {
  if (!Array.isArray(s) || s.length !== 3 || typeof s[0] !== "string" || typeof s[1] !== "string") {
    throw new ProtocolError("bad cell row");
  }
  return { id: s[0], name: s[1], typeText: writeSExp(s[2]) };
}

function parseEdited(payload: SExp[]): Response {
  const cellPart = payload[1];
  const recomputedPart = payload[2];
  if (!Array.isArray(cellPart) || cellPart[0] !== "cell" || cellPart.length !== 4
      || typeof cellPart[1] !== "string" || typeof cellPart[2] !== "string"
      || !Array.isArray(recomputedPart) || recomputedPart[0] !== "recomputed") {
    throw new ProtocolError("bad edited payload");
  }
  const recomputed: RecomputedEntry[] = recomputedPart.slice(1).map((row) => {
    if (!Array.isArray(row) || row.length !== 2 || typeof row[0] !== "string") {
      throw new ProtocolError("bad recomputed row");
    }
    return { id: row[0], resultText: writeSExp(row[1]) };
  });
  return {
    kind: "edited",
    cellId: cellPart[1],
    cellName: cellPart[2],
    tree: parseTree(cellPart[3]),
    treeText: writeSExp(cellPart[3]),
    recomputed,
  };
}

function parseCursorInfo(payload: SExp[]): Response {
  const mode = payload[1];
  if (typeof mode !== "string") throw new ProtocolError("bad cursor-info");
  const scopePart = payload[payload.length - 1];
  if (!Array.isArray(scopePart) || scopePart[0] !== "ctx") {
    throw new ProtocolError("cursor-info ends with a ctx");
  }
  const scope: ScopeEntry[] = scopePart.slice(1).map((row) => {
    if (!Array.isArray(row) || row.length !== 2 || typeof row[0] !== "string") {
      throw new ProtocolError("bad scope row");
    }
    return { name: row[0], typeText: writeSExp(row[1]) };
  });
  const typeText = payload.length === 4 ? writeSExp(payload[2]) : null;
  return { kind: "cursor-info", mode, typeText, scope };
}

function parseSuggestionRow(s: SExp): SuggestionRow {
  if (!Array.isArray(s) || s.length !== 2 || typeof s[0] !== "string" || !Array.isArray(s[1])) {
    throw new ProtocolError("bad suggestion row");
  }
  const words = s[1];
  if (!words.every((w) => typeof w === "string")) throw new ProtocolError("bad action words");
  return { probText: s[0], actionText: (words as string[]).join(" ") };
}
