/**
 * Browser shell. Paints the view state into the page and feeds DOM events
 * to the client. With `?server=ws://...` it drives a live kernel through
 * a websocket-to-socket bridge; without it, it replays the bundled
 * walkthrough against a stubbed transport.
 */

import { Client } from "./client.js";
import { ReplayTransport, Transport, WebSocketTransport } from "./transport.js";
import { ViewState, ResultPiece, Inspector } from "./view.js";
import { Node, partNode } from "./protocol.js";
import { bindingHelp } from "./keymap.js";
import { GESTURES, TRANSCRIPT, applyGesture } from "./demo.js";

function el(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found;
}

function tag(name: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(name);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// --- expression rendering ---------------------------------------------

function renderType(n: Node, into: HTMLElement): void {
  const target = n.cursor ? tag("span", "cursor") : into;
  if (n.head === "num") {
    target.append("num");
  } else if (n.head === "thole") {
    target.append(tag("span", "holechip", "?"));
  } else if (n.head === "arrow") {
    target.append("(");
    renderType(partNode(n.parts[0]), target);
    target.append(" → ");
    renderType(partNode(n.parts[1]), target);
    target.append(")");
  } else {
    target.append(n.head);
  }
  if (target !== into) into.append(target);
}

function renderExp(n: Node, into: HTMLElement): void {
  const target = n.cursor ? tag("span", "cursor") : into;
  switch (n.head) {
    case "hole":
      target.append(tag("span", "holechip", `⟦${n.atoms[0]}⟧`));
      break;
    case "nehole": {
      const chip = tag("span", "holechip");
      chip.append(`⟦${n.atoms[0]}: `);
      renderExp(n.kids[0], chip);
      chip.append("⟧");
      target.append(chip);
      break;
    }
    case "var":
      target.append(n.atoms[0]);
      break;
    case "num":
      target.append(n.atoms[0]);
      break;
    case "lam":
      target.append(`λ${n.atoms[0]}.`);
      renderExp(n.kids[0], target);
      break;
    case "ap":
      renderExp(n.kids[0], target);
      target.append("(");
      renderExp(n.kids[1], target);
      target.append(")");
      break;
    case "plus":
      target.append("(");
      renderExp(n.kids[0], target);
      target.append(" + ");
      renderExp(n.kids[1], target);
      target.append(")");
      break;
    case "asc":
      renderExp(n.kids[0], target);
      target.append(" : ");
      renderType(partNode(n.parts[1]), target);
      break;
    default:
      // a type under the cursor, or anything this shell does not know
      renderType(n, target);
  }
  if (target !== into) into.append(target);
}

function renderPieces(pieces: ResultPiece[], into: HTMLElement): void {
  for (const piece of pieces) {
    if (piece.kind === "text") {
      into.append(piece.text);
      continue;
    }
    const badge = tag("span", "badge");
    badge.append(`⟦${piece.hole}⟧`);
    if (piece.inner) {
      badge.append("←");
      renderPieces(piece.inner, badge);
    }
    const pop = tag("span", "envpop");
    if (piece.env.length === 0) {
      pop.append("no bindings");
    } else {
      for (const entry of piece.env) {
        pop.append(tag("div", undefined, `${entry.name} = ${entry.valueText}`));
      }
    }
    badge.append(pop);
    badge.addEventListener("click", (ev) => {
      badge.classList.toggle("open");
      ev.stopPropagation();
    });
    into.append(badge);
  }
}

// --- panels -------------------------------------------------------------

function paintCells(state: ViewState, client: Client): void {
  const box = el("cells");
  box.textContent = "";
  for (const cell of state.cells) {
    const card = tag("div", "cell" + (client.focused === cell.id ? " focused" : ""));
    const head = tag("div", "head");
    head.append(tag("span", "name", cell.name));
    head.append(cell.typeText === "error"
      ? tag("span", "chip err", "error")
      : tag("span", "chip", cell.typeText));
    const run = tag("button", "runbtn", "result") as HTMLButtonElement;
    run.addEventListener("click", (ev) => {
      ev.stopPropagation();
      void client.showResult(cell.id);
    });
    head.append(run);
    card.append(head);

    const treeBox = tag("div", "tree");
    const tree = state.trees.get(cell.id);
    if (tree) renderExp(tree, treeBox);
    else treeBox.append("(not opened yet; click to focus)");
    card.append(treeBox);

    const result = state.results.get(cell.id);
    if (result) {
      const line = tag("div", "resultline");
      line.append(tag("span", "label", "⇒"));
      renderPieces(result.pieces, line);
      card.append(line);
    }
    card.addEventListener("click", () => void client.focus(cell.id));
    box.append(card);
  }
}

function paintInspector(inspector: Inspector | null): void {
  const body = el("inspector-body");
  body.textContent = "";
  if (!inspector) {
    body.append("nothing focused");
    return;
  }
  body.append(tag("div", undefined,
    inspector.typeText === null
      ? `${inspector.cellId}: ${inspector.mode}`
      : `${inspector.cellId}: ${inspector.mode} ${inspector.typeText}`));
  const table = tag("table");
  for (const entry of inspector.scope) {
    const row = tag("tr");
    row.append(tag("td", undefined, entry.name));
    row.append(tag("td", undefined, entry.typeText));
    table.append(row);
  }
  if (inspector.scope.length > 0) body.append(table);
}

function paintPalette(state: ViewState, client: Client): void {
  const box = el("palette");
  box.textContent = "";
  if (!state.palette) {
    const hint = tag("span");
    hint.append("press ");
    hint.append(tag("kbd", undefined, "?"));
    box.append(hint);
    return;
  }
  state.palette.forEach((row, index) => {
    const button = tag("button", undefined, `${row.probText}  ${row.actionText}`);
    button.addEventListener("click", () => void client.pickSuggestion(index));
    box.append(button);
  });
}

function paint(state: ViewState, client: Client): void {
  paintCells(state, client);
  paintInspector(state.inspector);
  paintPalette(state, client);

  const banner = el("banner");
  banner.classList.toggle("hidden", state.banner === null);
  banner.textContent = state.banner ?? "";

  const toast = el("toast");
  toast.classList.toggle("hidden", state.toast === null);
  toast.textContent = state.toast ?? "";

  const promptBox = el("promptbox");
  promptBox.classList.toggle("hidden", client.prompt === null);
  if (client.prompt) {
    el("prompt-label").textContent = `${client.prompt.label}: `;
    (el("prompt-input") as HTMLInputElement).focus();
  }
}

// --- wiring -------------------------------------------------------------

function chordOf(ev: KeyboardEvent): string {
  if (ev.shiftKey && ev.key.startsWith("Arrow")) return `Shift+${ev.key}`;
  return ev.key;
}

function installKeys(client: Client): void {
  const input = el("prompt-input") as HTMLInputElement;
  input.addEventListener("keydown", (ev) => {
    ev.stopPropagation();
    if (ev.key === "Enter") {
      const token = input.value;
      input.value = "";
      void client.submitPrompt(token);
    } else if (ev.key === "Escape") {
      input.value = "";
      client.cancelPrompt();
    }
  });
  document.addEventListener("keydown", (ev) => {
    if (client.prompt !== null) return;
    if (ev.ctrlKey || ev.metaKey || ev.altKey) return;
    if (ev.key === "Shift") return;
    ev.preventDefault();
    void client.key(chordOf(ev));
  });
}

function installHelp(): void {
  const strip = el("help");
  for (const { chord, describe } of bindingHelp()) {
    const item = tag("span");
    item.append(tag("kbd", undefined, chord));
    item.append(` ${describe}`);
    strip.append(item);
  }
}

function startDemo(client: Client): void {
  const bar = el("demo-bar");
  bar.classList.remove("hidden");
  const note = el("demo-note");
  const next = el("demo-next") as HTMLButtonElement;
  let at = 0;
  note.textContent = "bundled walkthrough: press next";
  next.addEventListener("click", () => {
    if (at >= GESTURES.length) return;
    const gesture = GESTURES[at];
    at += 1;
    note.textContent = gesture.note;
    void applyGesture(client, gesture);
    if (at >= GESTURES.length) {
      next.disabled = true;
      note.textContent += " — done; add ?server=ws://... to drive a live kernel";
    }
  });
}

async function boot(): Promise<void> {
  installHelp();
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server");

  let transport: Transport;
  if (server) {
    el("status").textContent = `connecting to ${server}`;
    transport = await WebSocketTransport.connect(server);
    el("status").textContent = `live: ${server}`;
  } else {
    transport = new ReplayTransport(TRANSCRIPT);
    el("status").textContent = "demo transcript (no kernel attached)";
  }

  const client = new Client(transport, (state) => paint(state, client));
  installKeys(client);
  if (server) {
    await client.newNotebook("scratch");
  } else {
    startDemo(client);
  }
}

void boot().catch((err) => {
  el("status").textContent = err instanceof Error ? err.message : String(err);
});
