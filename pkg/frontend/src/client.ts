/**
 * Editor session: routes keystrokes to protocol requests, folds each
 * response into the view state, and tells the shell to repaint. No DOM
 * here, so the whole keystroke-to-request path is testable against a
 * replayed transcript.
 */

import { Transport } from "./transport.js";
import { ViewState, emptyView, applyResponse } from "./view.js";
import { PendingPrompt, dispatchKey, completePrompt } from "./keymap.js";

export class Client {
  state: ViewState = emptyView();
  focused: string | null = null;
  prompt: PendingPrompt | null = null;
  private tail: Promise<void> = Promise.resolve();

  constructor(
    private readonly transport: Transport,
    private readonly onChange: (state: ViewState) => void = () => {},
  ) {}

  private update(state: ViewState): void {
    this.state = state;
    this.onChange(state);
  }

  /** Queues one request; all requests go out strictly in order. */
  request(line: string): Promise<void> {
    this.tail = this.tail.then(() => this.roundTrip(line));
    return this.tail;
  }

  private async roundTrip(line: string): Promise<void> {
    let response: string;
    try {
      response = await this.transport.send(line);
    } catch (err) {
      this.update({ ...this.state, banner: err instanceof Error ? err.message : String(err) });
      return;
    }
    this.update(applyResponse(this.state, line, response));
    const words = line.split(" ");
    if (!response.startsWith("ok ")) return;
    if (words[0] === "new" || words[0] === "load") {
      this.focused = this.state.cells[0]?.id ?? null;
    }
    // an accepted edit can retype any cell and moves the cursor, so
    // refresh the cell list and the inspector before the next keystroke
    if (words[0] === "action" || words[0] === "macro" || words[0] === "fill") {
      await this.roundTrip("cells");
      await this.roundTrip(`cursor-info ${words[1]}`);
    }
  }

  newNotebook(name: string): Promise<void> {
    return this.request(`new ${name}`);
  }

  open(path: string): Promise<void> {
    return this.request(`load ${path}`);
  }

  save(path: string): Promise<void> {
    return this.request(`save ${path}`);
  }

  focus(cellId: string): Promise<void> {
    this.focused = cellId;
    return this.request(`cursor-info ${cellId}`);
  }

  showResult(cellId: string): Promise<void> {
    return this.request(`result ${cellId}`);
  }

  /** Handles one chord on the focused cell. */
  key(chord: string): Promise<void> {
    if (this.focused === null) return this.hint("no cell focused");
    const outcome = dispatchKey(chord, this.focused);
    switch (outcome.kind) {
      case "request":
        return this.request(outcome.line);
      case "prompt":
        this.prompt = outcome.prompt;
        this.update({ ...this.state, toast: `${outcome.prompt.label}?` });
        return Promise.resolve();
      case "hint":
        return this.hint(outcome.message);
    }
  }

  /** Completes the open prompt; invalid tokens keep it open. */
  submitPrompt(token: string): Promise<void> {
    if (this.prompt === null) return Promise.resolve();
    const outcome = completePrompt(this.prompt, token);
    if (outcome.kind === "request") {
      this.prompt = null;
      return this.request(outcome.line);
    }
    return this.hint(outcome.kind === "hint" ? outcome.message : "");
  }

  cancelPrompt(): void {
    this.prompt = null;
    this.update({ ...this.state, toast: null });
  }

  /** Sends the nth palette row as an action on the focused cell. */
  pickSuggestion(index: number): Promise<void> {
    const rows = this.state.palette;
    if (this.focused === null || rows === null || index < 0 || index >= rows.length) {
      return Promise.resolve();
    }
    return this.request(`action ${this.focused} ${rows[index].actionText}`);
  }

  private hint(message: string): Promise<void> {
    this.update({ ...this.state, toast: message });
    return Promise.resolve();
  }

  close(): void {
    this.transport.close();
  }
}
