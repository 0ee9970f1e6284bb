/**
 * Keystroke-to-request mapping. The editor owns no semantics: every chord
 * either becomes a protocol request verbatim, opens a one-token prompt
 * (binder names, variable names, number literals need text the chord
 * cannot carry), or is reported as unbound.
 */

export type KeyResult =
  | { kind: "request"; line: string }
  | { kind: "prompt"; prompt: PendingPrompt }
  | { kind: "hint"; message: string };

export interface PendingPrompt {
  /** what the prompt is collecting, for the UI label */
  label: string;
  /** request template; the validated token replaces {} */
  template: string;
  validate: (token: string) => boolean;
}

const IDENT = /^[a-zA-Z_][a-zA-Z0-9_]*$/;
const NUMBER = /^\d+$/;

export function isIdentifier(token: string): boolean {
  return IDENT.test(token);
}

export function isNumber(token: string): boolean {
  return NUMBER.test(token);
}

interface Binding {
  chord: string;
  describe: string;
  result: (cellId: string) => KeyResult;
}

function request(words: string): (cellId: string) => KeyResult {
  return (cellId) => ({ kind: "request", line: `action ${cellId} ${words}` });
}

function prompt(label: string, words: string, validate: (t: string) => boolean) {
  return (cellId: string): KeyResult => ({
    kind: "prompt",
    prompt: { label, template: `action ${cellId} ${words} {}`, validate },
  });
}

const BINDINGS: Binding[] = [
  { chord: "ArrowRight", describe: "next hole", result: request("move nexthole") },
  { chord: "ArrowLeft", describe: "previous hole", result: request("move prevhole") },
  { chord: "ArrowUp", describe: "to parent", result: request("move parent") },
  { chord: "ArrowDown", describe: "into first child", result: request("move child 0") },
  { chord: "Shift+ArrowDown", describe: "into second child", result: request("move child 1") },
  { chord: "\\", describe: "lambda", result: prompt("binder", "construct lam", isIdentifier) },
  { chord: "=", describe: "plus", result: request("construct plus") },
  { chord: "(", describe: "apply", result: request("construct ap") },
  { chord: ":", describe: "ascribe", result: request("construct asc") },
  { chord: "n", describe: "number literal", result: prompt("number", "construct num", isNumber) },
  { chord: "v", describe: "variable", result: prompt("variable", "construct var", isIdentifier) },
  { chord: "h", describe: "wrap in hole", result: request("construct nehole") },
  { chord: "Delete", describe: "delete", result: request("del") },
  { chord: "Backspace", describe: "delete", result: request("del") },
  { chord: "Enter", describe: "finish", result: request("finish") },
  { chord: "a", describe: "arrow type", result: request("construct arrow") },
  { chord: "t", describe: "num type", result: request("construct numtype") },
  {
    chord: "?",
    describe: "suggest",
    result: (cellId) => ({ kind: "request", line: `suggest ${cellId} 5` }),
  },
];

const TABLE = new Map(BINDINGS.map((b) => [b.chord, b]));

/** Human-readable binding list for the help strip. */
export function bindingHelp(): Array<{ chord: string; describe: string }> {
  return BINDINGS.filter((b) => b.chord !== "Backspace").map(
    ({ chord, describe }) => ({ chord, describe }));
}

/**
 * Maps a chord (KeyboardEvent.key, with "Shift+" prefixed when shift is
 * held and the key is not itself a printable shifted character) for the
 * focused cell.
 */
export function dispatchKey(chord: string, cellId: string): KeyResult {
  const binding = TABLE.get(chord);
  if (!binding) return { kind: "hint", message: `${chord} is not bound` };
  return binding.result(cellId);
}

/**
 * Fills a pending prompt with the typed token. Invalid tokens yield a
 * hint and leave no request, so garbage never reaches the kernel.
 */
export function completePrompt(pending: PendingPrompt, token: string): KeyResult {
  if (!pending.validate(token)) {
    return { kind: "hint", message: `${JSON.stringify(token)} is not a valid ${pending.label}` };
  }
  return { kind: "request", line: pending.template.replace("{}", token) };
}
