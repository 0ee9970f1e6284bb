/**
 * Bundled walkthrough: a gesture script and the exact request/response
 * transcript it produces against the kernel. Demo mode replays it with a
 * ReplayTransport, so the page works with no kernel attached, and the
 * transcript test replays the same gestures to pin the request stream.
 *
 * Response lines below are captured kernel output, byte for byte.
 */

import { Client } from "./client.js";

export type Gesture =
  | { do: "open"; arg: string; note: string }
  | { do: "result"; arg: string; note: string }
  | { do: "focus"; arg: string; note: string }
  | { do: "key"; arg: string; note: string }
  | { do: "prompt"; arg: string; note: string };

export const GESTURES: Gesture[] = [
  { do: "open", arg: "demo.hazelnb", note: "open the bundled notebook" },
  { do: "result", arg: "c3", note: "c3 runs around its empty hole: badge carries the environment" },
  { do: "focus", arg: "c3", note: "inspect c3: it synthesizes num even with the hole upstream" },
  { do: "focus", arg: "c2", note: "switch to the stats cell" },
  { do: "key", arg: "ArrowRight", note: "jump the cursor to the next hole" },
  { do: "key", arg: "v", note: "start a variable; the editor prompts for its name" },
  { do: "prompt", arg: "m", note: "fill the hole with m; every cell downstream recomputes" },
  { do: "key", arg: "?", note: "ask for suggestions at the cursor" },
  { do: "key", arg: "Enter", note: "finish is refused here; the tree is untouched" },
  { do: "result", arg: "c3", note: "c3 is now a plain number" },
];

export const TRANSCRIPT: ReadonlyArray<readonly [string, string]> = [
  ["load demo.hazelnb",
   "ok (cells (c1 data num) (c2 stats (arrow num num)) (c3 out num))"],
  ["result c3",
   "ok (result (plus (ihole 0 ((m (num 2)))) (num 2)))"],
  ["cursor-info c3",
   "ok (cursor-info synthesized num (ctx (data num) (stats (arrow num num))))"],
  ["cursor-info c2",
   "ok (cursor-info synthesized (arrow num num) (ctx (data num)))"],
  ["action c2 move nexthole",
   "ok (edited (cell c2 stats (asc (lam m (plus (cursor (hole 0)) (var m))) (arrow num num))) (recomputed (c2 (vclosure m (plus (hole 0) (var m)) ())) (c3 (plus (ihole 0 ((m (num 2)))) (num 2)))))"],
  ["cells",
   "ok (cells (c1 data num) (c2 stats (arrow num num)) (c3 out num))"],
  ["cursor-info c2",
   "ok (cursor-info analyzed_against num (ctx (data num) (m num)))"],
  ["action c2 construct var m",
   "ok (edited (cell c2 stats (asc (lam m (plus (cursor (var m)) (var m))) (arrow num num))) (recomputed (c2 (vclosure m (plus (var m) (var m)) ())) (c3 (num 4))))"],
  ["cells",
   "ok (cells (c1 data num) (c2 stats (arrow num num)) (c3 out num))"],
  ["cursor-info c2",
   "ok (cursor-info analyzed_against num (ctx (data num) (m num)))"],
  ["suggest c2 5",
   "ok (suggestions (0.166667 (construct ap)) (0.166667 (construct asc)) (0.166667 (construct nehole)) (0.166667 (construct plus)) (0.166667 (del)))"],
  ["action c2 finish",
   "error E_INVALID_ACTION finish requires the cursor on a non-empty hole"],
  ["result c3",
   "ok (result (num 4))"],
];

export function applyGesture(client: Client, g: Gesture): Promise<void> {
  switch (g.do) {
    case "open":
      return client.open(g.arg);
    case "result":
      return client.showResult(g.arg);
    case "focus":
      return client.focus(g.arg);
    case "key":
      return client.key(g.arg);
    case "prompt":
      return client.submitPrompt(g.arg);
  }
}
