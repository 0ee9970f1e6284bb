/**
 * Transports carry one request line out and one response line back, in
 * order, with at most one request in flight.
 */

export interface Transport {
  send(request: string): Promise<string>;
  close(): void;
}

/**
 * Replays a fixed transcript. Each send must match the next scripted
 * request exactly; the scripted response comes back. This backs both the
 * static demo mode and the transcript tests: if the UI ever deviates from
 * the expected request stream, the transport throws.
 */
export class ReplayTransport implements Transport {
  readonly sent: string[] = [];
  private at = 0;

  constructor(private readonly script: ReadonlyArray<readonly [string, string]>) {}

  get done(): boolean {
    return this.at >= this.script.length;
  }

  send(request: string): Promise<string> {
    this.sent.push(request);
    if (this.at >= this.script.length) {
      return Promise.reject(new Error(`transcript exhausted; got ${request}`));
    }
    const [expected, response] = this.script[this.at];
    if (request !== expected) {
      return Promise.reject(
        new Error(`transcript expected ${JSON.stringify(expected)}, got ${JSON.stringify(request)}`));
    }
    this.at += 1;
    return Promise.resolve(response);
  }

  close(): void {}
}

/**
 * The live transport: the kernel's line protocol over a WebSocket (point
 * `websocat`/any ws-to-tcp bridge at `hazel-kernel serve --socket PORT`).
 * Responses arrive strictly in request order, so a FIFO of resolvers is
 * all the correlation needed.
 */
export class WebSocketTransport implements Transport {
  private pending: Array<{ resolve: (line: string) => void; reject: (err: Error) => void }> = [];
  private buffer = "";

  private constructor(private readonly ws: WebSocket) {}

  static connect(url: string): Promise<WebSocketTransport> {
    return new Promise((resolve, reject) => {
      const ws = new WebSocket(url);
      const transport = new WebSocketTransport(ws);
      ws.onopen = () => resolve(transport);
      ws.onerror = () => reject(new Error(`cannot reach ${url}`));
      ws.onmessage = (event) => transport.receive(String(event.data));
      ws.onclose = () => transport.fail(new Error("connection closed"));
    });
  }

  private receive(data: string): void {
    this.buffer += data;
    let nl: number;
    while ((nl = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, nl);
      this.buffer = this.buffer.slice(nl + 1);
      this.pending.shift()?.resolve(line);
    }
  }

  private fail(err: Error): void {
    for (const waiter of this.pending.splice(0)) waiter.reject(err);
  }

  send(request: string): Promise<string> {
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.ws.send(request + "\n");
    });
  }

  close(): void {
    this.ws.close();
  }
}
