import { vi } from "vitest";

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export interface RouteQueue {
  /** keys like "POST /api/sessions"; each value is consumed FIFO */
  [key: string]: Array<Response | Promise<Response>>;
}

/** fetch stub serving queued responses per "METHOD path" key. */
export function stubFetch(routes: RouteQueue) {
  const calls: Array<{ method: string; path: string; body: unknown }> = [];
  const mock = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = new URL(String(input));
    const method = init?.method ?? "GET";
    const key = `${method} ${url.pathname}`;
    calls.push({
      method,
      path: url.pathname,
      body: init?.body ? JSON.parse(String(init.body)) : null,
    });
    const queue = routes[key];
    if (!queue || queue.length === 0) {
      throw new Error(`no stubbed response for ${key}`);
    }
    const next = queue.length > 1 ? queue.shift()! : queue[0]!;
    return next;
  });
  vi.stubGlobal("fetch", mock);
  return { mock, calls };
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
