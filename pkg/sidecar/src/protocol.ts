// Line-delimited JSON scoring protocol. Each request line is an object
// {"id": string, "text": string}; the reply is {"id", "score"} with the
// score in [0, 1]. Anything unusable gets an error record instead of
// crashing the server: {"id": null|string, "error": reason}. Replies may
// be reordered (a shuffle window exists to exercise exactly that), so ids
// are the only correlation clients can rely on.

export type Reply =
  | { id: string; score: number }
  | { id: string | null; error: string };

export function handleLine(line: string, score: (text: string) => number): Reply {
  let record: unknown;
  try {
    record = JSON.parse(line);
  } catch {
    return { id: null, error: "invalid json" };
  }
  if (typeof record !== "object" || record === null || Array.isArray(record)) {
    return { id: null, error: "request is not an object" };
  }
  const request = record as Record<string, unknown>;
  const id = request.id;
  if (typeof id !== "string") {
    return { id: null, error: "missing or non-string id" };
  }
  const text = request.text;
  if (typeof text !== "string") {
    return { id, error: "missing or non-string text" };
  }
  return { id, score: score(text) };
}

export async function serveStream(
  lines: AsyncIterable<string>,
  writeLine: (line: string) => Promise<void> | void,
  score: (text: string) => number,
  shuffleWindow = 1,
): Promise<void> {
  const window: Reply[] = [];

  const flush = async () => {
    for (const reply of window.reverse()) {
      await writeLine(JSON.stringify(reply));
    }
    window.length = 0;
  };

  for await (const line of lines) {
    if (line.trim().length === 0) continue;
    window.push(handleLine(line, score));
    if (window.length >= Math.max(1, shuffleWindow)) {
      await flush();
    }
  }
  await flush();
}
