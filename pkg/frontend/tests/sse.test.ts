import { describe, expect, it } from "vitest";

import { SseParser } from "../src/sse.js";

describe("SseParser", () => {
  it("parses a complete frame", () => {
    const parser = new SseParser();
    const frames = parser.feed('id: 3\ndata: {"seq": 3}\n\n');
    expect(frames).toEqual([{ id: "3", data: '{"seq": 3}' }]);
  });

  it("handles frames split across arbitrary chunk boundaries", () => {
    const parser = new SseParser();
    const whole = 'id: 0\ndata: {"a": 1}\n\nid: 1\ndata: {"a": 2}\n\n';
    for (let cut = 1; cut < whole.length - 1; cut++) {
      const p = new SseParser();
      const frames = [...p.feed(whole.slice(0, cut)), ...p.feed(whole.slice(cut))];
      expect(frames).toEqual([
        { id: "0", data: '{"a": 1}' },
        { id: "1", data: '{"a": 2}' },
      ]);
    }
    expect(parser.feed(whole)).toHaveLength(2);
  });

  it("emits multiple frames from one chunk in order", () => {
    const frames = new SseParser().feed("data: one\n\ndata: two\n\ndata: three\n\n");
    expect(frames.map((f) => f.data)).toEqual(["one", "two", "three"]);
  });

  it("ignores comments and frames without data", () => {
    const frames = new SseParser().feed(": keep-alive\n\nid: 9\n\ndata: x\n\n");
    expect(frames).toEqual([{ id: null, data: "x" }]);
  });

  it("joins multi-line data fields", () => {
    const frames = new SseParser().feed("data: line1\ndata: line2\n\n");
    expect(frames).toEqual([{ id: null, data: "line1\nline2" }]);
  });

  it("holds incomplete frames until terminated", () => {
    const parser = new SseParser();
    expect(parser.feed("data: pending")).toEqual([]);
    expect(parser.feed("\n")).toEqual([]);
    expect(parser.feed("\n")).toEqual([{ id: null, data: "pending" }]);
  });
});
