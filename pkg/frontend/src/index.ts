export { ApiClient, ApiError } from "./api.js";
export type { FetchLike, StreamHandle, StreamOptions, StreamStatus } from "./api.js";
export { SseParser } from "./sse.js";
export type { SseFrame } from "./sse.js";
export { CSV_HEADER, GOAL_TAGS, parseCsv, validateWorldCsv } from "./csv.js";
export type { RowError } from "./csv.js";
export {
  applyRecord,
  applySnapshot,
  emptyViewModel,
  selectAgent,
} from "./viewmodel.js";
export type {
  AgentView,
  ChatMessage,
  EmotionPoint,
  EnvEditorState,
  GrowthView,
  Notice,
  ViewModel,
} from "./viewmodel.js";
export { applyEnvEdit, setPaused, submitChat } from "./ops.js";
export {
  renderApp,
  renderChat,
  renderEmotionTrace,
  renderEnvEditor,
  renderInspector,
  renderMap,
  renderStatus,
} from "./render.js";
export * from "./types.js";
