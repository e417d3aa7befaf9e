import type { ApiClient } from "./api.js";
import type { EventFeed } from "./events.js";
import type { Store } from "./state.js";
import type { StyleDoc } from "./types.js";

export interface AppContext {
  api: ApiClient;
  store: Store;
  feed: EventFeed;
  // URL prefix for artifact and infographic images ("" when same-origin).
  base: string;
  styles: StyleDoc[];
}
