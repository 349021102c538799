import { start } from "./app.js";

// Served from the same origin as the API (graphguide serve --ui-dir); an
// explicit base URL can be injected for development against another host.
const baseUrl = (window as { GRAPHGUIDE_BASE_URL?: string }).GRAPHGUIDE_BASE_URL ?? "";
start(document, baseUrl);
