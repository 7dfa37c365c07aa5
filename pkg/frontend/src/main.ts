import { ApiClient } from "./api";
import { ExplorerApp } from "./app";

const api = new ApiClient("");
const app = new ExplorerApp(api, {
  transcript: document.getElementById("transcript")!,
  graph: document.getElementById("graph")!,
  controls: document.getElementById("controls")!,
  input: document.getElementById("query-input") as HTMLInputElement,
  form: document.getElementById("query-form") as HTMLFormElement,
});

const params = new URLSearchParams(window.location.search);
void app.start(params.get("session") ?? undefined);
