import { ApiClient } from "./api.js";
import { App } from "./ui.js";

const api = new ApiClient("", "");
const app = new App(api);

app.start().catch((error) => {
  const root = document.getElementById("app");
  if (root) {
    root.textContent = `failed to start: ${error}`;
  }
});
