import { mountApp } from "./ui.js";

const root = document.getElementById("app");
if (root instanceof HTMLElement) {
  mountApp(root, { defaultBaseUrl: window.location.origin });
}
