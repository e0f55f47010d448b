// Bootstrap: mount the worksheet with a configurable API base URL.
// Served from /ui/ the default "" hits the same origin; opened from a
// file the field in the header points it elsewhere.

import { Worksheet } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
const stored = window.localStorage.getItem("vbd-api-base") ?? "";
const sheet = new Worksheet(root, stored || window.location.origin);
window.addEventListener("change", (event) => {
  const target = event.target as HTMLInputElement | null;
  if (target && target.id === "api-base-input") {
    window.localStorage.setItem("vbd-api-base", target.value.trim());
    sheet.setApiBase(target.value.trim());
  }
});
