/** Browser bootstrap: routing, file handling, canvas-based PGM conversion. */

import { ApiClient } from "./api.js";
import { diagnoseFlow, learningFlow } from "./controller.js";
import { encodePgm, rgbaToGray } from "./pgm.js";
import {
  PAGES,
  type PageId,
  renderAboutPage,
  renderBusy,
  renderCreditsPage,
  renderHomePage,
  renderNav,
} from "./views.js";

const DEFAULT_API = "http://127.0.0.1:8000";

function apiBase(): string {
  const query = new URLSearchParams(window.location.search).get("api");
  return (query ?? DEFAULT_API).replace(/\/+$/, "");
}

const api = new ApiClient(apiBase());
let inFlight = false;
let lastResultHtml = "";

function currentPage(): PageId {
  const hash = window.location.hash.replace(/^#\//, "");
  const match = PAGES.find((page) => page.id === hash);
  return match ? match.id : "home";
}

async function render(): Promise<void> {
  const page = currentPage();
  const nav = document.getElementById("nav")!;
  const app = document.getElementById("app")!;
  nav.innerHTML = renderNav(page);
  if (page === "home") {
    app.innerHTML = renderHomePage(lastResultHtml);
    wireUpload();
  } else if (page === "learning") {
    app.innerHTML = `<section class="page"><p>Loading metrics…</p></section>`;
    app.innerHTML = await learningFlow(api);
  } else if (page === "about") {
    app.innerHTML = renderAboutPage();
  } else {
    app.innerHTML = renderCreditsPage();
  }
}

function wireUpload(): void {
  const input = document.getElementById("file-input") as HTMLInputElement | null;
  if (!input) return;
  input.addEventListener("change", async () => {
    const file = input.files?.[0];
    if (!file || inFlight) return;
    inFlight = true;
    input.disabled = true; // one request at a time
    const result = document.getElementById("result")!;
    result.innerHTML = renderBusy();
    try {
      const pgm = await fileToPgm(file);
      const previewUrl = URL.createObjectURL(file);
      lastResultHtml = await diagnoseFlow(api, pgm, previewUrl);
    } catch (err) {
      lastResultHtml = `<section class="error"><p role="alert">Could not read that image: ${String(err)}</p></section>`;
    } finally {
      inFlight = false;
      input.disabled = false;
      input.value = "";
      result.innerHTML = lastResultHtml;
    }
  });
}

async function fileToPgm(file: File): Promise<Uint8Array> {
  const bitmap = await createImageBitmap(file);
  const canvas = document.createElement("canvas");
  canvas.width = bitmap.width;
  canvas.height = bitmap.height;
  const ctx = canvas.getContext("2d")!;
  ctx.drawImage(bitmap, 0, 0);
  const rgba = ctx.getImageData(0, 0, bitmap.width, bitmap.height).data;
  return encodePgm(rgbaToGray(rgba, bitmap.width, bitmap.height), bitmap.width, bitmap.height);
}

window.addEventListener("hashchange", () => void render());
void render();
