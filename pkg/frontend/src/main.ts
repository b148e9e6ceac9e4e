import { App, AppElements } from "./app.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

const els: AppElements = {
  field: byId<HTMLCanvasElement>("field"),
  charts: byId<HTMLCanvasElement>("charts"),
  panelHost: byId("panel-host"),
  eventLog: byId("event-log"),
};

const proto = location.protocol === "https:" ? "wss" : "ws";
const app = new App(els, `${proto}://${location.host}/ws`);
app.start();
