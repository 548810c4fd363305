import init, { time_traces, g2_map, visibility_map } from "./pkg/superatom_web.js";

const num = (id) => parseFloat(document.getElementById(id).value);
const model = () => [num("kappa"), num("gamma"), num("gamma_d"), num("rate")];

function report(id, f) {
  const el = document.getElementById(id);
  el.className = "";
  const t0 = performance.now();
  try {
    f();
    el.textContent = `${(performance.now() - t0).toFixed(0)} ms`;
  } catch (e) {
    el.className = "err";
    el.textContent = String(e);
  }
}

function drawTraces() {
  const n = 600, tEnd = 10;
  const d = time_traces(...model(), tEnd, n);
  const [t, rin, rout, pop] = [0, 1, 2, 3].map((k) => d.subarray(k * n, (k + 1) * n));
  const c = document.getElementById("traces").getContext("2d");
  const { width: w, height: h } = c.canvas;
  c.clearRect(0, 0, w, h);
  const top = Math.max(...rin, ...rout) * 1.05 || 1;
  const line = (ys, scale, colour) => {
    c.strokeStyle = colour;
    c.beginPath();
    ys.forEach((y, i) => {
      const x = (t[i] / tEnd) * w, yy = h - (y / scale) * h;
      i ? c.lineTo(x, yy) : c.moveTo(x, yy);
    });
    c.stroke();
  };
  line(rin, top, "#999");
  line(rout, top, "#1f77b4");
  line(pop, 1, "#ff7f0e");
}

function shade(v) {
  if (!Number.isFinite(v)) return [255, 255, 255];
  const s = Math.min(1, Math.max(0, (Math.log10(v) + 1) / 2));
  return [Math.round(30 + 225 * s), Math.round(20 + 200 * s), Math.round(80 + 100 * s)];
}

function drawG2() {
  const n = Math.max(4, Math.min(200, Math.round(num("g2n"))));
  const g = g2_map(...model(), 8, n);
  const c = document.getElementById("g2").getContext("2d");
  const { width: w, height: h } = c.canvas;
  const img = c.createImageData(w, h);
  for (let py = 0; py < h; py++) {
    for (let px = 0; px < w; px++) {
      const i = Math.floor(((h - 1 - py) / h) * n), j = Math.floor((px / w) * n);
      const [r, gg, b] = shade(g[i * n + j]);
      const o = 4 * (py * w + px);
      img.data.set([r, gg, b, 255], o);
    }
  }
  c.putImageData(img, 0, 0);
}

function drawVisibility() {
  const nl = 80, nn = 120;
  const d = visibility_map(0.1, 10, nl, 0.01, 100, nn);
  const c = document.getElementById("vis").getContext("2d");
  const { width: w, height: h } = c.canvas;
  const img = c.createImageData(w, h);
  for (let py = 0; py < h; py++) {
    for (let px = 0; px < w; px++) {
      const i = Math.floor(((h - 1 - py) / h) * nl), j = Math.floor((px / w) * nn);
      const v = d[i * nn + j];
      img.data.set([Math.round(255 * v), Math.round(120 * v), Math.round(255 * (1 - v)), 255], 4 * (py * w + px));
    }
  }
  c.putImageData(img, 0, 0);
  const xOf = (nph) => ((Math.log10(nph) + 2) / 4) * w;
  const yOf = (i) => h - ((i + 0.5) / nl) * h;
  for (const [offset, colour] of [[nl * nn, "#fff"], [nl * nn + nl, "#000"]]) {
    c.strokeStyle = colour;
    c.beginPath();
    for (let i = 0; i < nl; i++) {
      const x = xOf(d[offset + i]), y = yOf(i);
      i ? c.lineTo(x, y) : c.moveTo(x, y);
    }
    c.stroke();
  }
}

await init();
document.getElementById("run-traces").onclick = () => report("traces-msg", drawTraces);
document.getElementById("run-g2").onclick = () => report("g2-msg", drawG2);
document.getElementById("run-vis").onclick = () => report("vis-msg", drawVisibility);
report("traces-msg", drawTraces);
report("vis-msg", drawVisibility);
