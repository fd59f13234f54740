import init, { sample, compare, sax } from "./pkg/tdbn_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function call(f, out, ...args) {
  try {
    return JSON.parse(f(...args));
  } catch (e) {
    out.innerHTML = `<p class="error">${String(e)}</p>`;
    return null;
  }
}

// Two rows of nodes (slice t above, slice t+1 below); prior edges are drawn
// in grey on the top row, intra-slice edges on the bottom row and
// inter-slice edges between the rows.
function drawNetwork(canvas, n, edges) {
  const g = canvas.getContext("2d");
  g.clearRect(0, 0, canvas.width, canvas.height);
  const x = (i) => 40 + (i * (canvas.width - 80)) / Math.max(1, n - 1);
  const top = 40, bottom = canvas.height - 40;
  const arrow = (x0, y0, x1, y1, colour, bend) => {
    g.strokeStyle = colour;
    g.fillStyle = colour;
    const mx = (x0 + x1) / 2, my = (y0 + y1) / 2 + bend;
    g.beginPath();
    g.moveTo(x0, y0);
    g.quadraticCurveTo(mx, my, x1, y1);
    g.stroke();
    const a = Math.atan2(y1 - my, x1 - mx);
    const tx = x1 - 14 * Math.cos(a), ty = y1 - 14 * Math.sin(a);
    g.beginPath();
    g.moveTo(tx, ty);
    g.lineTo(tx - 8 * Math.cos(a - 0.4), ty - 8 * Math.sin(a - 0.4));
    g.lineTo(tx - 8 * Math.cos(a + 0.4), ty - 8 * Math.sin(a + 0.4));
    g.fill();
  };
  for (const [p, c] of edges.prior) arrow(x(p), top, x(c), top, "#999", -30);
  for (const [p, c] of edges.intra) arrow(x(p), bottom, x(c), bottom, "#06c", 30);
  for (const [p, c] of edges.inter) arrow(x(p), top, x(c), bottom, p === c ? "#c60" : "#e90", 0);
  g.font = "12px sans-serif";
  g.textAlign = "center";
  for (let i = 0; i < n; i++) {
    for (const [y, label] of [[top, "t"], [bottom, "t+1"]]) {
      g.fillStyle = "#fff";
      g.strokeStyle = "#333";
      g.beginPath();
      g.arc(x(i), y, 13, 0, 2 * Math.PI);
      g.fill();
      g.stroke();
      g.fillStyle = "#000";
      g.fillText(`X${i}`, x(i), y + 4);
      if (i === 0) g.fillText(label, 12, y + 4);
    }
  }
}

function runSample() {
  const out = $("s-model");
  const r = call(sample, out, num("s-vars"), num("s-card"), num("s-subjects"), num("s-slices"), BigInt(num("s-seed")));
  if (!r) return;
  out.textContent = r.model;
  $("c-csv").value = r.csv;
  drawNetwork($("s-graph"), num("s-vars"), r.edges);
}

function runCompare() {
  const out = $("c-out");
  const csv = $("c-csv").value;
  const r = call(compare, out, csv, num("c-ps"), num("c-pc"), BigInt(num("c-seed")));
  if (!r) return;
  const rows = r.results
    .map((m) => `<tr><td>${m.method}</td><td>${m.errors}</td><td>${(100 * m.error_rate).toFixed(1)}%</td></tr>`)
    .join("");
  const scores = r.scores.map((s) => s.toFixed(2)).join(" → ");
  out.innerHTML =
    `<p>${r.masked_cells} cells blanked. ${r.notes.join(" ")}</p>` +
    `<table><tr><th>method</th><th>errors</th><th>rate</th></tr>${rows}</table>` +
    `<p>Structural EM scores: ${scores}</p>`;
  const n = csv.split("\n")[0].split(",").filter((h) => h.endsWith("__0")).length;
  if (r.edges) drawNetwork($("c-graph"), n, r.edges);
}

function runSax() {
  const out = $("x-out");
  const r = call(sax, out, $("x-csv").value, num("x-a"), num("x-len"), $("x-trunc").checked);
  if (!r) return;
  out.textContent = r.csv + (r.diagnostics.length ? "\n" + r.diagnostics.join("\n") : "");
  const c = $("x-plot"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const s = r.series[0];
  if (!s) return;
  const lo = Math.min(-2.5, ...s.z), hi = Math.max(2.5, ...s.z);
  const y = (v) => c.height - 10 - ((v - lo) / (hi - lo)) * (c.height - 20);
  const x = (i, len) => 10 + (i * (c.width - 20)) / len;
  g.strokeStyle = "#ccc";
  g.setLineDash([4, 4]);
  for (const b of r.breakpoints) {
    g.beginPath();
    g.moveTo(10, y(b));
    g.lineTo(c.width - 10, y(b));
    g.stroke();
  }
  g.setLineDash([]);
  g.strokeStyle = "#06c";
  g.beginPath();
  s.z.forEach((v, i) => (i ? g.lineTo(x(i + 0.5, s.z.length), y(v)) : g.moveTo(x(0.5, s.z.length), y(v))));
  g.stroke();
  // each symbol spans its frame, drawn at the middle of its band
  const bands = [lo, ...r.breakpoints, hi];
  g.font = "14px monospace";
  g.fillStyle = "#c60";
  s.symbols.forEach((k, i) => {
    const mid = (Math.max(bands[k], lo) + Math.min(bands[k + 1], hi)) / 2;
    g.fillRect(x(i, s.symbols.length) + 2, y(mid) - 1, (c.width - 20) / s.symbols.length - 4, 3);
    g.fillText(String.fromCharCode(97 + k), x(i + 0.5, s.symbols.length) - 4, y(mid) - 6);
  });
}

await init();
$("s-run").onclick = runSample;
$("c-run").onclick = runCompare;
$("x-run").onclick = runSax;
runSample();
runSax();
