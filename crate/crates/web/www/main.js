import init, { connectivity, dominate, link_pair } from "./pkg/tlink_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function layout(n, canvas, margin = 30) {
  const cx = canvas.width / 2, cy = canvas.height / 2;
  const r = Math.min(cx, cy) - margin;
  return Array.from({ length: n }, (_, i) => {
    const a = -Math.PI / 2 + (2 * Math.PI * i) / n;
    return [cx + r * Math.cos(a), cy + r * Math.sin(a)];
  });
}

function arrow(ctx, [x1, y1], [x2, y2], inset) {
  const dx = x2 - x1, dy = y2 - y1, len = Math.hypot(dx, dy);
  const ux = dx / len, uy = dy / len;
  const ex = x2 - ux * inset, ey = y2 - uy * inset;
  ctx.beginPath();
  ctx.moveTo(x1 + ux * inset, y1 + uy * inset);
  ctx.lineTo(ex, ey);
  ctx.stroke();
  ctx.beginPath();
  ctx.moveTo(ex, ey);
  ctx.lineTo(ex - 7 * ux + 3 * uy, ey - 7 * uy - 3 * ux);
  ctx.lineTo(ex - 7 * ux - 3 * uy, ey - 7 * uy + 3 * ux);
  ctx.fill();
}

function drawTournament(canvas, out, colour) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pos = layout(out.length, canvas);
  ctx.strokeStyle = "rgba(0,0,0,0.13)";
  ctx.fillStyle = "rgba(0,0,0,0.25)";
  out.forEach((row, u) => row.forEach((v) => arrow(ctx, pos[u], pos[v], 11)));
  pos.forEach(([x, y], v) => {
    ctx.beginPath();
    ctx.arc(x, y, 10, 0, 2 * Math.PI);
    ctx.fillStyle = colour(v) || "#ddd";
    ctx.fill();
    ctx.fillStyle = "#000";
    ctx.font = "10px sans-serif";
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(String(v), x, y);
  });
}

function showError(outId, canvas, error) {
  canvas.getContext("2d").clearRect(0, 0, canvas.width, canvas.height);
  $(outId).textContent = "error: " + error;
}

function runConnectivity() {
  const canvas = $("c-canvas");
  const res = JSON.parse(connectivity(num("c-n"), num("c-seed")));
  if (res.error) return showError("c-out", canvas, res.error);
  const sep = new Set(res.separator);
  drawTournament(canvas, res.out, (v) =>
    sep.has(v) ? "#d33" : v === res.from ? "#2a2" : v === res.to ? "#36c" : null);
  $("c-out").textContent =
    `kappa = ${res.kappa}\nseparator = [${res.separator.join(", ")}]\n` +
    (res.from === null ? "single vertex, nothing to separate" : `${res.to} is unreachable from ${res.from} without the separator`);
}

function runDominate() {
  const canvas = $("d-canvas");
  const res = JSON.parse(dominate(num("d-n"), num("d-seed"), num("d-size"), $("d-flavor").value === "out"));
  if (res.error) return showError("d-out", canvas, res.error);
  const seq = new Set(res.sequence), rest = new Set(res.residual);
  drawTournament(canvas, res.out, (v) => (seq.has(v) ? "#e80" : rest.has(v) ? "#83c" : null));
  $("d-out").textContent =
    `sequence = [${res.sequence.join(", ")}]\n` +
    `residual sizes after each pick = [${res.residual_sizes.join(", ")}]\n` +
    `not dominated = [${res.residual.join(", ")}]\n` +
    `residual degree bound ${res.bound_holds ? "holds" : "FAILS"}`;
}

function runLink() {
  const canvas = $("l-canvas");
  $("l-out").textContent = "linking...";
  const t0 = performance.now();
  const res = JSON.parse(link_pair(num("l-seed"), num("l-x"), num("l-y")));
  const ms = (performance.now() - t0).toFixed(0);
  if (res.error) return showError("l-out", canvas, res.error);
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pos = layout(res.n, canvas, 20);
  ctx.fillStyle = "#bbb";
  pos.forEach(([x, y]) => ctx.fillRect(x - 1, y - 1, 2, 2));
  ctx.strokeStyle = "#e80";
  ctx.fillStyle = "#e80";
  ctx.lineWidth = 1.5;
  res.path.slice(1).forEach((v, i) => arrow(ctx, pos[res.path[i]], pos[v], 3));
  ctx.lineWidth = 1;
  for (const [v, c] of [[res.source, "#2a2"], [res.sink, "#36c"]]) {
    ctx.beginPath();
    ctx.arc(pos[v][0], pos[v][1], 6, 0, 2 * Math.PI);
    ctx.fillStyle = c;
    ctx.fill();
  }
  $("l-out").textContent =
    `path (${res.path.length - 1} edges, ${res.verified ? "verified" : "NOT verified"}, ${ms} ms):\n` +
    `${res.path.join(" -> ")}\n\nminimum semi-degree ${res.min_degree}, |X| = ${res.x_len}\n\n` +
    res.stages.map(([name, summary]) => `[${name}] ${summary}`).join("\n");
}

await init();
$("c-run").onclick = runConnectivity;
$("d-run").onclick = runDominate;
$("l-run").onclick = runLink;
runConnectivity();
runDominate();
