import init, { basicIntegralCurve, laplaceComparison, LatticeDemo } from "./pkg/lattice_resonance_web.js";

const $ = (id) => document.getElementById(id);
const showError = (e) => { $("error").textContent = String(e.message ?? e); };

function plotBasic() {
  $("error").textContent = "";
  let rows;
  try {
    rows = basicIntegralCurve(+$("bi-lo").value, +$("bi-hi").value, 60);
  } catch (e) { return showError(e); }
  const pts = [];
  for (let i = 0; i < rows.length; i += 5) pts.push(rows.slice(i, i + 5));

  const c = $("bi-plot"), g = c.getContext("2d");
  const pad = 40, w = c.width - 2 * pad, h = c.height - 2 * pad;
  g.clearRect(0, 0, c.width, c.height);
  const xs = pts.map((p) => Math.log10(p[0]));
  const ys = pts.flatMap((p) => [p[1], p[2], p[3], p[4]]);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(0, ...ys), Math.max(...ys)];
  const X = (x) => pad + ((x - x0) / (x1 - x0)) * w;
  const Y = (y) => pad + h - ((y - y0) / (y1 - y0)) * h;

  g.strokeStyle = "#999"; g.strokeRect(pad, pad, w, h);
  g.fillStyle = "#444"; g.font = "12px sans-serif";
  g.fillText(`log10 s: ${x0} .. ${x1}`, pad, c.height - 10);
  g.fillText(`${y1.toFixed(2)}`, 2, pad + 4);
  g.fillText(`${y0.toFixed(2)}`, 2, pad + h);

  const line = (k, color, dash) => {
    g.beginPath(); g.setLineDash(dash); g.strokeStyle = color; g.lineWidth = 2;
    pts.forEach((p, i) => (i ? g.lineTo : g.moveTo).call(g, X(xs[i]), Y(p[k])));
    g.stroke();
  };
  line(1, "#1f5fbf", []); line(2, "#c0392b", []);
  line(3, "#1f5fbf", [6, 4]); line(4, "#c0392b", [6, 4]);
  g.setLineDash([]);
}

function compareLaplace() {
  $("error").textContent = "";
  let rows;
  try {
    rows = laplaceComparison(+$("ul-m").value, +$("ul-n").value, -6, -2, 5);
  } catch (e) { return showError(e); }
  const f = (x) => x.toExponential(4);
  let html = "<tr><th>s</th><th>integral</th><th>closed form</th><th>|difference|</th></tr>";
  for (let i = 0; i < rows.length; i += 5) {
    const [s, re, im, are, aim] = rows.slice(i, i + 5);
    html += `<tr><td>${s.toExponential(0)}</td><td>${f(re)} ${im < 0 ? "-" : "+"} ${f(Math.abs(im))}i</td>` +
      `<td>${f(are)} ${aim < 0 ? "-" : "+"} ${f(Math.abs(aim))}i</td><td>${f(Math.hypot(re - are, im - aim))}</td></tr>`;
  }
  $("ul-table").innerHTML = html;
}

let demo = null, playing = false;

function resetLattice() {
  $("error").textContent = "";
  try {
    demo = new LatticeDemo(1.0, +$("lat-n").value, +$("lat-dt").value);
  } catch (e) { demo = null; return showError(e); }
  drawLattice();
}

function drawLattice() {
  if (!demo) return;
  const side = demo.side(), data = demo.field(), scale = demo.maxAbs() || 1;
  const img = new ImageData(side, side);
  for (let i = 0; i < data.length; i++) {
    const v = Math.max(-1, Math.min(1, data[i] / scale));
    const a = Math.round(255 * (1 - Math.abs(v)));
    img.data.set(v >= 0 ? [255, a, a, 255] : [a, a, 255, 255], 4 * i);
  }
  const off = new OffscreenCanvas(side, side);
  off.getContext("2d").putImageData(img, 0, 0);
  const c = $("lat-canvas"), g = c.getContext("2d");
  g.imageSmoothingEnabled = false;
  g.drawImage(off, 0, 0, c.width, c.height);
  $("lat-status").textContent =
    `t = ${demo.time().toFixed(2)}, u(0,0) = ${demo.displacement(0, 0).toFixed(3)}, reflection-free until t = ${demo.reflectionFreeUntil()}`;
}

function tick() {
  if (!playing || !demo) return;
  try { demo.step(10); } catch (e) { playing = false; return showError(e); }
  drawLattice();
  requestAnimationFrame(tick);
}

await init();
$("bi-run").onclick = plotBasic;
$("ul-run").onclick = compareLaplace;
$("lat-reset").onclick = resetLattice;
$("lat-play").onclick = () => {
  playing = !playing;
  $("lat-play").textContent = playing ? "Pause" : "Play";
  if (playing) { if (!demo) resetLattice(); requestAnimationFrame(tick); }
};
plotBasic();
compareLaplace();
resetLattice();
