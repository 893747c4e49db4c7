import init, { run_example, fit_csv, p_value_curve } from "./pkg/parseal_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function settings() {
  return [num("alpha"), num("mixture"), num("delta"), num("varsigma"), $("greedy").checked];
}

function status(msg, isError = false) {
  $("status").textContent = msg;
  $("status").className = isError ? "error" : "";
}

// Minimal scatter plot: series = [{ xs, ys, color }], optional horizontal lines.
function plot(canvas, series, { xlabel, ylabel, hlines = [], diagonal = false, line = false }) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 44;
  ctx.clearRect(0, 0, w, h);
  const all = (k) => series.flatMap((s) => s[k]).concat(k === "ys" ? hlines : []);
  let [x0, x1] = [Math.min(...all("xs")), Math.max(...all("xs"))];
  let [y0, y1] = [Math.min(...all("ys")), Math.max(...all("ys"))];
  if (x1 === x0) { x0 -= 1; x1 += 1; }
  if (y1 === y0) { y0 -= 1; y1 += 1; }
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * (w - pad - 10);
  const sy = (y) => h - pad + 10 - ((y - y0) / (y1 - y0)) * (h - pad - 10);

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, 10); ctx.lineTo(pad, h - pad + 10); ctx.lineTo(w - 10, h - pad + 10);
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(x0.toPrecision(3), pad, h - pad + 24);
  ctx.fillText(x1.toPrecision(3), w - 50, h - pad + 24);
  ctx.fillText(y1.toPrecision(3), 2, 18);
  ctx.fillText(y0.toPrecision(3), 2, h - pad + 10);
  ctx.fillText(xlabel, w / 2 - 20, h - 6);
  ctx.save(); ctx.translate(12, h / 2); ctx.rotate(-Math.PI / 2); ctx.fillText(ylabel, 0, 0); ctx.restore();

  if (diagonal) {
    const lo = Math.max(x0, y0), hi = Math.min(x1, y1);
    ctx.strokeStyle = "#ccc";
    ctx.beginPath(); ctx.moveTo(sx(lo), sy(lo)); ctx.lineTo(sx(hi), sy(hi)); ctx.stroke();
  }
  ctx.setLineDash([4, 3]);
  for (const y of hlines) {
    ctx.strokeStyle = "#c60";
    ctx.beginPath(); ctx.moveTo(pad, sy(y)); ctx.lineTo(w - 10, sy(y)); ctx.stroke();
  }
  ctx.setLineDash([]);
  for (const s of series) {
    ctx.fillStyle = ctx.strokeStyle = s.color;
    if (line) {
      ctx.beginPath();
      s.xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(s.ys[i])) : ctx.moveTo(sx(x), sy(s.ys[i]))));
      ctx.stroke();
    } else {
      s.xs.forEach((x, i) => ctx.fillRect(sx(x) - 1.5, sy(s.ys[i]) - 1.5, 3, 3));
    }
  }
}

function fmt(v) {
  return Math.abs(v) >= 1e-3 && Math.abs(v) < 1e6 ? v.toFixed(6) : v.toExponential(4);
}

function show(json) {
  const { report, observed, fitted, baseline_fitted } = JSON.parse(json);
  const m = report.selected;
  $("result").hidden = false;
  let summary = `${m.terms.join(" + ")} — R² = ${fmt(m.r_squared)}, adjusted R² = ${fmt(m.r_squared_adj)}, ` +
    `RMSE = ${fmt(m.rmse)}, ${m.search.candidates_evaluated} candidate subsets`;
  if (report.baseline) {
    summary += `. Untransformed baseline (${report.baseline.terms.join(", ")}): adjusted R² = ${fmt(report.baseline.r_squared_adj)}`;
  }
  $("summary").textContent = summary;

  const rows = m.coefficients.map((c, i) =>
    `<tr><td>${c.term}</td><td>${fmt(c.estimate)}</td><td>${fmt(c.std_error)}</td>` +
    `<td>${c.p_value_text}</td><td>${i ? fmt(m.vifs[i - 1]) : ""}</td></tr>`);
  $("coefs").innerHTML = "<tr><th>term</th><th>estimate</th><th>std. error</th><th>p</th><th>VIF</th></tr>" + rows.join("");

  const series = [{ xs: observed, ys: fitted, color: "#1565c0" }];
  if (baseline_fitted) series.unshift({ xs: observed, ys: baseline_fitted, color: "#bbb" });
  plot($("scatter"), series, { xlabel: "observed", ylabel: "fitted", diagonal: true });

  const ba = m.bland_altman;
  plot($("ba"), [{
    xs: observed.map((o, i) => (o + fitted[i]) / 2),
    ys: observed.map((o, i) => o - fitted[i]),
    color: "#1565c0",
  }], { xlabel: "mean", ylabel: "difference", hlines: [ba.mean_diff, ba.lower_limit, ba.upper_limit] });

  const s = report.screening;
  $("screening").textContent =
    `${report.dictionary.enumerated} terms built, ${report.dictionary.pruned.length} pruned as constant\n` +
    `${s.input_terms} screened: ${s.dropped_unimportant.length} below δ, ${s.dropped_redundant.length} redundant\n` +
    `kept: ${s.kept.join(", ")}`;
}

function guarded(fn) {
  return () => {
    status("working…");
    // Let the status repaint before the (synchronous) fit runs.
    setTimeout(() => {
      const t0 = performance.now();
      try {
        fn();
        status(`done in ${(performance.now() - t0).toFixed(0)} ms`);
      } catch (e) {
        status(e.message ?? String(e), true);
      }
    }, 10);
  };
}

function drawCurve() {
  const pts = JSON.parse(p_value_curve(BigInt(num("df")), num("tmax"), 200));
  plot($("curve"), [{ xs: pts.map((p) => p[0]), ys: pts.map((p) => p[1]), color: "#2e7d32" }],
    { xlabel: "|t|", ylabel: "p", line: true, hlines: [0.05] });
}

await init();
$("run-example").onclick = guarded(() =>
  show(run_example(num("example"), num("n"), BigInt(num("seed")), ...settings())));
$("run-csv").onclick = guarded(() => show(fit_csv($("csv").value, $("response").value, ...settings())));
$("run-curve").onclick = guarded(drawCurve);
status("ready");
drawCurve();
