// Plain-JS front end for the wasm bindings. No framework, no build step for
// the page itself; the only artifact is the wasm-pack output in ./pkg.
//
// Build the module first:
//   wasm-pack build crates/wasm-demo --target web --out-dir ../../www/pkg
// then serve this directory (any static server works):
//   python3 -m http.server -d www

let wasm = null;
try {
  wasm = await import("./pkg/rml_wasm_demo.js");
  await wasm.default();
} catch (e) {
  document.getElementById("banner").style.display = "block";
  console.warn("wasm module unavailable:", e);
}

const $ = (id) => document.getElementById(id);
const fmt = (x, d = 4) => Number(x).toPrecision(d);

// ---------------------------------------------------------------- plotting

function frame(canvas) {
  const ctx = canvas.getContext("2d");
  const m = { l: 52, r: 14, t: 14, b: 34 };
  const w = canvas.width - m.l - m.r;
  const h = canvas.height - m.t - m.b;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return { ctx, m, w, h };
}

function axes(f, x0, x1, y0, y1, { xlog = false, ylog = false, xlabel = "", ylabel = "" } = {}) {
  const { ctx, m, w, h } = f;
  const tx = (x) => m.l + w * ((xlog ? Math.log10(x / x0) : x - x0) /
    (xlog ? Math.log10(x1 / x0) : x1 - x0));
  const ty = (y) => m.t + h * (1 - ((ylog ? Math.log10(y / y0) : y - y0) /
    (ylog ? Math.log10(y1 / y0) : y1 - y0)));
  ctx.strokeStyle = "#2a3240";
  ctx.fillStyle = "#9aa3b2";
  ctx.font = "11px system-ui";
  ctx.lineWidth = 1;
  const ticks = 5;
  for (let i = 0; i <= ticks; i++) {
    const q = i / ticks;
    const xv = xlog ? x0 * Math.pow(x1 / x0, q) : x0 + q * (x1 - x0);
    const yv = ylog ? y0 * Math.pow(y1 / y0, q) : y0 + q * (y1 - y0);
    ctx.beginPath(); ctx.moveTo(tx(xv), m.t); ctx.lineTo(tx(xv), m.t + h); ctx.stroke();
    ctx.beginPath(); ctx.moveTo(m.l, ty(yv)); ctx.lineTo(m.l + w, ty(yv)); ctx.stroke();
    ctx.textAlign = "center";
    ctx.fillText(xlog ? xv.toExponential(0) : fmt(xv, 3), tx(xv), m.t + h + 16);
    ctx.textAlign = "right";
    ctx.fillText(ylog ? yv.toExponential(0) : fmt(yv, 3), m.l - 6, ty(yv) + 4);
  }
  if (xlabel) { ctx.textAlign = "center"; ctx.fillText(xlabel, m.l + w / 2, m.t + h + 30); }
  if (ylabel) {
    ctx.save(); ctx.translate(12, m.t + h / 2); ctx.rotate(-Math.PI / 2);
    ctx.textAlign = "center"; ctx.fillText(ylabel, 0, 0); ctx.restore();
  }
  return { tx, ty };
}

function polyline(f, map, pts, color, { dash = [], width = 2 } = {}) {
  const { ctx } = f;
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.setLineDash(dash);
  ctx.beginPath();
  let started = false;
  for (const [x, y] of pts) {
    if (!Number.isFinite(map.tx(x)) || !Number.isFinite(map.ty(y))) continue;
    if (!started) { ctx.moveTo(map.tx(x), map.ty(y)); started = true; }
    else ctx.lineTo(map.tx(x), map.ty(y));
  }
  ctx.stroke();
  ctx.setLineDash([]);
}

// ------------------------------------------------------------- section one

function runSpectrum() {
  if (!wasm) return;
  const n = 2 ** Number($("sp-n").value);
  $("sp-n-val").textContent = n;
  const data = JSON.parse(wasm.spectrum_demo($("sp-law").value, n, BigInt($("sp-seed").value || 0), 60));
  if (data.error) { $("sp-read").innerHTML = `<span class="err">${data.error}</span>`; return; }

  // histogram vs density
  const fh = frame($("sp-hist"));
  const ymax = Math.max(0.4, ...data.bins.map((b) => b.density)) * 1.08;
  const mh = axes(fh, -2.6, 2.6, 0, ymax, { xlabel: "λ", ylabel: "density" });
  fh.ctx.fillStyle = "rgba(95,179,255,0.45)";
  for (const b of data.bins) {
    const x0 = mh.tx(b.lo), x1 = mh.tx(b.hi), y = mh.ty(b.density);
    fh.ctx.fillRect(x0, y, x1 - x0 - 0.5, mh.ty(0) - y);
  }
  polyline(fh, mh, data.bins.map((b) => [(b.lo + b.hi) / 2, b.pdf]), "#ffb45f");

  // CDF overlay
  const fc = frame($("sp-cdf"));
  const mc = axes(fc, -2.6, 2.6, 0, 1, { xlabel: "x", ylabel: "CDF" });
  polyline(fc, mc, data.cdf.map((p) => [p.x, p.semicircle]), "#ffb45f");
  polyline(fc, mc, data.cdf.map((p) => [p.x, p.esd]), "#5fb3ff");

  $("sp-read").innerHTML =
    `law <b>${data.law}</b>, n = <b>${data.n}</b> · Δ* = <b>${fmt(data.delta_star)}</b>` +
    ` · spectrum ⊂ [${fmt(data.lambda_min)}, ${fmt(data.lambda_max)}]` +
    ` · blue: empirical, orange: semicircle`;
}

// ------------------------------------------------------------- section two

function runStieltjes() {
  if (!wasm) return;
  const n = 2 ** Number($("st-n").value);
  const u = Number($("st-u").value);
  $("st-n-val").textContent = n;
  $("st-u-val").textContent = fmt(u, 3);
  const data = JSON.parse(
    wasm.stieltjes_demo($("st-law").value, n, BigInt($("st-seed").value || 0), u, 1e-3, 2.0));
  if (data.error) { $("st-read").innerHTML = `<span class="err">${data.error}</span>`; return; }

  const gaps = data.points.map((p) => p.gap).filter((g) => g > 0);
  const ymin = Math.min(...gaps, 1e-4) * 0.5;
  const ymax = Math.max(...data.points.map((p) => Math.max(p.gap, p.guide))) * 2;
  const f = frame($("st-plot"));
  const map = axes(f, 1e-3, 2.0, ymin, ymax,
    { xlog: true, ylog: true, xlabel: "v (log)", ylabel: "|m − s| (log)" });
  polyline(f, map, data.points.map((p) => [p.v, p.guide]), "#9aa3b2", { dash: [6, 5], width: 1.5 });
  polyline(f, map, data.points.filter((p) => p.gap > 0).map((p) => [p.v, p.gap]), "#5fb3ff");
  $("st-read").innerHTML =
    `u = <b>${fmt(u, 3)}</b>, n = <b>${n}</b> · solid: measured gap, dashed: 1/(nv) envelope` +
    ` · spacing scale 1/n = ${fmt(1 / n, 2)}`;
}

// ----------------------------------------------------------- section three

function runRegion() {
  if (!wasm) return;
  const mode = $("rg-mode").value;
  const exp = Number($("rg-n").value);
  const n = 2 ** exp;
  $("rg-n-exp").textContent = exp;
  const raw = Number($("rg-val").value);
  const value = mode === "desk" ? raw : raw / 10;
  $("rg-val-name").textContent = mode === "desk" ? "nv" : "a₀·10";
  $("rg-val-val").textContent = mode === "desk" ? raw : fmt(value, 2);
  const data = JSON.parse(wasm.region_demo(n, mode, value));
  if (data.error) { $("rg-read").innerHTML = `<span class="err">${data.error}</span>`; return; }

  const f = frame($("rg-plot"));
  const vTop = 4.2;
  const map = axes(f, -2.3, 2.3, 0, vTop, { xlabel: "u", ylabel: "v" });

  // spectrum support reference
  polyline(f, map, [[-2, 0], [2, 0]], "#6fdc8c", { width: 3 });

  if (!data.empty) {
    const pts = data.boundary.map(([u, v]) => [u, Math.min(v, vTop)]);
    // close the region visually along the cap
    const poly = [[data.u_lo, vTop], ...pts, [data.u_hi, vTop]];
    f.ctx.fillStyle = "rgba(95,179,255,0.18)";
    f.ctx.beginPath();
    poly.forEach(([u, v], i) => {
      const x = map.tx(u), y = map.ty(v);
      if (i === 0) f.ctx.moveTo(x, y); else f.ctx.lineTo(x, y);
    });
    f.ctx.closePath();
    f.ctx.fill();
    polyline(f, map, pts, "#5fb3ff");
    $("rg-read").innerHTML =
      `n = <b>${n}</b> · v₀ = <b>${fmt(data.v0)}</b> · ε = <b>${fmt(data.eps)}</b>` +
      ` · bulk window u ∈ [<b>${fmt(data.u_lo, 3)}</b>, <b>${fmt(data.u_hi, 3)}</b>]` +
      ` · floor rises like v₀/√|2−|u|| toward the edges`;
  } else {
    f.ctx.fillStyle = "#9aa3b2";
    f.ctx.font = "13px system-ui";
    f.ctx.textAlign = "center";
    f.ctx.fillText("region is empty: ε = (2v₀·(1+√2))^{2/3} ≥ 2 at this size",
      f.m.l + f.w / 2, f.m.t + f.h / 2);
    $("rg-read").innerHTML =
      `n = <b>${n}</b> · v₀ = <b>${fmt(data.v0)}</b> · ε = <b>${fmt(data.eps)}</b> ≥ 2, ` +
      `so no admissible (u, v) exists — the asymptotic floor only opens up at much larger n`;
  }
}

// -------------------------------------------------------------------- wire

for (const [id, fn] of [
  ["sp-run", runSpectrum], ["sp-law", runSpectrum], ["sp-n", runSpectrum],
  ["st-run", runStieltjes], ["st-law", runStieltjes], ["st-n", runStieltjes], ["st-u", runStieltjes],
  ["rg-mode", runRegion], ["rg-n", runRegion], ["rg-val", runRegion],
]) {
  $(id).addEventListener(id.endsWith("-run") ? "click" : "input", fn);
}

if (wasm) {
  runSpectrum();
  runStieltjes();
  runRegion();
}
