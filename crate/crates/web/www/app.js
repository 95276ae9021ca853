import init, { eval_curve, fundamental_sequence, play_game } from "./pkg/aspi_web.js";

const $ = (id) => document.getElementById(id);

function fail(el, err) {
  el.innerHTML = "";
  const p = document.createElement("p");
  p.className = "error";
  p.textContent = String(err.message ?? err);
  el.appendChild(p);
}

function short(v) {
  return v.length > 40 ? `${v.slice(0, 18)}…${v.slice(-18)} (${v.length} digits)` : v;
}

function showCurve() {
  const out = $("c-out");
  try {
    const pts = JSON.parse(eval_curve($("c-kind").value, $("c-ord").value, +$("c-n").value, +$("c-bits").value));
    const rows = pts.map((p) => {
      const v = p.value !== null ? short(p.value) : p.overflow ? `≥ 2^${$("c-bits").value}` : "budget exhausted";
      return `<tr><td>${p.n}</td><td>${v}</td><td>${p.bits ?? ""}</td></tr>`;
    });
    out.innerHTML = `<table><tr><th>n</th><th>value</th><th>bits</th></tr>${rows.join("")}</table>`;
  } catch (e) {
    fail(out, e);
  }
}

function showSequence() {
  const out = $("f-out");
  try {
    const seq = JSON.parse(fundamental_sequence($("f-ord").value, +$("f-n").value));
    out.textContent = seq.map((a, i) => `[${i}] ${a}`).join("\n");
  } catch (e) {
    fail(out, e);
  }
}

function showGame() {
  const out = $("g-out");
  try {
    const g = JSON.parse(play_game($("g-p").value, $("g-e").value, +$("g-h").value, +$("g-w").value));
    const marks = [...g.x].map((b, i) => (b === g.y[i] ? b : `<span class="miss">${b}</span>`)).join("");
    out.innerHTML =
      `<p>learned: <b>${g.learned}</b>, mispredictions: ${g.mispredictions}, ` +
      `last loss round: ${g.last_loss_round ?? "none"}</p>` +
      `<p>evader (misses in red):</p><div class="bits">${marks}</div>` +
      `<p>predictor:</p><div class="bits">${g.y}</div>`;
  } catch (e) {
    fail(out, e);
  }
}

await init();
$("c-go").onclick = showCurve;
$("f-go").onclick = showSequence;
$("g-go").onclick = showGame;
showCurve();
showSequence();
showGame();
