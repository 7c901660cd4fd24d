import init, { segre, guards, torsion } from "./pkg/ag_wasm.js";

const $ = (id) => document.getElementById(id);
const int = (id) => parseInt($(id).value, 10);

function show(out, f) {
  try {
    out.textContent = JSON.stringify(JSON.parse(f()), null, 2);
    out.classList.remove("bad");
  } catch (e) {
    out.textContent = String(e.message ?? e);
    out.classList.add("bad");
  }
}

function fill(rows, cols, f) {
  const lines = [];
  for (let r = 0; r < rows; r++) {
    const line = [];
    for (let c = 0; c < cols; c++) line.push(f(r, c).toFixed(3));
    lines.push(line.join(" "));
  }
  $("sz").value = lines.join("\n");
}

const rnd = () => Math.random() * 2 - 1;

function wire() {
  $("sgo").onclick = () => {
    const entries = $("sz").value.trim().split(/\s+/).map(Number);
    show($("sout"), () => segre(int("sp"), int("sq"), Float64Array.from(entries)));
  };
  $("srand").onclick = () => {
    fill(int("sp"), int("sq"), rnd);
    $("sgo").onclick();
  };
  $("srand1").onclick = () => {
    const t = Array.from({ length: int("sp") }, rnd);
    const s = Array.from({ length: int("sq") }, rnd);
    fill(t.length, s.length, (r, c) => t[r] * s[c]);
    $("sgo").onclick();
  };
  $("ggo").onclick = () => show($("gout"), () => guards(int("gp"), int("gq")));
  $("tkind").onchange = () => {
    if ($("tkind").value === "web") {
      $("tp").value = 2;
      $("tparam").value = 0.5;
    }
  };
  $("tgo").onclick = () => {
    $("tout").textContent = "computing...";
    setTimeout(() => show($("tout"), () => torsion($("tkind").value, int("tp"), int("tq"), parseFloat($("tparam").value))), 0);
  };
}

init()
  .then(() => {
    $("status").textContent = "";
    wire();
    $("sgo").onclick();
    $("ggo").onclick();
  })
  .catch((e) => {
    $("status").textContent = `Could not load the module: ${e}`;
    $("status").classList.add("bad");
  });
