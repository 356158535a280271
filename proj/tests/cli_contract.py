"""Runs the modinv executable and checks exit codes, JSON schemas, determinism and DOT golden files."""

import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

failures = []


def check(cond, what):
    print(("ok    " if cond else "FAIL  ") + what)
    if not cond:
        failures.append(what)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--exe", required=True)
    ap.add_argument("--source", required=True)
    args = ap.parse_args()
    src = pathlib.Path(args.source)
    schemas = {p.name.split(".")[0]: json.loads(p.read_text()) for p in (src / "docs" / "schemas").glob("*.schema.json")}
    for s in schemas.values():
        jsonschema.Draft202012Validator.check_schema(s)
    graphs = src / "fixtures" / "graphs"
    golden = src / "tests" / "golden"
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="modinv_cli_"))

    def run(*argv):
        p = subprocess.run([args.exe, *argv], capture_output=True, text=True)
        return p.returncode, p.stdout, p.stderr

    def validated(kind, argv, expect=0):
        code, out, err = run(*argv)
        check(code == expect, f"{' '.join(argv)}: exit {code} (expected {expect}) {err.strip()}")
        try:
            doc = json.loads(out)
        except json.JSONDecodeError:
            check(False, f"{' '.join(argv)}: output is not JSON")
            return None
        try:
            jsonschema.validate(doc, schemas[kind])
            check(True, f"{' '.join(argv)}: schema {kind}")
        except jsonschema.ValidationError as e:
            check(False, f"{' '.join(argv)}: schema {kind}: {e.message}")
        return doc

    for fixture in sorted(graphs.glob("*.json")):
        try:
            jsonschema.validate(json.loads(fixture.read_text()), schemas["graph"])
            check(True, f"fixture {fixture.name}: schema graph")
        except jsonschema.ValidationError as e:
            check(False, f"fixture {fixture.name}: {e.message}")

    for model in ["su2:4", "su2:10", "sun:3,5", "so16l:1", "zn:5,2", "zn:8,3", "ising:3"]:
        validated("data", ["data", "--model", model])

    c10 = validated("classify", ["classify", "--model", "su2:10"])
    c16 = validated("classify", ["classify", "--model", "su2:16"])
    validated("classify", ["classify", "--model", "so16l:1"])
    validated("classify", ["classify", "--model", "su2:16", "--max-nodes", "1"], expect=3)

    (tmp / "su2_10.json").write_text(json.dumps(c10))
    (tmp / "su2_16.json").write_text(json.dumps(c16))
    e6_index = next(i for i, v in enumerate(c10["result"]["invariants"]) if v["trace"] == 6)
    e7_index = next(i for i, v in enumerate(c16["result"]["invariants"]) if v["trace"] == 7)
    search = validated("nimrep", ["nimrep", "--model", "su2:10", "--invariant", str(tmp / "su2_10.json"), "--index", str(e6_index)])
    e7 = validated("nimrep", ["nimrep", "--model", "su2:16", "--invariant", str(tmp / "su2_16.json"), "--index", str(e7_index)])
    check(e7 is not None and [g["ade"] for g in e7["result"]["graphs"]] == ["E7"], "su2:16 E7 search finds exactly E7")
    if search:
        (tmp / "e6.json").write_text(json.dumps(search["result"]["graphs"][0]))
        validated("nimrep", ["nimrep", "--model", "su2:10", "--invariant", str(tmp / "su2_10.json"), "--index", str(e6_index),
                             "--mode", "verify", "--graph", str(tmp / "e6.json")])
        other = next(i for i, v in enumerate(c10["result"]["invariants"]) if v["trace"] != 6)
        validated("nimrep", ["nimrep", "--model", "su2:10", "--invariant", str(tmp / "su2_10.json"), "--index", str(other),
                             "--mode", "verify", "--graph", str(tmp / "e6.json")], expect=4)

    validated("orbifold", ["orbifold", "--graph", str(graphs / "d4.json"), "--action", "z3"])
    orb = validated("orbifold", ["orbifold", "--graph", str(graphs / "e8.json"), "--action", "z3"])
    check(orb is not None and orb["result"]["vertices_out"] == 4, "E(8) by Z3 has 4 vertices")
    orb = validated("orbifold", ["orbifold", "--graph", str(graphs / "pz32.json"), "--action", "z5"])
    check(orb is not None and orb["result"]["vertices_out"] == 16, "32-vertex graph by Z5 has 16 vertices")

    validated("embeddings", ["embeddings", "su2_10_so5_1", "--ext", "identity"])
    validated("embeddings", ["embeddings", "su4_6_su10_1", "--ext", "conjugation"])
    a = validated("embeddings", ["embeddings", "su3_9_e6_1", "--ext", "identity"])
    b = validated("embeddings", ["embeddings", "su3_9_e6_1", "--ext", "conjugation"])
    check(a is not None and b is not None and a["result"]["matrix"] == b["result"]["matrix"], "su3_9_e6_1 restrictions agree")

    for argv, expect in [
        (["data", "--model", "su2:0"], 2),
        (["data", "--model", "nosuch:1"], 2),
        (["classify", "--model", "su2:4", "--format", "dot"], 2),
        (["orbifold", "--graph", str(graphs / "d4.json"), "--action", "1,0,2,3"], 2),
        (["orbifold", "--graph", str(graphs / "d4.json"), "--action", "nosuch"], 2),
        (["embeddings", "nosuch"], 2),
        (["nimrep", "--model", "su2:16", "--invariant", str(tmp / "su2_16.json"), "--index", "0"], 2),
        (["frobnicate"], 2),
    ]:
        code, _, err = run(*argv)
        check(code == expect and err, f"{' '.join(argv)}: exit {code} (expected {expect}) with a message")

    for argv in (["classify", "--model", "su2:16"], ["classify", "--model", "zn:12,5"],
                 ["nimrep", "--model", "su2:16", "--invariant", str(tmp / "su2_16.json"), "--index", str(e7_index)]):
        outs = {run(*argv, "--jobs", str(j))[1] for j in (1, 2, 4)}
        check(len(outs) == 1, f"{' '.join(argv)}: identical output for --jobs 1, 2, 4")
        check(run(*argv)[1] == next(iter(outs)), f"{' '.join(argv)}: identical output across runs")

    out_file = tmp / "out.json"
    code, out, _ = run("data", "--model", "su2:4", "--out", str(out_file))
    check(code == 0 and out == "" and json.loads(out_file.read_text())["result"]["rank"] == 5, "--out writes the document")

    for name, argv in [
        ("d4_z3.dot", ["orbifold", "--graph", str(graphs / "d4.json"), "--action", "z3", "--format", "dot"]),
        ("e8_z3.dot", ["orbifold", "--graph", str(graphs / "e8.json"), "--action", "z3", "--format", "dot"]),
        ("su2_10_e6.dot", ["nimrep", "--model", "su2:10", "--invariant", str(tmp / "su2_10.json"), "--index", str(e6_index),
                           "--format", "dot"]),
    ]:
        code, out, _ = run(*argv)
        check(code == 0 and out == (golden / name).read_text(), f"DOT golden {name}")

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
