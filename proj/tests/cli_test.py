"""End-to-end checks of the walklab command line.

Usage: cli_test.py <walklab binary> <schema directory>
"""
import json
import os
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

BIN = None
SCHEMAS = None


def load_registry(directory):
    resources = []
    for path in Path(directory).glob("*.schema.json"):
        doc = json.loads(path.read_text())
        resources.append((doc["$id"], Resource.from_contents(doc)))
        resources.append((path.name, Resource.from_contents(doc)))
    return Registry().with_resources(resources)


def run(*args, env=None, check=None):
    full_env = dict(os.environ)
    full_env.pop("WALKLAB_SEED", None)
    if env:
        full_env.update(env)
    proc = subprocess.run([BIN, *args], capture_output=True, text=True, env=full_env, timeout=600)
    if check is not None and proc.returncode != check:
        raise AssertionError(
            f"{args}: exit {proc.returncode}, expected {check}\n{proc.stdout}\n{proc.stderr}")
    return proc


class CliTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.registry = load_registry(SCHEMAS)
        cls.tmp = tempfile.TemporaryDirectory()
        cls.dir = Path(cls.tmp.name)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def validate(self, doc, schema):
        schema_doc = json.loads((Path(SCHEMAS) / f"{schema}.schema.json").read_text())
        validator = jsonschema.Draft202012Validator(schema_doc, registry=self.registry)
        validator.validate(doc)

    def json_of(self, *args):
        proc = run(*args, check=0)
        manifest = json.loads(proc.stderr.strip().splitlines()[-1])
        self.validate(manifest, "manifest")
        return json.loads(proc.stdout), manifest

    def test_constants(self):
        doc, manifest = self.json_of("constants", "--p", "0.75")
        self.validate(doc, "constants")
        self.assertAlmostEqual(doc["constants"]["lambda0"], 1.442695, delta=5e-7)
        self.assertEqual(manifest["command"], "constants")
        self.assertEqual(manifest["params"]["p"], 0.75)

    def test_invalid_p(self):
        proc = run("constants", "--p", "0.5", check=1)
        self.assertIn("p > 1/2", proc.stderr)
        run("simulate", "--p", "2", check=1)

    def test_dist_examples(self):
        proc = run("dist", "ball", "--p", "0.75", "--kmax", "10", check=0)
        lines = proc.stdout.splitlines()
        self.assertEqual(lines[0], "k,mass")
        self.assertEqual(lines[1], "1,0.375")
        self.assertTrue(lines[-1].startswith("# tail_bound="))

        doc, _ = self.json_of("dist", "two-point", "--z", "1", "--side", "pos", "--p", "0.75",
                              "--format", "json")
        rows = {r["k"]: r["mass"] for r in doc["table"]["rows"]}
        self.assertAlmostEqual(rows[1], 0.375, places=12)

        doc, _ = self.json_of("dist", "local-time", "--z", "-1", "--p", "0.75", "--format", "json")
        rows = {r["k"]: r["mass"] for r in doc["table"]["rows"]}
        self.assertAlmostEqual(rows[0], 2 / 3, places=12)

    def test_every_law_validates(self):
        for law in ["first-return", "local-time", "two-point", "center-sphere-joint", "sphere",
                    "ball", "excursion"]:
            for extra in ([], ["--z", "2", "--side", "neg", "--start", "-1"]):
                with self.subTest(law=law, extra=extra):
                    doc, _ = self.json_of("dist", law, "--kmax", "8", "--lmax", "8",
                                          "--format", "json", *extra)
                    self.validate(doc, "dist")
                    self.assertEqual(doc["law"], law)

    def test_unknown_law(self):
        run("dist", "cauchy", check=1)
        run("dist", "--law", "cauchy", check=1)

    def test_boundary(self):
        proc = run("boundary", "--gridsize", "50", check=0)
        lines = proc.stdout.splitlines()
        self.assertEqual(lines[0], "x,y,branch,marker")
        markers = [line.split(",")[3] for line in lines[1:]]
        for m in ("x_max", "y_max", "x_zero"):
            self.assertIn(m, markers)
        doc, _ = self.json_of("boundary", "--gridsize", "50", "--format", "json")
        self.validate(doc, "boundary")
        run("boundary", "--gridsize", "1", check=1)

    def test_oracle(self):
        doc, _ = self.json_of("oracle", "--method", "enumerate", "--n", "2", "--local-time", "0",
                              "--cap", "3")
        self.validate(doc, "oracle")
        masses = {tuple(e["counts"]): e["mass"] for e in doc["law"]["entries"]}
        self.assertAlmostEqual(masses[(1,)], 0.375, places=14)

        doc, _ = self.json_of("oracle", "--method", "infinite", "--set", "-1,0,1", "--cap", "20",
                              "--eps", "1e-8")
        self.validate(doc, "oracle")
        masses = {tuple(e["counts"]): e["mass"] for e in doc["law"]["entries"]}
        self.assertAlmostEqual(masses[(1,)], 0.375, delta=1e-8)
        self.assertAlmostEqual(masses[(2,)], 0.09375, delta=1e-8)

        doc, _ = self.json_of("oracle", "--method", "dp", "--n", "30", "--set", "-1,1",
                              "--local-time", "0", "--cap", "10")
        self.validate(doc, "oracle")
        self.assertEqual(len(doc["law"]["axes"]), 2)

        run("oracle", "--method", "enumerate", "--n", "25", "--local-time", "0", check=1)
        run("oracle", "--method", "infinite", "--local-time", "0", "--eps", "1e-300", check=1)

    def test_simulate_deterministic(self):
        args = ["simulate", "--p", "0.75", "--n", "1000000", "--replicas", "8", "--seed", "42"]
        first = run(*args, check=0).stdout
        second = run(*args, check=0).stdout
        self.assertEqual(first, second)
        self.assertEqual(first, run(*args, "--threads", "4", check=0).stdout)
        doc = json.loads(first)
        self.validate(doc, "simulate")
        self.assertEqual(len(doc["reports"]), 8)

    def test_simulate_kernel_variants_agree(self):
        args = ["simulate", "--n", "100000", "--replicas", "3", "--seed", "7",
                "--heavy-delta", "0.2"]
        scalar = run(*args, "--isa", "scalar", check=0).stdout
        self.assertEqual(scalar, run(*args, "--isa", "avx2", check=0).stdout)
        self.validate(json.loads(scalar), "simulate")

    def test_simulate_modes(self):
        doc, _ = self.json_of("simulate", "--mode", "ensemble", "--statistic", "occupation",
                              "--sites", "0;-1,1", "--replicas", "2000", "--threads", "2")
        self.validate(doc, "simulate")
        self.assertEqual([c["name"] for c in doc["ensemble"]["components"]], ["{0}", "{-1,1}"])

        doc, _ = self.json_of("simulate", "--mode", "ensemble", "--statistic", "no-return",
                              "--horizon", "200", "--replicas", "2000")
        self.validate(doc, "simulate")

        doc, _ = self.json_of("simulate", "--mode", "reversed", "--n", "300", "--replicas", "5000")
        self.validate(doc, "simulate")
        self.assertTrue(doc["reversed"]["increments_ok"])

        field = self.dir / "field.csv"
        self.json_of("simulate", "--n", "500", "--field-csv", str(field))
        lines = field.read_text().splitlines()
        self.assertEqual(lines[0], "site,count")
        self.assertEqual(sum(int(x.split(",")[1]) for x in lines[1:]), 500)

    def test_seed_from_environment(self):
        args = ["simulate", "--n", "5000"]
        a = run(*args, env={"WALKLAB_SEED": "11"}, check=0)
        b = run(*args, "--seed", "11", check=0)
        c = run(*args, check=0)
        self.assertEqual(a.stdout, b.stdout)
        self.assertNotEqual(a.stdout, c.stdout)
        self.assertEqual(json.loads(a.stderr.splitlines()[-1])["seed"], 11)

    def test_manifest_replay(self):
        cases = [
            ["simulate", "--n", "20000", "--replicas", "3", "--seed", "5", "--heavy-delta", "0.3",
             "--xi-star-z", "1,2"],
            ["simulate", "--mode", "ensemble", "--statistic", "occupation", "--sites", "0;-1,1",
             "--replicas", "500", "--seed", "8"],
            ["oracle", "--set", "-1,1", "--local-time", "0", "--cap", "4", "--n", "12"],
            ["dist", "center-sphere-joint", "--start", "+1", "--kmax", "3", "--lmax", "5"],
            ["constants", "--p", "0.6"],
        ]
        for i, args in enumerate(cases):
            with self.subTest(args=args):
                out = self.dir / f"run{i}.out"
                run(*args, "--out", str(out), check=0)
                manifest_path = Path(str(out) + ".manifest.json")
                manifest = json.loads(manifest_path.read_text())
                self.validate(manifest, "manifest")
                self.assertEqual(manifest["outputs"], [str(out)])
                replay = self.dir / f"replay{i}.out"
                run("--config", str(manifest_path), "--out", str(replay), check=0)
                self.assertEqual(out.read_text(), replay.read_text())

    def test_flags_win_over_config(self):
        config = self.dir / "config.json"
        config.write_text(json.dumps({"command": "simulate",
                                      "params": {"n": 3000, "seed": 1, "replicas": 2}}))
        from_config = run("--config", str(config), check=0).stdout
        overridden = run("--config", str(config), "simulate", "--seed", "2", check=0).stdout
        direct = run("simulate", "--n", "3000", "--seed", "2", "--replicas", "2", check=0).stdout
        self.assertEqual(overridden, direct)
        self.assertNotEqual(from_config, overridden)
        bad = self.dir / "bad.json"
        bad.write_text("{not json")
        run("--config", str(bad), check=1)

    def test_verify(self):
        out = self.dir / "verify.json"
        proc = run("verify", "--level", "quick", "--only", "1,2,3,4,5,6", "--out", str(out),
                   check=0)
        self.assertEqual(sum(line.startswith("[PASS]") for line in proc.stdout.splitlines()), 6)
        doc = json.loads(out.read_text())
        self.validate(doc, "verify")
        self.assertTrue(doc["passed"])
        run("verify", "--only", "11", check=1)


if __name__ == "__main__":
    BIN, SCHEMAS = sys.argv[1], sys.argv[2]
    unittest.main(argv=[sys.argv[0], "-v"])
