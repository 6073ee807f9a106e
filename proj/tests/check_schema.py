"""Runs `vkplate solve` and validates equilibria.json against the shipped schema."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

try:
    import jsonschema
except ImportError:
    print("jsonschema not installed, skipping")
    sys.exit(77)

exe, schema_path = sys.argv[1], sys.argv[2]
with tempfile.TemporaryDirectory() as out:
    cmd = [exe, "solve", "--lam", "0.965", "--M", "6", "--N", "32", "--set", "n_starts=4",
           "--set", "k=0.1", "--set", "delta=1e-6", "--out", out]
    subprocess.run(cmd, check=True)
    doc = json.loads((Path(out) / "equilibria.json").read_text())
    jsonschema.validate(doc, json.loads(Path(schema_path).read_text()))
    assert doc["solutions"], "no equilibria written"
    assert "curvature_plus_e1" in doc["solutions"][0]
print("equilibria.json conforms to the schema")
