"""Runs the CLI on a few formats and validates every output against schemas/."""

import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource

CLI = sys.argv[1]
SCHEMAS = pathlib.Path(sys.argv[2])


def load_registry():
    resources = []
    for path in SCHEMAS.glob("*.schema.json"):
        schema = json.loads(path.read_text())
        resources.append((path.name, Resource.from_contents(schema)))
    return Registry().with_resources(resources)


REGISTRY = load_registry()


def validator(name):
    schema = json.loads((SCHEMAS / name).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema, registry=REGISTRY)


def run(*args, expect=0):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True)
    if proc.returncode != expect:
        sys.exit(f"{' '.join(args)}: exit {proc.returncode}, expected {expect}\n{proc.stderr}")
    return proc.stdout


def check(schema_name, text, label):
    errors = list(validator(schema_name).iter_errors(json.loads(text)))
    for e in errors:
        print(f"{label}: {e.json_path}: {e.message}")
    return not errors


ok = True
for n, d in [("1,1", "3,5"), ("1", "3"), ("2,2", "1,1"), ("1,1,1", "1,1,1")]:
    ok &= check("classify.schema.json", run("classify", "--n", n, "--d", d), f"classify {n} {d}")
for n, d, mode in [("1,1", "3,5", "exact"), ("2,2", "1,1", "float"), ("1,1", "3,3", "exact"), ("1", "1", "exact")]:
    ok &= check("analyze.schema.json", run("analyze", "--n", n, "--d", d, "--mode", mode), f"analyze {n} {d}")
for args, code in [(["--n", "1,1,1", "--d", "1,1,1"], 0),
                   (["--n", "1,1", "--d", "3,3", "--starts", "8"], 0),
                   (["--n", "2", "--d", "3", "--rank", "1", "--starts", "4"], 0),
                   (["--n", "1,1,1", "--d", "1,1,1", "--starts", "1"], 3)]:
    ok &= check("falsify.schema.json", run("falsify", *args, expect=code), "falsify " + " ".join(args))

scan = run("scan", "--n-max", "2", "--d-max", "3", "--r-max", "2")
first = scan.splitlines()[0]
prefix = "# manifest: "
if not first.startswith(prefix):
    sys.exit("scan output does not start with a manifest line")
ok &= check("manifest.schema.json", first[len(prefix):], "scan manifest")

print("all outputs valid" if ok else "schema violations found")
sys.exit(0 if ok else 1)
