"""Validates protocol samples against the published WebSocket schema.

usage: check_schema.py SCHEMA SAMPLES_EXE
"""
import json
import subprocess
import sys

import jsonschema


def main() -> int:
    schema_path, exe = sys.argv[1], sys.argv[2]
    with open(schema_path, encoding="utf-8") as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    out = subprocess.run([exe], check=True, capture_output=True, text=True).stdout
    checked = failed = 0
    for line in out.splitlines():
        sample = json.loads(line)
        errors = list(validator.iter_errors(sample["message"]))
        ok = not errors if sample["expect"] == "valid" else bool(errors)
        checked += 1
        if not ok:
            failed += 1
            if failed <= 5:
                what = errors[0].message if errors else "accepted"
                print(f"expected {sample['expect']}: {what}\n  {json.dumps(sample['message'])[:300]}")
    print(f"{checked} samples checked, {failed} disagree with the schema")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
