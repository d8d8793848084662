#!/usr/bin/env python3
"""Validation script for run directories.

Scans summary.json and stat_report.json files below the given directories
(default: runs/) and validates them against the bundled schemas. Also checks
that every artifact listed in a run_manifest.json still has its recorded hash.
Exits with error code if any invalid files are found.
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

import jsonschema

SCHEMAS = {
    "summary.json": "run_summary.schema.json",
    "stat_report.json": "stat_report.schema.json",
}


def find_repo_root() -> Path:
    """Find the repository root by looking for pyproject.toml."""
    current = Path(__file__).resolve()
    for parent in current.parents:
        if (parent / "pyproject.toml").exists():
            return parent
    # Fallback to current working directory
    return Path.cwd()


def validate_json_file(file_path: Path, schema_path: Path) -> tuple[bool, str | None]:
    """Validate a JSON file against a schema."""
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        return False, f"Invalid JSON: {e}"

    try:
        with open(schema_path, "r", encoding="utf-8") as f:
            schema = json.load(f)
    except Exception as e:
        return False, f"Failed to load schema: {e}"

    try:
        jsonschema.validate(instance=data, schema=schema)
        return True, None
    except jsonschema.ValidationError as e:
        return False, f"Validation error: {e.message}"
    except jsonschema.SchemaError as e:
        return False, f"Schema error: {e.message}"


def check_manifest(manifest_path: Path) -> list[str]:
    """Recorded artifact hashes that no longer match the files next to the manifest."""
    with open(manifest_path, "r", encoding="utf-8") as f:
        manifest = json.load(f)
    problems = []
    for entry in manifest.get("artifacts", []):
        artifact = manifest_path.parent / entry["path"]
        if not artifact.exists():
            problems.append(f"{artifact}: missing")
            continue
        digest = hashlib.sha256(artifact.read_bytes()).hexdigest()
        if digest != entry["sha256"]:
            problems.append(f"{artifact}: sha256 mismatch")
    return problems


def main() -> int:
    """Main validation function."""
    repo_root = find_repo_root()
    schemas_dir = repo_root / "schemas"
    roots = [Path(arg) for arg in sys.argv[1:]] or [repo_root / "runs"]

    errors: list[str] = []
    checked = 0
    for root in roots:
        if not root.exists():
            errors.append(f"{root}: directory not found")
            continue
        for name, schema in SCHEMAS.items():
            for file_path in sorted(root.rglob(name)):
                checked += 1
                valid, error = validate_json_file(file_path, schemas_dir / schema)
                if not valid:
                    errors.append(f"{file_path}: {error}")
                else:
                    print(f"✓ {file_path}")
        for manifest_path in sorted(root.rglob("run_manifest.json")):
            checked += 1
            errors.extend(check_manifest(manifest_path))

    if errors:
        print("\nValidation errors found:", file=sys.stderr)
        for error in errors:
            print(f"  ✗ {error}", file=sys.stderr)
        return 1

    print(f"\n✓ All {checked} files are valid")
    return 0


if __name__ == "__main__":
    sys.exit(main())
