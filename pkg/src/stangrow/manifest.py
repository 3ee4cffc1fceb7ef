"""Run manifests: what a command ran, on which inputs, producing which files."""

import json
from dataclasses import dataclass, field
from pathlib import Path

from ._version import __version__
from .ioutil import sha256_file

MANIFEST_FORMAT = "run-manifest/1"


@dataclass
class RunManifest:
    command: str
    parameters: dict = field(default_factory=dict)
    input_hashes: dict = field(default_factory=dict)
    output_files: list = field(default_factory=list)
    wall_clock_seconds: float = 0.0
    tool_version: str = __version__

    def add_input(self, path: "str | Path") -> None:
        self.input_hashes[str(path)] = sha256_file(path)

    def add_output(self, path: "str | Path") -> None:
        self.output_files.append(str(path))

    def to_dict(self) -> dict:
        return {
            "format": MANIFEST_FORMAT,
            "tool_version": self.tool_version,
            "command": self.command,
            "parameters": self.parameters,
            "input_hashes": self.input_hashes,
            "output_files": self.output_files,
            "wall_clock_seconds": self.wall_clock_seconds,
        }

    def write(self, destination: "str | Path") -> Path:
        """Write the manifest; every declared output must exist."""
        for out in self.output_files:
            if not Path(out).exists():
                raise FileNotFoundError(f"declared output {out} does not exist")
        dest = Path(destination)
        with open(dest, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")
        return dest

    @classmethod
    def read(cls, source: "str | Path", verify_inputs: bool = False) -> "RunManifest":
        with open(source, "r", encoding="utf-8") as fh:
            d = json.load(fh)
        if d.get("format") != MANIFEST_FORMAT:
            raise ValueError(
                f"{source}: format {d.get('format')!r}, expected {MANIFEST_FORMAT!r}"
            )
        m = cls(
            command=d["command"],
            parameters=d.get("parameters", {}),
            input_hashes=d.get("input_hashes", {}),
            output_files=d.get("output_files", []),
            wall_clock_seconds=d.get("wall_clock_seconds", 0.0),
            tool_version=d.get("tool_version", "unknown"),
        )
        if verify_inputs:
            for path, digest in m.input_hashes.items():
                actual = sha256_file(path)
                if actual != digest:
                    raise ValueError(f"{path}: hash changed since the manifest was written")
        return m
