"""Bit-exact structured traces shared by every front-end subcommand.

A trace is a JSON document with sorted keys, two-space indentation, and a
trailing newline, so identical runs yield identical bytes.  The payload
carries no floats and no timestamps; every set is serialized as a sorted
list before it gets here.  The checksum covers the payload only, letting
an offline reader detect a tampered or truncated log before auditing it.
"""

import hashlib
import json
from dataclasses import dataclass
from typing import Any

from . import __version__

SCHEMA = "kleenelab.trace/1"
TOOL_VERSION = __version__


def canonical(value: Any):
    """Copy a payload into plain JSON types, rejecting anything lossy.

    Tuples become lists.  Floats, sets, and non-string keys are refused
    outright: floats break byte-reproducibility, unordered collections
    must be sorted by the producer, and key coercion hides bugs.
    """
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        raise TypeError("floats are banned from traces")
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    if isinstance(value, dict):
        out = {}
        for k, v in value.items():
            if not isinstance(k, str):
                raise TypeError(f"non-string key {k!r} in trace payload")
            out[k] = canonical(v)
        return out
    raise TypeError(f"{type(value).__name__} cannot appear in a trace")


def _dump(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def payload_checksum(payload: Any) -> str:
    return hashlib.sha256(_dump(canonical(payload)).encode()).hexdigest()


@dataclass(frozen=True)
class TraceDocument:
    subcommand: str
    config: dict
    payload: dict

    def to_json(self) -> str:
        doc = {
            "schema": SCHEMA,
            "tool_version": TOOL_VERSION,
            "subcommand": self.subcommand,
            "config": canonical(self.config),
            "payload": canonical(self.payload),
            "checksum": payload_checksum(self.payload),
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


class TraceIntegrityError(ValueError):
    pass


def load_trace(text: str, verify: bool = True) -> TraceDocument:
    """Parse a trace back; checksum and schema failures raise."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as ex:
        raise TraceIntegrityError(f"not valid JSON: {ex}") from ex
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise TraceIntegrityError("missing or unknown schema tag")
    for key in ("subcommand", "config", "payload", "checksum"):
        if key not in doc:
            raise TraceIntegrityError(f"missing field {key!r}")
    if verify and payload_checksum(doc["payload"]) != doc["checksum"]:
        raise TraceIntegrityError("payload checksum mismatch")
    return TraceDocument(subcommand=doc["subcommand"], config=doc["config"],
                         payload=doc["payload"])
