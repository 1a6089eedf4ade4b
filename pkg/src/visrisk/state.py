"""Permalink tokens: every view configuration as a URL-safe string.

A token is the canonical JSON of the view state, deflated and base64
encoded.  Canonical means fixed fields, sorted keys, pinned coordinates
rounded to centipixels, so equal states always produce equal tokens.
Debuggability beats opacity here: inflate a token and you can read it.
"""

from __future__ import annotations

import base64
import json
import zlib
from dataclasses import dataclass, field
from typing import Optional

from visrisk.datacube import CubeError, time_key

VIEWS = ("dashboard", "ewm", "fsm", "fsmt", "bim")

MAX_TOKEN_CHARS = 2048
_MAX_INFLATED = 64 * 1024


class StateError(ValueError):
    """Raised for malformed or tampered tokens and invalid state documents."""


@dataclass(frozen=True)
class ViewState:
    """One view's full configuration: what is shown, selected, and pinned."""

    view: str = "dashboard"
    entities: tuple[str, ...] = ()
    span: Optional[tuple[str, str]] = None
    layer: Optional[str] = None
    transform: bool = False
    events: tuple[str, ...] = ()
    pinned: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        if self.view not in VIEWS:
            raise StateError(f"unknown view {self.view!r}")
        if self.span is not None:
            start, end = self.span
            try:
                if time_key(start) > time_key(end):
                    raise StateError(f"span start {start!r} after end {end!r}")
            except CubeError as err:
                raise StateError(str(err)) from None

    def canonical(self) -> dict:
        return {
            "entities": list(self.entities),
            "events": list(self.events),
            "layer": self.layer,
            "pinned": {node: [round(x, 2), round(y, 2)]
                       for node, (x, y) in sorted(self.pinned.items())},
            "span": list(self.span) if self.span else None,
            "transform": bool(self.transform),
            "view": self.view,
        }


def state_from_dict(doc: dict) -> ViewState:
    """Validate a raw state document into a ViewState."""
    if not isinstance(doc, dict):
        raise StateError("state document must be an object")
    unknown = set(doc) - {"view", "entities", "span", "layer", "transform", "events", "pinned"}
    if unknown:
        raise StateError(f"unknown state fields: {sorted(unknown)}")
    try:
        view = doc.get("view", "dashboard")
        entities = tuple(str(e) for e in doc.get("entities") or ())
        events = tuple(str(e) for e in doc.get("events") or ())
        raw_span = doc.get("span")
        span = (str(raw_span[0]), str(raw_span[1])) if raw_span else None
        layer = doc.get("layer")
        if layer is not None:
            layer = str(layer)
        pinned_raw = doc.get("pinned") or {}
        if not isinstance(pinned_raw, dict):
            raise StateError("pinned must be an object")
        pinned = {}
        for node, xy in pinned_raw.items():
            x, y = float(xy[0]), float(xy[1])
            pinned[str(node)] = (x, y)
        return ViewState(str(view), entities, span, layer,
                         bool(doc.get("transform", False)), events, pinned)
    except StateError:
        raise
    except (TypeError, ValueError, IndexError, KeyError) as err:
        raise StateError(f"malformed state document: {err}") from None


def encode_state(state: ViewState) -> str:
    """Deterministic URL-safe token for a state; inverse of decode_state."""
    doc = json.dumps(state.canonical(), sort_keys=True, separators=(",", ":"))
    packed = zlib.compress(doc.encode("utf-8"), level=9)
    token = base64.urlsafe_b64encode(packed).decode("ascii").rstrip("=")
    if len(token) > MAX_TOKEN_CHARS:
        raise StateError(f"state too large: token would be {len(token)} chars")
    return token


def decode_state(token: str) -> ViewState:
    """Recover the state from a token; any tampering raises StateError."""
    if not token or len(token) > MAX_TOKEN_CHARS:
        raise StateError("token empty or oversized")
    try:
        padded = token + "=" * (-len(token) % 4)
        packed = base64.urlsafe_b64decode(padded.encode("ascii"))
        inflater = zlib.decompressobj()
        doc = inflater.decompress(packed, _MAX_INFLATED)
        if not inflater.eof or inflater.unused_data:
            raise ValueError("truncated or trailing data")
        return state_from_dict(json.loads(doc.decode("utf-8")))
    except StateError:
        raise
    except Exception as err:
        raise StateError(f"undecodable token: {err}") from None
