#!/usr/bin/env python3
"""Writes data/jonny/session.ndjson and its float32 PCM blob.

One face track (the target) talks over a 2 kHz tone, so every frame is
attributed to the other speaker. Run from the repository root.
"""
import json
import math
import struct
from pathlib import Path

RATE = 16000
FRAME = 1024
FRAMES = 16
OUT = Path("data/jonny")


def line(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    frame_ms = 1000 * FRAME // RATE
    with open(OUT / "session.f32", "wb") as blob:
        for i in range(FRAME * FRAMES):
            blob.write(struct.pack("<f", 0.3 * math.sin(2 * math.pi * 2000 * i / RATE)))

    words = "I play video games every night and Black Myth Wukong has me hooked".split()
    rows = [{"type": "header", "sessionId": "jonny-demo", "sampleRateHz": RATE, "frameSize": FRAME,
             "participants": ["jonny"]}]
    rows.append({"type": "cue", "timestampMs": 0, "trackId": "t1", "modality": "Visual",
                 "payload": {"expression.smile": 0.8, "expression.neutral": 0.1}})
    for t, label in [(0, "sofa"), (10, "tv"), (20, "laptop")]:
        rows.append({"type": "cue", "timestampMs": t, "modality": "Environment", "payload": {"object.label": label}})
    rows.append({"type": "cue", "timestampMs": 500, "trackId": "t1", "modality": "Visual",
                 "payload": {"expression.smile": 0.85}})
    for i in range(FRAMES):
        rows.append({"type": "audio_ref", "startMs": i * frame_ms, "path": "session.f32",
                     "offset": i * FRAME, "count": FRAME})
    for k, w in enumerate(words):
        start = 128 + k * 64
        rows.append({"type": "token", "text": w, "startMs": start, "endMs": start + 50})
    with open(OUT / "session.ndjson", "w") as f:
        for r in rows:
            f.write(line(r) + "\n")


if __name__ == "__main__":
    main()
