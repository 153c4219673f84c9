# Copyright 2026 The rtspfuzz Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Freezes reference embeddings for a handful of strings."""

import json
import sys

from hash_embed import counts

TEXTS = [
    "a",
    "PLAY",
    "play",
    "SETUP rtsp://example.com/movie RTSP/1.0",
    "PAUSE keeps the resources of the session allocated.",
    "Session: 000022B8",
    "café – bytes above ascii",
]

out = []
for t in TEXTS:
    c = counts(t)
    out.append({"text": t, "nonzero": {str(i): x for i, x in enumerate(c) if x}, "norm2": sum(x * x for x in c)})
json.dump({"dims": 256, "seed": 0x5EED, "cases": out}, sys.stdout, indent=1, ensure_ascii=False)
sys.stdout.write("\n")
