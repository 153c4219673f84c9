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

"""Regenerates every oracle output and compares it with the frozen fixture."""

import pathlib
import subprocess
import sys

HERE = pathlib.Path(__file__).resolve().parent
FIXTURES = HERE.parent / "fixtures"

PAIRS = {
    "gen_embed_golden.py": "embed_golden.json",
    "gen_retrieval_fixture.py": "retrieval.json",
    "gen_chunking_fixture.py": "chunking.json",
    "plateau_reference.py": "plateau.json",
}

failed = 0
for script, frozen in PAIRS.items():
    out = subprocess.run([sys.executable, str(HERE / script)], cwd=HERE, check=True, capture_output=True).stdout
    same = out == (FIXTURES / frozen).read_bytes()
    print(("ok   " if same else "DIFF ") + frozen)
    failed += not same
sys.exit(1 if failed else 0)
