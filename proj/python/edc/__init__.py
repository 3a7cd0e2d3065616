# Copyright 2026 The edc-kg Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Python entry points for the edc knowledge-graph toolkit.

The heavy lifting lives in the native ``_edc`` module; this package re-exports
it and adds a thin ``run`` helper around the command runner.
"""

from __future__ import annotations

from typing import Sequence

from ._edc import (
    evaluate,
    info_nce_loss,
    normalize_relation,
    parse_triplets,
    redundancy_score,
    run_cli,
    score,
    tokenize_element,
    top_k,
)

__all__ = [
    "CommandError",
    "evaluate",
    "info_nce_loss",
    "normalize_relation",
    "parse_triplets",
    "redundancy_score",
    "run",
    "run_cli",
    "score",
    "tokenize_element",
    "top_k",
]


class CommandError(RuntimeError):
    def __init__(self, code: int, stderr: str):
        super().__init__(f"edc exited with {code}: {stderr.strip()}")
        self.code = code
        self.stderr = stderr


def run(*args: str | Sequence[str]) -> str:
    """Run an edc subcommand and return its stdout; raise CommandError on failure."""
    flat: list[str] = []
    for a in args:
        flat.extend([a] if isinstance(a, str) else list(a))
    code, out, err = run_cli([str(a) for a in flat])
    if code != 0:
        raise CommandError(code, err)
    return out
