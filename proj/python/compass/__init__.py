# Copyright 2026 The Compass Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Compartment analysis for fuzzing campaigns.

Reports are plain dicts in the report export format.
"""

import json

from . import _compass
from ._compass import CompassError, dominators, execute, indirect_summary

__all__ = [
    "CompassError",
    "analyze",
    "analyze_files",
    "dominators",
    "evaluate",
    "execute",
    "indirect_summary",
    "render",
    "simulate",
    "still_locked",
    "topk_overlap",
    "whatif",
]


def _dump(report):
    return report if isinstance(report, str) else json.dumps(report)


def analyze(icfg, profiles, callgraph="", labels="", corpus="", max_exec_count=50,
            top_k=20, roots=None):
    if not isinstance(icfg, str):
        icfg = json.dumps(icfg)
    return json.loads(_compass.analyze(icfg, list(profiles), callgraph, labels, corpus,
                                       max_exec_count, top_k, roots))


def analyze_files(icfg_path, profile_paths, callgraph_path="", labels_path="",
                  corpus_path="", max_exec_count=50, top_k=20, roots=None):
    return json.loads(_compass.analyze_files(
        str(icfg_path), [str(p) for p in profile_paths], str(callgraph_path),
        str(labels_path), str(corpus_path), max_exec_count, top_k, roots))


def whatif(report, unlock):
    return json.loads(_compass.whatif(_dump(report), unlock))


def render(report, format="table", columns=None):
    return _compass.render(_dump(report), format, columns)


def still_locked(report, later_profile):
    return _compass.still_locked(_dump(report), later_profile)


def topk_overlap(a, b, k):
    overlap, _ = _compass.topk_overlap(_dump(a), _dump(b), k)
    return overlap


def evaluate(report, candidate):
    return json.loads(_compass.evaluate(_dump(report), _dump(candidate)))


def simulate(spec, seeds, iterations, rng_seed, flags=0, out_dir=""):
    if not isinstance(spec, str):
        spec = json.dumps(spec)
    return _compass.simulate(spec, [bytes(s) for s in seeds], iterations, rng_seed,
                             flags, str(out_dir))
