# Copyright 2026 The scvsafe Authors
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

"""Writes ndd_action_golden.json: naturalistic action distributions of the
built-in synthetic driver model at fixed probe states, computed from the model
definition without using the C++ library."""
import json
import math
from pathlib import Path

GRID = [-4.0 + 6.0 * k / 30 for k in range(31)]
SD, FLOOR = 0.6, 2e-4
BASE, GAIN, CAP, MIN_GAP = 1e-5, 40.0, 0.5, 8.0


def gaussian_row(mean):
    raw = [math.exp(-0.5 * ((a - mean) / SD) ** 2) + FLOOR for a in GRID]
    total = sum(raw)
    return [r / total for r in raw]


def bin_centre(lo, width, count, x):
    i = min(max(math.floor((x - lo) / width), 0), count - 1)
    return lo + width * (i + 0.5)


def clamp(x, lo, hi):
    return min(max(x, lo), hi)


def distribution(v_bv, r1, r1_dot, r2, r2_dot, lane):
    if lane == "left":
        c_r1 = bin_centre(0.0, 5.0, 24, r1)
        c_r1_dot = bin_centre(-10.0, 1.0, 20, r1_dot)
        row = gaussian_row(clamp(0.4 * c_r1_dot + 0.05 * (c_r1 - 30.0), -3.5, 1.5))
        cut = 0.0
        if r2 > 0.0:
            c_r2 = bin_centre(0.0, 2.0, 60, r2)
            closing = max(0.0, -bin_centre(-20.0, 1.0, 30, r2_dot))
            p = min(CAP, BASE * (1.0 + GAIN * closing / max(c_r2 - 5.0, 1.0)))
            cut = 0.0 if c_r2 < MIN_GAP else p
    else:
        c_v = bin_centre(0.0, 2.0, 25, v_bv)
        row = gaussian_row(clamp(0.2 * (30.0 - c_v), -2.0, 1.5))
        cut = 0.0
    return [(1.0 - cut) * r for r in row] + [cut]


PROBES = [
    (30.0, 30.0, 0.0, 60.0, -7.5, "left"),
    (25.3, 12.1, -3.4, 21.7, -9.2, "left"),
    (33.0, 95.0, 4.2, 9.1, -18.5, "left"),
    (28.0, 47.5, 1.1, 7.2, -12.0, "left"),
    (36.4, 130.0, -12.0, 140.0, 5.0, "left"),
    (31.0, 8.0, -0.5, -2.0, -1.0, "left"),
    (22.2, 30.0, 0.0, 15.0, -4.0, "right"),
    (41.7, 30.0, 0.0, 3.0, 2.0, "right"),
    (0.4, 30.0, 0.0, 50.0, 0.0, "right"),
]

cases = []
for v_bv, r1, r1_dot, r2, r2_dot, lane in PROBES:
    cases.append({
        "state": {"v_bv": v_bv, "r1": r1, "r1_dot": r1_dot, "r2": r2, "r2_dot": r2_dot, "lane": lane},
        "distribution": distribution(v_bv, r1, r1_dot, r2, r2_dot, lane),
    })
out = Path(__file__).with_name("ndd_action_golden.json")
out.write_text(json.dumps({"accel_grid": GRID, "cases": cases}, indent=1) + "\n")
