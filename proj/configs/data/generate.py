#!/usr/bin/env python3
# Copyright 2026 The polchip Authors
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

"""Writes the synthetic waveguide polarimetry series used by birefringence.json.

B = 7e-5, fast axis along TE (theta = 0), 806 nm, lengths 6/12/18/24 mm. Each file holds the
six-by-six projection intensities (1 + s_out . s_proj) / 2.
"""

import math
import pathlib

B = 7e-5
WAVELENGTH = 806e-9
THETA = 0.0
LENGTHS_MM = (6, 12, 18, 24)

STOKES = {
    "H": (1, 0, 0), "V": (-1, 0, 0),
    "P": (0, 1, 0), "M": (0, -1, 0),
    "L": (0, 0, 1), "R": (0, 0, -1),
}


def mueller3(delta, theta):
    c, s = math.cos(2 * theta), math.sin(2 * theta)
    cd, sd = math.cos(delta), math.sin(delta)
    return (
        (c * c + s * s * cd, s * c * (1 - cd), -s * sd),
        (s * c * (1 - cd), s * s + c * c * cd, c * sd),
        (s * sd, -c * sd, cd),
    )


def main():
    out_dir = pathlib.Path(__file__).parent
    for length in LENGTHS_MM:
        delta = 2 * math.pi * B * length * 1e-3 / WAVELENGTH
        m = mueller3(delta, THETA)
        lines = ["input_state,projection,intensity"]
        for name_in, s_in in STOKES.items():
            s_out = [sum(m[r][k] * s_in[k] for k in range(3)) for r in range(3)]
            for name_pr, s_pr in STOKES.items():
                val = 0.5 * (1 + sum(a * b for a, b in zip(s_out, s_pr)))
                lines.append(f"{name_in},{name_pr},{max(val, 0.0):.17g}")
        (out_dir / f"waveguide_{length:02d}mm.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
