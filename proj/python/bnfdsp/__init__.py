# Copyright 2026 The bnfdsp Authors.
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
"""Fixed-point mel features, bottleneck extractor and .bnfc caches."""

from bnfdsp._bnfdsp import (
    DataError,
    Extractor,
    bandwidth_kbps,
    budget_table,
    compute_qmf,
    dequantize,
    log_mel,
    num_frames,
    pack,
    preset_names,
    quantize,
    synthetic_signal,
    unpack,
)

__all__ = [
    "DataError",
    "Extractor",
    "bandwidth_kbps",
    "budget_table",
    "compute_qmf",
    "dequantize",
    "log_mel",
    "num_frames",
    "pack",
    "preset_names",
    "quantize",
    "synthetic_signal",
    "unpack",
]
