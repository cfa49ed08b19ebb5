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
import json
import math

import numpy as np
import pytest

import bnfdsp


def test_quantize_examples():
    assert bnfdsp.quantize(0.37, 8, True, 0.01) == 37
    assert bnfdsp.quantize(-5.0, 8, True, 0.01) == -128
    assert bnfdsp.quantize(1.0, 4, False, 1 / 15) == 15
    assert bnfdsp.dequantize(-128, 8, True, 0.01) == pytest.approx(-1.28)
    with pytest.raises(ValueError):
        bnfdsp.quantize(math.nan, 8, True, 0.01)


def test_qmf_shapes_and_silence():
    assert bnfdsp.num_frames(16000) == 98
    q = bnfdsp.compute_qmf(np.zeros(16000, dtype=np.int16))
    assert q.shape == (98, 32) and q.dtype == np.uint16
    assert not q.any()
    pcm = bnfdsp.synthetic_signal(16000, seed=3)
    assert bnfdsp.compute_qmf(pcm, n_mel_bins=16).shape == (98, 16)
    lm = bnfdsp.log_mel(pcm)
    codes = bnfdsp.compute_qmf(pcm)
    assert np.max(np.abs(codes / 1024.0 - np.minimum(lm, 65535 / 1024))) <= 0.5 / 1024 + 1e-12


def test_pack_unpack_roundtrip():
    rng = np.random.default_rng(0)
    for bits in (1, 2, 4, 8, 16):
        codes = rng.integers(0, 2**bits, size=(37, 12), dtype=np.int32)
        data = bnfdsp.pack(codes, bits, stride_product=2, frame_period_us=20000)
        assert data[:4] == b"BNFC"
        assert len(data) == 16 + (37 * 12 * bits + 7) // 8
        back, header = bnfdsp.unpack(data)
        np.testing.assert_array_equal(back, codes)
        assert header["bandwidth_kbps"] == pytest.approx(12 * bits / 20, rel=1e-12)
    assert bnfdsp.pack(np.array([[3], [10]]), 4)[16:] == b"\xa3"
    with pytest.raises(bnfdsp.DataError):
        bnfdsp.unpack(bnfdsp.pack(np.array([[3], [10]]), 4)[:-1])


def test_budget_table():
    rows = {r["name"]: r for r in bnfdsp.budget_table()}
    assert rows["qmf-deltas"]["bandwidth_display"] == "154"
    assert rows["qmf-deltas"]["bandwidth_exact"] == (768, 5)
    assert rows["best-1/10"]["weights_count"] == 512
    assert rows["best-1/64"]["weights_count"] == 1536
    assert bnfdsp.bandwidth_kbps(8, 4, 10, 4) == pytest.approx(0.8)


def test_extractor_preset_and_weight_file():
    assert "best-1/10" in bnfdsp.preset_names()
    ex = bnfdsp.Extractor.from_preset("best-1/20")
    assert ex.weight_count == 512
    assert ex.total_stride == 2 and ex.receptive_field == 4
    q = bnfdsp.compute_qmf(bnfdsp.synthetic_signal(16000, seed=1))
    out = ex.run(q.astype(np.int32))
    assert out.shape == ((98 - 4) // 2 + 1, 12)
    assert out.min() >= 0 and out.max() <= 15
    dev = np.abs(out * ex.output_scale - ex.reference(q.astype(np.int32)))
    assert dev.max() <= ex.bound() + 1e-9

    doc = json.loads(ex.to_json())
    assert doc["version"] == 1
    again = bnfdsp.Extractor.from_json(json.dumps(doc))
    np.testing.assert_array_equal(again.run(q.astype(np.int32)), out)
    doc["layers"][0]["dw_scale"] = "0.5x"
    with pytest.raises(bnfdsp.DataError):
        bnfdsp.Extractor.from_json(json.dumps(doc))
    with pytest.raises(ValueError):
        ex.run(np.zeros((10, 24), dtype=np.int32))
