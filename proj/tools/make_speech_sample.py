#!/usr/bin/env python3
# Copyright 2026 The nlpc Authors.
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
"""Generates the bundled 8 kHz speech-like test corpus.

Voiced segments come from a source-filter model whose vocal-tract recursion
passes through a saturating, slightly asymmetric nonlinearity; unvoiced
segments are noise through a linear formant filter. Two synthetic talkers
(low and high pitch) share one file. Output is deterministic for a seed.
"""

import argparse
import wave

import numpy as np

FS = 8000


def formant_ar(formants, bandwidths, fs=FS):
    """Predictor coefficients a_i (x[n] = sum a_i x[n-i] + ...) for a pole set."""
    poly = np.array([1.0])
    for f, bw in zip(formants, bandwidths):
        r = np.exp(-np.pi * bw / fs)
        theta = 2 * np.pi * f / fs
        poly = np.convolve(poly, [1.0, -2 * r * np.cos(theta), r * r])
    return -poly[1:]


def bend(z, depth, gain, skew):
    """Compressive, slightly asymmetric correction to the linear prediction.

    Zero value and zero slope at the origin; the slope of z + bend(z) stays
    within [1 - depth * gain * s'(skew), 1], so the recursion never gains
    loop gain beyond its linear part.
    """
    s0 = 1.0 / (1.0 + np.exp(-skew))
    d0 = s0 * (1.0 - s0)
    return depth * (1.0 / (1.0 + np.exp(-(gain * z + skew))) - s0 - gain * d0 * z)


def glottal_pulse(period, open_q=0.6, close_q=0.25):
    """Rosenberg flow pulse differentiated once (radiated flow derivative)."""
    n = max(int(period), 4)
    t_open = max(int(open_q * n), 2)
    t_close = max(int(close_q * n), 1)
    g = np.zeros(n)
    k = np.arange(t_open)
    g[:t_open] = 0.5 * (1 - np.cos(np.pi * k / t_open))
    k = np.arange(t_close)
    g[t_open:t_open + t_close] = np.cos(0.5 * np.pi * k / t_close)
    return np.diff(np.concatenate([[0.0], g]))


def voiced(rng, dur, f0, formants, bandwidths, amp, depth, gain, skew):
    n = int(dur * FS)
    a0 = formant_ar(formants[0], bandwidths)
    a1 = formant_ar(formants[1], bandwidths)
    order = len(a0)
    # excitation: pulse train with vibrato and jitter plus weak aspiration
    u = np.zeros(n + 400)
    t = 0.0
    while t < n:
        period = FS / (f0 * (1.0 + 0.06 * np.sin(2 * np.pi * 3.0 * t / FS))) * (1 + 0.01 * rng.standard_normal())
        p = glottal_pulse(period)
        i = int(t)
        u[i:i + len(p)] += p
        t += period
    u = u[:n]
    for t in range(1, n):  # extra spectral tilt
        u[t] += TILT * u[t - 1]
    u = u / np.max(np.abs(u)) + 0.01 * rng.standard_normal(n)
    env = np.minimum(1.0, np.minimum(np.arange(n) / (0.03 * FS), (n - np.arange(n)) / (0.03 * FS)))
    u *= env

    def run(scale, nonlinear):
        y = np.zeros(n + order)
        for t in range(n):
            frac = t / max(n - 1, 1)
            a = (1 - frac) * a0 + frac * a1
            lin = float(np.dot(a, y[t : t + order][::-1]))
            y[t + order] = lin + (bend(lin, depth, gain, skew) if nonlinear else 0.0) + scale * u[t]
        return y[order:]

    # level the linear response to the scripted loudness
    scale = amp / np.sqrt(np.mean(run(1.0, False) ** 2))
    return run(scale, True)


def unvoiced(rng, dur, amp):
    n = int(dur * FS)
    a = formant_ar([2500.0, 3400.0], [400.0, 500.0])
    e = rng.standard_normal(n) * amp
    env = np.minimum(1.0, np.minimum(np.arange(n) / (0.02 * FS), (n - np.arange(n)) / (0.02 * FS)))
    y = np.zeros(n + len(a))
    for t in range(n):
        y[t + len(a)] = np.dot(a, y[t : t + len(a)][::-1]) + e[t] * env[t]
    return y[len(a):]


AMP, DEPTH, GAIN, SKEW, TILT = 0.15, 0.12, 10.0, 0.5, 0.85

VOWELS = {
    "a": [700.0, 1220.0, 2600.0, 3300.0],
    "i": [280.0, 2250.0, 2890.0, 3500.0],
    "u": [310.0, 870.0, 2250.0, 3300.0],
    "e": [530.0, 1840.0, 2480.0, 3400.0],
    "o": [500.0, 1000.0, 2400.0, 3300.0],
}


def talker(rng, f0, scale, script):
    bw = [80.0, 100.0, 140.0, 200.0]
    parts = []
    for kind, arg, dur, level_db in script:
        if kind == "sil":
            parts.append(0.0008 * rng.standard_normal(int(dur * FS)))
        elif kind == "uv":
            parts.append(unvoiced(rng, dur, 0.02))
        else:
            v0, v1 = arg
            fa = [min(f * scale, 3700.0) for f in VOWELS[v0]]
            fb = [min(f * scale, 3700.0) for f in VOWELS[v1]]
            amp = AMP * 10.0 ** (level_db / 20.0)
            parts.append(voiced(rng, dur, f0, (fa, fb), bw, amp, DEPTH, GAIN, SKEW))
    return np.concatenate(parts)


# (kind, vowels, seconds, level in dB relative to AMP); levels mimic syllable stress
SCRIPT = [
    ("sil", None, 0.12, 0), ("v", ("a", "e"), 0.42, 0), ("uv", None, 0.12, 0), ("v", ("i", "i"), 0.30, -8),
    ("sil", None, 0.08, 0), ("v", ("o", "u"), 0.38, -4), ("uv", None, 0.10, 0), ("v", ("e", "a"), 0.40, -12),
    ("sil", None, 0.10, 0), ("v", ("u", "o"), 0.30, -6), ("uv", None, 0.12, 0), ("v", ("a", "i"), 0.36, -2),
    ("sil", None, 0.15, 0),
]


def main():
    global DEPTH, GAIN, SKEW, TILT
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("output")
    parser.add_argument("--seed", type=int, default=1997)
    parser.add_argument("--depth", type=float, default=DEPTH)
    parser.add_argument("--gain", type=float, default=GAIN)
    parser.add_argument("--skew", type=float, default=SKEW)
    parser.add_argument("--tilt", type=float, default=TILT)
    args = parser.parse_args()
    DEPTH, GAIN, SKEW, TILT = args.depth, args.gain, args.skew, args.tilt
    rng = np.random.default_rng(args.seed)
    x = np.concatenate([talker(rng, 110.0, 1.0, SCRIPT), talker(rng, 215.0, 1.15, SCRIPT)])
    x = 0.9 * x / np.max(np.abs(x))
    pcm = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(args.output, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(FS)
        w.writeframes(pcm.tobytes())
    print(f"{args.output}: {len(x) / FS:.2f} s")


if __name__ == "__main__":
    main()
