"""Acceptance suite: every release-gating criterion, one verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict
lines. Tolerances are pinned here and nowhere else.
"""

import json
import math
import os
import subprocess
import sys
import textwrap

import numpy as np

from patchmi import (
    SamplerConfig,
    SceneSpec,
    MetricKind,
    cumulate,
    gaussian_entropy,
    histogram_mi,
    invert_normalize,
    make_grid,
    pmi,
    render,
    score_video,
    segment,
    select,
    shifted_leaky_map,
    shifted_leaky_relu,
)
from patchmi.patches import embed_pair

from helpers import brute_force_histogram_mi, permute_patches

SINGLE_THREAD_BLAS = {
    "OMP_NUM_THREADS": "1",
    "OPENBLAS_NUM_THREADS": "1",
    "MKL_NUM_THREADS": "1",
    "NUMEXPR_NUM_THREADS": "1",
}


def _verdict(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


def test_gaussian_entropy_exactness():
    e1 = gaussian_entropy(np.array([[1.0]]))
    e2 = gaussian_entropy(np.array([[2.0, 1.0], [1.0, 2.0]]))
    d1 = abs(e1 - 1.4189385332)
    d2 = abs(e2 - 3.3871832107)
    _verdict(
        "gaussian-entropy exactness (closed forms, tol 1e-9)",
        d1 <= 1e-9 and d2 <= 1e-9,
        f"d=1 off by {d1:.2e}, d=2 off by {d2:.2e}",
    )


def _oracle_pmi(frame_a, frame_b, grid):
    """PMI recomputed from three independently estimated covariances.

    Shares only the gather step with the implementation; covariance,
    jitter search, and log-determinants are reassembled from scratch via
    slogdet.
    """
    data = embed_pair(frame_a, frame_b, grid).data
    d = grid.dim
    n = data.shape[1]

    def cov_of(rows):
        centered = rows - rows.mean(axis=1, keepdims=True)
        return centered @ centered.T / n

    matrices = [cov_of(data[:d]), cov_of(data[d:]), cov_of(data)]

    def entropy_of(m):
        level = 1e-8
        while level <= 1.5e-2:
            probe = m + np.eye(m.shape[0]) * (level * np.trace(m) / m.shape[0])
            sign, logdet = np.linalg.slogdet(probe)
            if sign > 0:
                try:
                    np.linalg.cholesky(probe)
                    return 0.5 * (m.shape[0] * (math.log(2 * math.pi) + 1) + logdet)
                except np.linalg.LinAlgError:
                    pass
            level *= 10
        raise AssertionError("oracle jitter search failed")

    h_prev, h_curr, h_joint = (entropy_of(m) for m in matrices)
    return h_prev + h_curr - h_joint


def test_pmi_property_suite():
    rng = np.random.default_rng(20240501)
    pairs = 1000
    worst = {
        "symmetry": 0.0,
        "nonnegativity": 0.0,
        "offset": 0.0,
        "scale": 0.0,
        "permutation": 0.0,
        "oracle": 0.0,
    }
    for i in range(pairs):
        r = 2 if i % 2 == 0 else 4
        grid = make_grid(64, 64, 1, r)
        a = rng.random((64, 64, 1))
        b = rng.random((64, 64, 1))
        base = pmi(a, b, grid).value
        scale_ref = max(abs(base), 1e-30)

        swapped = pmi(b, a, grid).value
        worst["symmetry"] = max(worst["symmetry"], abs(base - swapped) / scale_ref)

        worst["nonnegativity"] = max(worst["nonnegativity"], -base)

        offs = pmi(a + 0.7, b - 0.2, grid).value
        worst["offset"] = max(worst["offset"], abs(base - offs))

        s = float(rng.uniform(0.1, 10.0))
        scaled = pmi(s * a, s * b, grid).value
        worst["scale"] = max(worst["scale"], abs(base - scaled))

        perm = rng.permutation(grid.num_patches)
        permuted = pmi(permute_patches(a, grid, perm), permute_patches(b, grid, perm), grid).value
        worst["permutation"] = max(worst["permutation"], abs(base - permuted))

        worst["oracle"] = max(worst["oracle"], abs(base - _oracle_pmi(a, b, grid)))

    checks = [
        ("symmetry rel", worst["symmetry"], 1e-9),
        ("nonnegativity", worst["nonnegativity"], 1e-9),
        ("offset invariance", worst["offset"], 1e-9),
        ("scale invariance", worst["scale"], 1e-6),
        ("patch-permutation", worst["permutation"], 1e-12),
        ("block-oracle equivalence", worst["oracle"], 1e-10),
    ]
    ok = all(value <= tol for _, value, tol in checks)
    detail = ", ".join(f"{name} {value:.2e}<={tol:.0e}" for name, value, tol in checks)
    _verdict(f"PMI property suite ({pairs} random pairs, r in {{2,4}})", ok, detail)


def test_independence_calibration():
    rng = np.random.default_rng(7)
    grid = make_grid(64, 64, 1, 2)
    values = []
    for _ in range(100):
        a = rng.random((64, 64, 1))
        b = rng.random((64, 64, 1))
        values.append(pmi(a, b, grid).value)
    mean = float(np.mean(values))
    _verdict(
        "independence calibration (100 seeds, mean PMI < 0.05 nats)",
        0.0 <= mean < 0.05,
        f"mean {mean:.4f} nats, finite-sample bias d^2/(2N) = {16 / 2048:.4f}",
    )


def test_histogram_mi_oracle():
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(50):
        a = rng.random((16, 16, 1))
        b = np.clip(a + rng.normal(0.0, 0.3, a.shape), 0.0, 1.0)
        worst = max(worst, abs(histogram_mi(a, b, 64) - brute_force_histogram_mi(a, b, 64)))
    quantized = (np.floor(rng.random((16, 16, 1)) * 8) + 0.5) / 8.0
    self_info = histogram_mi(quantized, quantized, 64)
    # Independent H(X): plain Shannon entropy of the marginal bin counts.
    _, counts = np.unique(np.floor(quantized.ravel() * 64), return_counts=True)
    p = counts / counts.sum()
    marginal_entropy = float(-np.sum(p * np.log(p)))
    self_diff = abs(self_info - marginal_entropy)
    _verdict(
        "histogram-MI matches brute-force summation (50 pairs, tol 1e-12)",
        worst <= 1e-12 and self_diff <= 1e-12,
        f"worst pair diff {worst:.2e}, I(X;X)=H(X) diff {self_diff:.2e}",
    )


def test_pipeline_algebra():
    inverted = invert_normalize(np.array([0.0, 2.0, 5.0, 3.0]))
    inversion_ok = np.allclose(inverted, [0.5, 0.3, 0.0, 0.2], atol=1e-12)

    knee = shifted_leaky_map(np.array([0.1]), 0.1, 0.3)[0]
    anchor = shifted_leaky_map(np.array([1.0]), 0.1, 0.3)[0]
    interior = shifted_leaky_map(np.array([0.55]), 0.1, 0.3)[0]
    map_ok = (
        abs(knee - 0.03) <= 1e-12
        and abs(anchor - 1.0) <= 1e-12
        and abs(interior - 0.515) <= 1e-12
    )

    rng = np.random.default_rng(5)
    cdf_ok = True
    for _ in range(50):
        x = rng.random(24)
        cdf = cumulate(shifted_leaky_relu(x / x.sum(), 0.3))
        cdf_ok &= bool(np.all(np.diff(cdf) >= -1e-15)) and cdf[-1] == 1.0

    _verdict(
        "pipeline algebra (inversion example, remap knee/anchor/interior, CDF)",
        inversion_ok and map_ok and cdf_ok,
        f"inverted {np.round(inverted, 3).tolist()}, knee {knee:.4f}, interior {interior:.4f}",
    )


def test_sampler_concentrates_on_motion():
    # The head-of-video convention pins the maximal inverted score to
    # frame 0, so segmentation mass excludes it (the flag shipped for
    # exactly this); see the scoring suite for the plain-pipeline mass
    # property.
    results = []
    for jitter in (0, 2):
        spec = SceneSpec(
            height=64,
            width=64,
            channels=1,
            num_frames=64,
            background="noise",
            sprite_size=24,
            sprite_intensity=1.0,
            sprite_start=(20, 0),
            velocity=(0, 2),
            motion_window=(20, 40),
            camera_jitter=jitter,
            seed=11,
        )
        seq = render(spec)
        cfg = SamplerConfig(patch_size=2, alpha=0.3, exclude_t0_mass=True)
        series = score_video(seq, MetricKind.PMI, cfg)
        seg = segment(series.cdf, 8)
        hits = 0
        for s in range(100):
            indices = select(seg, "random", seed=s).indices
            if sum(1 for i in indices if 20 <= i <= 40) > 3:
                hits += 1
        results.append((jitter, hits))
    ok = all(hits >= 95 for _, hits in results)
    detail = ", ".join(f"jitter {j}: {h}/100 seeds with >3 in-window picks" for j, h in results)
    _verdict("sampler concentrates picks inside the motion window (N=8, alpha=0.3)", ok, detail)


def test_uniform_degeneration():
    ok = True
    worst = 0
    for t, n in [(16, 8), (17, 8), (10, 4), (64, 8), (23, 23)]:
        cdf = np.arange(1, t + 1) / t
        sizes = [hi - lo + 1 for lo, hi in segment(cdf, n).segments]
        spread = max(sizes) - min(sizes)
        worst = max(worst, spread)
        ok &= spread <= 1
    _verdict(
        "uniform scores degrade to uniform segmentation (size spread <= 1, exact)",
        ok,
        f"worst spread {worst}",
    )


def test_performance_budget():
    script = textwrap.dedent(
        """
        import time
        import numpy as np
        from patchmi import make_grid, pmi

        rng = np.random.default_rng(0)
        a = rng.random((224, 224, 3))
        b = np.clip(a + rng.normal(0, 0.05, a.shape), 0, 1)
        grid = make_grid(224, 224, 3, 7)
        pmi(a, b, grid)
        times = []
        for _ in range(15):
            t0 = time.perf_counter()
            pmi(a, b, grid)
            times.append((time.perf_counter() - t0) * 1000)
        times.sort()
        print(times[len(times) // 2])
        """
    )
    env = dict(os.environ, **SINGLE_THREAD_BLAS)
    proc = subprocess.run(
        [sys.executable, "-c", script], capture_output=True, text=True, env=env, timeout=300
    )
    assert proc.returncode == 0, proc.stderr
    median_ms = float(proc.stdout.strip())
    _verdict(
        "performance budget (224x224x3 pair, r=7, single-threaded, <= 45 ms)",
        median_ms <= 45.0,
        f"median {median_ms:.2f} ms over 15 runs",
    )


def test_end_to_end_determinism(tmp_path):
    def run(*args, env_extra=None):
        env = os.environ.copy()
        env.pop("PMI_THREADS", None)
        env.update(SINGLE_THREAD_BLAS)
        if env_extra:
            env.update(env_extra)
        proc = subprocess.run(
            [sys.executable, "-m", "patchmi", *map(str, args)],
            capture_output=True,
            text=True,
            env=env,
            timeout=300,
        )
        assert proc.returncode == 0, proc.stderr

    container = tmp_path / "burst.pmis"
    run(
        "synth", container, "--size", "64x64", "--frames", "64", "--sprite-size", "24",
        "--sprite-start", "20,0", "--velocity", "0,2", "--window", "20,40",
        "--jitter", "2", "--seed", "11",
    )
    outputs = []
    for name, threads in [("a", None), ("b", None), ("one", "1"), ("four", "4")]:
        out = tmp_path / f"{name}.json"
        env_extra = {"PMI_THREADS": threads} if threads else None
        run(
            "select", container, "-n", "8", "--seed", "7", "--mode", "random",
            "--patch-size", "2", "-o", out, env_extra=env_extra,
        )
        outputs.append(out.read_bytes())
    identical = all(blob == outputs[0] for blob in outputs)
    indices = json.loads(outputs[0])["indices"]
    _verdict(
        "end-to-end determinism (same bytes across runs and pool sizes)",
        identical,
        f"4 runs byte-identical, indices {indices}",
    )
