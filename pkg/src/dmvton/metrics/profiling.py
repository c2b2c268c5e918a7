"""Efficiency profiling: FLOPs, parameters, latency, memory.

FLOPs come from per-layer closed forms applied during one traced forward
pass (forward hooks on every module). One multiply-accumulate counts as
2 FLOPs. Composite modules contribute only their glue arithmetic (their
children are hooked individually); a leaf module with no registered rule
raises, naming the class.
"""

from __future__ import annotations

import json
import math
import statistics
import time
from dataclasses import dataclass, field

import numpy as np
import torch
import torch.nn as nn

from ..nets.blocks import (
    InvertedResidual,
    ModulatedConv2d,
    TryOnHead,
    UpsampleFlow,
    WarpLayer,
)
from ..nets.flow import FlowEstimator
from ..nets.fpn import _FPNBase
from ..nets.teacher import TeacherNetwork


def _numel(t) -> int:
    return int(t.numel())


def _conv2d_flops(mod: nn.Conv2d, inputs, output) -> int:
    kh, kw = mod.kernel_size
    cin = mod.in_channels // mod.groups
    per_out = 2 * cin * kh * kw
    flops = per_out * _numel(output)
    if mod.bias is not None:
        flops += _numel(output)
    return flops


def _linear_flops(mod: nn.Linear, inputs, output) -> int:
    rows = _numel(output) // mod.out_features
    flops = 2 * mod.in_features * mod.out_features * rows
    if mod.bias is not None:
        flops += _numel(output)
    return flops


def _modulated_conv_flops(mod: ModulatedConv2d, inputs, output) -> int:
    k2 = mod.kernel_size * mod.kernel_size
    conv = 2 * mod.in_ch * k2 * _numel(output) + _numel(output)
    batch = output.shape[0]
    modulation = 3 * batch * mod.out_ch * mod.in_ch * k2
    return conv + modulation


def _upsample_flops(mod: nn.Upsample, inputs, output) -> int:
    return 11 * _numel(output) if mod.mode == "bilinear" else 0


def _elementwise(factor: int):
    def rule(mod, inputs, output):
        return factor * _numel(output)

    return rule


def _pool_flops(mod, inputs, output) -> int:
    return _numel(inputs[0])


def _zero(mod, inputs, output) -> int:
    return 0


def _inverted_residual_flops(mod: InvertedResidual, inputs, output) -> int:
    return _numel(output) if mod.use_residual else 0


def _tryon_head_flops(mod: TryOnHead, inputs, output) -> int:
    rendered, mask, composed = output
    return 4 * _numel(composed) + _numel(mask)


def _fpn_flops(mod: _FPNBase, inputs, output) -> int:
    # top-down merge adds at every level but the coarsest
    return sum(_numel(level) for level in output[1:])


def _flow_estimator_flops(mod: FlowEstimator, inputs, output) -> int:
    # residual additions onto the upsampled flow at every refined level
    return sum(_numel(level) for level in output[1:])


def _teacher_glue_flops(mod: TeacherNetwork, inputs, output) -> int:
    # preserved-region arithmetic: (1 - channel) and the 3-channel product
    person = inputs[2]
    return 4 * person.shape[0] * person.shape[-2] * person.shape[-1]


_RULES: dict[type, object] = {
    nn.Conv2d: _conv2d_flops,
    nn.Linear: _linear_flops,
    nn.InstanceNorm2d: _elementwise(8),
    nn.GroupNorm: _elementwise(8),
    nn.ReLU: _elementwise(1),
    nn.ReLU6: _elementwise(1),
    nn.LeakyReLU: _elementwise(1),
    nn.SiLU: _elementwise(1),
    nn.Tanh: _elementwise(1),
    nn.Sigmoid: _elementwise(1),
    nn.Identity: _zero,
    nn.Flatten: _zero,
    nn.Sequential: _zero,
    nn.Upsample: _upsample_flops,
    nn.AdaptiveAvgPool2d: _pool_flops,
    WarpLayer: _elementwise(11),
    UpsampleFlow: _elementwise(12),
    ModulatedConv2d: _modulated_conv_flops,
    InvertedResidual: _inverted_residual_flops,
    TryOnHead: _tryon_head_flops,
    _FPNBase: _fpn_flops,
    FlowEstimator: _flow_estimator_flops,
    TeacherNetwork: _teacher_glue_flops,
}


def _rule_for(module: nn.Module):
    for cls in type(module).__mro__:
        if cls in _RULES:
            return _RULES[cls]
    return None


def _first_tensor(output):
    if isinstance(output, torch.Tensor):
        return output
    if isinstance(output, (tuple, list)):
        for item in output:
            t = _first_tensor(item)
            if t is not None:
                return t
    return None


def _make_inputs(input_shape) -> tuple[torch.Tensor, ...]:
    if input_shape and isinstance(input_shape[0], (tuple, list)):
        return tuple(torch.zeros((1, *shape)) for shape in input_shape)
    return (torch.zeros((1, *input_shape)),)


class _Tracer:
    def __init__(self, count_flops: bool = True):
        self.count_flops = count_flops
        self.total_flops = 0
        self.peak_live_bytes = 0
        self.events: list[tuple[str, int]] = []

    def hook(self, module, inputs, output):
        tensors_in = [t for t in inputs if isinstance(t, torch.Tensor)]
        out_t = _first_tensor(output)
        live = sum(_numel(t) for t in tensors_in)
        if isinstance(output, torch.Tensor):
            live += _numel(output)
        elif isinstance(output, (tuple, list)):
            live += sum(_numel(t) for t in output if isinstance(t, torch.Tensor))
        self.peak_live_bytes = max(self.peak_live_bytes, 4 * live)
        if not self.count_flops:
            return
        rule = _rule_for(module)
        if rule is None:
            if len(module._modules) == 0:
                raise ValueError(
                    f"unsupported layer type for FLOPs counting: {type(module).__qualname__}"
                )
            return  # composite with hooked children; no glue registered
        flops = int(rule(module, inputs, output))
        self.total_flops += flops
        self.events.append((type(module).__qualname__, flops))
        del out_t


def _trace(model: nn.Module, input_shape, count_flops: bool = True) -> _Tracer:
    tracer = _Tracer(count_flops)
    handles = [m.register_forward_hook(tracer.hook) for m in model.modules()]
    try:
        was_training = model.training
        model.eval()
        with torch.no_grad():
            model(*_make_inputs(input_shape))
        if was_training:
            model.train()
    finally:
        for h in handles:
            h.remove()
    return tracer


def count_flops(model: nn.Module, input_shape) -> int:
    """Total FLOPs of one forward pass at the given (unbatched) input shape(s)."""
    return _trace(model, input_shape).total_flops


def count_params(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())


def memory_estimate(model: nn.Module, input_shape) -> int:
    """Bytes: f32 weights plus the largest per-layer live activation footprint."""
    tracer = _trace(model, input_shape, count_flops=False)
    return 4 * count_params(model) + tracer.peak_live_bytes


@dataclass(frozen=True)
class LatencyStats:
    mean: float
    median: float
    p95: float

    def to_json(self) -> dict:
        return {"mean": self.mean, "median": self.median, "p95": self.p95}


def benchmark_latency(
    model: nn.Module, inputs, warmup: int = 3, iters: int = 20, seed: int = 0
) -> LatencyStats:
    """Wall-clock forward latency in ms, single-threaded, warmup excluded."""
    if warmup < 1:
        raise ValueError("warmup must be >= 1")
    if iters < 3:
        raise ValueError("iters must be >= 3")
    if isinstance(inputs, torch.Tensor):
        inputs = (inputs,)
    torch.manual_seed(seed)
    prev_threads = torch.get_num_threads()
    torch.set_num_threads(1)
    try:
        model.eval()
        with torch.no_grad():
            for _ in range(warmup):
                model(*inputs)
            times = []
            for _ in range(iters):
                start = time.perf_counter()
                model(*inputs)
                times.append((time.perf_counter() - start) * 1000.0)
    finally:
        torch.set_num_threads(prev_threads)
    return LatencyStats(
        mean=float(statistics.fmean(times)),
        median=float(statistics.median(times)),
        p95=float(np.percentile(times, 95)),
    )


@dataclass
class ProfileRow:
    name: str
    params: int
    flops: int
    latency_ms: LatencyStats
    memory_mb: float

    def __post_init__(self):
        if min(self.params, self.flops) < 0 or self.memory_mb < 0:
            raise ValueError("profile values must be non-negative")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "flops": self.flops,
            "latency_ms": self.latency_ms.to_json(),
            "memory_mb": self.memory_mb,
        }


def profile_model(
    name: str, model: nn.Module, input_shape, warmup: int = 2, iters: int = 5, seed: int = 0
) -> ProfileRow:
    return ProfileRow(
        name=name,
        params=count_params(model),
        flops=count_flops(model, input_shape),
        latency_ms=benchmark_latency(model, _make_inputs(input_shape), warmup, iters, seed),
        memory_mb=memory_estimate(model, input_shape) / (1024 * 1024),
    )


def comparison_report(
    rows: list[ProfileRow],
    quality: dict | None = None,
    env: dict | None = None,
) -> tuple[str, dict]:
    """Aligned text table plus machine-readable JSON, Table-1 column order."""
    if not rows:
        raise ValueError("need at least one profile row")
    doc: dict = {"rows": [r.to_json() for r in rows]}
    if quality:
        doc["quality"] = {k: v for k, v in quality.items() if v is not None}
    doc["env"] = env or {"device": "cpu", "threads": torch.get_num_threads()}

    by_name = {r.name: r for r in rows}
    if "student" in by_name and "teacher" in by_name:
        s, t = by_name["student"], by_name["teacher"]
        doc["ratio"] = {
            "params": s.params / t.params if t.params else math.nan,
            "flops": s.flops / t.flops if t.flops else math.nan,
            "latency_ms": s.latency_ms.mean / t.latency_ms.mean if t.latency_ms.mean else math.nan,
            "memory_mb": s.memory_mb / t.memory_mb if t.memory_mb else math.nan,
        }

    headers = ["model", "params (M)", "FLOPs (B)", "runtime mean/med/p95 (ms)", "memory (MB)"]
    lines = []
    for r in rows:
        lines.append(
            [
                r.name,
                f"{r.params / 1e6:.3f}",
                f"{r.flops / 1e9:.3f}",
                f"{r.latency_ms.mean:.2f}/{r.latency_ms.median:.2f}/{r.latency_ms.p95:.2f}",
                f"{r.memory_mb:.2f}",
            ]
        )
    widths = [max(len(h), *(len(row[i]) for row in lines)) for i, h in enumerate(headers)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    text = "\n".join([fmt.format(*headers)] + [fmt.format(*row) for row in lines])
    if "quality" in doc:
        text += "\nquality: " + "  ".join(f"{k}={v:.6f}" for k, v in doc["quality"].items())
    if "ratio" in doc:
        text += (
            f"\nstudent/teacher: params {doc['ratio']['params']:.3f}"
            f"  flops {doc['ratio']['flops']:.3f}"
            f"  latency {doc['ratio']['latency_ms']:.3f}"
            f"  memory {doc['ratio']['memory_mb']:.3f}"
        )
    return text, doc


def write_report(path, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
