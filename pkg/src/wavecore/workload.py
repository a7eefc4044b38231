"""Convolution lowering, tile scheduling, and throughput/energy roll-up.

Convolutions lower to matrix-vector products: each output position's
receptive field flattens to a length k*k*c_in input vector, kernels stack
into a (k*k*c_in) x c_out weight matrix. A 3x3 kernel's nine taps map onto
one nine-wavelength row group, so a core with G groups accepts G input
channels per pass for 3x3 layers. Larger layers tile across row and column
passes with digital partial-sum accumulation.

The dataflow is weight-stationary: each (row-tile, column-tile) block is
written to the array once per inference (one full write cycle, all cells in
parallel), then every output position streams through at the symbol clock.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .catalog import DeviceCatalog, PcmSpec
from .linkbudget import CoreGeometry
from .power import PowerReport, vcsel_program_energy

_TOL_REL = 1e-9

# Calibrated operating clock of the reference 144x256 design point: the symbol
# rate at which that core's peak throughput is 342.1 TOPS. Above the tabulated
# modulator ceiling, so runs at this profile opt in to overclocking.
PARETO_CLOCK_HZ = 342.1e12 / (2 * 144 * 256)
DEFAULT_CLOCK_HZ = 1e9


@dataclass(frozen=True)
class ConvLayerSpec:
    """Shape of one lowered layer. ``kind='other'`` marks non-MVM ops
    (pooling, classifier heads) that are carried for completeness, charged
    zero photonic time, and flagged in reports."""

    name: str
    c_in: int = 1
    c_out: int = 1
    kernel: int = 1
    h_out: int = 1
    w_out: int = 1
    stride: int = 1
    kind: str = "conv"

    def __post_init__(self) -> None:
        if self.kind not in ("conv", "other"):
            raise ValueError(f"{self.name}: kind must be 'conv' or 'other', got {self.kind!r}")
        if self.kind == "other":
            return
        if self.kernel not in (1, 3):
            raise ValueError(f"{self.name}: unsupported kernel size {self.kernel} (supported: 1, 3)")
        for field_name in ("c_in", "c_out", "h_out", "w_out", "stride"):
            if getattr(self, field_name) < 1:
                raise ValueError(f"{self.name}: {field_name} must be >= 1")

    @property
    def positions(self) -> int:
        return self.h_out * self.w_out

    @property
    def weight_count(self) -> int:
        return self.kernel * self.kernel * self.c_in * self.c_out


@dataclass(frozen=True)
class LoweredDims:
    """Lowered shape of one conv layer on a given core."""

    rows: int
    cols: int
    positions: int
    tiles_row: int
    tiles_col: int
    channels_per_pass: int
    utilization: float


def lower_conv(layer: ConvLayerSpec, geom: CoreGeometry, *, pack_pointwise: bool = False) -> LoweredDims:
    """Lowered dimensions and row-tiling for one conv layer.

    3x3 layers use all nine taps of a wavelength group, so one pass covers
    one input channel per group. 1x1 layers occupy a single tap per group by
    default (utilization 1/9, reported); ``pack_pointwise`` instead packs
    nine channels onto each group's nine taps, which is how the bundled
    network profiles are scheduled.
    """
    if layer.kind != "conv":
        raise ValueError(f"{layer.name}: only conv layers lower to the array")
    taps = layer.kernel * layer.kernel
    if layer.kernel == 1 and pack_pointwise:
        channels_per_pass = geom.groups * geom.wavelengths_per_group
    else:
        channels_per_pass = geom.groups
    tiles_row = -(-layer.c_in // channels_per_pass)
    tiles_col = -(-layer.c_out // geom.cols)
    rows = taps * layer.c_in
    active_rows_last = (layer.c_in - (tiles_row - 1) * channels_per_pass) * taps
    used = (tiles_row - 1) * channels_per_pass * taps + active_rows_last
    utilization = used / (tiles_row * geom.rows)
    return LoweredDims(
        rows=rows,
        cols=layer.c_out,
        positions=layer.positions,
        tiles_row=tiles_row,
        tiles_col=tiles_col,
        channels_per_pass=channels_per_pass,
        utilization=utilization,
    )


@dataclass(frozen=True)
class LayerSchedule:
    layer: ConvLayerSpec
    lowered: LoweredDims | None
    tile_loads: int
    stream_cycles: int
    programmed_cells: int

    @property
    def flagged(self) -> bool:
        return self.lowered is None


@dataclass(frozen=True)
class TileSchedule:
    """Per-layer tile walk for one inference pass of a workload."""

    geometry: CoreGeometry
    entries: tuple[LayerSchedule, ...]
    pack_pointwise: bool

    @property
    def total_tile_loads(self) -> int:
        return sum(e.tile_loads for e in self.entries)

    @property
    def total_stream_cycles(self) -> int:
        return sum(e.stream_cycles for e in self.entries)

    @property
    def total_programmed_cells(self) -> int:
        return sum(e.programmed_cells for e in self.entries)

    @property
    def flagged_ops(self) -> tuple[str, ...]:
        return tuple(e.layer.name for e in self.entries if e.flagged)

    @property
    def macs(self) -> int:
        return sum(e.programmed_cells * e.layer.positions for e in self.entries if not e.flagged)


def schedule(
    workload: Sequence[ConvLayerSpec],
    geom: CoreGeometry,
    pcm: PcmSpec,
    *,
    pack_pointwise: bool = True,
) -> TileSchedule:
    """Weight-stationary tile walk: each tile is written once, then streams
    all of its layer's output positions.

    Every (row-tile, column-tile) block takes one full write cycle
    (``pcm.cycle_time_ns``), writing exactly the block's weights; stream time
    is positions x tiles at the symbol clock. Pointwise packing defaults on
    here because the bundled network profiles are scheduled packed; pass
    ``pack_pointwise=False`` for the one-tap-per-group mapping.
    """
    if not workload:
        raise ValueError("workload is empty")
    entries = []
    for layer in workload:
        if layer.kind != "conv":
            entries.append(LayerSchedule(layer, None, 0, 0, 0))
            continue
        dims = lower_conv(layer, geom, pack_pointwise=pack_pointwise)
        loads = dims.tiles_row * dims.tiles_col
        entries.append(
            LayerSchedule(
                layer=layer,
                lowered=dims,
                tile_loads=loads,
                stream_cycles=loads * dims.positions,
                programmed_cells=layer.weight_count,
            )
        )
    return TileSchedule(geometry=geom, entries=tuple(entries), pack_pointwise=pack_pointwise)


def peak_tops(geom: CoreGeometry, f_hz: float) -> float:
    """Peak throughput in TOPS: 2 ops (multiply + add) per cell per cycle."""
    if f_hz <= 0.0:
        raise ValueError(f"f_hz must be > 0, got {f_hz!r}")
    return 2.0 * geom.cells * f_hz / 1e12


@dataclass(frozen=True)
class PerfReport:
    """Latency, throughput, and energy roll-up for one inference.

    Energy is reported split: ``energy_steady_j`` is steady power times
    latency; ``energy_program_j`` is the electrical write-pulse energy for
    every cell written during the tile walk; ``energy_erase_j`` is the
    matching erase-pulse energy, carried as a separate reconfiguration line.
    The headline ``energy_per_inference_j`` is steady + program;
    ``energy_with_erase_j`` folds the erase line in for the conservative
    reading.
    """

    latency_s: float
    fps: float
    peak_tops: float
    tops_per_w: float
    fps_per_w: float
    energy_per_inference_j: float
    energy_steady_j: float
    energy_program_j: float
    energy_erase_j: float
    energy_with_erase_j: float
    total_power_w: float
    f_hz: float
    tile_loads: int
    stream_cycles: int
    programmed_cells: int
    flagged_ops: tuple[str, ...]

    def __post_init__(self) -> None:
        checks = (
            (self.fps * self.latency_s, 1.0),
            (self.tops_per_w * self.total_power_w, self.peak_tops),
            (self.fps_per_w * self.total_power_w, self.fps),
        )
        for got, want in checks:
            if not math.isclose(got, want, rel_tol=_TOL_REL):
                raise ValueError(f"perf identities violated: {got} != {want}")

    def to_jsonable(self) -> dict:
        return {
            "latency_s": self.latency_s,
            "fps": self.fps,
            "peak_tops": self.peak_tops,
            "tops_per_w": self.tops_per_w,
            "fps_per_w": self.fps_per_w,
            "energy_per_inference_mj": self.energy_per_inference_j * 1e3,
            "energy_steady_mj": self.energy_steady_j * 1e3,
            "energy_program_mj": self.energy_program_j * 1e3,
            "energy_erase_mj": self.energy_erase_j * 1e3,
            "energy_with_erase_mj": self.energy_with_erase_j * 1e3,
            "total_power_w": self.total_power_w,
            "f_hz": self.f_hz,
            "tile_loads": self.tile_loads,
            "stream_cycles": self.stream_cycles,
            "programmed_cells": self.programmed_cells,
            "flagged_ops": list(self.flagged_ops),
        }


def estimate_perf(
    sched: TileSchedule,
    power: PowerReport,
    f_hz: float,
    cat: DeviceCatalog,
    *,
    allow_overclock: bool = False,
) -> PerfReport:
    """Latency/throughput/energy for one inference of a scheduled workload.

    latency = tile_loads * write_cycle + stream_cycles / f. Write energy per
    cell converts the optical program/erase pulses to electrical emitter
    energy through the vertical coupler loss and emitter efficiency.
    """
    if f_hz <= 0.0:
        raise ValueError(f"f_hz must be > 0, got {f_hz!r}")
    if not sched.entries:
        raise ValueError("schedule is empty")
    if f_hz > cat.modulator.max_rate_hz and not allow_overclock:
        raise ValueError(
            f"f = {f_hz:.3g} Hz exceeds the modulator ceiling {cat.modulator.max_rate_hz:.3g} Hz "
            "(pass allow_overclock to run anyway)"
        )

    pcm = cat.pcm
    latency = sched.total_tile_loads * pcm.cycle_time_ns * 1e-9 + sched.total_stream_cycles / f_hz
    if latency <= 0.0:
        raise ValueError("workload has no photonic work to schedule")
    fps = 1.0 / latency

    gc_loss = cat.loss_db("grating_coupler")
    program_j = sched.total_programmed_cells * vcsel_program_energy(
        pcm.program_energy_pj, gc_loss, cat.vcsel.efficiency
    ) * 1e-12
    erase_j = sched.total_programmed_cells * vcsel_program_energy(
        pcm.erase_energy_pj, gc_loss, cat.vcsel.efficiency
    ) * 1e-12
    steady_j = power.total_w * latency

    peak = peak_tops(sched.geometry, f_hz)
    return PerfReport(
        latency_s=latency,
        fps=fps,
        peak_tops=peak,
        tops_per_w=peak / power.total_w,
        fps_per_w=fps / power.total_w,
        energy_per_inference_j=steady_j + program_j,
        energy_steady_j=steady_j,
        energy_program_j=program_j,
        energy_erase_j=erase_j,
        energy_with_erase_j=steady_j + program_j + erase_j,
        total_power_w=power.total_w,
        f_hz=f_hz,
        tile_loads=sched.total_tile_loads,
        stream_cycles=sched.total_stream_cycles,
        programmed_cells=sched.total_programmed_cells,
        flagged_ops=sched.flagged_ops,
    )


# ---------------------------------------------------------------------------
# Workload definitions
# ---------------------------------------------------------------------------

def resnet50_workload(input_hw: int = 256) -> tuple[ConvLayerSpec, ...]:
    """Conv layer shapes of a 50-layer bottleneck residual network.

    The stem is carried as a 3x3 convolution (the array maps 1x1 and 3x3
    kernels), strides follow the v1.5 convention (stride on the 3x3), and
    pooling/classifier stages are flagged non-photonic entries.
    """
    if input_hw % 32 != 0:
        raise ValueError("input_hw must be divisible by 32")
    layers: list[ConvLayerSpec] = []
    s = input_hw // 2  # after stem stride 2
    layers.append(ConvLayerSpec("conv1", 3, 64, 3, s, s, 2))
    s //= 2  # after 3x3/2 max pool
    layers.append(ConvLayerSpec("maxpool", kind="other"))

    stage_channels = (64, 128, 256, 512)
    stage_blocks = (3, 4, 6, 3)
    c_in = 64
    for stage_idx, (c_mid, blocks) in enumerate(zip(stage_channels, stage_blocks), start=1):
        c_out = 4 * c_mid
        for block in range(blocks):
            stride = 2 if (stage_idx > 1 and block == 0) else 1
            s_in = s
            s_out = s // stride
            prefix = f"layer{stage_idx}.{block}"
            layers.append(ConvLayerSpec(f"{prefix}.conv1", c_in, c_mid, 1, s_in, s_in, 1))
            layers.append(ConvLayerSpec(f"{prefix}.conv2", c_mid, c_mid, 3, s_out, s_out, stride))
            layers.append(ConvLayerSpec(f"{prefix}.conv3", c_mid, c_out, 1, s_out, s_out, 1))
            if block == 0:
                layers.append(ConvLayerSpec(f"{prefix}.downsample", c_in, c_out, 1, s_out, s_out, stride))
            c_in = c_out
            s = s_out
    layers.append(ConvLayerSpec("avgpool", kind="other"))
    layers.append(ConvLayerSpec("fc", kind="other"))
    return tuple(layers)


_BUNDLED_WORKLOADS = {"resnet50": lambda: resnet50_workload(256)}


def workload_to_jsonable(layers: Iterable[ConvLayerSpec]) -> list[dict]:
    out = []
    for layer in layers:
        entry = {"name": layer.name, "kind": layer.kind}
        if layer.kind == "conv":
            entry.update(
                c_in=layer.c_in, c_out=layer.c_out, kernel=layer.kernel,
                h_out=layer.h_out, w_out=layer.w_out, stride=layer.stride,
            )
        out.append(entry)
    return out


def load_workload(ref: str) -> tuple[ConvLayerSpec, ...]:
    """Resolve a workload reference: a bundled name or a JSON file path.

    The file format is a JSON list of layer objects with the
    :class:`ConvLayerSpec` fields (``kind`` defaults to ``conv``).
    """
    if ref in _BUNDLED_WORKLOADS:
        return _BUNDLED_WORKLOADS[ref]()
    path = Path(ref)
    if not path.exists():
        raise ValueError(f"workload {ref!r} is neither a bundled name {sorted(_BUNDLED_WORKLOADS)} nor a file")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"workload file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, list):
        raise ValueError("workload file must contain a JSON list of layers")
    layers = []
    for i, raw in enumerate(data):
        if not isinstance(raw, dict) or "name" not in raw:
            raise ValueError(f"workload entry {i} must be an object with a 'name'")
        try:
            layers.append(ConvLayerSpec(**raw))
        except TypeError as exc:
            raise ValueError(f"workload entry {i}: {exc}") from None
    return tuple(layers)
