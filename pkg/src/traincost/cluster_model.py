"""Closed-form time-to-train and cost-to-train on a failing cluster.

The model combines four effects:

* interrupts: component failures are independent and exponential, so the
  whole system interrupts at rate  n_gpus/gpu_mtbf + n_cpus/cpu_mtbf;
* fault containment: the job is split into G data-parallel groups and
  tolerates F failed groups before it must roll back (K-out-of-N);
* checkpointing: periodic state saves of duration delta, placed at the
  first-order optimal (Young/Daly) interval  tau = sqrt(2 * delta * M);
* serialization: an Amdahl-style sequential fraction across groups caps
  the usable parallelism.

The expected wall-clock is a first-order waste formula

    wall = (solve + n_ckpt * delta) / (1 - (tau/2 + ttr) / M_eff)

which degenerates gracefully to the failure-free time, and signals a
NoProgress regime when the expected loss per interrupt reaches the
effective mean time to interrupt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .scaling_laws import (
    HOURS_TO_SECONDS,
    CostRates,
    ModelSpec,
    ScalingConstants,
    dollar_cost,
    moe_training_flops,
)

STATUS_OK = "OK"
STATUS_NO_PROGRESS = "NoProgress"


@dataclass(frozen=True)
class ClusterSpec:
    """A training system: GPU count, reliability, checkpoint I/O and prices."""

    n_gpus: int
    gpus_per_cpu: int = 4
    gpu_mtbf_h: float = 950_000.0
    cpu_mtbf_h: float = 1_500_000.0
    gpu_mem_gb: float = 80.0
    fs_bw_gbs: float = 500.0
    gpus_per_group: int = 512
    rates: CostRates = field(default_factory=CostRates)

    def __post_init__(self):
        if self.n_gpus < 1:
            raise ValueError("n_gpus must be >= 1")
        if self.gpus_per_cpu < 1:
            raise ValueError("gpus_per_cpu must be >= 1")
        if self.gpu_mtbf_h <= 0 or self.cpu_mtbf_h <= 0:
            raise ValueError("MTBFs must be > 0")
        if self.fs_bw_gbs <= 0:
            raise ValueError("fs_bw_gbs must be > 0")
        if self.gpus_per_group < 1:
            raise ValueError("gpus_per_group must be >= 1")


@dataclass(frozen=True)
class ResilienceConfig:
    """A resilience strategy: checkpoint volume, F-out-of-G tolerance, recovery."""

    ckpt_mem_fraction: float = 1.0
    tolerated_group_failures: int = 0
    group_count_cap: int = 100
    ttr_h: float = 2.0
    seq_fraction: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.ckpt_mem_fraction <= 1.0:
            raise ValueError("ckpt_mem_fraction must lie in (0, 1]")
        if self.tolerated_group_failures < 0:
            raise ValueError("tolerated_group_failures must be >= 0")
        if self.group_count_cap < 1:
            raise ValueError("group_count_cap must be >= 1")
        if self.tolerated_group_failures >= self.group_count_cap:
            raise ValueError("tolerated_group_failures must be < group_count_cap")
        if self.ttr_h < 0:
            raise ValueError("ttr_h must be >= 0")
        if not 0.0 <= self.seq_fraction < 1.0:
            raise ValueError("seq_fraction must lie in [0, 1)")


@dataclass(frozen=True)
class RunBreakdown:
    """Where the wall-clock of one training run goes, plus its price."""

    solve_h: float
    ckpt_overhead_h: float
    expected_rework_h: float
    expected_restart_h: float
    wall_h: float
    gpu_hours: float
    gpu_dollars: float
    cloud_dollars: float
    status: str = STATUS_OK

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


@dataclass(frozen=True)
class SweepVariant:
    """A named resilience strategy for system-size sweeps.

    fs_bw_gbs optionally overrides the cluster template's checkpoint
    filesystem bandwidth; provisioning faster checkpoint storage is part
    of the strategy, not of the machine being swept.
    """

    name: str
    resilience: ResilienceConfig
    fs_bw_gbs: float | None = None


# Optimized supercomputing configuration: 2 TB/s checkpoint storage, half
# the state saved, five failed groups ridden out.
OPTIMIZED_FS_BW_GBS = 2000.0
OPTIMIZED_CKPT_MEM_FRACTION = 0.5
OPTIMIZED_GROUP_FAILURES = 5


def optimized_variant(base: ResilienceConfig, name: str = "optimized") -> SweepVariant:
    """The optimized counterpart of a baseline resilience strategy."""
    res = replace(
        base,
        ckpt_mem_fraction=OPTIMIZED_CKPT_MEM_FRACTION,
        tolerated_group_failures=OPTIMIZED_GROUP_FAILURES,
    )
    return SweepVariant(name, res, fs_bw_gbs=OPTIMIZED_FS_BW_GBS)


def system_mtti(cluster: ClusterSpec) -> float:
    """Mean time to interrupt of the whole system, in hours.

    Failures are independent and exponential, so rates add:
    lambda = n_gpus/gpu_mtbf + ceil(n_gpus/gpus_per_cpu)/cpu_mtbf.
    """
    n_cpus = -(-cluster.n_gpus // cluster.gpus_per_cpu)
    rate = cluster.n_gpus / cluster.gpu_mtbf_h + n_cpus / cluster.cpu_mtbf_h
    return math.inf if rate == 0.0 else 1.0 / rate


def group_count(cluster: ClusterSpec, resilience: ResilienceConfig) -> int:
    """Number of data-parallel groups: floor(n/group_size), capped, at least 1."""
    return min(
        resilience.group_count_cap,
        max(1, cluster.n_gpus // cluster.gpus_per_group),
    )


def parallel_efficiency(groups: int, seq_fraction: float) -> float:
    """Amdahl-style efficiency across groups: 1 / (1 + s*(G - 1))."""
    if groups < 1:
        raise ValueError("groups must be >= 1")
    if not 0.0 <= seq_fraction < 1.0:
        raise ValueError("seq_fraction must lie in [0, 1)")
    return 1.0 / (1.0 + seq_fraction * (groups - 1))


def checkpoint_write_time(cluster, resilience: ResilienceConfig) -> float:
    """Hours to write one checkpoint of the configured memory fraction."""
    volume_gb = cluster.n_gpus * cluster.gpu_mem_gb * resilience.ckpt_mem_fraction
    return volume_gb / (cluster.fs_bw_gbs * HOURS_TO_SECONDS)


def effective_mtti(mtti_h: float, tolerated_failures: int) -> float:
    """Mean time to a job-level interrupt when F group failures are tolerated.

    An interrupt needs F+1 accumulated failures, each assumed to disable a
    distinct group; repairs between checkpoints are neglected in this
    closed form (the event simulator models them).
    """
    if tolerated_failures < 0:
        raise ValueError("tolerated_failures must be >= 0")
    return (tolerated_failures + 1) * mtti_h


def optimal_checkpoint_interval(delta_h: float, m_eff_h: float, solve_h: float) -> float:
    """First-order optimal checkpoint period, clamped to the solve time."""
    if delta_h < 0:
        raise ValueError("delta_h must be >= 0")
    if m_eff_h <= 0:
        raise ValueError("m_eff_h must be > 0")
    if solve_h <= 0:
        raise ValueError("solve_h must be > 0")
    if delta_h == 0.0:
        return solve_h
    return min(math.sqrt(2.0 * delta_h * m_eff_h), solve_h)


def checkpoint_count(solve_h: float, tau_h: float) -> int:
    """Interior checkpoints written during solve_h of work at interval tau_h."""
    return max(0, math.ceil(solve_h / tau_h) - 1)


def solve_hours(
    model: ModelSpec,
    constants: ScalingConstants,
    cluster: ClusterSpec,
    resilience: ResilienceConfig,
) -> float:
    """Failure-free, checkpoint-free hours of work for one training run."""
    flops = moe_training_flops(model, constants)
    eta = parallel_efficiency(group_count(cluster, resilience), resilience.seq_fraction)
    return flops / (
        cluster.n_gpus
        * cluster.rates.sustained_flops_per_gpu
        * eta
        * HOURS_TO_SECONDS
    )


def runtime_from_solve(
    solve_h: float, cluster: ClusterSpec, resilience: ResilienceConfig
) -> RunBreakdown:
    """Expected wall-clock breakdown for a run of solve_h ideal hours."""
    if solve_h <= 0:
        raise ValueError("solve_h must be > 0")
    delta = checkpoint_write_time(cluster, resilience)
    m_eff = effective_mtti(system_mtti(cluster), resilience.tolerated_group_failures)
    tau = optimal_checkpoint_interval(delta, m_eff, solve_h)
    n_ckpt = checkpoint_count(solve_h, tau)
    ckpt_overhead = n_ckpt * delta

    # Expected loss per interrupt (half a segment of rework plus recovery)
    # as a fraction of the effective MTTI.
    availability = 1.0 - (tau / 2.0 + resilience.ttr_h) / m_eff
    if availability <= 0.0:
        inf = math.inf
        return RunBreakdown(
            solve_h=solve_h,
            ckpt_overhead_h=ckpt_overhead,
            expected_rework_h=inf,
            expected_restart_h=inf,
            wall_h=inf,
            gpu_hours=inf,
            gpu_dollars=inf,
            cloud_dollars=inf,
            status=STATUS_NO_PROGRESS,
        )

    base = solve_h + ckpt_overhead
    wall = base / availability
    inflation = wall - base
    loss_per_interrupt = tau / 2.0 + resilience.ttr_h
    if inflation > 0.0 and loss_per_interrupt > 0.0:
        rework = inflation * (tau / 2.0) / loss_per_interrupt
    else:
        rework = 0.0
    restart = inflation - rework

    gpu_hours = wall * cluster.n_gpus
    gpu_dollars, cloud_dollars = dollar_cost(gpu_hours, cluster.rates)
    return RunBreakdown(
        solve_h=solve_h,
        ckpt_overhead_h=ckpt_overhead,
        expected_rework_h=rework,
        expected_restart_h=restart,
        wall_h=wall,
        gpu_hours=gpu_hours,
        gpu_dollars=gpu_dollars,
        cloud_dollars=cloud_dollars,
    )


def expected_runtime(
    model: ModelSpec,
    constants: ScalingConstants,
    cluster: ClusterSpec,
    resilience: ResilienceConfig,
) -> RunBreakdown:
    """Expected time and cost to train one model on a failing cluster."""
    return runtime_from_solve(
        solve_hours(model, constants, cluster, resilience), cluster, resilience
    )


def sweep_system_size(
    model: ModelSpec,
    constants: ScalingConstants,
    cluster_template: ClusterSpec,
    variants: list[SweepVariant],
    n_gpus_list: list[int],
) -> list[tuple[int, str, RunBreakdown]]:
    """Evaluate every (system size, strategy) cell of a time-to-train sweep.

    NoProgress cells are returned as data, not raised.
    """
    if not n_gpus_list:
        raise ValueError("n_gpus_list must be non-empty")
    if any(b <= a for a, b in zip(n_gpus_list, n_gpus_list[1:])):
        raise ValueError("n_gpus_list must be strictly ascending")
    if not variants:
        raise ValueError("variants must be non-empty")

    rows = []
    for n_gpus in n_gpus_list:
        for variant in variants:
            cluster = replace(cluster_template, n_gpus=n_gpus)
            if variant.fs_bw_gbs is not None:
                cluster = replace(cluster, fs_bw_gbs=variant.fs_bw_gbs)
            breakdown = expected_runtime(model, constants, cluster, variant.resilience)
            rows.append((n_gpus, variant.name, breakdown))
    return rows
