# -*- coding: utf-8 -*-
"""Seeded experiments behind the command-line subcommands.

Trial i always uses seed base_seed + i, so any single trial can be rerun on
its own. Trials may run on a thread pool; records come back ordered by trial
index, so outputs do not depend on scheduling.
"""

import concurrent.futures
import csv
import logging
import math
import typing

import numpy as np
from scipy import stats  # type: ignore

import bounds
import generators
import matcore
import matrix_io
import oracle
import rotate
import sketch
from errors import DomainError
from matcore import DenseMatrix

logger = logging.getLogger(__name__)

MODES = ("sketch", "bound", "verify-theorem1", "verify-lemma2", "coherence", "moments")
DEFAULT_T_GRID = (math.log(20.0), math.log(100.0))

T = typing.TypeVar("T")
Tracker = typing.Callable[[typing.Iterable[T], str], typing.Iterable[T]]


def untracked(items: typing.Iterable[T], description: str) -> typing.Iterable[T]:
    del description
    return items


class ExperimentConfig(typing.NamedTuple):
    """Everything one subcommand needs.

    A matrix comes from its file when a path is given and from the named
    generator otherwise. Without --b, B is A when A came from a file and a
    fresh generator draw of d_b rows otherwise.
    """

    mode: str
    a_path: typing.Optional[str] = None
    b_path: typing.Optional[str] = None
    generator: str = "gaussian"
    d_a: int = 16
    d_b: int = 16
    m: int = 256
    rank: int = 4
    n: typing.Optional[int] = None
    trials: int = 100
    delta: float = 0.1
    eps: typing.Optional[float] = None
    seed: int = 0
    gen_seed: typing.Optional[int] = None
    out: typing.Optional[str] = None
    t_grid: typing.Tuple[float, ...] = DEFAULT_T_GRID
    threads: int = 1
    k: typing.Optional[float] = None
    identity: bool = False


def validate(config: ExperimentConfig) -> ExperimentConfig:
    """Checks the settings every mode shares.

    Raises:
        DomainError: describing the first invalid setting.
    """
    if config.mode not in MODES:
        raise DomainError(f"unknown mode {config.mode!r}")
    if config.trials < 1:
        raise DomainError(f"trials must be at least 1, got {config.trials}")
    if config.threads < 1:
        raise DomainError(f"threads must be at least 1, got {config.threads}")
    if config.n is not None and config.n < 1:
        raise DomainError(f"n must be at least 1, got {config.n}")
    if config.eps is not None and config.eps <= 0:
        raise DomainError(f"eps must be positive, got {config.eps}")
    if config.mode in ("verify-theorem1", "coherence", "bound") and not 0 < config.delta < 1 / 3:
        raise DomainError(f"delta must lie in (0, 1/3), got {config.delta}")
    if any(t <= 0 for t in config.t_grid):
        raise DomainError("every t in the grid must be positive")
    rotate.check_seed(config.seed)
    rotate.check_seed(config.seed + config.trials - 1)
    return config


def _generated(config: ExperimentConfig, stream: int, rows: int) -> DenseMatrix:
    gen_seed = config.seed if config.gen_seed is None else config.gen_seed
    rng = np.random.default_rng([gen_seed, stream])
    return generators.generate(config.generator, rows, config.m, config.rank, rng)


def resolve_matrix_a(config: ExperimentConfig) -> DenseMatrix:
    """Loads or generates A alone, for modes that never look at B."""
    if config.a_path:
        return matrix_io.load_matrix(config.a_path)
    return _generated(config, 1, config.d_a)


def resolve_matrices(config: ExperimentConfig) -> typing.Tuple[DenseMatrix, DenseMatrix]:
    """Loads or generates the pair (A, B)."""
    matrix_a = resolve_matrix_a(config)
    if config.b_path:
        matrix_b = matrix_io.load_matrix(config.b_path)
    elif config.a_path:
        matrix_b = matrix_a
    else:
        matrix_b = _generated(config, 2, config.d_b)
    if matrix_a.shape[1] != matrix_b.shape[1]:
        raise DomainError(
            f"A has {matrix_a.shape[1]} columns but B has {matrix_b.shape[1]}"
        )
    return matrix_a, matrix_b


def run_trials(
    trial: typing.Callable[[int], T],
    config: ExperimentConfig,
    track: Tracker,
    description: str,
) -> typing.List[T]:
    """Runs trial(0..trials-1), on a pool when threads > 1, in index order."""
    indices = range(config.trials)
    if config.threads == 1:
        return [trial(index) for index in track(indices, description)]
    with concurrent.futures.ThreadPoolExecutor(max_workers=config.threads) as pool:
        return list(track(pool.map(trial, indices), description))


def binomial_upper_edge(probability: float, trials: int, level: float = 0.99) -> float:
    """Upper edge, as a fraction, of the central `level` binomial interval."""
    return float(stats.binom.ppf((1.0 + level) / 2.0, trials, probability)) / trials


def write_records(path: str, records: typing.Sequence[typing.Any]) -> None:
    """Writes records as CSV with a header of their field names.

    Floats carry 17 significant digits and booleans read true/false, so equal
    runs give byte-identical files.
    """

    def cell(value: typing.Any) -> str:
        if isinstance(value, (bool, np.bool_)):
            return "true" if value else "false"
        if isinstance(value, (float, np.floating)):
            return matrix_io.format_float(value)
        return str(value)

    with open(path, "w", encoding="utf-8", newline="") as stream:
        writer = csv.writer(stream)
        if records:
            writer.writerow(records[0]._fields)
        for record in records:
            writer.writerow([cell(value) for value in record])


def normalized_mu(
    a_rot: DenseMatrix, b_rot: DenseMatrix, norm_a: float, norm_b: float
) -> matcore.CoherenceReport:
    return matcore.coherence(matcore.dense(a_rot / norm_a), matcore.dense(b_rot / norm_b))


# VERIFY-THEOREM1


class TrialRecord(typing.NamedTuple):
    trial_index: int
    seed: int
    rel_spectral_error: float
    rel_frobenius_error: float
    bound_value: float
    exceeded: bool
    mu_observed: float


class Theorem1Summary(typing.NamedTuple):
    k: float
    m_padded: int
    n: int
    delta: float
    bound: float
    records: typing.List[TrialRecord]
    exceedance_fraction: float
    conditional_exceedances: int
    quantiles: typing.Dict[str, float]
    mean_error: float
    mean_frobenius_error: float
    passed: bool


def sample_count(config: ExperimentConfig, k: float, m_padded: int) -> int:
    """--n when given, otherwise required_n for --eps."""
    if config.n is not None:
        return config.n
    if config.eps is None:
        raise DomainError("give either --n or --eps")
    return bounds.required_n(k, m_padded, config.delta, config.eps)


def run_verify_theorem1(
    config: ExperimentConfig, track: Tracker = untracked
) -> Theorem1Summary:
    """Compares sketch errors over many seeds with the (1 - delta) bound."""
    validate(config)
    matrix_a, matrix_b = resolve_matrices(config)
    k = matcore.stable_rank_k(matrix_a, matrix_b)
    m_padded = rotate.next_power_of_two(matrix_a.shape[1])
    n = sample_count(config, k, m_padded)
    bound = bounds.theorem1_bound(k, m_padded, n, config.delta).relative_error_bound
    exact = matcore.matmul_exact(matrix_a, matrix_b)
    scales = sketch.error_scales(matrix_a, matrix_b)
    norm_a = matcore.spectral_norm(matrix_a)
    norm_b = matcore.spectral_norm(matrix_b)
    logger.debug("verify-theorem1: k=%g m=%d n=%d bound=%g", k, m_padded, n, bound)

    def trial(index: int) -> TrialRecord:
        seed = config.seed + index
        estimate, plan = sketch.approx_matmul(matrix_a, matrix_b, n, seed)
        a_rot = rotate.apply_rotation(matrix_a, plan.rotation)
        b_rot = rotate.apply_rotation(matrix_b, plan.rotation)
        spectral, frobenius = sketch.relative_errors(estimate, exact, scales)
        return TrialRecord(
            trial_index=index,
            seed=seed,
            rel_spectral_error=spectral,
            rel_frobenius_error=frobenius,
            bound_value=bound,
            exceeded=spectral > bound,
            mu_observed=normalized_mu(a_rot, b_rot, norm_a, norm_b).mu,
        )

    records = run_trials(trial, config, track, "Sketching trials...")
    errors = np.array([record.rel_spectral_error for record in records])
    exceedances = sum(record.exceeded for record in records)
    conditional = sum(
        record.rel_spectral_error
        > bounds.conditional_bound(record.mu_observed, k, n, config.delta).relative_error_bound
        for record in records
    )
    fraction = exceedances / len(records)
    return Theorem1Summary(
        k=k,
        m_padded=m_padded,
        n=n,
        delta=config.delta,
        bound=bound,
        records=records,
        exceedance_fraction=fraction,
        conditional_exceedances=int(conditional),
        quantiles={
            f"{int(level * 100)}%": float(np.quantile(errors, level))
            for level in (0.5, 0.9, 0.99)
        },
        mean_error=float(errors.mean()),
        mean_frobenius_error=float(np.mean([record.rel_frobenius_error for record in records])),
        passed=fraction <= config.delta,
    )


# VERIFY-LEMMA2


class Lemma2Record(typing.NamedTuple):
    trial_index: int
    seed: int
    max_col_sqnorm: float
    mu_observed: float


class Lemma2Row(typing.NamedTuple):
    t: float
    threshold: float
    exceedances: int
    exceedance_fraction: float
    tail_probability: float
    allowed_fraction: float
    passed: bool


class Lemma2Summary(typing.NamedTuple):
    k_z: float
    m_padded: int
    baseline_max_col_sqnorm: float
    records: typing.List[Lemma2Record]
    rows: typing.List[Lemma2Row]
    passed: bool


def run_verify_lemma2(config: ExperimentConfig, track: Tracker = untracked) -> Lemma2Summary:
    """Checks the per-column mass bound on a fixed Z over fresh sign draws.

    Z^T is the normalized A, so max_i ||Z^T Theta e_i||^2 is the largest
    squared column norm of A Theta / ||A||.
    """
    validate(config)
    matrix_z = resolve_matrix_a(config)
    normalized, _ = matcore.normalize(matrix_z)
    k_z = matcore.frobenius_norm(normalized) ** 2
    baseline = rotate.apply_rotation(normalized, rotate.identity_rotation(normalized.shape[1]))
    m_padded = baseline.shape[1]

    def trial(index: int) -> Lemma2Record:
        seed = config.seed + index
        rotation = rotate.make_rotation(normalized.shape[1], seed)
        largest = float(np.square(rotate.apply_rotation(normalized, rotation)).sum(axis=0).max())
        return Lemma2Record(
            trial_index=index, seed=seed, max_col_sqnorm=largest, mu_observed=m_padded * largest
        )

    records = run_trials(trial, config, track, "Drawing signs...")
    observed = np.array([record.max_col_sqnorm for record in records])
    rows = []
    for t in sorted(config.t_grid):
        threshold = bounds.lemma2_bound(k_z, m_padded, t)
        exceedances = int(np.count_nonzero(observed > threshold))
        fraction = exceedances / len(records)
        allowed = binomial_upper_edge(math.exp(-t), len(records))
        rows.append(
            Lemma2Row(
                t=t,
                threshold=threshold,
                exceedances=exceedances,
                exceedance_fraction=fraction,
                tail_probability=math.exp(-t),
                allowed_fraction=allowed,
                passed=fraction <= allowed,
            )
        )
    return Lemma2Summary(
        k_z=k_z,
        m_padded=m_padded,
        baseline_max_col_sqnorm=float(np.square(baseline).sum(axis=0).max()),
        records=records,
        rows=rows,
        passed=all(row.passed for row in rows),
    )


# COHERENCE


class CoherenceRecord(typing.NamedTuple):
    draw_index: int
    seed: int
    mu: float
    k_a: float
    k_b: float


class CoherenceSummary(typing.NamedTuple):
    k: float
    m_padded: int
    baseline: matcore.CoherenceReport
    records: typing.List[CoherenceRecord]
    mu_min: float
    mu_median: float
    mu_max: float
    threshold: float
    above_threshold: int
    passed: bool


def run_coherence(config: ExperimentConfig, track: Tracker = untracked) -> CoherenceSummary:
    """mu for the unrotated pair and for `trials` rotated draws.

    The draws should exceed the threshold k + 2 sqrt(k ln(3m/delta)) +
    2 ln(3m/delta) in at most a 2 delta / 3 fraction of cases.
    """
    validate(config)
    matrix_a, matrix_b = resolve_matrices(config)
    k = matcore.stable_rank_k(matrix_a, matrix_b)
    norm_a = matcore.spectral_norm(matrix_a)
    norm_b = matcore.spectral_norm(matrix_b)
    m = matrix_a.shape[1]

    def report_for(rotation: rotate.RotationSpec) -> matcore.CoherenceReport:
        return normalized_mu(
            rotate.apply_rotation(matrix_a, rotation),
            rotate.apply_rotation(matrix_b, rotation),
            norm_a,
            norm_b,
        )

    baseline = report_for(rotate.identity_rotation(m))
    m_padded = baseline.q_col_sqnorms.size
    threshold = bounds.coherence_threshold(k, m_padded, config.delta)

    def trial(index: int) -> CoherenceRecord:
        seed = config.seed + index
        rotation = rotate.identity_rotation(m) if config.identity else rotate.make_rotation(m, seed)
        report = report_for(rotation)
        return CoherenceRecord(
            draw_index=index, seed=seed, mu=report.mu, k_a=report.k_a, k_b=report.k_b
        )

    records = run_trials(trial, config, track, "Rotating...")
    mus = np.array([record.mu for record in records])
    above = int(np.count_nonzero(mus > threshold))
    return CoherenceSummary(
        k=k,
        m_padded=m_padded,
        baseline=baseline,
        records=records,
        mu_min=float(mus.min()),
        mu_median=float(np.median(mus)),
        mu_max=float(mus.max()),
        threshold=threshold,
        above_threshold=above,
        passed=above / len(records) <= 2.0 * config.delta / 3.0,
    )


# SKETCH


class SketchSummary(typing.NamedTuple):
    estimate: DenseMatrix
    n: int
    m_padded: int
    rotation_seconds: float
    accumulation_seconds: float
    rel_spectral_error: float
    rel_frobenius_error: float


def run_sketch(config: ExperimentConfig) -> SketchSummary:
    """One estimate of AB^T with the rotation/accumulation timing split."""
    validate(config)
    matrix_a, matrix_b = resolve_matrices(config)
    m_padded = rotate.next_power_of_two(matrix_a.shape[1])
    if config.n is None and config.eps is not None:
        n = sample_count(config, matcore.stable_rank_k(matrix_a, matrix_b), m_padded)
    elif config.n is None:
        raise DomainError("give either --n or --eps")
    else:
        n = config.n
    estimate, _, timings = sketch.timed_approx_matmul(
        matrix_a, matrix_b, n, config.seed, threads=config.threads
    )
    if config.out:
        matrix_io.save_matrix(config.out, estimate)
    spectral, frobenius = sketch.relative_errors(
        estimate, matcore.matmul_exact(matrix_a, matrix_b), sketch.error_scales(matrix_a, matrix_b)
    )
    return SketchSummary(
        estimate=estimate,
        n=n,
        m_padded=m_padded,
        rotation_seconds=timings.rotation_seconds,
        accumulation_seconds=timings.accumulation_seconds,
        rel_spectral_error=spectral,
        rel_frobenius_error=frobenius,
    )


# BOUND


class BoundSummary(typing.NamedTuple):
    inputs: bounds.BoundInputs
    result: typing.Optional[bounds.BoundResult]
    eps: typing.Optional[float]
    required: typing.Optional[int]


def run_bound(config: ExperimentConfig) -> BoundSummary:
    """theorem1_bound at --n and/or required_n at --eps.

    k comes from --k, or from the matrices when --k is absent.
    """
    validate(config)
    if config.n is None and config.eps is None:
        raise DomainError("give --n, --eps or both")
    if config.k is not None:
        k, m = config.k, config.m
    else:
        matrix_a, matrix_b = resolve_matrices(config)
        k, m = matcore.stable_rank_k(matrix_a, matrix_b), matrix_a.shape[1]
    inputs = bounds.BoundInputs(
        k=k, m=rotate.next_power_of_two(m), n=config.n or 1, delta=config.delta
    )
    return BoundSummary(
        inputs=inputs,
        result=inputs.theorem1() if config.n is not None else None,
        eps=config.eps,
        required=(
            bounds.required_n(inputs.k, inputs.m, inputs.delta, config.eps)
            if config.eps is not None
            else None
        ),
    )


# MOMENTS


class MomentsSummary(typing.NamedTuple):
    report: oracle.MomentReport
    checks: typing.List[oracle.InequalityCheck]
    mean_gap: float
    unbiasedness_gap: typing.Optional[float]
    passed: bool


def run_moments(config: ExperimentConfig) -> MomentsSummary:
    """Exact moment checks on one small normalized (and usually rotated) pair.

    With --n, also enumerates every index tuple and reports the largest entry
    gap between the estimator mean and QR^T.
    """
    validate(config)
    matrix_a, matrix_b = resolve_matrices(config)
    m = matrix_a.shape[1]
    if config.identity:
        rotation = rotate.identity_rotation(m)
    else:
        rotation = rotate.make_rotation(m, config.seed)
    norm_a = matcore.spectral_norm(matrix_a)
    norm_b = matcore.spectral_norm(matrix_b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise DomainError("moments need nonzero A and B")
    matrix_q = matcore.dense(rotate.apply_rotation(matrix_a, rotation) / norm_a)
    matrix_r = matcore.dense(rotate.apply_rotation(matrix_b, rotation) / norm_b)

    report = oracle.exact_moments(matrix_q, matrix_r)
    checks = oracle.verify_lemma1_inequalities(report)
    unbiasedness_gap = None
    if config.n is not None:
        mean = oracle.enumerate_estimator_mean(matrix_q, matrix_r, config.n)
        unbiasedness_gap = float(np.abs(mean - matrix_q @ matrix_r.T).max())
    return MomentsSummary(
        report=report,
        checks=checks,
        mean_gap=float(np.abs(report.outcome_mean - report.m_matrix).max()),
        unbiasedness_gap=unbiasedness_gap,
        passed=all(check.holds for check in checks),
    )
