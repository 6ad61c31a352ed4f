"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one pass/fail line (run with ``pytest -s`` to see them
all).  Expected values are frozen from independent oracles computed in
this module: a literal double-sum for the autoregressive covariance, the
direct class-space expectation for constructed fields, and midpoint
quadrature of sin-quotient characters for the decomposition rule.
"""

import itertools
import math
from contextlib import contextmanager

import numpy as np
import pytest

from dualfield import (
    CovarianceOnDual,
    FiniteClassMeasure,
    NotPositiveDefiniteError,
    ar1_covariance,
    ar1_second_moment_oracle,
    bochner_invert_finite,
    check_hypergroup_stationarity,
    check_stationarity,
    cramer_decompose_finite,
    estimate_covariance,
    heat_kernel_measure,
    heat_kernel_transform,
    is_positive_definite,
    kolmogorov_field,
    ma_covariance,
    ma_second_moment_oracle,
    multiplicity_by_integration,
    simulate_ar1,
    simulate_ma_batch,
    tensor_decompose,
    white_noise,
    white_noise_sequence,
)

LAMBDA_GRID = [0.0, 0.5, -0.5, 0.9, np.exp(1j * math.pi / 4), 1j, 2.0]


@contextmanager
def criterion(tag, title):
    try:
        yield
    except BaseException:
        print(f"acceptance {tag:>3}: FAIL - {title}")
        raise
    print(f"acceptance {tag:>3}: PASS - {title}")


def brute_force_ar1(lam, n1, n2):
    """E(Y_n1 conj(Y_n2)) as the literal double sum over noise indices."""
    total = 0j
    for k in range(n1 + 1):
        for l in range(n2 + 1):
            if n1 - k == n2 - l:
                total += lam**k * np.conj(lam) ** l
    return total


def test_criterion_1_orthogonality_identity(su2, torus, s3, c5, q8):
    with criterion(1, "multiplicity of the neutral label in a (x) b* is exactly the Kronecker delta"):
        windows = [
            (su2, range(9)),
            (torus, range(-8, 9)),
            (s3, s3.labels()),
            (c5, c5.labels()),
            (q8, q8.labels()),
        ]
        for dual, labels in windows:
            for a in labels:
                for b in labels:
                    coeff = tensor_decompose(dual, a, dual.conjugate(b)).coeff(dual.neutral)
                    assert coeff == (1 if a == b else 0)


def test_criterion_2_decomposition_vs_integration(su2):
    with criterion(2, "decomposition rule matches character integration to 1e-6 for a, b <= 12"):
        for a in range(13):
            for b in range(13):
                vec = tensor_decompose(su2, a, b)
                checksum = sum(int(m.real) * su2.dim(k) for k, m in vec.items())
                assert checksum == su2.dim(a) * su2.dim(b)
                for target in range(a + b + 1):
                    integral = multiplicity_by_integration(su2, a, b, target)
                    assert abs(integral - vec.coeff(target).real) < 1e-6


def test_criterion_3_white_noise(su2, s3):
    with criterion(3, "white noise: exact checks at zero violation, Monte Carlo moments, Haar spectrum"):
        z = white_noise(su2, seed=101)
        report = check_stationarity(su2, z.second_moment, range(5))
        assert report.passed and report.max_violation == 0.0
        hyper = check_hypergroup_stationarity(su2, z.second_moment, range(5))
        assert hyper.passed and hyper.max_violation == 0.0

        for pi1, pi2 in [(0, 0), (1, 1), (2, 2), (1, 2), (0, 3)]:
            expected = 1.0 if pi1 == pi2 else 0.0
            est = estimate_covariance(z, pi1, pi2, 200000, seed=7 + pi1 + 3 * pi2)
            assert abs(est.mean - expected) <= max(4 * est.stderr, 0.02)

        zf = white_noise(s3, seed=5)
        phi = CovarianceOnDual.from_function(
            s3, lambda k: zf.second_moment(k, s3.neutral), s3.labels()
        )
        weights = bochner_invert_finite(phi).class_weights
        assert np.abs(weights - [1 / 6, 1 / 2, 1 / 3]).max() < 1e-12


def test_criterion_4_constructed_fields_on_s3(s3):
    with criterion(4, "constructed fields on s3 reproduce the measure transform exactly and pass the check"):
        measures = [
            FiniteClassMeasure.haar(s3),
            FiniteClassMeasure.point_mass_identity(s3),
            FiniteClassMeasure(s3, [0.5, 0.5, 0.0]),
        ]
        for measure in measures:
            field = kolmogorov_field(measure, seed=11)
            for a in s3.labels():
                for b in s3.labels():
                    direct = complex(
                        (
                            measure.class_weights
                            * s3.character(a)
                            * np.conj(s3.character(b))
                        ).sum()
                    )
                    assert abs(field.second_moment(a, b) - direct) < 1e-12
            for label in s3.labels():
                assert abs(field.covariance(label) - measure.fourier(label)) < 1e-12
            assert check_stationarity(s3, field.second_moment, s3.labels()).passed


def test_criterion_5_scattered_decomposition(s3, c3):
    with criterion(5, "scattered decomposition reconstructs fields and scatters orthogonally at 1e-12"):
        for dual in (s3, c3):
            weights_list = [
                dual.haar_class_weights(),
                np.array([0.5, 0.25, 0.25]),
            ]
            for weights in weights_list:
                field = kolmogorov_field(FiniteClassMeasure(dual, weights), seed=3)
                scattered = cramer_decompose_finite(field)
                assert scattered.reconstruction_residual() <= 1e-12
                classes = dual.labels()
                subsets = [
                    set(combo)
                    for k in range(len(classes) + 1)
                    for combo in itertools.combinations(classes, k)
                ]
                for left in subsets:
                    assert abs(
                        scattered.second_moment(left) - scattered.measure_of(left)
                    ) <= 1e-12
                    for right in subsets:
                        if left & right:
                            continue
                        assert abs(scattered.expected_product(left, right)) <= 1e-12


def test_criterion_6_heat_kernel_positivity(su2):
    with criterion(6, "heat transforms are positive on windows and match quadrature to 1e-8"):
        for t in (0.1, 1.0):
            phi = CovarianceOnDual.from_function(
                su2, lambda n: heat_kernel_transform(t, n), range(13)
            )
            report = is_positive_definite(phi, range(7))
            assert report.positive and report.min_eigenvalue >= -1e-10
            measure = heat_kernel_measure(t)
            for n in range(7):
                assert abs(measure.fourier(n) - heat_kernel_transform(t, n)) < 1e-8


def test_criterion_7a_ar1_closed_form():
    with criterion("7a", "autoregressive covariance matches the double-sum oracle to 1e-12"):
        for lam in LAMBDA_GRID:
            for n in range(21):
                for h in range(11):
                    closed = ar1_covariance(lam, n, h)
                    brute = brute_force_ar1(lam, n + h, n)
                    assert abs(closed - brute) < 1e-12


def test_criterion_7b_ar1_rejected_by_decomposable_check(su2):
    with criterion("7b", "lambda = 0.9 recursion rejected by the decomposable check with a (1,1) witness"):
        oracle = ar1_second_moment_oracle(0.9)
        report = check_stationarity(su2, oracle, range(6))
        # Independent discrepancy at the (1, 1) pair: E(Y_1 conj Y_1)
        # against the decomposable sum over the components of 1 (x) 1.
        lhs = brute_force_ar1(0.9, 1, 1)
        rhs = sum(
            mult * brute_force_ar1(0.9, k, 0)
            for k, mult in su2.tensor(1, su2.conjugate(1)).items()
        )
        discrepancy = abs(lhs - rhs)
        assert not report.passed, (
            "the check accepts the lambda = 0.9 recursion: for a real "
            "coefficient the Clebsch-Gordan tail reproduces the lag sums "
            f"exactly, so the (1,1) discrepancy is {discrepancy:.3g}, not a "
            "violation; only non-real coefficients are rejected"
        )
        witness = {(w.pi1, w.pi2): w for w in report.witnesses}[(1, 1)]
        assert witness.violation == pytest.approx(discrepancy, abs=1e-12)


def test_criterion_7c_recursion_equals_expansion():
    # |lam| = 2 doubles the path scale each step, so the absolute 1e-12
    # comparison is meaningful up to a window of eight or so.
    with criterion("7c", "simulated recursion equals its finite moving-average expansion exactly"):
        for lam in [0.0, 0.5, 1.0, 2.0]:
            noise = white_noise_sequence(9, seed=17)
            path = simulate_ar1(lam, 8, noise=noise)
            expansion = np.array(
                [sum(lam**k * noise[n - k] for k in range(n + 1)) for n in range(9)]
            )
            assert np.abs(path - expansion).max() < 1e-12


def _random_betas(rng):
    return [
        tuple(rng.normal(size=q + 1) + 1j * rng.normal(size=q + 1)) for q in range(4)
    ]


def test_criterion_8a_ma_monte_carlo():
    with criterion("8a", "moving-average covariance matches simulation within four standard errors"):
        rng = np.random.default_rng(808)
        for beta in _random_betas(rng):
            q = len(beta) - 1
            n = q
            paths = simulate_ma_batch(beta, n + q + 1, 100000, seed=909 + q)
            for h in range(q + 1):
                products = paths[:, n + h] * np.conj(paths[:, n])
                mean = products.mean()
                stderr = products.std(ddof=1) / math.sqrt(products.shape[0])
                assert abs(mean - ma_covariance(beta, h)) <= 4 * stderr


def test_criterion_8b_ma_n_independence():
    with criterion("8b", "moving-average estimates agree across start indices within four standard errors"):
        rng = np.random.default_rng(818)
        for beta in _random_betas(rng):
            q = len(beta) - 1
            for h in (0, min(1, q)):
                estimates = []
                for offset, n in enumerate((q, q + 10)):
                    paths = simulate_ma_batch(beta, n + h, 100000, seed=111 + q + offset)
                    products = paths[:, n + h] * np.conj(paths[:, n])
                    estimates.append(
                        (
                            products.mean(),
                            products.std(ddof=1) / math.sqrt(products.shape[0]),
                        )
                    )
                (m1, s1), (m2, s2) = estimates
                assert abs(m1 - m2) <= 4 * math.hypot(s1, s2)


def test_criterion_8c_ma_oracle_accepted_by_decomposable_check(su2):
    with criterion("8c", "exact moving-average oracles accepted by the decomposable check"):
        rng = np.random.default_rng(828)
        for beta in _random_betas(rng):
            report = check_stationarity(su2, ma_second_moment_oracle(beta), range(6))
            gamma2 = ma_covariance(beta, 2)
            assert report.passed, (
                f"rejected for q = {len(beta) - 1}: the decomposable right side "
                "adds every second lag covariance, e.g. the (1,1) pair picks up "
                f"gamma(2) = {gamma2:.3g}, so only memory q <= 1 with a real "
                "lag-one covariance can pass"
            )


def test_criterion_9_two_convolutions_separate(su2):
    with criterion(9, "the two convolutions separate: ring form accepted, normalized form rejected at (1,1)"):
        z = white_noise(su2, seed=23)
        ring = check_hypergroup_stationarity(
            su2, z.second_moment, range(5), kind="representation_ring"
        )
        assert ring.passed and ring.max_violation == 0.0
        normalized = check_hypergroup_stationarity(
            su2, z.second_moment, range(5), kind="normalized"
        )
        assert not normalized.passed
        witness = {(w.pi1, w.pi2): w for w in normalized.witnesses}[(1, 1)]
        assert witness.lhs == 1.0 + 0j
        assert witness.rhs == 0.25 + 0j


def test_criterion_10_inversion_round_trip(s3, q8):
    with criterion(10, "transform and inversion round-trip class weights at 1e-12; negatives are caught"):
        rng = np.random.default_rng(1010)
        for dual in (s3, q8):
            for _ in range(100):
                weights = rng.random(len(dual.labels()))
                measure = FiniteClassMeasure(dual, weights)
                phi = CovarianceOnDual.from_measure(measure, dual.labels())
                recovered = bochner_invert_finite(phi)
                assert np.abs(recovered.class_weights - weights).max() < 1e-12
        bad = CovarianceOnDual(s3, {0: 1.0, 1: 1.0, 2: -2.0})
        with pytest.raises(NotPositiveDefiniteError) as excinfo:
            bochner_invert_finite(bad)
        assert np.asarray(excinfo.value.weights).real.min() < -1e-10
