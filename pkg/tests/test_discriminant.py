import numpy as np
import pytest
from conftest import gaussian_classes

from spectral_bench import discriminant as da
from spectral_bench import numkernel
from spectral_bench.errors import ClassTooSmall, GammaOutOfRange, MTooLarge, SingularWithinScatter


def small_sample(rng, n_per_class=7, j=100):
    return gaussian_classes(rng, n_per_class, j, spread=2.0)


def same_span(a, b, tol=1e-8):
    """Row spaces of ``a`` and ``b`` coincide."""
    qa, _ = np.linalg.qr(a.T)
    qb, _ = np.linalg.qr(b.T)
    return np.linalg.norm(qa @ qa.T - qb @ qb.T) < tol


def test_identical_means_zero_between(rng):
    base = rng.standard_normal((6, 4))
    base -= base.mean(axis=0)
    sc = da.scatter(np.vstack([base, base]), np.repeat([1, 2], 6))
    np.testing.assert_allclose(sc.s_b, 0.0, atol=1e-12)


def test_two_class_between(rng):
    a = rng.standard_normal((3, 5))
    delta = rng.standard_normal(5)
    # second class: two rows re-centered so its mean is mean(a) + delta
    b = a[:2] - a[:2].mean(axis=0) + a.mean(axis=0) + delta
    sc = da.scatter(np.vstack([a, b]), [1, 1, 1, 2, 2])
    np.testing.assert_allclose(sc.s_b, 3 * 2 / 5 * np.outer(delta, delta), atol=1e-12)


def test_total_scatter_decomposition(rng):
    x, labels = gaussian_classes(rng, 9, 6)
    sc = da.scatter(x, labels)
    xc = x - x.mean(axis=0)
    np.testing.assert_allclose(sc.s_b + sc.s_w, xc.T @ xc, atol=1e-8)
    np.testing.assert_allclose(sc.s_p, sc.s_w / (x.shape[0] - 3))


def test_class_too_small():
    with pytest.raises(ClassTooSmall):
        da.scatter(np.zeros((3, 2)), [1, 1, 2])


def test_fisher_direction_two_gaussians(rng):
    cov = np.array([[2.0, 0.8], [0.8, 1.0]])
    root = np.linalg.cholesky(cov)
    x = np.vstack([rng.standard_normal((200, 2)) @ root.T, rng.standard_normal((200, 2)) @ root.T + [4.0, 1.0]])
    labels = np.repeat([1, 2], 200)
    sc = da.scatter(x, labels)
    w = da.fit_lda(sc).projection[0]
    analytic = numkernel.solve(sc.s_w, sc.class_means[0] - sc.class_means[1])
    cos = abs(w @ analytic) / (np.linalg.norm(w) * np.linalg.norm(analytic))
    assert np.degrees(np.arccos(min(1.0, cos))) < 1.0


def test_lda_singular_when_n_small(rng):
    x, labels = gaussian_classes(rng, 10, 50, n_classes=2)
    with pytest.raises(SingularWithinScatter):
        da.fit_lda(da.scatter(x, labels))


def test_spherical_within_gives_between_eigenvectors(rng):
    x, labels = small_sample(rng, j=30)
    sc = da.scatter(x, labels)
    top = numkernel.sym_eigen(sc.s_b).eigenvectors[:, :2].T
    assert same_span(da.fit_slda(sc, 1.0).projection, top)


def test_dlda_whitening_and_rank(rng):
    x, labels = small_sample(rng)
    sc = da.scatter(x, labels)
    model = da.fit_dlda(sc)
    z = model.whitening
    np.testing.assert_allclose(z.T @ sc.s_b @ z, np.eye(z.shape[1]), atol=1e-8)
    assert model.projection.shape[0] <= 2 and model.m == 2
    with pytest.raises(SingularWithinScatter):
        da.fit_lda(sc)
    with pytest.raises(MTooLarge):
        da.fit_dlda(sc, m=3)


def test_dlda_projection_diagonalizes_within(rng):
    x, labels = small_sample(rng)
    sc = da.scatter(x, labels)
    a = da.fit_dlda(sc).projection
    np.testing.assert_allclose(a @ sc.s_w @ a.T, np.eye(a.shape[0]), atol=1e-8)


def test_slda_trace_and_eigen_monotone(rng):
    x, labels = small_sample(rng, j=40)
    sc = da.scatter(x, labels)
    grid = np.linspace(0.0, 1.0, 11)
    eig = [numkernel.sym_eigen(da.shrunken_covariance(sc.s_p, g)).eigenvalues for g in grid]
    traces = [np.trace(da.shrunken_covariance(sc.s_p, g)) for g in grid]
    np.testing.assert_allclose(traces, np.trace(sc.s_p), atol=1e-8)
    assert np.all(np.diff([e[0] for e in eig]) <= 1e-12)
    assert np.all(np.diff([e[-1] for e in eig]) >= -1e-12)


def test_slda_zero_gamma_is_lda(rng):
    x, labels = gaussian_classes(rng, 30, 5)
    sc = da.scatter(x, labels)
    np.testing.assert_allclose(da.fit_slda(sc, 0.0).projection, da.fit_lda(sc).projection, atol=1e-8)


def test_gamma_out_of_range(rng):
    x, labels = gaussian_classes(rng, 5, 3)
    with pytest.raises(GammaOutOfRange):
        da.fit_slda(da.scatter(x, labels), 1.5)


def test_mlda_floor(rng):
    x, labels = small_sample(rng, j=30)
    sc = da.scatter(x, labels)
    vals = numkernel.sym_eigen(sc.s_p).eigenvalues
    floored = numkernel.sym_eigen(da.mlda_covariance(sc.s_p)).eigenvalues
    lam_bar = vals.mean()
    np.testing.assert_allclose(floored, np.maximum(vals, lam_bar), atol=1e-8)
    assert floored[-1] == pytest.approx(lam_bar)


def test_mlda_spherical_unchanged():
    s = 2.5 * np.eye(4)
    np.testing.assert_allclose(da.mlda_covariance(s), s, atol=1e-12)


def test_centroid_and_tie_rule(rng):
    centroids = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 5.0]])
    assert da.nearest_centroid(centroids, centroids).tolist() == [1, 2, 3]
    assert da.nearest_centroid(np.array([[1.0, 0.0]]), centroids).tolist() == [1]
    assert da.nearest_centroid(np.array([[1.0, 2.5]]), centroids[1:]).tolist() == [1]


@pytest.mark.parametrize("fit", ["lda", "dlda", "slda", "mlda"])
def test_separable_accuracy(rng, fit):
    x, labels = gaussian_classes(rng, 60, 4, n_classes=2)
    x_test, labels_test = x[1::2], labels[1::2]
    sc = da.scatter(x[::2], labels[::2])
    model = {"lda": da.fit_lda, "dlda": da.fit_dlda, "mlda": da.fit_mlda}.get(fit, lambda s: da.fit_slda(s, 0.3))(sc)
    assert np.mean(da.classify(model, x_test) == labels_test) > 0.95


def test_scale_equivariance(rng):
    x, labels = small_sample(rng, j=20)
    for fit in (da.fit_mlda, da.fit_dlda, lambda s: da.fit_slda(s, 0.5)):
        a = da.classify(fit(da.scatter(x, labels)), x + 0.3)
        b = da.classify(fit(da.scatter(7.0 * x, labels)), 7.0 * (x + 0.3))
        assert np.array_equal(a, b)


def test_select_gamma_single_value(rng):
    x, labels = gaussian_classes(rng, 6, 4)
    assert da.select_gamma(x, labels, [0.25])[0] == 0.25


def test_select_gamma_avoids_singular(rng):
    x, labels = small_sample(rng, n_per_class=4, j=30)
    gamma, accuracy = da.select_gamma(x, labels, [0.0, 0.5, 1.0])
    assert gamma != 0.0 and accuracy[0] == 0.0
