import numpy as np
import pytest

from riembreg import (
    bregman_divergence,
    centroid,
    distance,
    em_gmm,
    embed,
    hac,
    hcpc,
    kmeans,
    make_generator,
    unembed,
)
from riembreg import _lloyd


def blob_data(seed=0, n=90):
    """Three positive 2-D blobs."""
    rng = np.random.default_rng(seed)
    centers = np.array([[2.0, 2.0], [7.0, 3.0], [4.5, 8.0]])
    pts = np.concatenate(
        [c + 0.4 * rng.normal(size=(n // 3, 2)) for c in centers]
    )
    labels = np.repeat(np.arange(3), n // 3)
    return np.abs(pts) + 0.05, labels


def test_kmeans_single_cluster_is_centroid():
    g = make_generator("shannon")
    pts, _ = blob_data()
    result = kmeans(pts, g, k=1, seed=0)
    assert np.allclose(result.centers[0], centroid(g, pts), rtol=1e-12)
    assert (result.assignments == 0).all()
    assert result.sizes.tolist() == [pts.shape[0]]


def test_kmeans_euclidean_equals_raw_core():
    pts, _ = blob_data(seed=1)
    result = kmeans(pts, make_generator("euclidean"), k=3, seed=5)
    rng = np.random.default_rng(5)
    init = _lloyd.kmeans_plus_plus(pts, 3, rng)
    _, labels, _, _ = _lloyd.lloyd_iterate(pts, init, 200, 1e-8)
    assert np.array_equal(result.assignments, labels)


@pytest.mark.parametrize("gname", ["shannon", "burg", "exp"])
def test_strategy_equivalence(gname):
    # clustering under g == plain Euclidean clustering of the embedded data
    g = make_generator(gname)
    pts, _ = blob_data(seed=2)
    emb = embed(g, pts)
    mine = kmeans(pts, g, k=3, seed=9)
    flat = kmeans(emb, make_generator("euclidean"), k=3, seed=9)
    assert np.array_equal(mine.assignments, flat.assignments)
    assert np.allclose(mine.centers, unembed(g, flat.centers), rtol=1e-10)
    for c in range(3):
        members = emb[mine.assignments == c]
        assert np.allclose(mine.centers[c], unembed(g, members.mean(axis=0)), rtol=1e-10)


def test_kmeans_objective_nonincreasing():
    pts, _ = blob_data(seed=3)
    g = make_generator("burg")
    Z = embed(g, pts)
    init = _lloyd.kmeans_plus_plus(Z, 3, np.random.default_rng(0))
    _, _, trace, _ = _lloyd.lloyd_iterate(Z, init, 200, 0.0)
    assert (np.diff(trace) <= 1e-12).all()


def test_kmeans_k_too_large():
    pts = np.array([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]])
    with pytest.raises(ValueError, match="distinct"):
        kmeans(pts, make_generator("euclidean"), k=3)


def test_left_sided_assignment_differs_from_metric_assignment():
    # 1-D instance where the divergence argmin and the metric argmin disagree
    g = make_generator("shannon")
    centers = np.array([[1.0], [4.0]])
    x = np.array([2.2])
    by_div = int(np.argmin([bregman_divergence(g, x, c) for c in centers]))
    by_dist = int(np.argmin([distance(g, x, c) for c in centers]))
    assert by_div == 1
    assert by_dist == 0


# --- EM -----------------------------------------------------------------------

def test_em_single_component():
    g = make_generator("shannon")
    pts, _ = blob_data(seed=4)
    result, model = em_gmm(pts, g, k=1, seed=0)
    assert (result.assignments == 0).all()
    assert np.allclose(model.means[0], embed(g, pts).mean(axis=0), rtol=1e-12)
    assert model.weights[0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("gname", ["euclidean", "burg"])
def test_em_loglikelihood_monotone(gname):
    g = make_generator(gname)
    rng = np.random.default_rng(5)
    for trial in range(8):
        pts = rng.uniform(0.3, 9.0, size=(60, 2))
        _, model = em_gmm(pts, g, k=int(rng.integers(2, 4)), seed=trial)
        ll = np.array(model.log_likelihood)
        assert (np.diff(ll) >= -1e-9).all()


def test_em_model_invariants():
    pts, _ = blob_data(seed=6)
    result, model = em_gmm(pts, make_generator("burg"), k=3, seed=1)
    assert model.weights.sum() == pytest.approx(1.0, abs=1e-12)
    for cov in model.covariances:
        assert np.allclose(cov, cov.T)
        assert np.linalg.eigvalsh(cov).min() >= 1e-13
    assert result.sizes.sum() == pts.shape[0]
    # centers of nonempty clusters are metric centroids of the hard members
    for c in range(3):
        members = pts[result.assignments == c]
        if members.shape[0]:
            assert np.allclose(result.centers[c], centroid(make_generator("burg"), members), rtol=1e-10)


def test_em_separates_blobs():
    pts, labels = blob_data(seed=7, n=120)
    result, _ = em_gmm(pts, make_generator("euclidean"), k=3, seed=0)
    from riembreg import accuracy

    assert accuracy(result.assignments, labels, 3) > 0.95


# --- HAC ------------------------------------------------------------------------

def test_hac_singletons():
    pts = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 1.0], [4.0, 4.0]])
    result = hac(pts, make_generator("euclidean"), k=4)
    assert sorted(result.assignments.tolist()) == [0, 1, 2, 3]
    assert result.sizes.tolist() == [1, 1, 1, 1]


def test_hac_single_linkage_pairs():
    pts = np.array([[0.1, 0.1], [0.2, 0.1], [5.0, 5.0], [5.1, 5.0]])
    result = hac(pts, make_generator("euclidean"), k=2, linkage="single")
    a = result.assignments
    assert a[0] == a[1] and a[2] == a[3] and a[0] != a[2]


@pytest.mark.parametrize("linkage", ["single", "average", "complete", "ward"])
def test_hac_linkages_run(linkage):
    pts, labels = blob_data(seed=8)
    result = hac(pts, make_generator("shannon"), k=3, linkage=linkage)
    assert result.sizes.sum() == pts.shape[0]
    for c in range(3):
        members = pts[result.assignments == c]
        assert np.allclose(result.centers[c], centroid(make_generator("shannon"), members), rtol=1e-10)


def test_hac_rejects_unknown_linkage():
    pts, _ = blob_data()
    with pytest.raises(ValueError, match="linkage"):
        hac(pts, make_generator("euclidean"), k=2, linkage="median")


def test_hac_permutation_equivariance():
    pts, _ = blob_data(seed=9)
    perm = np.random.default_rng(0).permutation(pts.shape[0])
    base = hac(pts, make_generator("burg"), k=3)
    permuted = hac(pts[perm], make_generator("burg"), k=3)
    # identical partitions up to cluster relabeling
    from riembreg import accuracy

    assert accuracy(permuted.assignments, base.assignments[perm], 3) == 1.0


# --- HCPC ---------------------------------------------------------------------------

def test_hcpc_full_rank_matches_hac_ward():
    pts, _ = blob_data(seed=10)
    g = make_generator("shannon")
    from riembreg import accuracy

    a = hcpc(pts, g, k=3, n_components=2, consolidate=False)
    b = hac(pts, g, k=3, linkage="ward")
    assert accuracy(a.assignments, b.assignments, 3) == 1.0


def test_hcpc_consolidation_does_not_worsen_objective():
    pts, _ = blob_data(seed=11)
    g = make_generator("burg")
    before = hcpc(pts, g, k=3, consolidate=False)
    after = hcpc(pts, g, k=3, consolidate=True)
    Z = embed(g, pts)

    def objective(labels):
        return sum(
            float(((Z[labels == c] - Z[labels == c].mean(axis=0)) ** 2).sum())
            for c in np.unique(labels)
        )

    assert objective(after.assignments) <= objective(before.assignments) + 1e-9


def test_hcpc_permutation_equivariance():
    pts, _ = blob_data(seed=12)
    perm = np.random.default_rng(1).permutation(pts.shape[0])
    base = hcpc(pts, make_generator("shannon"), k=3, consolidate=False)
    permuted = hcpc(pts[perm], make_generator("shannon"), k=3, consolidate=False)
    from riembreg import accuracy

    assert accuracy(permuted.assignments, base.assignments[perm], 3) == 1.0


def test_hcpc_zero_variance_rejected():
    pts = np.ones((10, 2))
    with pytest.raises(ValueError, match="zero-variance|distinct|variance"):
        hcpc(pts, make_generator("euclidean"), k=2)


def test_hcpc_component_bounds():
    pts, _ = blob_data()
    with pytest.raises(ValueError, match="n_components"):
        hcpc(pts, make_generator("euclidean"), k=2, n_components=5)


def test_standardize_flag_runs():
    pts, _ = blob_data(seed=13)
    for fn in (
        lambda: kmeans(pts, make_generator("shannon"), k=3, seed=0, standardize=True),
        lambda: em_gmm(pts, make_generator("shannon"), k=3, seed=0, standardize=True)[0],
        lambda: hac(pts, make_generator("shannon"), k=3, standardize=True),
        lambda: hcpc(pts, make_generator("shannon"), k=3, standardize=True),
    ):
        result = fn()
        assert result.sizes.sum() == pts.shape[0]


def test_result_serialization():
    pts, labels = blob_data(seed=14)
    result = kmeans(pts, make_generator("burg"), k=3, seed=2)
    payload = result.to_dict()
    assert payload["method"] == "kmeans"
    assert payload["generator"] == "burg"
    assert len(payload["assignments"]) == pts.shape[0]
    assert len(payload["centers"]) == 3
