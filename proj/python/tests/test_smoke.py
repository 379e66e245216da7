import numpy as np
import pytest

import scir


def test_dimensions():
    assert scir.path_count() == 391
    img = scir.synthesize_image(0, 0)
    assert img.shape == (48, 64)
    assert scir.scattering_features(img).shape == (782,)
    assert scir.block_texture_features(img).shape == (168,)
    cfg = scir.PipelineConfig()
    assert cfg.feature_length == 950
    assert scir.FeatureExtractor(cfg).extract(img).shape == (950,)


def test_constant_image_scatters_to_its_level():
    f = scir.scattering_features(np.full((32, 32), 0.5), scales=3, orientations=4, layers=2)
    assert f[0] == pytest.approx(0.5)
    assert np.all(np.abs(f[1:]) < 1e-8)


def test_cooccurrence_example():
    labels = np.array([[0, 0, 1], [0, 1, 1], [2, 2, 2]])
    p = scir.cooccurrence(labels, 3)
    assert p.sum() == 6
    assert (p[0, 0], p[0, 1], p[1, 1], p[2, 2]) == (1, 2, 1, 2)
    f = scir.haralick14(np.array([[0, 1, 0, 1], [1, 0, 1, 0]]), 2)
    assert f[0] == pytest.approx(0.5)
    assert f[1] == pytest.approx(1.0)


def test_pca_and_matching():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(12, 5))
    model = scir.fit_pca(x)
    assert model.eigenvalues.shape == (5,)
    alpha = model.project(x[3], 5)
    np.testing.assert_allclose(model.reconstruct(alpha), x[3], atol=1e-10)
    assert model.retained_variance(5) == 1.0

    gallery = scir.Gallery(model.fingerprint)
    for i, row in enumerate(x):
        gallery.enroll(f"s{i % 3}", model.project(row, 3))
    match = gallery.identify(model.project(x[4], 3))
    assert match.subject == "s1"
    assert match.distance < 1e-12
    report = scir.evaluate(gallery, [("s1", model.project(x[4], 3))], [1, 2, 3])
    assert report.rank1_accuracy == 1.0
    assert [k for k, _ in report.curve] == [1, 2, 3]


def test_errors_carry_codes():
    with pytest.raises(scir.ScirError) as info:
        scir.scattering_features(np.zeros((33, 32)), scales=3)
    assert info.value.code == "IncompatibleSize"
    with pytest.raises(scir.ScirError):
        scir.load_image("/nonexistent/image.pgm")


def test_pipeline_round_trip(tmp_path):
    manifest = scir.generate_synthetic(tmp_path / "img", classes=3, per_class=4)
    assert scir.run_extract(manifest, tmp_path / "feat") == 12
    k, retained = scir.run_train(tmp_path / "feat", tmp_path / "m.bin", tmp_path / "g.bin", epsilon=0.99)
    assert retained >= 0.99
    report = scir.run_evaluate(tmp_path / "m.bin", tmp_path / "g.bin", manifest, [1, k])
    assert report.probe_count == 6
    assert 0.0 <= report.rank1_accuracy <= 1.0
    assert len(scir.Gallery.load(tmp_path / "g.bin")) == 6
    assert scir.load_image(tmp_path / "img" / "s000" / "img000.pgm").shape == (48, 64)
