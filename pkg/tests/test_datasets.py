import numpy as np
import pytest

from snnfault import load_csv, normalize_minmax, stratified_split
from snnfault.errors import DataLoadError, InputError


def write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestLoadCsv:
    def test_header_and_named_label(self, tmp_path):
        p = write(tmp_path, "a,b,label\n1,2,x\n3,4,y\n5,6,x\n")
        ds = load_csv(p, "label")
        assert ds.column_names == ["a", "b"]
        assert ds.features.shape == (3, 2)
        # first-appearance order: x -> 0, y -> 1
        assert ds.labels.tolist() == [0, 1, 0]
        assert ds.n_classes == 2

    def test_headerless_with_index_label(self, tmp_path):
        p = write(tmp_path, "1,2,0\n3,4,1\n")
        ds = load_csv(p, -1)
        assert ds.features.shape == (2, 2)
        assert ds.labels.tolist() == [0, 1]
        assert ds.column_names == ["col_0", "col_1"]

    def test_header_detected_with_index_label(self, tmp_path):
        p = write(tmp_path, "f1,f2,cls\n1,2,0\n3,4,1\n")
        ds = load_csv(p, 2)
        assert ds.column_names == ["f1", "f2"]
        assert ds.features.shape == (2, 2)

    def test_label_column_first(self, tmp_path):
        p = write(tmp_path, "label,a\nx,1\ny,2\n")
        ds = load_csv(p, "label")
        assert ds.features[:, 0].tolist() == [1.0, 2.0]

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataLoadError):
            load_csv(str(tmp_path / "nope.csv"))

    def test_empty_file(self, tmp_path):
        with pytest.raises(DataLoadError):
            load_csv(write(tmp_path, ""))

    def test_ragged_row_reports_location(self, tmp_path):
        p = write(tmp_path, "a,b,label\n1,2,x\n1,x\n1,2,y\n")
        with pytest.raises(DataLoadError) as exc:
            load_csv(p, "label")
        assert exc.value.row == 3

    def test_non_numeric_feature_reports_location(self, tmp_path):
        p = write(tmp_path, "a,b,label\n1,2,x\n1,oops,y\n")
        with pytest.raises(DataLoadError) as exc:
            load_csv(p, "label")
        assert exc.value.row == 3
        assert exc.value.column == "b"

    def test_single_class_rejected(self, tmp_path):
        p = write(tmp_path, "a,label\n1,x\n2,x\n")
        with pytest.raises(DataLoadError):
            load_csv(p, "label")

    def test_missing_label_name(self, tmp_path):
        p = write(tmp_path, "a,b\n1,2\n")
        with pytest.raises(DataLoadError):
            load_csv(p, "label")

    def test_breast_cancer_shape(self, bc_csv):
        ds = load_csv(bc_csv)
        assert ds.features.shape == (569, 30)
        assert ds.n_classes == 2

    def test_wine_shape(self, wine_csv):
        ds = load_csv(wine_csv)
        assert ds.features.shape == (178, 13)
        assert ds.n_classes == 3


class TestNormalize:
    def test_hand_example(self, tmp_path):
        p = write(tmp_path, "a,label\n2,x\n4,y\n6,x\n")
        ds = normalize_minmax(load_csv(p, "label"))
        assert ds.features[:, 0].tolist() == [0.0, 0.5, 1.0]

    def test_constant_column_maps_to_zero(self, tmp_path):
        p = write(tmp_path, "a,b,label\n5,1,x\n5,2,y\n5,3,x\n")
        ds = normalize_minmax(load_csv(p, "label"))
        assert (ds.features[:, 0] == 0.0).all()

    def test_idempotent(self, wine_csv):
        once = normalize_minmax(load_csv(wine_csv))
        twice = normalize_minmax(once)
        assert np.array_equal(once.features, twice.features)

    def test_order_preserved(self, wine_csv):
        raw = load_csv(wine_csv)
        norm = normalize_minmax(raw)
        for c in range(raw.n_columns):
            assert np.array_equal(np.argsort(raw.features[:, c], kind="stable"),
                                  np.argsort(norm.features[:, c], kind="stable"))

    def test_range(self, bc_csv):
        ds = normalize_minmax(load_csv(bc_csv))
        assert ds.features.min() >= 0.0 and ds.features.max() <= 1.0


class TestSplit:
    def make_balanced(self, tmp_path):
        rows = ["a,label"] + [f"{i},{i % 2}" for i in range(100)]
        return load_csv(write(tmp_path, "\n".join(rows) + "\n"), "label")

    def test_counts(self, tmp_path):
        ds = self.make_balanced(tmp_path)
        train, test = stratified_split(ds, 0.2, seed=0)
        assert test.n_samples == 20
        assert (test.labels == 0).sum() == 10
        assert (test.labels == 1).sum() == 10
        assert train.n_samples == 80

    def test_deterministic(self, tmp_path):
        ds = self.make_balanced(tmp_path)
        a1, b1 = stratified_split(ds, 0.2, seed=5)
        a2, b2 = stratified_split(ds, 0.2, seed=5)
        assert np.array_equal(a1.features, a2.features)
        assert np.array_equal(b1.features, b2.features)

    def test_disjoint_cover(self, tmp_path):
        ds = self.make_balanced(tmp_path)
        train, test = stratified_split(ds, 0.25, seed=1)
        seen = np.concatenate([train.features[:, 0], test.features[:, 0]])
        assert sorted(seen.tolist()) == sorted(ds.features[:, 0].tolist())
        assert set(train.features[:, 0]).isdisjoint(set(test.features[:, 0]))

    def test_proportions_within_one_sample(self, wine_dataset):
        train, test = stratified_split(wine_dataset, 0.2, seed=0)
        for c in range(wine_dataset.n_classes):
            n_c = (wine_dataset.labels == c).sum()
            expected = n_c * 0.2
            assert abs((test.labels == c).sum() - expected) <= 1

    def test_fraction_validation(self, wine_dataset):
        with pytest.raises(InputError):
            stratified_split(wine_dataset, 1.5, seed=0)
