import json

import pytest

from qetfigs import SchemaError, read_decay, read_profile, read_report


class TestProfileReader:
    def test_reads_synthetic(self, synthetic_profile):
        series = read_profile(synthetic_profile)
        assert series.sites == tuple(range(8))
        assert series.step1[2] == 0.5
        assert series.step3[6] == -0.25

    def test_missing_column_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("site,t_expect_step1\n0,1.0\n")
        with pytest.raises(SchemaError, match="t_expect_step3"):
            read_profile(path)

    def test_reordered_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t_expect_step1,site,t_expect_step3\n1.0,0,1.0\n")
        with pytest.raises(SchemaError, match="header"):
            read_profile(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(SchemaError, match="empty"):
            read_profile(path)

    def test_gapped_sites_rejected(self, tmp_path):
        path = tmp_path / "gap.csv"
        path.write_text("site,t_expect_step1,t_expect_step3\n0,0,0\n2,0,0\n")
        with pytest.raises(SchemaError, match="0..N-1"):
            read_profile(path)

    def test_non_numeric_rejected(self, tmp_path):
        path = tmp_path / "nan.csv"
        path.write_text("site,t_expect_step1,t_expect_step3\n0,zero,0\n")
        with pytest.raises(SchemaError, match="nan.csv:2"):
            read_profile(path)


class TestDecayReader:
    def test_requires_three_rows(self, tmp_path):
        path = tmp_path / "short.csv"
        path.write_text("distance,eta,e_b\n3,0.1,0.01\n4,0.05,0.003\n")
        with pytest.raises(SchemaError, match="3 rows"):
            read_decay(path)

    def test_requires_columns(self, tmp_path):
        path = tmp_path / "cols.csv"
        path.write_text("distance,xi\n3,1\n4,1\n5,1\n")
        with pytest.raises(SchemaError, match="eta"):
            read_decay(path)

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(SchemaError, match="empty"):
            read_decay(path)

    def test_extra_columns_tolerated(self, tmp_path):
        path = tmp_path / "full.csv"
        path.write_text(
            "distance,site_b,xi,eta,theta,e_a,e_b\n"
            "3,3,1.0,0.1,-0.01,0.6,0.01\n"
            "4,4,1.0,0.05,-0.005,0.6,0.003\n"
            "5,5,1.0,0.02,-0.002,0.6,0.0004\n"
        )
        series = read_decay(path)
        assert series.distance == (3.0, 4.0, 5.0)
        assert series.eta == (0.1, 0.05, 0.02)


class TestReportReader:
    def test_newer_major_refused(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text(json.dumps({"schema_version": 2, "results": {}}))
        with pytest.raises(SchemaError, match="newer"):
            read_report(path)

    def test_missing_version_refused(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text(json.dumps({"results": {}}))
        with pytest.raises(SchemaError, match="schema_version"):
            read_report(path)

    def test_current_version_accepted(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text(json.dumps({"schema_version": 1, "results": {"e_a": 0.5}}))
        assert read_report(path)["results"]["e_a"] == 0.5
