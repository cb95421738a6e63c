"""
Test Suite for output files and run bookkeeping
CSV/JSON tables, run context, soft verifications and the allure environment
"""
import json
from fractions import Fraction

import allure
import numpy as np
import pytest

from src.core.utils.allure_environment_helper import AllureEnvironmentHelper
from src.core.utils.report_writer import ReportWriter, format_cell
from src.core.utils.run_context import RunContext
from src.core.utils.verification import Verification


class TestReportWriter:
    """Tables with a '#' metadata header and a JSON mirror"""

    @allure.feature("Reporting")
    @allure.story("Cells")
    @allure.severity(allure.severity_level.NORMAL)
    @pytest.mark.smoke
    @allure.suite("Reporting: writer")
    def test_format_cell(self):
        with allure.step("Exact, boolean, numeric and empty cells"):
            assert format_cell(Fraction(19, 4)) == "19/4"
            assert format_cell(Fraction(4, 1)) == "4"
            assert format_cell(True) == "true"
            assert format_cell(np.bool_(False)) == "false"
            assert format_cell(np.int64(3)) == "3"
            assert format_cell(np.float64(0.1)) == "0.1"
            assert format_cell(1 / 3) == "0.3333333333333333"
            assert format_cell(None) == ""
            assert format_cell("gamma") == "gamma"

    @allure.feature("Reporting")
    @allure.story("Tables")
    @allure.severity(allure.severity_level.CRITICAL)
    @pytest.mark.smoke
    @allure.suite("Reporting: writer")
    def test_csv_and_json_tables(self, tmp_path):
        context = RunContext(["bandspectra", "moments", "--lmax", "2"])
        writer = ReportWriter(str(tmp_path / "first"), context)
        columns = ["l", "value"]
        rows = [[1, Fraction(19, 4)], [2, 0.1]]

        with allure.step("CSV starts with the metadata header"):
            lines = writer.render_csv(columns, rows, {"gamma": Fraction(1, 2)}).splitlines()
            assert lines[0] == "# invocation: bandspectra moments --lmax 2"
            assert lines[1] == "# toolkit: bandspectra"
            assert lines[2] == "# version: 1.0.0"
            assert lines[3].startswith("# environment: ")
            assert lines[4:] == ["# gamma: 1/2", "l,value", "1,19/4", "2,0.1"]

        with allure.step("JSON mirror keeps rows keyed by column"):
            document = json.loads(writer.render_json(columns, rows, {"gamma": Fraction(1, 2)}))
            assert document["metadata"]["gamma"] == "1/2"
            assert document["columns"] == columns
            assert document["rows"] == [{"l": 1, "value": "19/4"}, {"l": 2, "value": 0.1}]

        with allure.step("Same inputs, byte-identical files"):
            first = writer.write_table("moments", columns, rows)
            second = ReportWriter(str(tmp_path / "second"), context).write_table("moments", columns, rows)
            for a, b in zip(first, second):
                with open(a, 'rb') as left, open(b, 'rb') as right:
                    assert left.read() == right.read()
            assert [path.rsplit(".", 1)[1] for path in first] == ["csv", "json"]


class TestRunContext:
    """Thread-safe invocation metadata"""

    @allure.feature("Reporting")
    @allure.story("Run context")
    @allure.severity(allure.severity_level.MINOR)
    @pytest.mark.smoke
    @allure.suite("Reporting: run context")
    def test_store_and_invocation(self):
        context = RunContext(["bandspectra", "test", "-m", "not slow"])

        with allure.step("Invocation is shell-quoted"):
            assert context.get_invocation() == "bandspectra test -m 'not slow'"

        with allure.step("Key/value store"):
            context.update({"environment": "prod", "seed": 7})
            assert context.has("seed")
            assert context.get("missing", "default") == "default"
            assert context.metadata()["environment"] == "prod"
            context.clear()
            assert context.get_all() == {}


class TestVerification:
    """Soft checks return booleans"""

    @allure.feature("Reporting")
    @allure.story("Verification")
    @allure.severity(allure.severity_level.MINOR)
    @pytest.mark.smoke
    @allure.suite("Reporting: verification")
    def test_soft_checks(self, verifier: Verification):
        with allure.step("Passing and failing outcomes"):
            assert verifier.verify_equals(Fraction(1, 2), Fraction(2, 4))
            assert not verifier.verify_equals(1, 2)
            assert verifier.verify_close(1.0, 1.0 + 1e-12)
            assert not verifier.verify_close(1.0, 1.1, rel_tol=0.01)
            assert verifier.verify_less_equal(0.5, 0.5)
            assert verifier.verify_within_range(0.3, 0.0, 1.0)
            assert verifier.verify_decreasing([0.3, 0.2, 0.1])
            assert not verifier.verify_decreasing([0.3, 0.3])
            assert verifier.verify_exception_raised(int, "x", exception_type=ValueError)
            assert not verifier.verify_exception_raised(int, "3", exception_type=ValueError)


class TestAllureEnvironment:
    """environment.properties and categories.json"""

    @allure.feature("Reporting")
    @allure.story("Allure environment")
    @allure.severity(allure.severity_level.MINOR)
    @pytest.mark.smoke
    @allure.suite("Reporting: allure")
    def test_environment_files(self, tmp_path):
        with allure.step("Both files are written"):
            files = AllureEnvironmentHelper().setup_allure_environment(str(tmp_path))
            properties = (tmp_path / "environment.properties").read_text(encoding="utf-8")
            assert files["environment_file"].endswith("environment.properties")
            assert "Toolkit=bandspectra" in properties
            assert "NumPy Version=" in properties

        with allure.step("Failures are grouped by exception"):
            categories = json.loads((tmp_path / "categories.json").read_text(encoding="utf-8"))
            assert [c["name"] for c in categories] == ["Value mismatches", "Budget exceeded",
                                                      "Numerical failures", "Skipped Tests"]
