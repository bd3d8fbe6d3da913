
import pytest

from anthill.normattain.model.certificate import CertificateError, CertificateSheet, Inequality, SLACK_FLOOR


def test_strict_inequality_needs_slack_floor():
    assert Inequality("a < b", 1.0, 2.0).holds
    assert not Inequality("a < b", 1.0, 1.0).holds
    assert not Inequality("a < b", 1.0, 1.0 + SLACK_FLOOR / 2).holds


def test_non_strict_inequality_tolerates_rounding():
    assert Inequality("a <= b", 1.0, 1.0, strict=False).holds
    assert Inequality("a <= b", 1.0 + 1e-13, 1.0, strict=False).holds
    assert not Inequality("a <= b", 1.0 + 1e-9, 1.0, strict=False).holds


def test_describe_and_dump():
    inequality = Inequality("x < y", 0.5, 0.75, note="example")
    assert inequality.slack == 0.25
    assert "x < y" in inequality.describe()
    assert "slack 0.25" in inequality.describe()

    dumped = inequality.dump()
    assert dumped["holds"] is True
    assert dumped["note"] == "example"
    assert "note" not in Inequality("x < y", 0.5, 0.75).dump()


def test_sheet_require_raises_with_inequality():
    sheet = CertificateSheet("demo")
    sheet.require("fine", 0.0, 1.0)

    with pytest.raises(CertificateError) as e:
        sheet.require("broken", 2.0, 1.0)

    assert e.value.inequality.name == "broken"
    assert "broken" in str(e.value)
    assert len(sheet.inequalities) == 2
    assert not sheet.passed


def test_sheet_record_reports_only():
    sheet = CertificateSheet("demo")
    assert sheet.passed
    assert sheet.min_slack == float("inf")

    sheet.record("fine", 0.0, 1.0)
    sheet.record("broken", 2.0, 1.0)

    assert [inequality.name for inequality in sheet.failures] == ["broken"]
    assert sheet.min_slack == -1.0
    assert sheet.find("fine").slack == 1.0
    assert sheet.find("missing") is None
    assert len(sheet.lines()) == 2
    assert sheet.dump()["passed"] is False


def test_strict_min_slack_skips_tight_non_strict():
    sheet = CertificateSheet("a")
    sheet.record("tight", 1.0, 1.0, strict=False)
    sheet.record("strict", 0.25, 1.0)

    assert sheet.passed
    assert sheet.min_slack == 0.0
    assert sheet.strict_min_slack == 0.75
    assert CertificateSheet("empty").strict_min_slack == float("inf")


def test_certificate_error_names_step():
    assert str(CertificateError("bad")) == "bad"
    assert str(CertificateError("bad", step=3)) == "step 3: bad"
